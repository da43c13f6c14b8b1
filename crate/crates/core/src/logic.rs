//! Sorted first-order syntax: sorts, signatures, terms, literals and clauses.
//!
//! Everything here is immutable once built. Variables carry their sort on the
//! term node so grounding never needs a context lookup.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// Dense, 0-based index of a sort within a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId(pub u32);

impl SortId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl FunId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PredId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Where a symbol came from. Anything other than `Input` is an artifact of
/// clausification or preprocessing and is hidden from printed models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolOrigin {
    Input,
    Skolem,
    Definition,
    Split,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunSym {
    pub name: String,
    pub args: Vec<SortId>,
    pub ret: SortId,
    pub origin: SymbolOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredSym {
    pub name: String,
    pub args: Vec<SortId>,
    pub origin: SymbolOrigin,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub sorts: Vec<String>,
    pub functions: Vec<FunSym>,
    pub predicates: Vec<PredSym>,
}

impl Signature {
    pub fn add_sort(&mut self, name: impl Into<String>) -> SortId {
        self.sorts.push(name.into());
        SortId(self.sorts.len() as u32 - 1)
    }

    pub fn add_function(
        &mut self,
        name: impl Into<String>,
        args: Vec<SortId>,
        ret: SortId,
        origin: SymbolOrigin,
    ) -> FunId {
        self.functions.push(FunSym { name: name.into(), args, ret, origin });
        FunId(self.functions.len() as u32 - 1)
    }

    pub fn add_predicate(
        &mut self,
        name: impl Into<String>,
        args: Vec<SortId>,
        origin: SymbolOrigin,
    ) -> PredId {
        self.predicates.push(PredSym { name: name.into(), args, origin });
        PredId(self.predicates.len() as u32 - 1)
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s.index()]
    }

    pub fn function(&self, f: FunId) -> &FunSym {
        &self.functions[f.index()]
    }

    pub fn predicate(&self, p: PredId) -> &PredSym {
        &self.predicates[p.index()]
    }

    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s == name).map(|i| SortId(i as u32))
    }

    pub fn function_by_name(&self, name: &str) -> Option<FunId> {
        self.functions.iter().position(|f| f.name == name).map(|i| FunId(i as u32))
    }

    pub fn predicate_by_name(&self, name: &str) -> Option<PredId> {
        self.predicates.iter().position(|p| p.name == name).map(|i| PredId(i as u32))
    }

    /// True if `name` is already taken by any symbol or sort.
    pub fn name_in_use(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s == name)
            || self.functions.iter().any(|f| f.name == name)
            || self.predicates.iter().any(|p| p.name == name)
    }

    /// Returns `prefix<k>` for the smallest `k >= start` not already used.
    pub fn fresh_name(&self, prefix: &str, start: &mut usize) -> String {
        loop {
            let candidate = format!("{prefix}{start}");
            *start += 1;
            if !self.name_in_use(&candidate) {
                return candidate;
            }
        }
    }

    /// Function symbols whose result sort is `s`.
    pub fn producers(&self, s: SortId) -> impl Iterator<Item = FunId> + '_ {
        self.functions
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.ret == s)
            .map(|(i, _)| FunId(i as u32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub id: u32,
    pub sort: SortId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    App(FunId, Vec<Term>),
}

// Variables sort before applications so that normalized equalities put the
// application on the left: `f(x) = y`.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::Var(_), Term::App(..)) => Ordering::Less,
            (Term::App(..), Term::Var(_)) => Ordering::Greater,
            (Term::App(f, xs), Term::App(g, ys)) => f.cmp(g).then_with(|| xs.cmp(ys)),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Term {
    pub fn var(id: u32, sort: SortId) -> Term {
        Term::Var(Var { id, sort })
    }

    pub fn constant(f: FunId) -> Term {
        Term::App(f, Vec::new())
    }

    pub fn app(f: FunId, args: Vec<Term>) -> Term {
        Term::App(f, args)
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(..) => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn sort(&self, sig: &Signature) -> SortId {
        match self {
            Term::Var(v) => v.sort,
            Term::App(f, _) => sig.function(*f).ret,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Constants have depth 0, variables too.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => {
                if args.is_empty() {
                    0
                } else {
                    1 + args.iter().map(Term::depth).max().unwrap_or(0)
                }
            }
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Replaces every occurrence of `from` by `to`.
    pub fn replace_var(&self, from: Var, to: &Term) -> Term {
        match self {
            Term::Var(v) if *v == from => to.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.replace_var(from, to)).collect()),
        }
    }

    pub fn map_vars(&self, map: &mut impl FnMut(Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(map(*v)),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.map_vars(map)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Pred(PredId, Vec<Term>),
    Eq(SortId, Term, Term),
}

impl Atom {
    /// Builds an equality with a canonical orientation (larger term first).
    pub fn eq(sort: SortId, a: Term, b: Term) -> Atom {
        if a >= b {
            Atom::Eq(sort, a, b)
        } else {
            Atom::Eq(sort, b, a)
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Pred(_, args) => args.iter().collect(),
            Atom::Eq(_, l, r) => vec![l, r],
        }
    }

    fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Atom {
        match self {
            Atom::Pred(p, args) => Atom::Pred(*p, args.iter().map(&mut f).collect()),
            Atom::Eq(s, l, r) => Atom::eq(*s, f(l), f(r)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn new(positive: bool, atom: Atom) -> Literal {
        Literal { positive, atom }
    }

    pub fn pred(positive: bool, p: PredId, args: Vec<Term>) -> Literal {
        Literal::new(positive, Atom::Pred(p, args))
    }

    pub fn eq(positive: bool, sort: SortId, a: Term, b: Term) -> Literal {
        Literal::new(positive, Atom::eq(sort, a, b))
    }

    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, atom: self.atom.clone() }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for t in self.atom.terms() {
            t.collect_vars(out);
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn replace_var(&self, from: Var, to: &Term) -> Literal {
        Literal { positive: self.positive, atom: self.atom.map_terms(|t| t.replace_var(from, to)) }
    }

    pub fn map_vars(&self, map: &mut impl FnMut(Var) -> Var) -> Literal {
        Literal { positive: self.positive, atom: self.atom.map_terms(|t| t.map_vars(map)) }
    }

    /// `x != y` between two variables.
    pub fn is_variable_inequality(&self) -> Option<(Var, Var)> {
        match &self.atom {
            Atom::Eq(_, Term::Var(a), Term::Var(b)) if !self.positive => Some((*a, *b)),
            _ => None,
        }
    }
}

/// A disjunction of literals; variables are implicitly universal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Clause {
        Clause { literals }
    }

    pub fn empty() -> Clause {
        Clause { literals: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for l in &self.literals {
            l.collect_vars(&mut out);
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn max_var_id(&self) -> Option<u32> {
        self.vars().iter().map(|v| v.id).max()
    }

    /// Deterministic literal order, duplicate removal and variable renumbering
    /// (by first occurrence, starting at 0). Tautologies are *not* removed here.
    pub fn normalized(&self) -> Clause {
        let mut lits = self.literals.clone();
        // Two rounds: the renumbering depends on the order and vice versa; a
        // second pass makes the result stable under input permutations in the
        // common cases.
        for _ in 0..2 {
            lits.sort();
            lits.dedup();
            let mut order: Vec<u32> = Vec::new();
            for l in &lits {
                for t in l.atom.terms() {
                    first_occurrence(t, &mut order);
                }
            }
            let mut rename = |v: Var| Var {
                id: order.iter().position(|&id| id == v.id).unwrap() as u32,
                sort: v.sort,
            };
            lits = lits.iter().map(|l| l.map_vars(&mut rename)).collect();
        }
        lits.sort();
        lits.dedup();
        Clause { literals: lits }
    }

    /// True when the clause contains `L` and `~L`, or a positive `t = t`.
    pub fn is_tautology(&self) -> bool {
        self.literals.iter().any(|l| {
            if let Atom::Eq(_, a, b) = &l.atom {
                if l.positive && a == b {
                    return true;
                }
            }
            l.positive && self.literals.contains(&l.negated())
        })
    }

    /// Drops literals `t != t`, which are false in every interpretation.
    pub fn without_trivially_false(&self) -> Clause {
        Clause {
            literals: self
                .literals
                .iter()
                .filter(|l| !matches!(&l.atom, Atom::Eq(_, a, b) if !l.positive && a == b))
                .cloned()
                .collect(),
        }
    }
}

fn first_occurrence(t: &Term, order: &mut Vec<u32>) {
    match t {
        Term::Var(v) => {
            if !order.contains(&v.id) {
                order.push(v.id);
            }
        }
        Term::App(_, args) => args.iter().for_each(|a| first_occurrence(a, order)),
    }
}

/// A signature plus clause set: the unit of input to the model finder.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub signature: Signature,
    pub clauses: Vec<Clause>,
    /// One entry per clause naming the input formula it came from.
    pub provenance: Vec<String>,
}

impl Problem {
    pub fn new(signature: Signature) -> Problem {
        Problem { signature, clauses: Vec::new(), provenance: Vec::new() }
    }

    pub fn push(&mut self, clause: Clause, origin: impl Into<String>) {
        self.clauses.push(clause);
        self.provenance.push(origin.into());
    }
}

/// Per-sort domain sizes; a node of the search graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomainSizes(Vec<u32>);

impl DomainSizes {
    /// Panics if a size is zero.
    pub fn new(sizes: Vec<u32>) -> DomainSizes {
        assert!(sizes.iter().all(|&n| n >= 1), "domain sizes must be positive");
        DomainSizes(sizes)
    }

    pub fn ones(sorts: usize) -> DomainSizes {
        DomainSizes(vec![1; sorts])
    }

    pub fn uniform(sorts: usize, n: u32) -> DomainSizes {
        DomainSizes::new(vec![n; sorts])
    }

    pub fn get(&self, s: SortId) -> u32 {
        self.0[s.index()]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `s`-child: one larger in sort `s`.
    pub fn child(&self, s: SortId) -> DomainSizes {
        let mut v = self.0.clone();
        v[s.index()] += 1;
        DomainSizes(v)
    }

    /// A copy with sort `s` set to `n`.
    pub fn with(&self, s: SortId, n: u32) -> DomainSizes {
        let mut v = self.0.clone();
        v[s.index()] = n;
        DomainSizes(v)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| n as u64).sum()
    }

    pub fn sorts(&self) -> impl Iterator<Item = SortId> {
        (0..self.0.len() as u32).map(SortId)
    }
}

impl fmt::Display for DomainSizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Index of the offending clause.
    pub clause: usize,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause {} ({}): {}", self.clause, self.location, self.message)
    }
}

/// Checks every term and literal against the signature's sort discipline.
/// Returns one diagnostic per violation; empty means well-sorted.
pub fn check_well_sorted(problem: &Problem) -> Vec<Diagnostic> {
    let sig = &problem.signature;
    let mut out = Vec::new();
    for (ci, clause) in problem.clauses.iter().enumerate() {
        let location = problem.provenance.get(ci).cloned().unwrap_or_default();
        let mut report = |message: String| {
            out.push(Diagnostic { clause: ci, location: location.clone(), message })
        };
        for lit in &clause.literals {
            match &lit.atom {
                Atom::Pred(p, args) => {
                    if p.index() >= sig.predicates.len() {
                        report(format!("unknown predicate #{}", p.0));
                        continue;
                    }
                    let sym = sig.predicate(*p);
                    check_args(sig, &sym.name, &sym.args, args, &mut report);
                }
                Atom::Eq(s, l, r) => {
                    for t in [l, r] {
                        if let Some(ts) = check_term(sig, t, &mut report) {
                            if ts != *s {
                                report(format!(
                                    "equality at sort {} has an operand of sort {}",
                                    sort_label(sig, *s),
                                    sort_label(sig, ts)
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn sort_label(sig: &Signature, s: SortId) -> String {
    sig.sorts.get(s.index()).cloned().unwrap_or_else(|| format!("#{}", s.0))
}

fn check_args(
    sig: &Signature,
    name: &str,
    expected: &[SortId],
    args: &[Term],
    report: &mut impl FnMut(String),
) {
    if expected.len() != args.len() {
        report(format!("{name} expects {} arguments, got {}", expected.len(), args.len()));
    }
    for (i, (want, arg)) in expected.iter().zip(args).enumerate() {
        if let Some(got) = check_term(sig, arg, report) {
            if got != *want {
                report(format!(
                    "argument {} of {name} has sort {}, expected {}",
                    i + 1,
                    sort_label(sig, got),
                    sort_label(sig, *want)
                ));
            }
        }
    }
}

/// Returns the term's sort if it could be determined.
fn check_term(sig: &Signature, t: &Term, report: &mut impl FnMut(String)) -> Option<SortId> {
    match t {
        Term::Var(v) => {
            if v.sort.index() >= sig.sorts.len() {
                report(format!("variable X{} has unknown sort #{}", v.id, v.sort.0));
                None
            } else {
                Some(v.sort)
            }
        }
        Term::App(f, args) => {
            if f.index() >= sig.functions.len() {
                report(format!("unknown function #{}", f.0));
                return None;
            }
            let sym = sig.function(*f);
            check_args(sig, &sym.name, &sym.args, args, report);
            Some(sym.ret)
        }
    }
}

/// Sentinel returned by [`count_dc_instances`] when the product overflows.
pub const INSTANCE_COUNT_CAP: u64 = u64::MAX;

/// Number of domain-constant instances of `clause`: the product over its
/// distinct variables of the size of each variable's sort.
pub fn count_dc_instances(clause: &Clause, sizes: &DomainSizes) -> u64 {
    clause
        .vars()
        .iter()
        .try_fold(1u64, |acc, v| acc.checked_mul(sizes.get(v.sort) as u64))
        .unwrap_or(INSTANCE_COUNT_CAP)
}

/// Pretty printing against a signature.
pub struct Show<'a, T: ?Sized> {
    pub sig: &'a Signature,
    pub item: &'a T,
}

pub fn show<'a, T: ?Sized>(sig: &'a Signature, item: &'a T) -> Show<'a, T> {
    Show { sig, item }
}

impl fmt::Display for Show<'_, Term> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item {
            Term::Var(v) => write!(f, "X{}", v.id),
            Term::App(g, args) => {
                write!(f, "{}", self.sig.function(*g).name)?;
                write_args(f, self.sig, args)
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, sig: &Signature, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    write!(f, "(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", show(sig, a))?;
    }
    write!(f, ")")
}

impl fmt::Display for Show<'_, Literal> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.item.atom {
            Atom::Pred(p, args) => {
                if !self.item.positive {
                    write!(f, "~")?;
                }
                write!(f, "{}", self.sig.predicate(*p).name)?;
                write_args(f, self.sig, args)
            }
            Atom::Eq(_, l, r) => {
                let op = if self.item.positive { "=" } else { "!=" };
                write!(f, "{} {op} {}", show(self.sig, l), show(self.sig, r))
            }
        }
    }
}

impl fmt::Display for Show<'_, Clause> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.item.literals.is_empty() {
            return write!(f, "$false");
        }
        for (i, l) in self.item.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{}", show(self.sig, l))?;
        }
        Ok(())
    }
}
