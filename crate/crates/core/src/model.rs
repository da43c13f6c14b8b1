//! Finite models: extraction from SAT assignments, translation back to the
//! input signature, exhaustive verification, text format, and a brute-force
//! model enumerator used as an oracle.

use crate::encode::{Encoding, GroundInfo, Mode, VarMeaning};
use crate::logic::{Atom, Clause, DomainSizes, FunId, Literal, PredId, Problem, Signature, SortId, Term, Var};
use crate::sorts::{Collapse, Expansion};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use thiserror::Error;

/// Sizes plus total function tables and predicate tables. Tables are indexed
/// by the argument tuple read as a mixed-radix number, first argument most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModel {
    pub sizes: DomainSizes,
    pub functions: Vec<Vec<u32>>,
    pub predicates: Vec<Vec<bool>>,
}

fn tuple_count(sizes: &DomainSizes, sorts: &[SortId]) -> usize {
    sorts.iter().map(|s| sizes.get(*s) as usize).product()
}

fn tuple_index(sizes: &DomainSizes, sorts: &[SortId], args: &[u32]) -> usize {
    sorts.iter().zip(args).fold(0usize, |acc, (s, a)| acc * sizes.get(*s) as usize + *a as usize)
}

fn tuple_at(sizes: &DomainSizes, sorts: &[SortId], mut idx: usize) -> Vec<u32> {
    let mut out = vec![0; sorts.len()];
    for (k, s) in sorts.iter().enumerate().rev() {
        let n = sizes.get(*s) as usize;
        out[k] = (idx % n) as u32;
        idx /= n;
    }
    out
}

impl FiniteModel {
    /// A model with every table entry set to element 0 and every predicate false.
    pub fn blank(sig: &Signature, sizes: DomainSizes) -> FiniteModel {
        let functions = sig.functions.iter().map(|f| vec![0; tuple_count(&sizes, &f.args)]).collect();
        let predicates = sig.predicates.iter().map(|q| vec![false; tuple_count(&sizes, &q.args)]).collect();
        FiniteModel { sizes, functions, predicates }
    }

    pub fn fun(&self, sig: &Signature, f: FunId, args: &[u32]) -> u32 {
        self.functions[f.index()][tuple_index(&self.sizes, &sig.function(f).args, args)]
    }

    pub fn pred(&self, sig: &Signature, p: PredId, args: &[u32]) -> bool {
        self.predicates[p.index()][tuple_index(&self.sizes, &sig.predicate(p).args, args)]
    }

    pub fn eval_term(&self, sig: &Signature, t: &Term, env: &BTreeMap<Var, u32>) -> u32 {
        match t {
            Term::Var(v) => env[v],
            Term::App(f, args) => {
                let vals: Vec<u32> = args.iter().map(|a| self.eval_term(sig, a, env)).collect();
                self.fun(sig, *f, &vals)
            }
        }
    }

    pub fn eval_literal(&self, sig: &Signature, l: &Literal, env: &BTreeMap<Var, u32>) -> bool {
        let v = match &l.atom {
            Atom::Pred(p, args) => {
                let vals: Vec<u32> = args.iter().map(|a| self.eval_term(sig, a, env)).collect();
                self.pred(sig, *p, &vals)
            }
            Atom::Eq(_, a, b) => self.eval_term(sig, a, env) == self.eval_term(sig, b, env),
        };
        v == l.positive
    }

    /// Checks structural invariants: table shapes and element ranges.
    pub fn well_formed(&self, sig: &Signature) -> bool {
        self.sizes.len() == sig.sort_count()
            && self.functions.len() == sig.functions.len()
            && self.predicates.len() == sig.predicates.len()
            && sig.functions.iter().zip(&self.functions).all(|(f, t)| {
                t.len() == tuple_count(&self.sizes, &f.args) && t.iter().all(|v| *v < self.sizes.get(f.ret))
            })
            && sig.predicates.iter().zip(&self.predicates).all(|(q, t)| t.len() == tuple_count(&self.sizes, &q.args))
    }
}

/// A clause instance the model makes false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub clause: usize,
    pub assignment: Vec<(Var, u32)>,
}

impl Counterexample {
    pub fn describe(&self, p: &Problem) -> String {
        let mut s = format!("clause {} ({})", self.clause, crate::logic::show(&p.signature, &p.clauses[self.clause]));
        if !self.assignment.is_empty() {
            let parts: Vec<String> = self.assignment.iter().map(|(v, e)| format!("X{}=e{}", v.id, e + 1)).collect();
            let _ = write!(s, " fails at {}", parts.join(", "));
        }
        s
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("model is not well formed for the signature")]
    Malformed,
    #[error("clause instance is false: clause {}", .0.clause)]
    Violated(Counterexample),
    #[error("{0} clause instances exceed the verification limit")]
    TooLarge(u64),
}

/// Default cap on the number of clause instances `verify` evaluates.
pub const VERIFY_LIMIT: u64 = 50_000_000;

fn assignments(vars: &[Var], sizes: &DomainSizes) -> impl Iterator<Item = Vec<u32>> {
    let ranges: Vec<u32> = vars.iter().map(|v| sizes.get(v.sort)).collect();
    let mut cur: Option<Vec<u32>> = Some(vec![0; vars.len()]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut k = next.len();
        cur = loop {
            if k == 0 {
                break None;
            }
            k -= 1;
            next[k] += 1;
            if next[k] < ranges[k] {
                break Some(next);
            }
            next[k] = 0;
        };
        Some(out)
    })
}

/// Evaluates every clause under every sort-respecting substitution.
pub fn verify(p: &Problem, m: &FiniteModel, limit: u64) -> Result<(), VerifyError> {
    let sig = &p.signature;
    if !m.well_formed(sig) {
        return Err(VerifyError::Malformed);
    }
    let total: u64 = p.clauses.iter().map(|c| crate::logic::count_dc_instances(c, &m.sizes)).fold(0, u64::saturating_add);
    if total > limit {
        return Err(VerifyError::TooLarge(total));
    }
    for (ci, c) in p.clauses.iter().enumerate() {
        let vars: Vec<Var> = c.vars().into_iter().collect();
        for a in assignments(&vars, &m.sizes) {
            let env: BTreeMap<Var, u32> = vars.iter().copied().zip(a.iter().copied()).collect();
            if !c.literals.iter().any(|l| m.eval_literal(sig, l, &env)) {
                return Err(VerifyError::Violated(Counterexample { clause: ci, assignment: vars.iter().copied().zip(a).collect() }));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("principal term {0} has {1} true values")]
    NotFunctional(String, usize),
    #[error("principal term {0} takes a value outside its sort")]
    OutOfRange(String),
}

/// Reads a model off a satisfying assignment. Contour sizes are the smallest
/// `i` with `bound_s(i)` false; monotonic sorts stay at their bound.
pub fn extract(enc: &Encoding, info: &GroundInfo, sig: &Signature, sat: &[bool]) -> Result<FiniteModel, ExtractError> {
    let n = &enc.sizes;
    let sizes = match enc.mode {
        Mode::Contour => DomainSizes::new(
            n.sorts()
                .map(|s| {
                    if info.contour_monotonic(s) {
                        n.get(s)
                    } else {
                        (1..=n.get(s)).find(|&i| !sat[enc.table.bound(s, i) as usize]).unwrap_or(n.get(s))
                    }
                })
                .collect(),
        ),
        _ => n.clone(),
    };
    let clamp = |args: &mut [u32], sorts: &[SortId], bounds: &[Option<u32>]| {
        for ((a, s), b) in args.iter_mut().zip(sorts).zip(bounds) {
            if let Some(b) = b {
                if *a >= (*b).min(n.get(*s)) {
                    *a = 0;
                }
            }
        }
    };
    let mut model = FiniteModel::blank(sig, sizes.clone());
    for (fi, f) in sig.functions.iter().enumerate() {
        let fid = FunId(fi as u32);
        let values = info.fun_ret_bound[fi].map_or(n.get(f.ret), |b| b.min(n.get(f.ret)));
        for idx in 0..model.functions[fi].len() {
            let mut args = tuple_at(&sizes, &f.args, idx);
            clamp(&mut args, &f.args, &info.fun_arg_bound[fi]);
            let trues: Vec<u32> = (0..values).filter(|&d| sat[enc.table.fun_var(fid, &args, d) as usize]).collect();
            let name = || format!("{}{:?}", f.name, args);
            if trues.len() != 1 {
                return Err(ExtractError::NotFunctional(name(), trues.len()));
            }
            if trues[0] >= sizes.get(f.ret) {
                return Err(ExtractError::OutOfRange(name()));
            }
            model.functions[fi][idx] = trues[0];
        }
    }
    for (qi, q) in sig.predicates.iter().enumerate() {
        for idx in 0..model.predicates[qi].len() {
            let mut args = tuple_at(&sizes, &q.args, idx);
            clamp(&mut args, &q.args, &info.pred_arg_bound[qi]);
            model.predicates[qi][idx] = sat[enc.table.pred_var(PredId(qi as u32), &args) as usize];
        }
    }
    debug_assert!(model.well_formed(sig));
    Ok(model)
}

/// What preprocessing did to the sorts, for mapping models back.
#[derive(Clone, Debug, Default)]
pub struct TransformLog {
    pub collapse: Option<Collapse>,
    pub expansions: Vec<Expansion>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("sort {0} is larger than the sort it was split from")]
    SubsortTooLarge(String),
}

/// Maps a model of the preprocessed problem (signature `fin`) to one of the
/// original signature `orig`. Preprocessing only appends symbols, so
/// symbols of `orig` keep their indices. A collapsed sort reports the merged
/// sort's size; an expanded subsort's element `i` is the parent's element
/// `i`, and parent elements beyond the subsort behave like element 0.
pub fn translate_back(m: &FiniteModel, fin: &Signature, orig: &Signature, log: &TransformLog) -> Result<FiniteModel, TranslateError> {
    let home = |s: SortId| match &log.collapse {
        Some(c) if c.members.contains(&s) => c.sort,
        _ => s,
    };
    for e in &log.expansions {
        if m.sizes.get(e.sort) > m.sizes.get(e.parent) {
            return Err(TranslateError::SubsortTooLarge(fin.sort_name(e.sort).to_string()));
        }
    }
    let sizes = DomainSizes::new((0..orig.sort_count() as u32).map(|s| m.sizes.get(home(SortId(s)))).collect());
    let mut out = FiniteModel::blank(orig, sizes.clone());
    for (fi, f) in orig.functions.iter().enumerate() {
        let ff = &fin.functions[fi];
        for idx in 0..out.functions[fi].len() {
            let mut args = tuple_at(&sizes, &f.args, idx);
            for (a, s) in args.iter_mut().zip(&ff.args) {
                if *a >= m.sizes.get(*s) {
                    *a = 0;
                }
            }
            out.functions[fi][idx] = m.functions[fi][tuple_index(&m.sizes, &ff.args, &args)];
        }
    }
    for (qi, q) in orig.predicates.iter().enumerate() {
        let fq = &fin.predicates[qi];
        for idx in 0..out.predicates[qi].len() {
            let mut args = tuple_at(&sizes, &q.args, idx);
            for (a, s) in args.iter_mut().zip(&fq.args) {
                if *a >= m.sizes.get(*s) {
                    *a = 0;
                }
            }
            out.predicates[qi][idx] = m.predicates[qi][tuple_index(&m.sizes, &fq.args, &args)];
        }
    }
    Ok(out)
}

fn element(e: u32) -> String {
    format!("e{}", e + 1)
}

fn elements(args: &[u32]) -> String {
    args.iter().map(|a| element(*a)).collect::<Vec<_>>().join(",")
}

/// Text form: a domain line per sort, one line per function table entry,
/// one line per true predicate tuple.
///
/// ```text
/// sort $i = { e1 e2 }
/// a = e1
/// f(e1) = e2
/// p(e2)
/// ```
pub fn print_model(m: &FiniteModel, sig: &Signature) -> String {
    let mut out = String::new();
    for s in m.sizes.sorts() {
        let elems: Vec<String> = (0..m.sizes.get(s)).map(element).collect();
        let _ = writeln!(out, "sort {} = {{ {} }}", sig.sort_name(s), elems.join(" "));
    }
    for (fi, f) in sig.functions.iter().enumerate() {
        for (idx, v) in m.functions[fi].iter().enumerate() {
            if f.args.is_empty() {
                let _ = writeln!(out, "{} = {}", f.name, element(*v));
            } else {
                let args = tuple_at(&m.sizes, &f.args, idx);
                let _ = writeln!(out, "{}({}) = {}", f.name, elements(&args), element(*v));
            }
        }
    }
    for (qi, q) in sig.predicates.iter().enumerate() {
        for (idx, v) in m.predicates[qi].iter().enumerate() {
            if !*v {
                continue;
            }
            if q.args.is_empty() {
                let _ = writeln!(out, "{}", q.name);
            } else {
                let _ = writeln!(out, "{}({})", q.name, elements(&tuple_at(&m.sizes, &q.args, idx)));
            }
        }
    }
    out
}

/// Restricts a model to the symbols accepted by `keep`, returning the
/// smaller signature alongside.
pub fn restrict(m: &FiniteModel, sig: &Signature, keep: impl Fn(crate::logic::SymbolOrigin) -> bool) -> (FiniteModel, Signature) {
    let mut s = Signature { sorts: sig.sorts.clone(), functions: Vec::new(), predicates: Vec::new() };
    let mut out = FiniteModel { sizes: m.sizes.clone(), functions: Vec::new(), predicates: Vec::new() };
    for (f, t) in sig.functions.iter().zip(&m.functions) {
        if keep(f.origin) {
            s.functions.push(f.clone());
            out.functions.push(t.clone());
        }
    }
    for (q, t) in sig.predicates.iter().zip(&m.predicates) {
        if keep(q.origin) {
            s.predicates.push(q.clone());
            out.predicates.push(t.clone());
        }
    }
    (out, s)
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ModelParseError {
    pub line: usize,
    pub message: String,
}

/// Inverse of [`print_model`] for the same signature.
pub fn parse_model(text: &str, sig: &Signature) -> Result<FiniteModel, ModelParseError> {
    let err = |line: usize, message: String| ModelParseError { line, message };
    let parse_elem = |line: usize, t: &str| -> Result<u32, ModelParseError> {
        t.trim()
            .strip_prefix('e')
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|n| *n >= 1)
            .map(|n| n - 1)
            .ok_or_else(|| err(line, format!("bad element `{t}`")))
    };
    let split_app = |line: usize, t: &str| -> Result<(String, Vec<u32>), ModelParseError> {
        let t = t.trim();
        match t.find('(') {
            None => Ok((t.to_string(), Vec::new())),
            Some(open) => {
                let inner = t[open + 1..].strip_suffix(')').ok_or_else(|| err(line, "missing `)`".into()))?;
                let args = inner.split(',').map(|a| parse_elem(line, a)).collect::<Result<Vec<_>, _>>()?;
                Ok((t[..open].to_string(), args))
            }
        }
    };
    let mut sizes = vec![None; sig.sort_count()];
    let mut fun_lines = Vec::new();
    let mut pred_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('%') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("sort ") {
            let (name, dom) = rest.split_once('=').ok_or_else(|| err(line, "expected `=`".into()))?;
            let s = sig.sort_by_name(name.trim()).ok_or_else(|| err(line, format!("unknown sort `{}`", name.trim())))?;
            let dom = dom.trim().strip_prefix('{').and_then(|d| d.strip_suffix('}')).ok_or_else(|| err(line, "expected `{ ... }`".into()))?;
            let elems: Vec<u32> = dom.split_whitespace().map(|e| parse_elem(line, e)).collect::<Result<_, _>>()?;
            if elems.is_empty() || elems.iter().enumerate().any(|(k, e)| *e != k as u32) {
                return Err(err(line, "domain must be e1 .. ek".into()));
            }
            sizes[s.index()] = Some(elems.len() as u32);
        } else if let Some((lhs, rhs)) = l.split_once('=') {
            fun_lines.push((line, lhs.to_string(), rhs.to_string()));
        } else {
            pred_lines.push((line, l.to_string()));
        }
    }
    let sizes: Vec<u32> = sizes
        .iter()
        .enumerate()
        .map(|(s, n)| n.ok_or_else(|| err(0, format!("missing domain for sort `{}`", sig.sorts[s]))))
        .collect::<Result<_, _>>()?;
    let sizes = DomainSizes::new(sizes);
    let mut m = FiniteModel::blank(sig, sizes.clone());
    let mut seen: Vec<Vec<bool>> = m.functions.iter().map(|t| vec![false; t.len()]).collect();
    let in_range = |args: &[u32], sorts: &[SortId]| args.len() == sorts.len() && args.iter().zip(sorts).all(|(a, s)| *a < sizes.get(*s));
    for (line, lhs, rhs) in fun_lines {
        let (name, args) = split_app(line, &lhs)?;
        let f = sig.function_by_name(&name).ok_or_else(|| err(line, format!("unknown function `{name}`")))?;
        let fs = sig.function(f);
        let v = parse_elem(line, &rhs)?;
        if !in_range(&args, &fs.args) || v >= sizes.get(fs.ret) {
            return Err(err(line, "element out of range".into()));
        }
        let idx = tuple_index(&sizes, &fs.args, &args);
        seen[f.index()][idx] = true;
        m.functions[f.index()][idx] = v;
    }
    for (fi, s) in seen.iter().enumerate() {
        if s.iter().any(|x| !x) {
            return Err(err(0, format!("incomplete table for `{}`", sig.functions[fi].name)));
        }
    }
    for (line, text) in pred_lines {
        let (name, args) = split_app(line, &text)?;
        let q = sig.predicate_by_name(&name).ok_or_else(|| err(line, format!("unknown predicate `{name}`")))?;
        if !in_range(&args, &sig.predicate(q).args) {
            return Err(err(line, "element out of range".into()));
        }
        let idx = tuple_index(&sizes, &sig.predicate(q).args, &args);
        m.predicates[q.index()][idx] = true;
    }
    Ok(m)
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model of sizes {}", self.sizes)
    }
}

/// Outcome of the brute-force enumerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteForce {
    Model(FiniteModel),
    NoModel,
    GaveUp,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Cell {
    Fun(usize, usize),
    Pred(usize, usize),
}

struct Enumerator<'a> {
    sig: &'a Signature,
    sizes: &'a DomainSizes,
    instances: Vec<(&'a Clause, Vec<(Var, u32)>)>,
    cells: Vec<Cell>,
    cell_order: BTreeMap<Cell, usize>,
    fun: Vec<Vec<Option<u32>>>,
    pred: Vec<Vec<Option<bool>>>,
    nodes: u64,
    budget: u64,
}

enum Eval<T> {
    Known(T),
    Blocked(usize),
}

impl Enumerator<'_> {
    fn term(&self, t: &Term, env: &[(Var, u32)]) -> Eval<u32> {
        match t {
            Term::Var(v) => Eval::Known(env.iter().find(|(w, _)| w == v).unwrap().1),
            Term::App(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.term(a, env) {
                        Eval::Known(v) => vals.push(v),
                        b => return b,
                    }
                }
                let idx = tuple_index(self.sizes, &self.sig.function(*f).args, &vals);
                match self.fun[f.index()][idx] {
                    Some(v) => Eval::Known(v),
                    None => Eval::Blocked(self.cell_order[&Cell::Fun(f.index(), idx)]),
                }
            }
        }
    }

    fn literal(&self, l: &Literal, env: &[(Var, u32)]) -> Eval<bool> {
        let v = match &l.atom {
            Atom::Pred(p, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.term(a, env) {
                        Eval::Known(v) => vals.push(v),
                        Eval::Blocked(c) => return Eval::Blocked(c),
                    }
                }
                let idx = tuple_index(self.sizes, &self.sig.predicate(*p).args, &vals);
                match self.pred[p.index()][idx] {
                    Some(v) => v,
                    None => return Eval::Blocked(self.cell_order[&Cell::Pred(p.index(), idx)]),
                }
            }
            Atom::Eq(_, a, b) => match (self.term(a, env), self.term(b, env)) {
                (Eval::Known(x), Eval::Known(y)) => x == y,
                (Eval::Blocked(c), Eval::Blocked(d)) => return Eval::Blocked(c.min(d)),
                (Eval::Blocked(c), _) | (_, Eval::Blocked(c)) => return Eval::Blocked(c),
            },
        };
        Eval::Known(v == l.positive)
    }

    /// `Known(false)` when every literal is false; blocked on the earliest
    /// unassigned cell otherwise.
    fn clause(&self, i: usize) -> Eval<bool> {
        let (c, env) = &self.instances[i];
        let mut blocked: Option<usize> = None;
        for l in &c.literals {
            match self.literal(l, env) {
                Eval::Known(true) => return Eval::Known(true),
                Eval::Known(false) => {}
                Eval::Blocked(cell) => blocked = Some(blocked.map_or(cell, |b| b.min(cell))),
            }
        }
        blocked.map_or(Eval::Known(false), Eval::Blocked)
    }

    fn set(&mut self, cell: Cell, v: Option<u32>) {
        match cell {
            Cell::Fun(f, i) => self.fun[f][i] = v,
            Cell::Pred(p, i) => self.pred[p][i] = v.map(|x| x == 1),
        }
    }

    fn domain(&self, cell: Cell) -> u32 {
        match cell {
            Cell::Fun(f, _) => self.sizes.get(self.sig.functions[f].ret),
            Cell::Pred(..) => 2,
        }
    }

    /// Cells read while evaluating instance `i`, all of them assigned.
    fn reads(&self, i: usize) -> BTreeSet<usize> {
        let (c, env) = &self.instances[i];
        let mut out = BTreeSet::new();
        for l in &c.literals {
            match &l.atom {
                Atom::Pred(p, args) => {
                    let vals: Vec<u32> = args.iter().map(|a| self.read_term(a, env, &mut out)).collect();
                    let idx = tuple_index(self.sizes, &self.sig.predicate(*p).args, &vals);
                    out.insert(self.cell_order[&Cell::Pred(p.index(), idx)]);
                }
                Atom::Eq(_, a, b) => {
                    self.read_term(a, env, &mut out);
                    self.read_term(b, env, &mut out);
                }
            }
        }
        out
    }

    fn read_term(&self, t: &Term, env: &[(Var, u32)], out: &mut BTreeSet<usize>) -> u32 {
        match t {
            Term::Var(v) => env.iter().find(|(w, _)| w == v).unwrap().1,
            Term::App(f, args) => {
                let vals: Vec<u32> = args.iter().map(|a| self.read_term(a, env, out)).collect();
                let idx = tuple_index(self.sizes, &self.sig.function(*f).args, &vals);
                out.insert(self.cell_order[&Cell::Fun(f.index(), idx)]);
                self.fun[f.index()][idx].expect("read of an unassigned cell")
            }
        }
    }

    /// Backtracking with conflict-directed backjumping. `watch[c]` holds
    /// instances blocked on cell `c`; a conflict names the cells to blame.
    fn search(&mut self, depth: usize, watch: &mut Vec<Vec<usize>>) -> Step {
        if depth == self.cells.len() {
            return Step::Found;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::GaveUp;
        }
        let cell = self.cells[depth];
        let waiting = std::mem::take(&mut watch[depth]);
        let mut blame = BTreeSet::new();
        for v in 0..self.domain(cell) {
            self.set(cell, Some(v));
            let mut pushed: Vec<usize> = Vec::new();
            let mut failed = None;
            for &i in &waiting {
                match self.clause(i) {
                    Eval::Known(true) => {}
                    Eval::Known(false) => {
                        failed = Some(i);
                        break;
                    }
                    Eval::Blocked(c) => {
                        watch[c].push(i);
                        pushed.push(c);
                    }
                }
            }
            let step = match failed {
                Some(i) => Step::Conflict(self.reads(i)),
                None => self.search(depth + 1, watch),
            };
            match step {
                Step::Found => return Step::Found,
                Step::GaveUp => return Step::GaveUp,
                Step::Conflict(mut c) => {
                    for c in pushed.into_iter().rev() {
                        watch[c].pop();
                    }
                    if !c.remove(&depth) {
                        // this cell played no part: jump past it
                        self.set(cell, None);
                        watch[depth] = waiting;
                        return Step::Conflict(c);
                    }
                    blame.extend(c);
                }
            }
        }
        self.set(cell, None);
        watch[depth] = waiting;
        Step::Conflict(blame)
    }
}

enum Step {
    Found,
    Conflict(BTreeSet<usize>),
    GaveUp,
}

/// Looks for a model of `p` at exactly `sizes` by backtracking over table
/// entries, evaluating original clauses directly. Independent of the
/// encoder, for use as an oracle. Gives up after `budget` search nodes.
pub fn find_model(p: &Problem, sizes: &DomainSizes, budget: u64) -> BruteForce {
    let sig = &p.signature;
    let mut instances = Vec::new();
    for c in &p.clauses {
        let vars: Vec<Var> = c.vars().into_iter().collect();
        for a in assignments(&vars, sizes) {
            instances.push((c, vars.iter().copied().zip(a).collect::<Vec<_>>()));
        }
    }
    let mut cells = Vec::new();
    for (fi, f) in sig.functions.iter().enumerate() {
        cells.extend((0..tuple_count(sizes, &f.args)).map(|i| Cell::Fun(fi, i)));
    }
    for (qi, q) in sig.predicates.iter().enumerate() {
        cells.extend((0..tuple_count(sizes, &q.args)).map(|i| Cell::Pred(qi, i)));
    }
    // constants first: they appear in the most ground literals
    cells.sort_by_key(|c| match *c {
        Cell::Fun(f, _) => (usize::from(!sig.functions[f].args.is_empty()), *c),
        Cell::Pred(..) => (1, *c),
    });
    let cell_order = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut e = Enumerator {
        sig,
        sizes,
        instances,
        cells,
        cell_order,
        fun: sig.functions.iter().map(|f| vec![None; tuple_count(sizes, &f.args)]).collect(),
        pred: sig.predicates.iter().map(|q| vec![None; tuple_count(sizes, &q.args)]).collect(),
        nodes: 0,
        budget,
    };
    let mut watch = vec![Vec::new(); e.cells.len() + 1];
    for i in 0..e.instances.len() {
        match e.clause(i) {
            Eval::Known(true) => {}
            Eval::Known(false) => return BruteForce::NoModel,
            Eval::Blocked(c) => watch[c].push(i),
        }
    }
    match e.search(0, &mut watch) {
        Step::GaveUp => BruteForce::GaveUp,
        Step::Conflict(_) => BruteForce::NoModel,
        Step::Found => BruteForce::Model(FiniteModel {
            sizes: sizes.clone(),
            functions: e.fun.iter().map(|t| t.iter().map(|v| v.unwrap()).collect()).collect(),
            predicates: e.pred.iter().map(|t| t.iter().map(|v| v.unwrap()).collect()).collect(),
        }),
    }
}

/// Meaning of a SAT variable in `enc`, for debugging output.
pub fn describe_var(enc: &Encoding, sig: &Signature, var: u32) -> String {
    match enc.table.meaning(var) {
        Some(VarMeaning::Fun(f, args, v)) => format!("{}({}) = {}", sig.function(f).name, elements(&args), element(v)),
        Some(VarMeaning::Pred(q, args)) => format!("{}({})", sig.predicate(q).name, elements(&args)),
        Some(VarMeaning::Larger(s)) => format!("|{}|>{}", sig.sort_name(s), enc.sizes.get(s)),
        Some(VarMeaning::Smaller(s)) => format!("|{}|<{}", sig.sort_name(s), enc.sizes.get(s)),
        Some(VarMeaning::Bound(s, i)) => format!("bound_{}({i})", sig.sort_name(s)),
        None => format!("?{var}"),
    }
}
