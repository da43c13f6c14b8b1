//! Clause-level transforms that run before grounding: removing variable
//! disequalities, flattening, definition introduction and clause splitting.

use crate::logic::{Atom, Clause, FunId, Literal, PredId, Problem, Signature, SymbolOrigin, Term, Var};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A literal in one of the three flat shapes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlatLit {
    /// `p(x1..xm)` or its negation.
    Pred { positive: bool, pred: PredId, args: Vec<Var> },
    /// `f(x1..xm) = y` or `f(x1..xm) != y`.
    Fun { positive: bool, fun: FunId, args: Vec<Var>, result: Var },
    /// `x = y`.
    VarEq { lhs: Var, rhs: Var },
}

impl FlatLit {
    pub fn vars(&self) -> Vec<Var> {
        match self {
            FlatLit::Pred { args, .. } => args.clone(),
            FlatLit::Fun { args, result, .. } => args.iter().copied().chain(std::iter::once(*result)).collect(),
            FlatLit::VarEq { lhs, rhs } => vec![*lhs, *rhs],
        }
    }

    pub fn to_literal(&self, sig: &Signature) -> Literal {
        match self {
            FlatLit::Pred { positive, pred, args } => {
                Literal::pred(*positive, *pred, args.iter().map(|v| Term::Var(*v)).collect())
            }
            FlatLit::Fun { positive, fun, args, result } => Literal::eq(
                *positive,
                sig.function(*fun).ret,
                Term::app(*fun, args.iter().map(|v| Term::Var(*v)).collect()),
                Term::Var(*result),
            ),
            FlatLit::VarEq { lhs, rhs } => Literal::eq(true, lhs.sort, Term::Var(*lhs), Term::Var(*rhs)),
        }
    }

    pub fn from_literal(l: &Literal) -> Option<FlatLit> {
        let all_vars = |ts: &[Term]| ts.iter().map(Term::as_var).collect::<Option<Vec<Var>>>();
        match &l.atom {
            Atom::Pred(p, args) => Some(FlatLit::Pred { positive: l.positive, pred: *p, args: all_vars(args)? }),
            Atom::Eq(_, Term::Var(a), Term::Var(b)) => {
                if l.positive {
                    Some(FlatLit::VarEq { lhs: *a, rhs: *b })
                } else {
                    None
                }
            }
            Atom::Eq(_, Term::App(f, args), Term::Var(y)) | Atom::Eq(_, Term::Var(y), Term::App(f, args)) => {
                Some(FlatLit::Fun { positive: l.positive, fun: *f, args: all_vars(args)?, result: *y })
            }
            Atom::Eq(..) => None,
        }
    }
}

/// A clause whose literals are all flat, with its variables listed in id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatClause {
    pub literals: Vec<FlatLit>,
    pub vars: Vec<Var>,
}

impl FlatClause {
    pub fn new(mut literals: Vec<FlatLit>) -> FlatClause {
        literals.sort();
        literals.dedup();
        let vars: BTreeSet<Var> = literals.iter().flat_map(|l| l.vars()).collect();
        FlatClause { literals, vars: vars.into_iter().collect() }
    }

    /// `None` unless every literal is flat.
    pub fn from_clause(c: &Clause) -> Option<FlatClause> {
        Some(FlatClause::new(c.literals.iter().map(FlatLit::from_literal).collect::<Option<_>>()?))
    }

    pub fn to_clause(&self, sig: &Signature) -> Clause {
        Clause::new(self.literals.iter().map(|l| l.to_literal(sig)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// Signature plus flat clauses; what grounding consumes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatProblem {
    pub signature: Signature,
    pub clauses: Vec<FlatClause>,
}

impl FlatProblem {
    pub fn to_problem(&self) -> Problem {
        let mut p = Problem::new(self.signature.clone());
        for (i, c) in self.clauses.iter().enumerate() {
            p.push(c.to_clause(&self.signature), format!("flat#{i}"));
        }
        p
    }
}

/// Replaces `x != y | C[x]` by `C[y]` until no variable disequality remains.
pub fn eliminate_variable_inequalities(clause: &Clause) -> Clause {
    let mut current = clause.without_trivially_false();
    while let Some(pos) = current.literals.iter().position(|l| l.is_variable_inequality().is_some()) {
        let (x, y) = current.literals[pos].is_variable_inequality().unwrap();
        let rest: Vec<Literal> = current
            .literals
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, l)| l.replace_var(x, &Term::Var(y)))
            .collect();
        current = Clause::new(rest).without_trivially_false();
    }
    current
}

struct Flattener<'a> {
    sig: &'a Signature,
    next_var: u32,
    names: HashMap<Term, Var>,
    defs: Vec<FlatLit>,
}

impl Flattener<'_> {
    /// A variable standing for `t`, adding `f(..) != v` definitions as needed.
    fn name(&mut self, t: &Term) -> Var {
        match t {
            Term::Var(v) => *v,
            Term::App(f, args) => {
                if let Some(v) = self.names.get(t) {
                    return *v;
                }
                let args: Vec<Var> = args.iter().map(|a| self.name(a)).collect();
                let v = Var { id: self.next_var, sort: self.sig.function(*f).ret };
                self.next_var += 1;
                self.defs.push(FlatLit::Fun { positive: false, fun: *f, args, result: v });
                self.names.insert(t.clone(), v);
                v
            }
        }
    }
}

/// Rewrites a clause into flat form by repeatedly replacing a nested
/// non-variable term `t` with a fresh variable `x` and adding `t != x`.
/// Identical subterms share one variable. Expects variable disequalities to be
/// gone already; any left over are eliminated first.
pub fn flatten(clause: &Clause, sig: &Signature) -> FlatClause {
    let clause = eliminate_variable_inequalities(clause);
    let mut fl = Flattener {
        sig,
        next_var: clause.max_var_id().map_or(0, |m| m + 1),
        names: HashMap::new(),
        defs: Vec::new(),
    };
    let mut out = Vec::new();
    for lit in &clause.literals {
        let flat = match &lit.atom {
            Atom::Pred(p, args) => FlatLit::Pred {
                positive: lit.positive,
                pred: *p,
                args: args.iter().map(|a| fl.name(a)).collect(),
            },
            Atom::Eq(_, Term::Var(a), Term::Var(b)) => FlatLit::VarEq { lhs: *a, rhs: *b },
            Atom::Eq(_, Term::App(f, args), rhs) | Atom::Eq(_, rhs, Term::App(f, args)) => {
                let result = fl.name(rhs);
                let args = args.iter().map(|a| fl.name(a)).collect();
                FlatLit::Fun { positive: lit.positive, fun: *f, args, result }
            }
        };
        out.push(flat);
    }
    out.extend(fl.defs);
    FlatClause::new(out)
}

/// Replaces nested ground subterms of depth at least `depth_threshold` by fresh
/// constants with defining unit equalities. Structurally equal subterms share a
/// definition. With `non_ground`, nested non-ground terms are named too, by
/// functions over their variables.
pub fn introduce_definitions(
    clauses: &[Clause],
    sig: &mut Signature,
    depth_threshold: usize,
    non_ground: bool,
) -> (Vec<Clause>, Vec<FunId>) {
    let mut defs: BTreeMap<Term, Term> = BTreeMap::new();
    let mut new_syms = Vec::new();
    let mut def_clauses = Vec::new();
    let mut counter = 0usize;

    fn replace(
        t: &Term,
        nested: bool,
        threshold: usize,
        non_ground: bool,
        sig: &mut Signature,
        defs: &mut BTreeMap<Term, Term>,
        new_syms: &mut Vec<FunId>,
        def_clauses: &mut Vec<Clause>,
        counter: &mut usize,
    ) -> Term {
        let Term::App(f, args) = t else { return t.clone() };
        let args: Vec<Term> = args
            .iter()
            .map(|a| replace(a, true, threshold, non_ground, sig, defs, new_syms, def_clauses, counter))
            .collect();
        let rebuilt = Term::App(*f, args);
        let eligible = nested && t.depth() >= threshold.max(1) && (non_ground || t.is_ground());
        if !eligible {
            return rebuilt;
        }
        if let Some(name) = defs.get(&rebuilt) {
            return name.clone();
        }
        let mut vars = BTreeSet::new();
        rebuilt.collect_vars(&mut vars);
        let vars: Vec<Var> = vars.into_iter().collect();
        let ret = sig.function(*f).ret;
        let name = sig.fresh_name("e", counter);
        let e = sig.add_function(name, vars.iter().map(|v| v.sort).collect(), ret, SymbolOrigin::Definition);
        new_syms.push(e);
        let named = Term::app(e, vars.iter().map(|v| Term::Var(*v)).collect());
        def_clauses.push(Clause::new(vec![Literal::eq(true, ret, named.clone(), rebuilt.clone())]).normalized());
        defs.insert(rebuilt, named.clone());
        named
    }

    let mut out = Vec::with_capacity(clauses.len());
    for c in clauses {
        let lits = c
            .literals
            .iter()
            .map(|l| {
                let atom = match &l.atom {
                    Atom::Pred(p, args) => Atom::Pred(
                        *p,
                        args.iter()
                            .map(|a| replace(a, true, depth_threshold, non_ground, sig, &mut defs, &mut new_syms, &mut def_clauses, &mut counter))
                            .collect(),
                    ),
                    Atom::Eq(s, a, b) => Atom::eq(
                        *s,
                        replace(a, false, depth_threshold, non_ground, sig, &mut defs, &mut new_syms, &mut def_clauses, &mut counter),
                        replace(b, false, depth_threshold, non_ground, sig, &mut defs, &mut new_syms, &mut def_clauses, &mut counter),
                    ),
                };
                Literal::new(l.positive, atom)
            })
            .collect();
        out.push(Clause::new(lits).normalized());
    }
    out.extend(def_clauses);
    (out, new_syms)
}

/// Splits flat clauses with more than `max_vars` variables into pieces joined
/// by fresh predicates over the shared variables.
///
/// Each cut takes the literals containing one variable `v` as one part and the
/// rest as the other; `v` is chosen to minimise the larger part's variable
/// count, ties going to the variable seen first. Clauses no cut can shrink are
/// left alone.
pub fn split_clauses(clauses: &[FlatClause], sig: &mut Signature, max_vars: usize) -> (Vec<FlatClause>, Vec<PredId>) {
    assert!(max_vars >= 2, "splitting needs at least two variables per piece");
    let mut out = Vec::new();
    let mut new_preds = Vec::new();
    let mut counter = 0usize;
    let mut work: Vec<FlatClause> = clauses.iter().rev().cloned().collect();
    while let Some(c) = work.pop() {
        if c.vars.len() <= max_vars {
            out.push(c);
            continue;
        }
        match best_cut(&c) {
            None => out.push(c),
            Some((part, rest, shared)) => {
                let name = sig.fresh_name("sP", &mut counter);
                let p = sig.add_predicate(name, shared.iter().map(|v| v.sort).collect(), SymbolOrigin::Split);
                new_preds.push(p);
                let mut a = part;
                a.push(FlatLit::Pred { positive: true, pred: p, args: shared.clone() });
                let mut b = rest;
                b.push(FlatLit::Pred { positive: false, pred: p, args: shared });
                // the remainder goes first so pieces come out in chain order
                work.push(FlatClause::new(b));
                work.push(FlatClause::new(a));
            }
        }
    }
    (out, new_preds)
}

type Cut = (Vec<FlatLit>, Vec<FlatLit>, Vec<Var>);

fn best_cut(c: &FlatClause) -> Option<Cut> {
    let mut order: Vec<Var> = Vec::new();
    for l in &c.literals {
        for v in l.vars() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    let total = c.vars.len();
    let mut best: Option<(usize, Cut)> = None;
    for v in order {
        let (part, rest): (Vec<FlatLit>, Vec<FlatLit>) = c.literals.iter().cloned().partition(|l| l.vars().contains(&v));
        if rest.is_empty() {
            continue;
        }
        let pv: BTreeSet<Var> = part.iter().flat_map(|l| l.vars()).collect();
        let rv: BTreeSet<Var> = rest.iter().flat_map(|l| l.vars()).collect();
        let shared: Vec<Var> = pv.intersection(&rv).copied().collect();
        // sizes after adding the joining literal
        let a = pv.len();
        let b = rv.len();
        if a >= total || b >= total {
            continue;
        }
        let cost = a.max(b);
        if best.as_ref().is_none_or(|(c0, _)| cost < *c0) {
            best = Some((cost, (part, rest, shared)));
        }
    }
    best.map(|(_, cut)| cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{show, SortId};

    fn running_sig() -> (Signature, SortId, FunId, FunId, FunId, PredId) {
        let mut sig = Signature::default();
        let s = sig.add_sort("$i");
        let b = sig.add_function("b", vec![], s, SymbolOrigin::Input);
        let f = sig.add_function("f", vec![s], s, SymbolOrigin::Input);
        let a = sig.add_function("a", vec![], s, SymbolOrigin::Input);
        let p = sig.add_predicate("p", vec![s], SymbolOrigin::Input);
        (sig, s, b, f, a, p)
    }

    fn shown(sig: &Signature, c: &FlatClause) -> String {
        show(sig, &c.to_clause(sig).normalized()).to_string()
    }

    #[test]
    fn variable_inequality_unfolds() {
        let (_, s, _, _, _, p) = running_sig();
        let (x, y) = (Term::var(0, s), Term::var(1, s));
        let c = Clause::new(vec![Literal::eq(false, s, x.clone(), y.clone()), Literal::pred(true, p, vec![x.clone()])]);
        let out = eliminate_variable_inequalities(&c);
        assert_eq!(out.literals.len(), 1);
        assert_eq!(out.vars().len(), 1);
        let keep = Clause::new(vec![Literal::pred(true, p, vec![x.clone()]), Literal::eq(true, s, x.clone(), y.clone())]);
        assert_eq!(eliminate_variable_inequalities(&keep), keep);
        let only = Clause::new(vec![Literal::eq(false, s, x, y)]);
        assert!(eliminate_variable_inequalities(&only).is_empty());
    }

    #[test]
    fn flatten_running_example() {
        let (sig, s, b, f, a, p) = running_sig();
        let x = Term::var(0, s);
        let pb = Clause::new(vec![Literal::pred(true, p, vec![Term::constant(b)])]);
        assert_eq!(shown(&sig, &flatten(&pb, &sig)), "b != X0 | p(X0)");
        let inv = Clause::new(vec![Literal::eq(true, s, Term::app(f, vec![Term::app(f, vec![x.clone()])]), x)]);
        assert_eq!(shown(&sig, &flatten(&inv, &sig)), "f(X0) != X1 | f(X1) = X0");
        let fa = Clause::new(vec![Literal::eq(false, s, Term::app(f, vec![Term::constant(a)]), Term::constant(b))]);
        let flat = flatten(&fa, &sig);
        assert_eq!(flat.vars.len(), 2);
        assert_eq!(shown(&sig, &flat), "b != X0 | f(X1) != X0 | a != X1");
    }

    #[test]
    fn shared_subterms_share_a_variable() {
        let (sig, s, b, f, _, p) = running_sig();
        let fb = Term::app(f, vec![Term::constant(b)]);
        let c = Clause::new(vec![Literal::pred(true, p, vec![fb.clone()]), Literal::pred(false, p, vec![fb])]);
        let _ = s;
        let flat = flatten(&c, &sig);
        assert_eq!(flat.vars.len(), 2);
    }

    #[test]
    fn definitions_for_nested_ground_terms() {
        let mut sig = Signature::default();
        let s = sig.add_sort("$i");
        let a = sig.add_function("a", vec![], s, SymbolOrigin::Input);
        let b = sig.add_function("b", vec![], s, SymbolOrigin::Input);
        let f = sig.add_function("f", vec![s, s], s, SymbolOrigin::Input);
        let g = sig.add_function("g", vec![s], s, SymbolOrigin::Input);
        let p = sig.add_predicate("p", vec![s, s], SymbolOrigin::Input);
        let fab = Term::app(f, vec![Term::constant(a), Term::constant(b)]);
        let c = Clause::new(vec![Literal::pred(true, p, vec![fab.clone(), Term::app(g, vec![fab])])]);
        let (out, syms) = introduce_definitions(&[c], &mut sig, 1, false);
        assert_eq!(syms.len(), 2);
        let shown: Vec<String> = out.iter().map(|c| show(&sig, c).to_string()).collect();
        assert_eq!(shown, vec!["p(e0,e1)", "e0 = f(a,b)", "e1 = g(e0)"]);
    }

    #[test]
    fn definitions_leave_flat_input_alone() {
        let (mut sig, s, b, f, a, p) = running_sig();
        let c = vec![
            Clause::new(vec![Literal::pred(true, p, vec![Term::constant(b)])]),
            Clause::new(vec![Literal::eq(false, s, Term::app(f, vec![Term::constant(a)]), Term::constant(b))]),
        ];
        let (out, syms) = introduce_definitions(&c, &mut sig, 1, false);
        assert!(syms.is_empty());
        assert_eq!(out, c.iter().map(Clause::normalized).collect::<Vec<_>>());
    }

    #[test]
    fn deep_ground_terms_end_up_shallow() {
        let (mut sig, s, b, f, _, p) = running_sig();
        let mut t = Term::constant(b);
        for _ in 0..5 {
            t = Term::app(f, vec![t]);
        }
        assert_eq!(t.depth(), 5);
        let c = Clause::new(vec![Literal::pred(true, p, vec![t.clone()]), Literal::eq(false, s, t, Term::var(0, s))]);
        let (out, syms) = introduce_definitions(&[c], &mut sig, 1, false);
        assert_eq!(syms.len(), 5);
        for c in &out {
            let depth = c.literals.iter().flat_map(|l| l.atom.terms()).map(Term::depth).max().unwrap();
            assert!(depth <= 1, "{}", show(&sig, c));
        }
    }

    #[test]
    fn split_long_clause_example() {
        let mut sig = Signature::default();
        let s = sig.add_sort("$i");
        let p = sig.add_predicate("p", vec![s, s], SymbolOrigin::Input);
        let q = sig.add_predicate("q", vec![s, s], SymbolOrigin::Input);
        let (x, y, z) = (Var { id: 0, sort: s }, Var { id: 1, sort: s }, Var { id: 2, sort: s });
        let c = FlatClause::new(vec![
            FlatLit::Pred { positive: true, pred: p, args: vec![x, y] },
            FlatLit::Pred { positive: true, pred: q, args: vec![y, z] },
        ]);
        let (out, preds) = split_clauses(&[c.clone()], &mut sig, 2);
        assert_eq!(preds.len(), 1);
        let shown: Vec<String> = out.iter().map(|c| show(&sig, &c.to_clause(&sig)).to_string()).collect();
        assert_eq!(shown, vec!["p(X0,X1) | sP0(X1)", "~sP0(X1) | q(X1,X2)"]);
        let (same, none) = split_clauses(&[c], &mut sig, 3);
        assert!(none.is_empty());
        assert_eq!(same.len(), 1);
    }

    #[test]
    fn ten_variable_cycle_splits_into_three_variable_pieces() {
        let mut sig = Signature::default();
        let s = sig.add_sort("$i");
        let f = sig.add_function("f", vec![s], s, SymbolOrigin::Input);
        let v = |i: u32| Var { id: i, sort: s };
        let mut lits: Vec<FlatLit> = (0..9).map(|i| FlatLit::Fun { positive: false, fun: f, args: vec![v(i)], result: v(i + 1) }).collect();
        lits.push(FlatLit::Fun { positive: false, fun: f, args: vec![v(9)], result: v(0) });
        let (out, preds) = split_clauses(&[FlatClause::new(lits)], &mut sig, 4);
        assert_eq!(preds.len(), out.len() - 1);
        assert!(out.iter().all(|c| c.vars.len() <= 4), "{out:?}");
        assert!(out.iter().filter(|c| c.vars.len() == 4).count() <= 1);
        let mut sig3 = sig.clone();
        let lits = (0..10u32).map(|i| FlatLit::Fun { positive: false, fun: f, args: vec![v(i)], result: v((i + 1) % 10) }).collect();
        let (out3, _) = split_clauses(&[FlatClause::new(lits)], &mut sig3, 3);
        assert!(out3.iter().all(|c| c.vars.len() <= 3));
    }
}
