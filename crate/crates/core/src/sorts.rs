//! Sort analysis: subsort inference, monotonicity, size bounds between sorts,
//! maximum sizes, and the collapse/expansion rewrites that use them.

use crate::constraints::{Constraint, SizeAtom, Strict};
use crate::logic::{Atom, FunId, PredId, Problem, Signature, SortId, Term, Var};
use crate::preprocess::{FlatClause, FlatLit, FlatProblem};
use std::collections::{BTreeMap, BTreeSet};

/// A slot in the signature where a value of some sort lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Position {
    FunArg(FunId, usize),
    FunRet(FunId),
    PredArg(PredId, usize),
}

fn positions(sig: &Signature) -> Vec<(Position, SortId)> {
    let mut out = Vec::new();
    for (i, f) in sig.functions.iter().enumerate() {
        let id = FunId(i as u32);
        for (k, s) in f.args.iter().enumerate() {
            out.push((Position::FunArg(id, k), *s));
        }
        out.push((Position::FunRet(id), f.ret));
    }
    for (i, p) in sig.predicates.iter().enumerate() {
        for (k, s) in p.args.iter().enumerate() {
            out.push((Position::PredArg(PredId(i as u32), k), *s));
        }
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // the smaller index stays the root, which keeps class numbering stable
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

/// Positions and clause variables grouped into inferred subsorts. Class
/// numbers follow the first position (functions, then predicates, in
/// signature order) or, for classes without positions, the first variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsortPartition {
    /// Declared sort each class refines.
    pub parent: Vec<SortId>,
    /// Whether some clause variable belongs to the class.
    pub used: Vec<bool>,
    position_class: BTreeMap<Position, usize>,
    var_class: Vec<BTreeMap<u32, usize>>,
}

impl SubsortPartition {
    pub fn class_count(&self) -> usize {
        self.parent.len()
    }

    pub fn class_of(&self, p: Position) -> usize {
        self.position_class[&p]
    }

    pub fn class_of_var(&self, clause: usize, v: Var) -> usize {
        self.var_class[clause][&v.id]
    }

    pub fn classes_of_sort(&self, s: SortId) -> Vec<usize> {
        (0..self.class_count()).filter(|&c| self.parent[c] == s).collect()
    }

    pub fn positions_of(&self, class: usize) -> Vec<Position> {
        self.position_class.iter().filter(|(_, &c)| c == class).map(|(p, _)| *p).collect()
    }

    /// Arity-zero functions whose value lies in `class`, in signature order.
    pub fn constants_of(&self, sig: &Signature, class: usize) -> Vec<FunId> {
        self.positions_of(class)
            .into_iter()
            .filter_map(|p| match p {
                Position::FunRet(f) if sig.function(f).args.is_empty() => Some(f),
                _ => None,
            })
            .collect()
    }

    /// True when every function producing values in `class` is a constant.
    pub fn only_constants_produce(&self, sig: &Signature, class: usize) -> bool {
        self.positions_of(class)
            .iter()
            .all(|p| !matches!(p, Position::FunRet(f) if !sig.function(*f).args.is_empty()))
    }
}

/// Union-find over positions: a variable joins every position it occupies,
/// and `x = y` joins the classes of `x` and `y`.
pub fn infer_subsorts(p: &FlatProblem) -> SubsortPartition {
    let pos = positions(&p.signature);
    let pos_index: BTreeMap<Position, usize> = pos.iter().enumerate().map(|(i, (q, _))| (*q, i)).collect();
    let mut node_sort: Vec<SortId> = pos.iter().map(|(_, s)| *s).collect();
    let mut var_node: Vec<BTreeMap<u32, usize>> = Vec::with_capacity(p.clauses.len());
    for c in &p.clauses {
        let mut m = BTreeMap::new();
        for v in &c.vars {
            m.insert(v.id, node_sort.len());
            node_sort.push(v.sort);
        }
        var_node.push(m);
    }
    let mut uf = UnionFind((0..node_sort.len()).collect());
    for (ci, c) in p.clauses.iter().enumerate() {
        let node = |v: &Var| var_node[ci][&v.id];
        for l in &c.literals {
            match l {
                FlatLit::Pred { pred, args, .. } => {
                    for (k, v) in args.iter().enumerate() {
                        uf.union(node(v), pos_index[&Position::PredArg(*pred, k)]);
                    }
                }
                FlatLit::Fun { fun, args, result, .. } => {
                    for (k, v) in args.iter().enumerate() {
                        uf.union(node(v), pos_index[&Position::FunArg(*fun, k)]);
                    }
                    uf.union(node(result), pos_index[&Position::FunRet(*fun)]);
                }
                FlatLit::VarEq { lhs, rhs } => uf.union(node(lhs), node(rhs)),
            }
        }
    }

    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut parent = Vec::new();
    let mut class_of_node = vec![0usize; node_sort.len()];
    for (n, slot) in class_of_node.iter_mut().enumerate() {
        let r = uf.find(n);
        let next = class_of_root.len();
        let c = *class_of_root.entry(r).or_insert_with(|| {
            parent.push(node_sort[r]);
            next
        });
        *slot = c;
    }
    let mut used = vec![false; parent.len()];
    let var_class: Vec<BTreeMap<u32, usize>> = var_node
        .iter()
        .map(|m| {
            m.iter()
                .map(|(v, n)| {
                    used[class_of_node[*n]] = true;
                    (*v, class_of_node[*n])
                })
                .collect()
        })
        .collect();
    let position_class = pos.iter().enumerate().map(|(i, (q, _))| (*q, class_of_node[i])).collect();
    SubsortPartition { parent, used, position_class, var_class }
}

/// Per-class monotonicity. A class loses monotonicity through a positive
/// `x = y` or `f(..) = y` at its values, unless every variable on the value
/// side is defined by a negative `g(..) != x` in the same clause (the shape
/// flattening gives an equation between two non-variable terms).
pub fn monotonic_classes(p: &FlatProblem, part: &SubsortPartition) -> Vec<bool> {
    let mut mono = vec![true; part.class_count()];
    for (ci, c) in p.clauses.iter().enumerate() {
        let defined: BTreeSet<Var> = c
            .literals
            .iter()
            .filter_map(|l| match l {
                FlatLit::Fun { positive: false, result, .. } => Some(*result),
                _ => None,
            })
            .collect();
        for l in &c.literals {
            match l {
                FlatLit::VarEq { lhs, rhs } if !(defined.contains(lhs) && defined.contains(rhs)) => {
                    mono[part.class_of_var(ci, *lhs)] = false;
                }
                FlatLit::Fun { positive: true, result, .. } if !defined.contains(result) => {
                    mono[part.class_of_var(ci, *result)] = false;
                }
                _ => {}
            }
        }
    }
    mono
}

/// Sorts all of whose subsorts are monotonic.
pub fn detect_monotonic(p: &FlatProblem) -> BTreeSet<SortId> {
    let part = infer_subsorts(p);
    let mono = monotonic_classes(p, &part);
    (0..p.signature.sort_count() as u32)
        .map(SortId)
        .filter(|s| part.classes_of_sort(*s).iter().all(|&c| mono[c]))
        .collect()
}

/// What the clauses say about a unary function between two sorts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FunctionFacts {
    pub injective: bool,
    pub non_surjective: bool,
    pub surjective: bool,
    pub non_injective: bool,
}

fn unary_app(t: &Term) -> Option<(FunId, &Term)> {
    match t {
        Term::App(f, args) if args.len() == 1 => Some((*f, &args[0])),
        _ => None,
    }
}

/// Pattern detection for injectivity, surjectivity and their witnesses of
/// failure, on clausified input. Only unary functions between two different
/// sorts are considered.
pub fn detect_function_facts(p: &Problem) -> BTreeMap<FunId, FunctionFacts> {
    let sig = &p.signature;
    let mut facts: BTreeMap<FunId, FunctionFacts> = BTreeMap::new();
    let between_sorts = |f: FunId| {
        let s = sig.function(f);
        s.args.len() == 1 && s.args[0] != s.ret
    };
    let ground_disequal: BTreeSet<(Term, Term)> = p
        .clauses
        .iter()
        .filter(|c| c.literals.len() == 1)
        .filter_map(|c| match &c.literals[0] {
            l if !l.positive => match &l.atom {
                Atom::Eq(_, a, b) if a.is_ground() && b.is_ground() => Some((a.clone(), b.clone())),
                _ => None,
            },
            _ => None,
        })
        .collect();
    let distinct = |a: &Term, b: &Term| ground_disequal.contains(&(a.clone(), b.clone())) || ground_disequal.contains(&(b.clone(), a.clone()));

    for c in &p.clauses {
        let lits = &c.literals;
        // f(x) != f(y) | x = y, directly or flattened through z
        if let Some((f, x, y)) = injectivity(lits) {
            if between_sorts(f) && x != y {
                facts.entry(f).or_default().injective = true;
            }
        }
        if lits.len() != 1 {
            continue;
        }
        let l = &lits[0];
        let Atom::Eq(_, a, b) = &l.atom else { continue };
        if !l.positive {
            // f(x) != t with t ground
            for (lhs, rhs) in [(a, b), (b, a)] {
                if let Some((f, Term::Var(_))) = unary_app(lhs) {
                    if rhs.is_ground() && between_sorts(f) {
                        facts.entry(f).or_default().non_surjective = true;
                    }
                }
            }
            continue;
        }
        // f(t(y)) = y
        for (lhs, rhs) in [(a, b), (b, a)] {
            if let (Some((f, inner)), Term::Var(y)) = (unary_app(lhs), rhs) {
                let mut vs = BTreeSet::new();
                inner.collect_vars(&mut vs);
                if between_sorts(f) && vs.len() == 1 && vs.contains(y) {
                    facts.entry(f).or_default().surjective = true;
                }
            }
        }
        // f(a) = f(b) with a != b asserted
        if let (Some((f, x)), Some((g, y))) = (unary_app(a), unary_app(b)) {
            if f == g && x.is_ground() && y.is_ground() && distinct(x, y) && between_sorts(f) {
                facts.entry(f).or_default().non_injective = true;
            }
        }
    }
    facts
}

fn injectivity(lits: &[crate::logic::Literal]) -> Option<(FunId, Var, Var)> {
    let eq_vars = |l: &crate::logic::Literal| match &l.atom {
        Atom::Eq(_, Term::Var(x), Term::Var(y)) if l.positive => Some((*x, *y)),
        _ => None,
    };
    let same = |a: (Var, Var), b: (Var, Var)| a == b || a == (b.1, b.0);
    match lits.len() {
        2 => {
            let (eq, other) = if let Some(e) = eq_vars(&lits[0]) { (e, &lits[1]) } else { (eq_vars(&lits[1])?, &lits[0]) };
            if other.positive {
                return None;
            }
            let Atom::Eq(_, l, r) = &other.atom else { return None };
            let (f, Term::Var(x)) = unary_app(l)? else { return None };
            let (g, Term::Var(y)) = unary_app(r)? else { return None };
            (f == g && same(eq, (*x, *y))).then_some((f, *x, *y))
        }
        3 => {
            let eq_pos = lits.iter().position(|l| eq_vars(l).is_some())?;
            let eq = eq_vars(&lits[eq_pos]).unwrap();
            let mut defs = Vec::new();
            for (i, l) in lits.iter().enumerate() {
                if i == eq_pos {
                    continue;
                }
                if l.positive {
                    return None;
                }
                let Atom::Eq(_, a, b) = &l.atom else { return None };
                let (app, z) = match (a, b) {
                    (Term::App(..), Term::Var(z)) => (a, *z),
                    (Term::Var(z), Term::App(..)) => (b, *z),
                    _ => return None,
                };
                let (f, Term::Var(x)) = unary_app(app)? else { return None };
                defs.push((f, *x, z));
            }
            let (f, x, z1) = defs[0];
            let (g, y, z2) = defs[1];
            (f == g && z1 == z2 && same(eq, (x, y))).then_some((f, x, y))
        }
        _ => None,
    }
}

/// Inter-sort size constraints from function facts, the strongest one per
/// function and direction, over the sorts of `sig` (which may be a rewritten
/// version of the signature the facts were found in).
pub fn bounds_from_facts(facts: &BTreeMap<FunId, FunctionFacts>, sig: &Signature) -> Vec<Constraint> {
    let mut out = BTreeSet::new();
    for (f, k) in facts {
        let sym = sig.function(*f);
        let (dom, cod) = (sym.args[0], sym.ret);
        if dom == cod {
            continue;
        }
        if k.injective {
            let strict = if k.non_surjective { Strict::Lt } else { Strict::Le };
            out.insert(Constraint::single(SizeAtom::Inter(dom, strict, cod)));
        }
        if k.surjective {
            let strict = if k.non_injective { Strict::Lt } else { Strict::Le };
            out.insert(Constraint::single(SizeAtom::Inter(cod, strict, dom)));
        }
    }
    out.into_iter().collect()
}

/// Inter-sort constraints found by pattern matching on `p`.
pub fn detect_bounds(p: &Problem) -> Vec<Constraint> {
    bounds_from_facts(&detect_function_facts(p), &p.signature)
}

/// Upper bounds on sort sizes, and on subsort sizes for instance removal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MaxSizes {
    pub per_sort: BTreeMap<SortId, u32>,
    /// For each class of the partition: the number of elements that can
    /// matter, if bounded.
    pub per_class: Vec<Option<u32>>,
}

/// Maximum sizes from three sources:
/// a clause of positive variable equalities over `m` variables of one sort
/// bounds it by `m - 1`; a clause `x = a1 | ... | x = ak` bounds it by `k`;
/// a monotonic sort or subsort whose values all come from constants is
/// bounded by the number of those constants (at least 1).
pub fn detect_max_sizes(p: &FlatProblem, part: &SubsortPartition, class_mono: &[bool]) -> MaxSizes {
    let sig = &p.signature;
    let mut per_sort: BTreeMap<SortId, u32> = BTreeMap::new();
    let mut tighten = |s: SortId, b: u32| {
        let e = per_sort.entry(s).or_insert(b);
        *e = (*e).min(b);
    };
    for c in &p.clauses {
        if let Some((s, b)) = clause_size_bound(c) {
            tighten(s, b);
        }
    }
    let per_class: Vec<Option<u32>> = (0..part.class_count())
        .map(|k| {
            (class_mono[k] && part.only_constants_produce(sig, k)).then(|| (part.constants_of(sig, k).len() as u32).max(1))
        })
        .collect();
    for s in 0..sig.sort_count() as u32 {
        let s = SortId(s);
        let classes = part.classes_of_sort(s);
        if classes.is_empty() || !classes.iter().all(|&k| class_mono[k] && part.only_constants_produce(sig, k)) {
            continue;
        }
        let constants: usize = classes.iter().map(|&k| part.constants_of(sig, k).len()).sum();
        tighten(s, (constants as u32).max(1));
    }
    MaxSizes { per_sort, per_class }
}

fn clause_size_bound(c: &FlatClause) -> Option<(SortId, u32)> {
    let first = c.vars.first()?;
    if c.is_empty() || c.vars.iter().any(|v| v.sort != first.sort) {
        return None;
    }
    if c.literals.iter().all(|l| matches!(l, FlatLit::VarEq { .. })) {
        return Some((first.sort, c.vars.len() as u32 - 1));
    }
    if c.vars.len() == 1 {
        let mut constants = BTreeSet::new();
        for l in &c.literals {
            match l {
                FlatLit::Fun { positive: true, fun, args, .. } if args.is_empty() => {
                    constants.insert(*fun);
                }
                _ => return None,
            }
        }
        return Some((first.sort, constants.len() as u32));
    }
    None
}

/// Record of a monotonic collapse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collapse {
    pub sort: SortId,
    pub members: Vec<SortId>,
}

fn fresh_sort_name(sig: &Signature, base: &str) -> String {
    let mut k = 0usize;
    loop {
        let name = format!("{base}{k}");
        if sig.sort_by_name(&name).is_none() {
            return name;
        }
        k += 1;
    }
}

fn remap_sorts(p: &FlatProblem, sig: Signature, mut var_sort: impl FnMut(usize, Var) -> SortId) -> FlatProblem {
    let clauses = p
        .clauses
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let mut map = |v: Var| Var { id: v.id, sort: var_sort(ci, v) };
            let lits = c
                .literals
                .iter()
                .map(|l| match l {
                    FlatLit::Pred { positive, pred, args } => {
                        FlatLit::Pred { positive: *positive, pred: *pred, args: args.iter().map(|v| map(*v)).collect() }
                    }
                    FlatLit::Fun { positive, fun, args, result } => FlatLit::Fun {
                        positive: *positive,
                        fun: *fun,
                        args: args.iter().map(|v| map(*v)).collect(),
                        result: map(*result),
                    },
                    FlatLit::VarEq { lhs, rhs } => FlatLit::VarEq { lhs: map(*lhs), rhs: map(*rhs) },
                })
                .collect();
            FlatClause::new(lits)
        })
        .collect();
    FlatProblem { signature: sig, clauses }
}

/// Merges all monotonic sorts into one fresh sort. Fewer than two monotonic
/// sorts leaves the problem alone.
pub fn collapse_monotonic(p: &FlatProblem, monotonic: &BTreeSet<SortId>) -> (FlatProblem, Option<Collapse>) {
    if monotonic.len() < 2 {
        return (p.clone(), None);
    }
    let mut sig = p.signature.clone();
    let u = sig.add_sort(fresh_sort_name(&sig, "mono"));
    let map = |s: SortId| if monotonic.contains(&s) { u } else { s };
    for f in sig.functions.iter_mut() {
        f.args.iter_mut().for_each(|s| *s = map(*s));
        f.ret = map(f.ret);
    }
    for q in sig.predicates.iter_mut() {
        q.args.iter_mut().for_each(|s| *s = map(*s));
    }
    let out = remap_sorts(p, sig, |_, v| map(v.sort));
    (out, Some(Collapse { sort: u, members: monotonic.iter().copied().collect() }))
}

/// A subsort promoted to a sort of its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub sort: SortId,
    pub parent: SortId,
}

/// Turns monotonic inferred subsorts into proper sorts, returning the
/// `|sub| <= |parent|` constraints that make the result translatable back.
/// Non-monotonic subsorts stay with their parent; if every subsort of a sort
/// is monotonic the first keeps the parent's identity. Sorts in `skip` and
/// subsorts no clause mentions are left alone.
pub fn expand_subsorts(
    p: &FlatProblem,
    part: &SubsortPartition,
    class_mono: &[bool],
    skip: &BTreeSet<SortId>,
) -> (FlatProblem, Vec<Expansion>, Vec<Constraint>) {
    let mut sig = p.signature.clone();
    let mut class_sort: Vec<SortId> = part.parent.clone();
    let mut expansions = Vec::new();
    for s in 0..p.signature.sort_count() as u32 {
        let s = SortId(s);
        if skip.contains(&s) {
            continue;
        }
        let classes: Vec<usize> = part.classes_of_sort(s).into_iter().filter(|&k| part.used[k]).collect();
        if classes.len() < 2 {
            continue;
        }
        let keep_first = classes.iter().all(|&k| class_mono[k]);
        for (i, &k) in classes.iter().enumerate() {
            if !class_mono[k] || (keep_first && i == 0) {
                continue;
            }
            let name = fresh_sort_name(&sig, &format!("{}_", sig.sort_name(s)));
            let new = sig.add_sort(name);
            class_sort[k] = new;
            expansions.push(Expansion { sort: new, parent: s });
        }
    }
    if expansions.is_empty() {
        return (p.clone(), expansions, Vec::new());
    }
    for (i, f) in sig.functions.iter_mut().enumerate() {
        let id = FunId(i as u32);
        for (k, s) in f.args.iter_mut().enumerate() {
            *s = class_sort[part.class_of(Position::FunArg(id, k))];
        }
        f.ret = class_sort[part.class_of(Position::FunRet(id))];
    }
    for (i, q) in sig.predicates.iter_mut().enumerate() {
        for (k, s) in q.args.iter_mut().enumerate() {
            *s = class_sort[part.class_of(Position::PredArg(PredId(i as u32), k))];
        }
    }
    let out = remap_sorts(p, sig, |ci, v| class_sort[part.class_of_var(ci, v)]);
    let constraints = expansions
        .iter()
        .map(|e| Constraint::single(SizeAtom::Inter(e.sort, Strict::Le, e.parent)))
        .collect();
    (out, expansions, constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{clausify, parse, ClausifyOptions, Dialect};
    use crate::preprocess::flatten;

    fn load(text: &str) -> (Problem, FlatProblem) {
        let (sig, fs) = parse(text, Dialect::detect(text)).unwrap();
        let p = clausify(&sig, &fs, &ClausifyOptions::default()).unwrap();
        let flat = FlatProblem {
            signature: p.signature.clone(),
            clauses: p.clauses.iter().map(|c| flatten(c, &p.signature)).collect(),
        };
        (p, flat)
    }

    const OMV: &str = include_str!("../fixtures/omv.p");

    #[test]
    fn omv_subsorts_and_monotonicity() {
        let (_, flat) = load(OMV);
        let part = infer_subsorts(&flat);
        let monkey = flat.signature.sort_by_name("monkey").unwrap();
        let used: Vec<usize> = part.classes_of_sort(monkey).into_iter().filter(|&k| part.used[k]).collect();
        assert_eq!(used.len(), 3);
        let mono = detect_monotonic(&flat);
        let names: Vec<&str> = mono.iter().map(|s| flat.signature.sort_name(*s)).collect();
        assert_eq!(names, vec!["banana"]);
    }

    #[test]
    fn shared_variable_gives_one_subsort() {
        let (_, flat) = load("cnf(a, axiom, p(X) | q(X)).");
        let part = infer_subsorts(&flat);
        let s = flat.signature.sort_by_name("$i").unwrap();
        assert_eq!(part.classes_of_sort(s).len(), 1);
    }

    #[test]
    fn no_equality_means_monotonic() {
        let (_, flat) = load("cnf(a, axiom, p(X) | q(f(X))). cnf(b, axiom, ~p(a)).");
        assert_eq!(detect_monotonic(&flat).len(), 1);
    }

    #[test]
    fn equations_between_terms_keep_monotonicity() {
        let (_, flat) = load("cnf(a, axiom, f(X) = g(X)). cnf(b, axiom, f(a) = b).");
        assert_eq!(detect_monotonic(&flat).len(), 1);
        let (_, flat) = load("cnf(a, axiom, f(X) = X).");
        assert!(detect_monotonic(&flat).is_empty());
    }

    #[test]
    fn injectivity_chain_bounds() {
        let text = include_str!("../fixtures/injective_chain.p");
        let (p, _) = load(text);
        let shown: Vec<String> = detect_bounds(&p).iter().map(|c| c.display(&p.signature).to_string()).collect();
        assert_eq!(shown, vec!["|s1|<|s2|", "|s2|<=|s3|"]);
        assert!(detect_bounds(&Problem::new(p.signature.clone())).is_empty());
    }

    #[test]
    fn surjective_and_not_injective() {
        let text = "tff(s, type, s: $tType). tff(t, type, t: $tType).
            tff(f, type, f: s > t). tff(g, type, g: t > s). tff(a, type, a: s). tff(b, type, b: s).
            tff(surj, axiom, ![Y: t]: f(g(Y)) = Y).
            tff(coll, axiom, f(a) = f(b)). tff(dis, axiom, a != b).";
        let (p, _) = load(text);
        let shown: Vec<String> = detect_bounds(&p).iter().map(|c| c.display(&p.signature).to_string()).collect();
        assert_eq!(shown, vec!["|t|<|s|"]);
    }

    #[test]
    fn max_sizes_from_equalities() {
        let (_, flat) = load("cnf(a, axiom, X = a | X = b).");
        let part = infer_subsorts(&flat);
        let mono = monotonic_classes(&flat, &part);
        assert_eq!(detect_max_sizes(&flat, &part, &mono).per_sort.values().copied().collect::<Vec<_>>(), vec![2]);
        let (_, flat) = load("cnf(a, axiom, X = Y | X = Z | Z = Y).");
        let part = infer_subsorts(&flat);
        let mono = monotonic_classes(&flat, &part);
        assert_eq!(detect_max_sizes(&flat, &part, &mono).per_sort.values().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn f10_subsorts_and_expansion() {
        let (_, flat) = load(include_str!("../fixtures/f10.p"));
        let part = infer_subsorts(&flat);
        let used: Vec<usize> = (0..part.class_count()).filter(|&k| part.used[k]).collect();
        assert_eq!(used.len(), 2);
        let mono = monotonic_classes(&flat, &part);
        assert!(used.iter().all(|&k| mono[k]));
        let max = detect_max_sizes(&flat, &part, &mono);
        assert_eq!(max.per_class[used[0]], Some(50));
        assert_eq!(max.per_class[used[1]], None);

        let (expanded, exps, cons) = expand_subsorts(&flat, &part, &mono, &BTreeSet::new());
        assert_eq!(exps.len(), 1);
        assert_eq!(cons.len(), 1);
        let f = expanded.signature.function_by_name("f").unwrap();
        assert_eq!(expanded.signature.function(f).ret, exps[0].sort);
        let a1 = expanded.signature.function_by_name("a1").unwrap();
        assert_eq!(expanded.signature.function(a1).ret, exps[0].parent);
        let part2 = infer_subsorts(&expanded);
        let mono2 = monotonic_classes(&expanded, &part2);
        let max2 = detect_max_sizes(&expanded, &part2, &mono2);
        assert_eq!(max2.per_sort.get(&exps[0].parent), Some(&50));
    }

    #[test]
    fn collapse_merges_monotonic_sorts() {
        let text = "tff(s, type, s: $tType). tff(t, type, t: $tType).
            tff(p, type, p: (s * t) > $o). tff(a, type, a: s). tff(b, type, b: t).
            tff(ax, axiom, p(a, b)).";
        let (_, flat) = load(text);
        let mono = detect_monotonic(&flat);
        assert_eq!(mono.len(), 2);
        let (out, c) = collapse_monotonic(&flat, &mono);
        let c = c.unwrap();
        assert_eq!(c.members.len(), 2);
        let pr = out.signature.predicate_by_name("p").unwrap();
        assert_eq!(out.signature.predicate(pr).args, vec![c.sort, c.sort]);
        let (same, none) = collapse_monotonic(&flat, &BTreeSet::new());
        assert!(none.is_none());
        assert_eq!(same, flat);
    }

    #[test]
    fn partition_ignores_clause_order() {
        let (_, flat) = load(OMV);
        let mut rev = flat.clone();
        rev.clauses.reverse();
        let a = infer_subsorts(&flat);
        let b = infer_subsorts(&rev);
        let pos = positions(&flat.signature);
        for (p, _) in &pos {
            for (q, _) in &pos {
                assert_eq!(a.class_of(*p) == a.class_of(*q), b.class_of(*p) == b.class_of(*q));
            }
        }
    }
}
