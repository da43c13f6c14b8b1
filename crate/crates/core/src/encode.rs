//! Grounding flat clauses into propositional clauses for one domain-size
//! assignment (pointwise) or one vector of size bounds (contour).

use crate::constraints::{Constraint, SizeAtom, Strict};
use crate::logic::{DomainSizes, FunId, PredId, SortId};
use crate::preprocess::{FlatClause, FlatLit, FlatProblem};
use crate::sat::{write_dimacs, Lit};
use crate::sorts::{Position, SubsortPartition};
use std::fmt;
use std::io;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// No marking variables; satisfiable iff a model exists at the sizes.
    Plain,
    /// `|s|>n` marks totality clauses, `|s|<n` marks instances.
    Pointwise,
    /// Sizes are upper bounds; `bound_s(i)` guards let the solver pick smaller.
    Contour,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("encoding would have {estimate} clauses, over the cap of {cap}")]
    TooLarge { estimate: u64, cap: u64 },
}

/// Problem-level facts the grounder needs, computed once per problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundInfo {
    pub monotonic: Vec<bool>,
    /// Elements beyond these bounds are never used at the position: instances
    /// and definitions mentioning them are omitted.
    pub fun_arg_bound: Vec<Vec<Option<u32>>>,
    pub fun_ret_bound: Vec<Option<u32>>,
    pub pred_arg_bound: Vec<Vec<Option<u32>>>,
    /// Per clause, aligned with `FlatClause::vars`.
    pub var_bound: Vec<Vec<Option<u32>>>,
    /// Terms to break symmetries over, one group per subsort.
    pub symmetry_groups: Vec<SymmetryGroup>,
    /// Inter-sort constraints the contour encoding enforces itself.
    pub inter: Vec<Constraint>,
}

impl GroundInfo {
    /// No instance removal, symmetry breaking per sort.
    pub fn basic(p: &FlatProblem, monotonic: Vec<bool>, symmetry: bool) -> GroundInfo {
        let sig = &p.signature;
        let symmetry_groups = if symmetry {
            (0..sig.sort_count() as u32)
                .map(SortId)
                .map(|s| SymmetryGroup {
                    sort: s,
                    bound: None,
                    constants: (0..sig.functions.len() as u32)
                        .map(FunId)
                        .filter(|f| sig.function(*f).args.is_empty() && sig.function(*f).ret == s)
                        .collect(),
                    unary: Vec::new(),
                    arg: None,
                })
                .filter(|g| !g.constants.is_empty())
                .collect()
        } else {
            Vec::new()
        };
        GroundInfo {
            monotonic,
            fun_arg_bound: sig.functions.iter().map(|f| vec![None; f.args.len()]).collect(),
            fun_ret_bound: vec![None; sig.functions.len()],
            pred_arg_bound: sig.predicates.iter().map(|q| vec![None; q.args.len()]).collect(),
            var_bound: p.clauses.iter().map(|c| vec![None; c.vars.len()]).collect(),
            symmetry_groups,
            inter: Vec::new(),
        }
    }

    /// Uses the partition for instance removal (`class_bound`) and per-subsort
    /// symmetry breaking.
    pub fn with_subsorts(
        p: &FlatProblem,
        part: &SubsortPartition,
        class_bound: &[Option<u32>],
        monotonic: Vec<bool>,
        symmetry: bool,
        inter: Vec<Constraint>,
    ) -> GroundInfo {
        let sig = &p.signature;
        let b = |pos: Position| class_bound[part.class_of(pos)];
        let symmetry_groups = if symmetry { symmetry_groups(sig, part, class_bound) } else { Vec::new() };
        GroundInfo {
            monotonic,
            fun_arg_bound: sig
                .functions
                .iter()
                .enumerate()
                .map(|(i, f)| (0..f.args.len()).map(|k| b(Position::FunArg(FunId(i as u32), k))).collect())
                .collect(),
            fun_ret_bound: (0..sig.functions.len()).map(|i| b(Position::FunRet(FunId(i as u32)))).collect(),
            pred_arg_bound: sig
                .predicates
                .iter()
                .enumerate()
                .map(|(i, q)| (0..q.args.len()).map(|k| b(Position::PredArg(PredId(i as u32), k))).collect())
                .collect(),
            var_bound: p
                .clauses
                .iter()
                .enumerate()
                .map(|(ci, c)| c.vars.iter().map(|v| class_bound[part.class_of_var(ci, *v)]).collect())
                .collect(),
            symmetry_groups,
            inter,
        }
    }

    /// Monotonic sorts not tied to another sort by an inter-sort constraint;
    /// only these skip the contour guards.
    pub fn contour_monotonic(&self, s: SortId) -> bool {
        self.monotonic[s.index()] && !self.inter.iter().any(|c| c.0.iter().any(|a| a.sorts().contains(&s)))
    }
}

/// A sequence of terms whose values are put in canonical order: the
/// constants of a subsort, then `g(d)` for unary `g` over the elements `d` of
/// one earlier subsort, ordered by `d` first. That order keeps the sequence
/// for smaller sizes a prefix of the one for larger sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    pub sort: SortId,
    /// Instance-removal bound of the subsort.
    pub bound: Option<u32>,
    pub constants: Vec<FunId>,
    pub unary: Vec<FunId>,
    /// Sort and bound of the arguments of `unary`.
    pub arg: Option<(SortId, Option<u32>)>,
}

impl SymmetryGroup {
    fn terms(&self, n: &DomainSizes) -> Vec<(FunId, Option<u32>)> {
        let mut out: Vec<(FunId, Option<u32>)> = self.constants.iter().map(|c| (*c, None)).collect();
        if let Some((s, b)) = self.arg {
            for d in 0..eff(n.get(s), b) {
                out.extend(self.unary.iter().map(|f| (*f, Some(d))));
            }
        }
        out
    }

    fn term_count(&self, n: &DomainSizes) -> u64 {
        self.constants.len() as u64 + self.arg.map_or(0, |(s, b)| eff(n.get(s), b) as u64 * self.unary.len() as u64)
    }
}

fn symmetry_groups(sig: &crate::logic::Signature, part: &SubsortPartition, class_bound: &[Option<u32>]) -> Vec<SymmetryGroup> {
    let mut groups = Vec::new();
    for k in 0..part.class_count() {
        let constants = part.constants_of(sig, k);
        let mut unary = Vec::new();
        let mut arg_class = None;
        for (i, f) in sig.functions.iter().enumerate() {
            let id = FunId(i as u32);
            if f.args.len() != 1 || part.class_of(Position::FunRet(id)) != k {
                continue;
            }
            let a = part.class_of(Position::FunArg(id, 0));
            if a >= k || arg_class.is_some_and(|c| c != a) {
                continue;
            }
            arg_class = Some(a);
            unary.push(id);
        }
        if constants.is_empty() && unary.is_empty() {
            continue;
        }
        groups.push(SymmetryGroup {
            sort: part.parent[k],
            bound: class_bound[k],
            constants,
            unary,
            arg: arg_class.map(|a| (part.parent[a], class_bound[a])),
        });
    }
    groups
}

fn eff(n: u32, bound: Option<u32>) -> u32 {
    bound.map_or(n, |b| b.min(n))
}

/// What a propositional variable stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarMeaning {
    /// `f(args) = value`
    Fun(FunId, Vec<u32>, u32),
    Pred(PredId, Vec<u32>),
    /// `|s| > n`
    Larger(SortId),
    /// `|s| < n`
    Smaller(SortId),
    /// `bound_s(i)`
    Bound(SortId, u32),
}

/// Fixed numbering of principal atoms: per symbol a block of variables, the
/// argument tuple read as a mixed-radix number (first argument most
/// significant), then the value for functions. Marking variables follow.
#[derive(Clone, Debug)]
pub struct AtomTable {
    sizes: DomainSizes,
    fun_sorts: Vec<(Vec<SortId>, SortId)>,
    pred_sorts: Vec<Vec<SortId>>,
    fun_offset: Vec<u32>,
    pred_offset: Vec<u32>,
    first_marker: u32,
    mode: Mode,
    bound_offset: Vec<u32>,
    num_vars: u32,
}

impl AtomTable {
    pub fn new(p: &FlatProblem, sizes: &DomainSizes, mode: Mode) -> AtomTable {
        let sig = &p.signature;
        let mut next = 1u64;
        let mut fun_offset = Vec::new();
        let mut fun_sorts = Vec::new();
        for f in &sig.functions {
            fun_offset.push(next as u32);
            let tuples: u64 = f.args.iter().map(|s| sizes.get(*s) as u64).product();
            next += tuples * sizes.get(f.ret) as u64;
            fun_sorts.push((f.args.clone(), f.ret));
        }
        let mut pred_offset = Vec::new();
        let mut pred_sorts = Vec::new();
        for q in &sig.predicates {
            pred_offset.push(next as u32);
            next += q.args.iter().map(|s| sizes.get(*s) as u64).product::<u64>();
            pred_sorts.push(q.args.clone());
        }
        assert!(next < u32::MAX as u64 / 2, "too many propositional variables");
        let first_marker = next as u32;
        let mut bound_offset = Vec::new();
        let num_vars = match mode {
            Mode::Plain => first_marker - 1,
            Mode::Pointwise => first_marker - 1 + 2 * sizes.len() as u32,
            Mode::Contour => {
                let mut at = first_marker;
                for s in sizes.sorts() {
                    bound_offset.push(at);
                    at += sizes.get(s);
                }
                at - 1
            }
        };
        AtomTable {
            sizes: sizes.clone(),
            fun_sorts,
            pred_sorts,
            fun_offset,
            pred_offset,
            first_marker,
            mode,
            bound_offset,
            num_vars,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    fn tuple_index(&self, sorts: &[SortId], args: &[u32]) -> u32 {
        let mut idx = 0u32;
        for (s, a) in sorts.iter().zip(args) {
            debug_assert!(*a < self.sizes.get(*s));
            idx = idx * self.sizes.get(*s) + a;
        }
        idx
    }

    pub fn fun_var(&self, f: FunId, args: &[u32], value: u32) -> u32 {
        let (arg_sorts, ret) = &self.fun_sorts[f.index()];
        self.fun_offset[f.index()] + self.tuple_index(arg_sorts, args) * self.sizes.get(*ret) + value
    }

    pub fn pred_var(&self, p: PredId, args: &[u32]) -> u32 {
        self.pred_offset[p.index()] + self.tuple_index(&self.pred_sorts[p.index()], args)
    }

    pub fn larger(&self, s: SortId) -> u32 {
        assert_eq!(self.mode, Mode::Pointwise);
        self.first_marker + 2 * s.0
    }

    pub fn smaller(&self, s: SortId) -> u32 {
        assert_eq!(self.mode, Mode::Pointwise);
        self.first_marker + 2 * s.0 + 1
    }

    /// `bound_s(i)` for `1 <= i <= n_s`.
    pub fn bound(&self, s: SortId, i: u32) -> u32 {
        assert_eq!(self.mode, Mode::Contour);
        assert!(i >= 1 && i <= self.sizes.get(s));
        self.bound_offset[s.index()] + i - 1
    }

    fn untuple(&self, sorts: &[SortId], mut idx: u32) -> Vec<u32> {
        let mut out = vec![0; sorts.len()];
        for (k, s) in sorts.iter().enumerate().rev() {
            let n = self.sizes.get(*s);
            out[k] = idx % n;
            idx /= n;
        }
        out
    }

    pub fn meaning(&self, var: u32) -> Option<VarMeaning> {
        if var == 0 || var > self.num_vars {
            return None;
        }
        if var >= self.first_marker {
            let k = var - self.first_marker;
            return Some(match self.mode {
                Mode::Plain => unreachable!(),
                Mode::Pointwise if k % 2 == 0 => VarMeaning::Larger(SortId(k / 2)),
                Mode::Pointwise => VarMeaning::Smaller(SortId(k / 2)),
                Mode::Contour => {
                    let s = self.bound_offset.iter().rposition(|&o| o <= var).unwrap();
                    VarMeaning::Bound(SortId(s as u32), var - self.bound_offset[s] + 1)
                }
            });
        }
        if let Some(p) = self.pred_offset.iter().rposition(|&o| o <= var) {
            return Some(VarMeaning::Pred(PredId(p as u32), self.untuple(&self.pred_sorts[p], var - self.pred_offset[p])));
        }
        let f = self.fun_offset.iter().rposition(|&o| o <= var)?;
        let (arg_sorts, ret) = &self.fun_sorts[f];
        let rel = var - self.fun_offset[f];
        let n = self.sizes.get(*ret);
        Some(VarMeaning::Fun(FunId(f as u32), self.untuple(arg_sorts, rel / n), rel % n))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodingStats {
    pub instances: u64,
    pub functionality: u64,
    pub totality: u64,
    pub symmetry: u64,
    /// Contour only: bound chains and inter-sort constraints.
    pub size: u64,
}

impl EncodingStats {
    pub fn total(&self) -> u64 {
        self.instances + self.functionality + self.totality + self.symmetry + self.size
    }
}

impl fmt::Display for EncodingStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instances={} functionality={} totality={} symmetry={} size={} total={}",
            self.instances,
            self.functionality,
            self.totality,
            self.symmetry,
            self.size,
            self.total()
        )
    }
}

pub struct Encoding {
    pub mode: Mode,
    pub sizes: DomainSizes,
    pub table: AtomTable,
    pub clauses: Vec<Vec<Lit>>,
    pub assumptions: Vec<Lit>,
    pub stats: EncodingStats,
}

impl Encoding {
    /// DIMACS text with a comment line per variable naming what it stands for.
    pub fn write_dimacs<W: io::Write>(&self, p: &FlatProblem, out: &mut W) -> io::Result<()> {
        let sig = &p.signature;
        let name_tuple = |args: &[u32]| args.iter().map(|a| format!("c{}", a + 1)).collect::<Vec<_>>().join(",");
        let mut comments = vec![format!("sizes {}", self.sizes)];
        for v in 1..=self.table.num_vars() {
            let text = match self.table.meaning(v) {
                Some(VarMeaning::Fun(f, args, val)) => {
                    let name = &sig.function(f).name;
                    if args.is_empty() {
                        format!("{v} {name} = c{}", val + 1)
                    } else {
                        format!("{v} {name}({}) = c{}", name_tuple(&args), val + 1)
                    }
                }
                Some(VarMeaning::Pred(q, args)) => {
                    let name = &sig.predicate(q).name;
                    if args.is_empty() {
                        format!("{v} {name}")
                    } else {
                        format!("{v} {name}({})", name_tuple(&args))
                    }
                }
                Some(VarMeaning::Larger(s)) => format!("{v} |{}|>{}", sig.sort_name(s), self.sizes.get(s)),
                Some(VarMeaning::Smaller(s)) => format!("{v} |{}|<{}", sig.sort_name(s), self.sizes.get(s)),
                Some(VarMeaning::Bound(s, i)) => format!("{v} bound_{}({i})", sig.sort_name(s)),
                None => continue,
            };
            comments.push(text);
        }
        if !self.assumptions.is_empty() {
            let a: Vec<String> = self.assumptions.iter().map(|l| l.to_dimacs().to_string()).collect();
            comments.push(format!("assumptions {}", a.join(" ")));
        }
        write_dimacs(out, self.table.num_vars() as usize, &self.clauses, &comments)
    }
}

struct Builder<'a> {
    p: &'a FlatProblem,
    info: &'a GroundInfo,
    n: &'a DomainSizes,
    mode: Mode,
    table: AtomTable,
    clauses: Vec<Vec<Lit>>,
    stats: EncodingStats,
}

/// Builds the full encoding. Fails without building anything if the
/// clause-count estimate is over `cap`.
pub fn build(p: &FlatProblem, info: &GroundInfo, n: &DomainSizes, mode: Mode, cap: u64) -> Result<Encoding, EncodeError> {
    let estimate = count_clauses(p, info, n, mode);
    if estimate > cap {
        return Err(EncodeError::TooLarge { estimate, cap });
    }
    let mut b = Builder {
        p,
        info,
        n,
        mode,
        table: AtomTable::new(p, n, mode),
        clauses: Vec::with_capacity(estimate.min(1 << 24) as usize),
        stats: EncodingStats::default(),
    };
    for (ci, c) in p.clauses.iter().enumerate() {
        b.instances(ci, c);
    }
    b.definitions();
    b.symmetry();
    if mode == Mode::Contour {
        b.size_clauses();
    }
    let assumptions = match mode {
        Mode::Plain => Vec::new(),
        Mode::Pointwise => n.sorts().flat_map(|s| [Lit::neg(b.table.larger(s)), Lit::neg(b.table.smaller(s))]).collect(),
        Mode::Contour => n.sorts().map(|s| Lit::neg(b.table.bound(s, n.get(s)))).collect(),
    };
    Ok(Encoding { mode, sizes: n.clone(), table: b.table, clauses: b.clauses, assumptions, stats: b.stats })
}

impl Builder<'_> {
    fn is_mono(&self, s: SortId) -> bool {
        match self.mode {
            Mode::Contour => self.info.contour_monotonic(s),
            _ => self.info.monotonic[s.index()],
        }
    }

    fn instances(&mut self, ci: usize, c: &FlatClause) {
        let vars = &c.vars;
        let index_of = |v: &crate::logic::Var| vars.binary_search(v).unwrap();
        let ranges: Vec<u32> = vars.iter().zip(&self.info.var_bound[ci]).map(|(v, b)| eff(self.n.get(v.sort), *b)).collect();
        let lits: Vec<(FlatLit, Vec<usize>)> = c
            .literals
            .iter()
            .map(|l| (l.clone(), l.vars().iter().map(index_of).collect()))
            .collect();
        let mut sorts: Vec<SortId> = vars.iter().map(|v| v.sort).collect();
        sorts.sort();
        sorts.dedup();
        let marked: Vec<SortId> = sorts.iter().copied().filter(|s| !self.is_mono(*s)).collect();

        let mut assign = vec![0u32; vars.len()];
        let mut args = Vec::new();
        'outer: loop {
            let mut clause = Vec::with_capacity(lits.len() + marked.len());
            let mut tautology = false;
            for (l, idx) in &lits {
                match l {
                    FlatLit::Pred { positive, pred, .. } => {
                        args.clear();
                        args.extend(idx.iter().map(|&k| assign[k]));
                        clause.push(Lit::new(self.table.pred_var(*pred, &args), *positive));
                    }
                    FlatLit::Fun { positive, fun, .. } => {
                        args.clear();
                        args.extend(idx[..idx.len() - 1].iter().map(|&k| assign[k]));
                        let value = assign[idx[idx.len() - 1]];
                        clause.push(Lit::new(self.table.fun_var(*fun, &args, value), *positive));
                    }
                    FlatLit::VarEq { .. } => {
                        if assign[idx[0]] == assign[idx[1]] {
                            tautology = true;
                            break;
                        }
                    }
                }
            }
            if !tautology {
                match self.mode {
                    Mode::Plain => {}
                    Mode::Pointwise => clause.extend(marked.iter().map(|s| Lit::pos(self.table.smaller(*s)))),
                    Mode::Contour => {
                        for s in &marked {
                            let top = vars.iter().zip(&assign).filter(|(v, _)| v.sort == *s).map(|(_, a)| *a).max().unwrap();
                            if top >= 1 {
                                clause.push(Lit::neg(self.table.bound(*s, top)));
                            }
                        }
                    }
                }
                self.clauses.push(clause);
                self.stats.instances += 1;
            }
            // odometer, last variable fastest
            for k in (0..assign.len()).rev() {
                assign[k] += 1;
                if assign[k] < ranges[k] {
                    continue 'outer;
                }
                assign[k] = 0;
            }
            break;
        }
    }

    fn definitions(&mut self) {
        let sig = &self.p.signature;
        for (fi, f) in sig.functions.iter().enumerate() {
            let fid = FunId(fi as u32);
            let ranges: Vec<u32> =
                f.args.iter().zip(&self.info.fun_arg_bound[fi]).map(|(s, b)| eff(self.n.get(*s), *b)).collect();
            let full = self.n.get(f.ret);
            let values = eff(full, self.info.fun_ret_bound[fi]);
            let mono = self.is_mono(f.ret);
            for args in tuples(&ranges) {
                let atom = |d: u32| Lit::pos(self.table.fun_var(fid, &args, d));
                for d1 in 0..values {
                    for d2 in d1 + 1..values {
                        self.clauses.push(vec![!atom(d1), !atom(d2)]);
                        self.stats.functionality += 1;
                    }
                }
                let upto = |i: u32| (0..i).map(atom).collect::<Vec<Lit>>();
                match self.mode {
                    Mode::Plain => {
                        self.clauses.push(upto(values));
                        self.stats.totality += 1;
                    }
                    Mode::Pointwise => {
                        let mut c = upto(values);
                        if values == full {
                            c.push(Lit::pos(self.table.larger(f.ret)));
                        }
                        self.clauses.push(c);
                        self.stats.totality += 1;
                    }
                    Mode::Contour => {
                        if values < full {
                            self.clauses.push(upto(values));
                            self.stats.totality += 1;
                        }
                        let levels: Vec<u32> = if mono { vec![full] } else { (1..=values.min(full)).collect() };
                        for i in levels {
                            if i > values {
                                continue;
                            }
                            let mut c = upto(i);
                            c.push(Lit::pos(self.table.bound(f.ret, i)));
                            self.clauses.push(c);
                            self.stats.totality += 1;
                        }
                    }
                }
            }
        }
    }

    fn symmetry(&mut self) {
        for g in &self.info.symmetry_groups {
            let n = eff(self.n.get(g.sort), g.bound);
            let terms = g.terms(self.n);
            let l = terms.len() as u32;
            let is = |t: (FunId, Option<u32>), m: u32| {
                let args: Vec<u32> = t.1.into_iter().collect();
                Lit::pos(self.table.fun_var(t.0, &args, m))
            };
            for i in 1..=l.min(n) {
                let t = terms[(i - 1) as usize];
                self.clauses.push((0..i).map(|m| is(t, m)).collect());
                self.stats.symmetry += 1;
            }
            for i in 2..=l {
                for m in 2..=n {
                    let mut c = vec![!is(terms[(i - 1) as usize], m - 1)];
                    c.extend(terms[..(i - 1) as usize].iter().map(|t| is(*t, m - 2)));
                    self.clauses.push(c);
                    self.stats.symmetry += 1;
                }
            }
        }
    }

    /// `size(s) > i` as a literal; `None` when it is trivially true.
    fn greater(&self, s: SortId, i: u32) -> Option<Lit> {
        let n = self.n.get(s);
        if i == 0 {
            None
        } else if i < n {
            Some(Lit::pos(self.table.bound(s, i)))
        } else {
            Some(Lit::pos(self.table.bound(s, n)))
        }
    }

    fn size_clauses(&mut self) {
        for s in self.n.sorts() {
            if self.is_mono(s) {
                continue;
            }
            for i in 1..self.n.get(s) {
                self.clauses.push(vec![!Lit::pos(self.table.bound(s, i + 1)), Lit::pos(self.table.bound(s, i))]);
                self.stats.size += 1;
            }
        }
        for c in &self.info.inter {
            let [SizeAtom::Inter(a, strict, b)] = c.0.as_slice() else { continue };
            let shift = u32::from(*strict == Strict::Lt);
            let start = if shift == 1 { 0 } else { 1 };
            for i in start..self.n.get(*a) {
                let mut clause = Vec::new();
                if let Some(l) = self.greater(*a, i) {
                    clause.push(!l);
                }
                clause.push(self.greater(*b, i + shift).expect("i + shift >= 1"));
                self.clauses.push(clause);
                self.stats.size += 1;
            }
        }
    }
}

/// All tuples over `0..r` for each range `r`, last position fastest.
fn tuples(ranges: &[u32]) -> Vec<Vec<u32>> {
    if ranges.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; ranges.len()];
    loop {
        out.push(cur.clone());
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < ranges[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

fn saturating_product(xs: impl Iterator<Item = u64>) -> u64 {
    xs.fold(1u64, |acc, x| acc.saturating_mul(x))
}

/// The number of clauses `build` would produce, by formula. Tautological
/// instances dropped for `x = y` literals are still counted, so this is an
/// upper bound for clauses with variable equalities and exact otherwise.
pub fn count_clauses(p: &FlatProblem, info: &GroundInfo, n: &DomainSizes, mode: Mode) -> u64 {
    let sig = &p.signature;
    let mut total = 0u64;
    for (ci, c) in p.clauses.iter().enumerate() {
        let count = saturating_product(c.vars.iter().zip(&info.var_bound[ci]).map(|(v, b)| eff(n.get(v.sort), *b) as u64));
        total = total.saturating_add(count);
    }
    for (fi, f) in sig.functions.iter().enumerate() {
        let tuples = saturating_product(f.args.iter().zip(&info.fun_arg_bound[fi]).map(|(s, b)| eff(n.get(*s), *b) as u64));
        let full = n.get(f.ret) as u64;
        let values = eff(n.get(f.ret), info.fun_ret_bound[fi]) as u64;
        let per_term = values * values.saturating_sub(1) / 2
            + match mode {
                Mode::Contour if info.contour_monotonic(f.ret) => u64::from(values < full) + u64::from(values == full),
                Mode::Contour => u64::from(values < full) + values,
                _ => 1,
            };
        total = total.saturating_add(tuples.saturating_mul(per_term));
    }
    for g in &info.symmetry_groups {
        let m = eff(n.get(g.sort), g.bound) as u64;
        let l = g.term_count(n);
        if l > 0 {
            total = total.saturating_add(l.min(m) + (l - 1) * m.saturating_sub(1));
        }
    }
    if mode == Mode::Contour {
        for s in n.sorts() {
            if !info.contour_monotonic(s) {
                total = total.saturating_add(n.get(s) as u64 - 1);
            }
        }
        for c in &info.inter {
            if let [SizeAtom::Inter(a, strict, _)] = c.0.as_slice() {
                let na = n.get(*a) as u64;
                total += if *strict == Strict::Lt { na } else { na - 1 };
            }
        }
    }
    total
}

/// Search priority: pointwise clause count plus the sum of all sizes, which
/// makes every child strictly larger than its parent.
pub fn estimate_size(p: &FlatProblem, info: &GroundInfo, n: &DomainSizes) -> u64 {
    count_clauses(p, info, n, Mode::Pointwise).saturating_add(n.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{clausify, parse, ClausifyOptions, Dialect};
    use crate::preprocess::flatten;
    use crate::sat::{SatOutcome, Solver};

    fn flat(text: &str) -> FlatProblem {
        let (sig, fs) = parse(text, Dialect::detect(text)).unwrap();
        let p = clausify(&sig, &fs, &ClausifyOptions::default()).unwrap();
        FlatProblem { clauses: p.clauses.iter().map(|c| flatten(c, &p.signature)).collect(), signature: p.signature }
    }

    const RUNNING: &str = "cnf(a, axiom, p(b)). cnf(b, axiom, f(a) != b). cnf(c, axiom, f(f(X)) = X).";

    const NO_VAR_EQ: &str = "tff(a, type, s1: $tType). tff(b, type, s2: $tType). tff(c, type, s3: $tType).
        tff(d, type, f: s1 > s2). tff(e, type, g: (s2 * s1) > s3). tff(h, type, c: s3).
        tff(i, type, p: (s1 * s3) > $o). tff(j, type, a1: s1). tff(k, type, a2: s1).
        tff(l, axiom, ![X: s1, Z: s3]: (p(X, Z) | g(f(X), X) = Z)).
        tff(m, axiom, ![X: s1]: ~p(X, c)). tff(n, axiom, f(a1) != f(a2)).";

    fn solve(e: &Encoding) -> SatOutcome {
        let mut s = Solver::new();
        s.ensure_vars(e.table.num_vars() as usize);
        for c in &e.clauses {
            s.add_clause(c);
        }
        s.solve(&e.assumptions).unwrap()
    }

    #[test]
    fn running_example_counts() {
        let p = flat(RUNNING);
        let info = GroundInfo::basic(&p, vec![false], false);
        let e = build(&p, &info, &DomainSizes::new(vec![2]), Mode::Plain, u64::MAX).unwrap();
        assert_eq!((e.stats.instances, e.stats.functionality, e.stats.totality), (10, 4, 4));
        assert_eq!(e.stats.total(), e.clauses.len() as u64);
        assert!(solve(&e).is_sat());
        let e1 = build(&p, &info, &DomainSizes::new(vec![1]), Mode::Plain, u64::MAX).unwrap();
        assert!(!solve(&e1).is_sat());
    }

    #[test]
    fn count_matches_build() {
        // exact without variable equalities, an upper bound with them
        for (text, n, exact) in [
            (NO_VAR_EQ, vec![3, 2, 4], true),
            (include_str!("../fixtures/omv.p"), vec![2, 3, 2], false),
        ] {
            let p = flat(text);
            let s = p.signature.sort_count();
            let n = DomainSizes::new(n);
            for mode in [Mode::Plain, Mode::Pointwise, Mode::Contour] {
                for mono in [vec![false; s], vec![true; s]] {
                    let info = GroundInfo::basic(&p, mono, true);
                    let e = build(&p, &info, &n, mode, u64::MAX).unwrap();
                    let counted = count_clauses(&p, &info, &n, mode);
                    if exact {
                        assert_eq!(counted, e.clauses.len() as u64, "{mode:?}");
                    } else {
                        assert!(counted >= e.clauses.len() as u64, "{mode:?}");
                    }
                    assert_eq!(e.stats.total(), e.clauses.len() as u64);
                }
            }
        }
    }

    #[test]
    fn cap_is_checked_first() {
        let p = flat(RUNNING);
        let info = GroundInfo::basic(&p, vec![false], false);
        assert!(matches!(build(&p, &info, &DomainSizes::new(vec![5]), Mode::Plain, 10), Err(EncodeError::TooLarge { .. })));
    }

    #[test]
    fn contour_guard_example() {
        // f(x) != y | b != y with f: s1 -> s2 and b: s2
        let text = "tff(s1, type, s1: $tType). tff(s2, type, s2: $tType).
            tff(f, type, f: s1 > s2). tff(b, type, b: s2).
            tff(ax, axiom, ![X: s1]: f(X) != b).";
        let p = flat(text);
        let info = GroundInfo::basic(&p, vec![false, false], false);
        let n = DomainSizes::new(vec![3, 1]);
        let e = build(&p, &info, &n, Mode::Contour, u64::MAX).unwrap();
        let f = p.signature.function_by_name("f").unwrap();
        let b = p.signature.function_by_name("b").unwrap();
        let expected = {
            let mut c = vec![Lit::neg(e.table.fun_var(f, &[2], 0)), Lit::neg(e.table.fun_var(b, &[], 0)), Lit::neg(e.table.bound(SortId(0), 2))];
            c.sort();
            c
        };
        assert!(e.clauses.iter().any(|c| {
            let mut c = c.clone();
            c.sort();
            c == expected
        }));
        // three guarded totality clauses per s2-valued term at bound 3 would
        // need s2 bound 3; s1 has no terms. Check f's totality at s2 = 1.
        assert_eq!(e.assumptions.len(), 2);
    }

    #[test]
    fn contour_totality_levels() {
        let p = flat("cnf(a, axiom, p(a)).");
        let info = GroundInfo::basic(&p, vec![false], false);
        let e = build(&p, &info, &DomainSizes::new(vec![3]), Mode::Contour, u64::MAX).unwrap();
        assert_eq!(e.stats.totality, 3);
        let info = GroundInfo::basic(&p, vec![true], false);
        let e = build(&p, &info, &DomainSizes::new(vec![3]), Mode::Contour, u64::MAX).unwrap();
        assert_eq!(e.stats.totality, 1);
    }

    #[test]
    fn symmetry_two_constants() {
        let p = flat("cnf(a, axiom, a != b).");
        let info = GroundInfo::basic(&p, vec![true], true);
        let e = build(&p, &info, &DomainSizes::new(vec![2]), Mode::Plain, u64::MAX).unwrap();
        // a1 = c1; a2 = c1 | a2 = c2; a2 != c2 | a1 = c1
        assert_eq!(e.stats.symmetry, 3);
        let single = build(&p, &GroundInfo::basic(&p, vec![true], true), &DomainSizes::new(vec![1]), Mode::Plain, u64::MAX).unwrap();
        assert_eq!(single.stats.symmetry, 1);
    }

    #[test]
    fn marking_polarity() {
        let p = flat(include_str!("../fixtures/omv.p"));
        let info = GroundInfo::basic(&p, vec![false, false, true], true);
        let n = DomainSizes::new(vec![1, 2, 2]);
        let e = build(&p, &info, &n, Mode::Pointwise, u64::MAX).unwrap();
        for c in &e.clauses {
            for l in c {
                match e.table.meaning(l.var()) {
                    Some(VarMeaning::Larger(_)) | Some(VarMeaning::Smaller(_)) => assert!(l.is_positive()),
                    Some(_) => {}
                    None => panic!("unknown variable {l:?}"),
                }
            }
        }
        // banana is monotonic: its instances are never marked
        let smaller_banana = Lit::pos(e.table.smaller(SortId(2)));
        assert!(e.clauses.iter().all(|c| !c.contains(&smaller_banana)));
        match solve(&e) {
            SatOutcome::Unsat(core) => {
                assert!(!core.is_empty());
                assert!(core.iter().all(|l| e.assumptions.contains(l)));
            }
            SatOutcome::Sat(_) => panic!("OMV has no model at (1,2,2)"),
        }
    }

    #[test]
    fn atom_numbering_round_trips() {
        let p = flat(include_str!("../fixtures/omv.p"));
        let n = DomainSizes::new(vec![2, 3, 4]);
        for mode in [Mode::Pointwise, Mode::Contour] {
            let t = AtomTable::new(&p, &n, mode);
            let mut seen = std::collections::BTreeSet::new();
            for v in 1..=t.num_vars() {
                let m = t.meaning(v).unwrap();
                let back = match &m {
                    VarMeaning::Fun(f, a, d) => t.fun_var(*f, a, *d),
                    VarMeaning::Pred(q, a) => t.pred_var(*q, a),
                    VarMeaning::Larger(s) => t.larger(*s),
                    VarMeaning::Smaller(s) => t.smaller(*s),
                    VarMeaning::Bound(s, i) => t.bound(*s, *i),
                };
                assert_eq!(back, v);
                assert!(seen.insert(format!("{m:?}")));
            }
        }
    }

    #[test]
    fn tuples_enumerate_in_order() {
        assert_eq!(tuples(&[2, 2]), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(&[]), vec![Vec::<u32>::new()]);
        assert!(tuples(&[3, 0]).is_empty());
    }
}
