//! A small CDCL solver: two watched literals, first-UIP learning, activity
//! branching, solving under assumptions with failed-assumption cores.
//!
//! One solver is built per encoding. Clauses may still be added between
//! `solve` calls, which the tests use to re-check cores.

use std::fmt;
use std::io::{self, Write};
use thiserror::Error;

/// A propositional literal over variables numbered from 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Lit {
        assert!(var >= 1, "variables start at 1");
        Lit(var * 2 + u32::from(!positive))
    }

    pub fn pos(var: u32) -> Lit {
        Lit::new(var, true)
    }

    pub fn neg(var: u32) -> Lit {
        Lit::new(var, false)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Signed DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        if self.is_positive() {
            self.var() as i64
        } else {
            -(self.var() as i64)
        }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        assert!(x != 0);
        Lit::new(x.unsigned_abs() as u32, x > 0)
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatOutcome {
    /// `model[v]` is the value of variable `v`; index 0 is unused.
    Sat(Vec<bool>),
    /// The assumptions that were enough for the conflict. Empty when the
    /// clauses alone are unsatisfiable.
    Unsat(Vec<Lit>),
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("conflict budget of {0} exhausted")]
    Budget(u64),
    #[error("deadline passed")]
    Timeout,
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: u32 = u32::MAX;

struct ClauseRec {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Binary max-heap of variables keyed by activity; ties go to the lower
/// variable so branching is reproducible.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    index: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn better(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn grow(&mut self, nvars: usize) {
        self.index.resize(nvars + 1, NOT_IN_HEAP);
    }

    fn contains(&self, v: u32) -> bool {
        self.index[v as usize] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.index[v as usize] = self.heap.len();
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.index[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.up(self.index[v as usize], act);
        }
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.index[self.heap[i] as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.index[v as usize] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.index[self.heap[i] as usize] = i;
            i = child;
        }
        self.heap[i] = v;
        self.index[v as usize] = i;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
}

pub struct Solver {
    nvars: usize,
    clauses: Vec<ClauseRec>,
    num_learnts: usize,
    watches: Vec<Vec<Watcher>>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    max_learnts: f64,
    conflict_budget: Option<u64>,
    deadline: Option<std::time::Instant>,
    restarts: bool,
    pub stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            nvars: 0,
            clauses: Vec::new(),
            num_learnts: 0,
            watches: vec![Vec::new(), Vec::new()],
            value: vec![UNDEF],
            level: vec![0],
            reason: vec![NO_REASON],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            phase: vec![false],
            seen: vec![false],
            ok: true,
            max_learnts: 0.0,
            conflict_budget: None,
            deadline: None,
            restarts: false,
            stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    /// Number of stored problem clauses (learnt clauses excluded).
    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.learnt && !c.deleted).count()
    }

    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.conflict_budget = budget;
    }

    /// Gives up with [`SolveError::Timeout`] once the clock passes `at`.
    /// Checked every 256 conflicts.
    pub fn set_deadline(&mut self, at: Option<std::time::Instant>) {
        self.deadline = at;
    }

    /// Luby restarts; off unless asked for.
    pub fn set_restarts(&mut self, on: bool) {
        self.restarts = on;
    }

    pub fn new_var(&mut self) -> u32 {
        self.ensure_vars(self.nvars + 1);
        self.nvars as u32
    }

    /// Makes variables `1..=n` available.
    pub fn ensure_vars(&mut self, n: usize) {
        if n <= self.nvars {
            return;
        }
        self.value.resize(n + 1, UNDEF);
        self.level.resize(n + 1, 0);
        self.reason.resize(n + 1, NO_REASON);
        self.activity.resize(n + 1, 0.0);
        self.phase.resize(n + 1, false);
        self.seen.resize(n + 1, false);
        self.watches.resize(2 * (n + 1), Vec::new());
        self.heap.grow(n);
        for v in self.nvars + 1..=n {
            self.heap.insert(v as u32, &self.activity);
        }
        self.nvars = n;
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var() as usize];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause. Duplicate literals are removed; a clause with a literal
    /// and its negation is dropped.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        if !self.ok {
            return;
        }
        self.cancel_until(0);
        let mut c: Vec<Lit> = lits.to_vec();
        if let Some(m) = c.iter().map(|l| l.var()).max() {
            self.ensure_vars(m as usize);
        }
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        // drop literals already false at level 0, skip clauses already true
        let mut kept = Vec::with_capacity(c.len());
        for &l in &c {
            match self.lit_value(l) {
                TRUE => return,
                FALSE => {}
                _ => kept.push(l),
            }
        }
        match kept.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(kept[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(kept, false);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[(!lits[0]).code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[(!lits[1]).code()].push(Watcher { cref, blocker: lits[0] });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(ClauseRec { lits, learnt, deleted: false, activity: 0.0 });
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        self.value[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                let nw = Watcher { cref: w.cref, blocker: first };
                if first != w.blocker && self.lit_value(first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                // look for a new literal to watch
                let len = self.clauses[cref].lits.len();
                let mut found = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.lit_value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[(!l).code()].push(nw);
                        found = true;
                        break;
                    }
                }
                if found {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.lit_value(first) == FALSE {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            // watchers added to p's own list during the loop would be lost;
            // they cannot occur because a clause never re-watches its false literal
            let added = std::mem::replace(&mut self.watches[p.code()], ws);
            self.watches[p.code()].extend(added);
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for idx in (lim..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var() as usize;
            self.value[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.phase[v] = l.is_positive();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn bump_var(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal first)
    /// and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl as usize].lits.clone();
            let start = usize::from(p.is_some());
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var() as usize];
            self.seen[lit.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    return true;
                }
                let r = self.reason[l.var() as usize];
                if r == NO_REASON {
                    return true;
                }
                self.clauses[r as usize].lits.iter().skip(1).any(|q| {
                    let v = q.var() as usize;
                    !self.seen[v] && self.level[v] > 0
                })
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut out: Vec<Lit> = learnt.iter().zip(keep).filter(|(_, k)| *k).map(|(l, _)| *l).collect();

        let bt = if out.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var() as usize] > self.level[out[max_i].var() as usize] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            self.level[out[1].var() as usize]
        };
        (out, bt)
    }

    /// The assumptions responsible for `p` being false; `p` itself included.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut core = vec![p];
        if self.decision_level() == 0 {
            return core;
        }
        let np = !p;
        self.seen[np.var() as usize] = true;
        for idx in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var() as usize;
            if !self.seen[v] {
                continue;
            }
            let r = self.reason[v];
            if r == NO_REASON {
                if l != np {
                    core.push(l);
                }
            } else {
                for &q in &self.clauses[r as usize].lits[1..] {
                    if self.level[q.var() as usize] > 0 {
                        self.seen[q.var() as usize] = true;
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[np.var() as usize] = false;
        core
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<(f64, u32)> = self
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.learnt && !c.deleted && c.lits.len() > 2)
            .map(|(i, c)| (c.activity, i as u32))
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let target = cands.len() / 2;
        let mut removed = 0;
        for &(_, cref) in &cands {
            if removed >= target {
                break;
            }
            let first = self.clauses[cref as usize].lits[0];
            let locked = self.lit_value(first) == TRUE && self.reason[first.var() as usize] == cref;
            if !locked {
                self.clauses[cref as usize].deleted = true;
                self.clauses[cref as usize].lits = Vec::new();
                self.num_learnts -= 1;
                removed += 1;
            }
        }
        for w in self.watches.iter_mut() {
            w.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v as usize] == UNDEF {
                return Some(Lit::new(v, self.phase[v as usize]));
            }
        }
        None
    }

    /// Solves the clauses under `assumptions`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SatOutcome, SolveError> {
        if let Some(m) = assumptions.iter().map(|l| l.var()).max() {
            self.ensure_vars(m as usize);
        }
        if !self.ok {
            return Ok(SatOutcome::Unsat(Vec::new()));
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return Ok(SatOutcome::Unsat(Vec::new()));
        }
        self.max_learnts = (self.num_clauses() as f64 / 3.0).max(2000.0);
        let start_conflicts = self.stats.conflicts;
        let mut luby_index = 0u32;
        let mut restart_at = self.stats.conflicts + 100 * luby(luby_index);

        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Ok(SatOutcome::Unsat(Vec::new()));
                }
                if let Some(b) = self.conflict_budget {
                    if self.stats.conflicts - start_conflicts > b {
                        self.cancel_until(0);
                        return Err(SolveError::Budget(b));
                    }
                }
                if let Some(t) = self.deadline {
                    if self.stats.conflicts % 256 == 0 && std::time::Instant::now() >= t {
                        self.cancel_until(0);
                        return Err(SolveError::Timeout);
                    }
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                continue;
            }

            if self.restarts && self.stats.conflicts >= restart_at {
                luby_index += 1;
                restart_at = self.stats.conflicts + 100 * luby(luby_index);
                self.cancel_until(0);
                continue;
            }
            if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }

            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.lit_value(a) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => {
                        let mut core = self.analyze_final(a);
                        core.sort();
                        core.dedup();
                        self.cancel_until(0);
                        return Ok(SatOutcome::Unsat(core));
                    }
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let lit = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => {
                        self.stats.decisions += 1;
                        l
                    }
                    None => {
                        let mut model = vec![false; self.nvars + 1];
                        for v in 1..=self.nvars {
                            model[v] = self.value[v] == TRUE;
                        }
                        self.cancel_until(0);
                        return Ok(SatOutcome::Sat(model));
                    }
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(lit, NO_REASON);
        }
    }
}

fn luby(i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < u64::from(i) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = u64::from(i);
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Writes a DIMACS CNF file. Each comment line is prefixed with `c `.
pub fn write_dimacs<W: Write>(out: &mut W, num_vars: usize, clauses: &[Vec<Lit>], comments: &[String]) -> io::Result<()> {
    for c in comments {
        writeln!(out, "c {c}")?;
    }
    writeln!(out, "p cnf {} {}", num_vars, clauses.len())?;
    for c in clauses {
        for l in c {
            write!(out, "{} ", l.to_dimacs())?;
        }
        writeln!(out, "0")?;
    }
    Ok(())
}

/// Reads the clause part of a DIMACS file; comments are skipped.
pub fn read_dimacs(text: &str) -> Result<(usize, Vec<Vec<Lit>>), String> {
    let mut nvars = 0usize;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let mut it = rest.split_whitespace();
            nvars = it.next().and_then(|x| x.parse().ok()).ok_or("bad header")?;
            continue;
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| format!("bad literal {tok:?}"))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    if !current.is_empty() {
        return Err("last clause is not terminated".into());
    }
    Ok((nvars, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contradiction_has_empty_core() {
        let mut s = Solver::new();
        s.add_clause(&[Lit::pos(1)]);
        s.add_clause(&[Lit::neg(1)]);
        assert_eq!(s.solve(&[Lit::pos(2)]).unwrap(), SatOutcome::Unsat(vec![]));
    }

    #[test]
    fn empty_clause_makes_everything_unsat() {
        let mut s = Solver::new();
        s.add_clause(&[]);
        assert_eq!(s.solve(&[]).unwrap(), SatOutcome::Unsat(vec![]));
    }

    #[test]
    fn forced_conflict_under_assumptions() {
        let mut s = Solver::new();
        s.add_clause(&[Lit::pos(1), Lit::pos(2)]);
        match s.solve(&[Lit::neg(1), Lit::neg(2)]).unwrap() {
            SatOutcome::Unsat(core) => {
                assert!(!core.is_empty());
                assert!(core.iter().all(|l| [Lit::neg(1), Lit::neg(2)].contains(l)));
            }
            other => panic!("{other:?}"),
        }
        assert!(s.solve(&[Lit::neg(1)]).unwrap().is_sat());
    }

    #[test]
    fn core_excludes_irrelevant_assumptions() {
        let mut s = Solver::new();
        s.add_clause(&[Lit::pos(1), Lit::pos(2)]);
        s.add_clause(&[Lit::pos(3), Lit::pos(4)]);
        match s.solve(&[Lit::neg(3), Lit::neg(1), Lit::neg(2)]).unwrap() {
            SatOutcome::Unsat(core) => assert!(!core.contains(&Lit::neg(3))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pigeonhole_three_into_two() {
        let mut s = Solver::new();
        let v = |p: u32, h: u32| p * 2 + h + 1;
        for p in 0..3 {
            s.add_clause(&[Lit::pos(v(p, 0)), Lit::pos(v(p, 1))]);
        }
        for h in 0..2 {
            for p in 0..3 {
                for q in p + 1..3 {
                    s.add_clause(&[Lit::neg(v(p, h)), Lit::neg(v(q, h))]);
                }
            }
        }
        assert_eq!(s.solve(&[]).unwrap(), SatOutcome::Unsat(vec![]));
    }

    #[test]
    fn luby_sequence() {
        let got: Vec<u64> = (0..9).map(luby).collect();
        assert_eq!(got, vec![1, 1, 2, 1, 1, 2, 4, 1, 1]);
    }

    #[test]
    fn dimacs_round_trip() {
        let clauses = vec![vec![Lit::pos(1), Lit::neg(2)], vec![Lit::pos(2)]];
        let mut buf = Vec::new();
        write_dimacs(&mut buf, 2, &clauses, &["1 p".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("p cnf 2 2\n1 -2 0\n2 0\n"));
        assert_eq!(read_dimacs(&text).unwrap(), (2, clauses));
    }
}
