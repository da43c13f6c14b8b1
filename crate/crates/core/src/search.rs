//! Searching the space of domain-size assignments.
//!
//! The pointwise search visits nodes in order of estimated encoding size,
//! learning a constraint from each unsatisfiable check. The contour search
//! keeps one vector of upper bounds and grows a sort named by the core.

use crate::constraints::{Constraint, ConstraintStore, Reach, Rel, SizeAtom};
use crate::encode::{build, count_clauses, estimate_size, EncodeError, Encoding, EncodingStats, Mode, VarMeaning};
use crate::logic::{DomainSizes, SortId};
use crate::model::{extract, translate_back, verify, FiniteModel, VERIFY_LIMIT};
use crate::pipeline::{Config, Prepared};
use crate::sat::{Lit, SatOutcome, SolveError, Solver, SolverStats};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Satisfiable {
        /// Model of the clausified input.
        model: FiniteModel,
        /// The model the SAT solver produced, over the preprocessed signature.
        internal: FiniteModel,
    },
    Unsatisfiable,
    ResourceOut(String),
    /// A bug: extraction, translation or verification failed.
    Error(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    CheckedSat,
    CheckedUnsat,
    Ignored,
    Pruned,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::CheckedSat => "checked-sat",
            Action::CheckedUnsat => "checked-unsat",
            Action::Ignored => "ignored",
            Action::Pruned => "pruned",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLine {
    pub sizes: DomainSizes,
    pub action: Action,
    pub learned: Option<String>,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes.as_slice().iter().map(|n| n.to_string()).collect();
        write!(f, "sizes={} action={}", sizes.join(","), self.action)?;
        if let Some(l) = &self.learned {
            write!(f, " learned={l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: Outcome,
    pub trace: Vec<TraceLine>,
    /// Number of SAT checks.
    pub checked: usize,
    /// The encoding of the last check.
    pub last_encoding: Option<EncodingStats>,
    pub solver: SolverStats,
    /// DIMACS text of the last encoding, when asked for.
    pub dimacs: Option<String>,
}

/// Options that do not affect the result.
#[derive(Clone, Copy, Debug, Default)]
pub struct Extras {
    pub keep_dimacs: bool,
}

struct Run<'a> {
    prep: &'a Prepared,
    cfg: &'a Config,
    extras: Extras,
    start: Instant,
    report: SearchReport,
}

enum Check {
    Sat(Vec<bool>, Encoding),
    Unsat(Vec<Lit>, Encoding),
}

impl<'a> Run<'a> {
    fn new(prep: &'a Prepared, cfg: &'a Config, extras: Extras) -> Run<'a> {
        Run {
            prep,
            cfg,
            extras,
            start: Instant::now(),
            report: SearchReport {
                outcome: Outcome::Unsatisfiable,
                trace: Vec::new(),
                checked: 0,
                last_encoding: None,
                solver: SolverStats::default(),
                dimacs: None,
            },
        }
    }

    fn finish(mut self, outcome: Outcome) -> SearchReport {
        self.report.outcome = outcome;
        self.report
    }

    fn check(&mut self, n: &DomainSizes, mode: Mode) -> Result<Check, Outcome> {
        if self.start.elapsed() >= self.cfg.time_limit {
            return Err(Outcome::ResourceOut("time limit".into()));
        }
        let enc = match build(&self.prep.flat, &self.prep.info, n, mode, self.cfg.clause_cap) {
            Ok(e) => e,
            Err(EncodeError::TooLarge { estimate, .. }) => {
                return Err(Outcome::ResourceOut(format!("encoding at {n} needs about {estimate} clauses")))
            }
        };
        let mut solver = Solver::new();
        solver.set_deadline(Some(self.start + self.cfg.time_limit));
        solver.ensure_vars(enc.table.num_vars() as usize);
        for c in &enc.clauses {
            solver.add_clause(c);
        }
        let result = solver.solve(&enc.assumptions);
        let s = &mut self.report.solver;
        s.conflicts += solver.stats.conflicts;
        s.decisions += solver.stats.decisions;
        s.propagations += solver.stats.propagations;
        self.report.checked += 1;
        self.report.last_encoding = Some(enc.stats);
        if self.extras.keep_dimacs {
            let mut out = Vec::new();
            enc.write_dimacs(&self.prep.flat, &mut out).expect("writing to memory");
            self.report.dimacs = Some(String::from_utf8(out).expect("DIMACS is ASCII"));
        }
        match result {
            Ok(SatOutcome::Sat(a)) => Ok(Check::Sat(a, enc)),
            Ok(SatOutcome::Unsat(core)) => Ok(Check::Unsat(core, enc)),
            Err(SolveError::Timeout) => Err(Outcome::ResourceOut("time limit".into())),
            Err(e) => Err(Outcome::ResourceOut(e.to_string())),
        }
    }

    /// Extracts, translates back and (optionally) verifies.
    fn model(&self, enc: &Encoding, sat: &[bool]) -> Outcome {
        let prep = self.prep;
        let internal = match extract(enc, &prep.info, &prep.flat.signature, sat) {
            Ok(m) => m,
            Err(e) => return Outcome::Error(format!("extraction: {e}")),
        };
        let model = match translate_back(&internal, &prep.flat.signature, &prep.original.signature, &prep.log) {
            Ok(m) => m,
            Err(e) => return Outcome::Error(format!("translation: {e}")),
        };
        if self.cfg.verify {
            match verify(&prep.original, &model, VERIFY_LIMIT) {
                Ok(()) => {}
                Err(crate::model::VerifyError::Violated(cx)) => {
                    return Outcome::Error(format!("model fails {}", cx.describe(&prep.original)))
                }
                Err(e) => return Outcome::Error(format!("verification: {e}")),
            }
        }
        Outcome::Satisfiable { model, internal }
    }
}

/// The constraint an unsatisfiable pointwise check teaches: some marked
/// condition must change. `None` for an empty core.
pub fn core_to_constraint(enc: &Encoding, core: &[Lit]) -> Option<Constraint> {
    let atoms: Vec<SizeAtom> = core
        .iter()
        .filter_map(|l| match enc.table.meaning(l.var()) {
            Some(VarMeaning::Larger(s)) => Some(SizeAtom::Cmp(s, Rel::Gt, enc.sizes.get(s))),
            Some(VarMeaning::Smaller(s)) => Some(SizeAtom::Cmp(s, Rel::Lt, enc.sizes.get(s))),
            _ => None,
        })
        .collect();
    (!atoms.is_empty()).then(|| Constraint::new(atoms))
}

/// Sorts named by a contour core, in sort order.
pub fn core_sorts(enc: &Encoding, core: &[Lit]) -> Vec<SortId> {
    let sorts: BTreeSet<SortId> = core
        .iter()
        .filter_map(|l| match enc.table.meaning(l.var()) {
            Some(VarMeaning::Bound(s, _)) => Some(s),
            _ => None,
        })
        .collect();
    sorts.into_iter().collect()
}

/// Among the growable sorts in the core, the one with the smallest bound;
/// ties go to the sort declared first.
pub fn choose_growth_sort(prep: &Prepared, bounds: &DomainSizes, core: &[SortId]) -> Option<SortId> {
    core.iter().copied().filter(|s| prep.is_growable(*s, bounds.get(*s))).min_by_key(|s| (bounds.get(*s), s.0))
}

pub fn search(prep: &Prepared, cfg: &Config, extras: Extras) -> SearchReport {
    match cfg.mode {
        Mode::Contour => contour_search(prep, cfg, extras),
        _ => pointwise_search(prep, cfg, extras),
    }
}

pub fn pointwise_search(prep: &Prepared, cfg: &Config, extras: Extras) -> SearchReport {
    let mut run = Run::new(prep, cfg, extras);
    let sig = &prep.flat.signature;
    let mut store = ConstraintStore::new();
    let seed = if cfg.constraints { &prep.seed } else { &prep.required };
    for c in seed {
        store.add(c.clone());
    }
    let mode = if cfg.constraints { Mode::Pointwise } else { Mode::Plain };
    // An s-child is pruned when the s-step broke a constraint with the
    // s-beam. Pruned children wait in `deferred` until `queue` runs dry:
    // the beam only rules out the child's own line, and its other
    // descendants may have no other way in.
    let mut queue: BinaryHeap<Reverse<(u64, u64, DomainSizes)>> = BinaryHeap::new();
    let mut deferred: BinaryHeap<Reverse<(u64, u64, DomainSizes)>> = BinaryHeap::new();
    let mut seen: BTreeSet<DomainSizes> = BTreeSet::new();
    let mut seq = 0u64;
    let mut dropped = false;
    let growable = |s: SortId| !prep.frozen[s.index()];
    let root = DomainSizes::ones(prep.sort_count());
    seen.insert(root.clone());
    queue.push(Reverse((estimate_size(&prep.flat, &prep.info, &root), seq, root)));

    while let Some(Reverse((_, _, node))) = queue.pop().or_else(|| deferred.pop()) {
        if run.start.elapsed() >= cfg.time_limit {
            return run.finish(Outcome::ResourceOut("time limit".into()));
        }
        if store.satisfies(&node) {
            match run.check(&node, mode) {
                Err(o) => return run.finish(o),
                Ok(Check::Sat(a, enc)) => {
                    run.report.trace.push(TraceLine { sizes: node, action: Action::CheckedSat, learned: None });
                    let outcome = run.model(&enc, &a);
                    return run.finish(outcome);
                }
                Ok(Check::Unsat(core, enc)) => {
                    let learned = if cfg.constraints { core_to_constraint(&enc, &core) } else { None };
                    if cfg.constraints && learned.is_none() {
                        run.report.trace.push(TraceLine { sizes: node, action: Action::CheckedUnsat, learned: Some("$false".into()) });
                        return run.finish(Outcome::Unsatisfiable);
                    }
                    let text = learned.as_ref().map(|c| c.display(sig).to_string());
                    run.report.trace.push(TraceLine { sizes: node.clone(), action: Action::CheckedUnsat, learned: text });
                    if let Some(c) = learned {
                        store.add(c);
                    }
                }
            }
        } else {
            run.report.trace.push(TraceLine { sizes: node.clone(), action: Action::Ignored, learned: None });
            match store.reach(&node, &growable, cfg.max_total_size) {
                Reach::Open(_) => {}
                Reach::Dead => continue,
                Reach::Beyond => {
                    dropped = true;
                    continue;
                }
            }
        }
        for s in node.sorts() {
            if prep.frozen[s.index()] {
                continue;
            }
            let child = node.child(s);
            if seen.contains(&child) {
                continue;
            }
            if child.total() > cfg.max_total_size {
                dropped = true;
                continue;
            }
            seen.insert(child.clone());
            seq += 1;
            let entry = Reverse((estimate_size(&prep.flat, &prep.info, &child), seq, child.clone()));
            if cfg.constraints && store.beam_from(&node, &child, s).is_some() {
                run.report.trace.push(TraceLine { sizes: child.clone(), action: Action::Pruned, learned: None });
                match store.reach(&child, &growable, cfg.max_total_size) {
                    Reach::Open(_) => deferred.push(entry),
                    Reach::Dead => {}
                    Reach::Beyond => dropped = true,
                }
                continue;
            }
            queue.push(entry);
        }
    }
    if dropped {
        run.finish(Outcome::ResourceOut("size limit".into()))
    } else {
        run.finish(Outcome::Unsatisfiable)
    }
}

pub fn contour_search(prep: &Prepared, cfg: &Config, extras: Extras) -> SearchReport {
    let mut run = Run::new(prep, cfg, extras);
    let sig = &prep.flat.signature;
    let mut bounds = DomainSizes::ones(prep.sort_count());
    loop {
        if count_clauses(&prep.flat, &prep.info, &bounds, Mode::Contour) > cfg.clause_cap || bounds.total() > cfg.max_total_size {
            return run.finish(Outcome::ResourceOut(format!("bounds {bounds} too large")));
        }
        match run.check(&bounds, Mode::Contour) {
            Err(o) => return run.finish(o),
            Ok(Check::Sat(a, enc)) => {
                run.report.trace.push(TraceLine { sizes: bounds, action: Action::CheckedSat, learned: None });
                let outcome = run.model(&enc, &a);
                return run.finish(outcome);
            }
            Ok(Check::Unsat(core, enc)) => {
                let sorts = core_sorts(&enc, &core);
                let grow = choose_growth_sort(prep, &bounds, &sorts);
                let learned = match grow {
                    Some(s) => format!("grow {}", sig.sort_name(s)),
                    None if sorts.is_empty() => "$false".into(),
                    None => "at max sizes".into(),
                };
                run.report.trace.push(TraceLine { sizes: bounds.clone(), action: Action::CheckedUnsat, learned: Some(learned) });
                match grow {
                    Some(s) => bounds = bounds.child(s),
                    None => return run.finish(Outcome::Unsatisfiable),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{load, prepare};

    fn run(text: &str, cfg: &Config) -> SearchReport {
        search(&prepare(load(text, false).unwrap(), cfg), cfg, Extras::default())
    }

    fn contour() -> Config {
        Config { mode: Mode::Contour, ..Config::default() }
    }

    const RUNNING: &str = "cnf(a, axiom, p(b)). cnf(b, axiom, f(a) != b). cnf(c, axiom, f(f(X)) = X).";

    #[test]
    fn running_example_both_modes() {
        for cfg in [Config::default(), contour()] {
            let r = run(RUNNING, &cfg);
            match &r.outcome {
                Outcome::Satisfiable { model, .. } => assert_eq!(model.sizes.as_slice(), &[2]),
                other => panic!("{other:?}"),
            }
            assert_eq!(r.checked, 2);
        }
    }

    #[test]
    fn contradiction_has_empty_core() {
        let text = "cnf(a, axiom, p). cnf(b, axiom, ~p).";
        for cfg in [Config::default(), contour()] {
            let r = run(text, &cfg);
            assert_eq!(r.outcome, Outcome::Unsatisfiable);
            assert_eq!(r.checked, 1);
            assert_eq!(r.trace.last().unwrap().learned.as_deref(), Some("$false"));
        }
    }

    #[test]
    fn max_size_exhaustion() {
        let text = "fof(a, axiom, ![X]: (X = a | X = b)). fof(d, axiom, $distinct(c1, c2, c3)).";
        for cfg in [Config::default(), contour()] {
            assert_eq!(run(text, &cfg).outcome, Outcome::Unsatisfiable);
        }
    }

    #[test]
    fn omv_smallest_model() {
        let r = run(include_str!("../fixtures/omv.p"), &Config::default());
        match &r.outcome {
            Outcome::Satisfiable { model, .. } => assert_eq!(model.sizes.as_slice(), &[2, 6, 12]),
            other => panic!("{other:?}"),
        }
        assert!(r.checked <= 50, "{} checks", r.checked);
    }

    #[test]
    fn injective_chain_is_found_through_seeded_bounds() {
        // Every child of the root violates a seeded inter-sort bound; the
        // search must still get through.
        let text = include_str!("../fixtures/injective_chain.p");
        let with = run(text, &Config::default());
        let without = run(text, &Config { bounds: false, ..Config::default() });
        for r in [&with, &without] {
            match &r.outcome {
                Outcome::Satisfiable { model, .. } => assert_eq!(model.sizes.as_slice(), &[5, 6, 6]),
                other => panic!("{other:?}"),
            }
        }
        assert!(with.checked <= 6 && with.checked < without.checked, "{} vs {}", with.checked, without.checked);
    }

    #[test]
    fn no_assignment_is_checked_twice() {
        let r = run(include_str!("../fixtures/omv.p"), &Config::default());
        let checked: Vec<&DomainSizes> = r
            .trace
            .iter()
            .filter(|l| matches!(l.action, Action::CheckedSat | Action::CheckedUnsat))
            .map(|l| &l.sizes)
            .collect();
        let unique: BTreeSet<&DomainSizes> = checked.iter().copied().collect();
        assert_eq!(unique.len(), checked.len());
        assert_eq!(checked.len(), r.checked);
    }

    #[test]
    fn children_cost_more_than_parents() {
        let prep = prepare(load(include_str!("../fixtures/omv.p"), false).unwrap(), &Config::default());
        let mut n = DomainSizes::ones(3);
        for s in [0u32, 1, 2, 1, 2, 2, 0] {
            let child = n.child(SortId(s));
            assert!(estimate_size(&prep.flat, &prep.info, &child) > estimate_size(&prep.flat, &prep.info, &n));
            n = child;
        }
    }

    #[test]
    fn trace_line_format() {
        let l = TraceLine {
            sizes: DomainSizes::new(vec![1, 2]),
            action: Action::CheckedUnsat,
            learned: Some("|s|>1".into()),
        };
        assert_eq!(l.to_string(), "sizes=1,2 action=checked-unsat learned=|s|>1");
    }
}
