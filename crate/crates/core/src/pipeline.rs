//! From input text to a grounding-ready problem: clausification, flattening,
//! sort transformations, splitting, and the analyses the search uses.

use crate::constraints::{Constraint, Rel, SizeAtom};
use crate::encode::{GroundInfo, Mode};
use crate::frontend::{clausify, parse, ClausifyError, ClausifyOptions, Dialect, ParseError};
use crate::logic::{check_well_sorted, Clause, Problem, SortId};
use crate::model::TransformLog;
use crate::preprocess::{eliminate_variable_inequalities, flatten, introduce_definitions, split_clauses, FlatProblem};
use crate::sorts::{
    bounds_from_facts, collapse_monotonic, detect_function_facts, detect_max_sizes, expand_subsorts, infer_subsorts,
    monotonic_classes,
};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// `Pointwise` or `Contour`.
    pub mode: Mode,
    /// Learned, detected and max-size constraints in the pointwise search.
    pub constraints: bool,
    pub collapse: bool,
    pub expand: bool,
    /// Inter-sort constraints from injective/surjective functions.
    pub bounds: bool,
    pub symmetry: bool,
    pub definitions: bool,
    /// Split clauses with more variables than this; `None` disables splitting.
    pub split_max_vars: Option<usize>,
    pub verify: bool,
    /// Assert conjectures as axioms instead of negating them.
    pub keep_conjecture: bool,
    pub time_limit: Duration,
    /// Largest encoding, in clauses, the search will build.
    pub clause_cap: u64,
    /// Nodes whose sizes sum to more than this are not explored.
    pub max_total_size: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            mode: Mode::Pointwise,
            constraints: true,
            collapse: true,
            expand: true,
            bounds: true,
            symmetry: true,
            definitions: true,
            split_max_vars: Some(3),
            verify: true,
            keep_conjecture: false,
            time_limit: Duration::from_secs(60),
            clause_cap: 50_000_000,
            max_total_size: 10_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Clausify(#[from] ClausifyError),
    #[error("ill-sorted input: {0}")]
    IllSorted(String),
}

/// Parses and clausifies a problem in either TPTP dialect.
pub fn load(text: &str, keep_conjecture: bool) -> Result<Problem, LoadError> {
    let (sig, formulas) = parse(text, Dialect::detect(text))?;
    let options = ClausifyOptions { negate_conjectures: !keep_conjecture, ..ClausifyOptions::default() };
    let p = clausify(&sig, &formulas, &options)?;
    if let Some(d) = check_well_sorted(&p).first() {
        return Err(LoadError::IllSorted(d.to_string()));
    }
    Ok(p)
}

/// A problem ready for the search.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// The clausified input, against which models are verified.
    pub original: Problem,
    pub flat: FlatProblem,
    pub info: GroundInfo,
    pub log: TransformLog,
    /// Constraints known before the search starts.
    pub seed: Vec<Constraint>,
    /// Constraints that models must satisfy to be translated back.
    pub required: Vec<Constraint>,
    pub max_sizes: BTreeMap<SortId, u32>,
    /// Sorts no clause or symbol uses; they stay at size 1.
    pub frozen: Vec<bool>,
    pub monotonic: Vec<bool>,
}

impl Prepared {
    pub fn sort_count(&self) -> usize {
        self.flat.signature.sort_count()
    }

    pub fn is_growable(&self, s: SortId, current: u32) -> bool {
        !self.frozen[s.index()] && self.max_sizes.get(&s).map_or(true, |m| current < *m)
    }
}

pub fn prepare(original: Problem, cfg: &Config) -> Prepared {
    let mut sig = original.signature.clone();
    let clauses: Vec<Clause> = original
        .clauses
        .iter()
        .map(eliminate_variable_inequalities)
        .map(|c| c.without_trivially_false())
        .filter(|c| !c.is_tautology())
        .collect();
    let clauses = if cfg.definitions { introduce_definitions(&clauses, &mut sig, 1, false).0 } else { clauses };
    let mut flat = FlatProblem { clauses: clauses.iter().map(|c| flatten(c, &sig)).collect(), signature: sig };
    let mut log = TransformLog::default();

    if cfg.collapse {
        let part = infer_subsorts(&flat);
        let mono = monotonic_classes(&flat, &part);
        let monotonic: BTreeSet<SortId> = (0..flat.signature.sort_count() as u32)
            .map(SortId)
            .filter(|s| {
                let classes = part.classes_of_sort(*s);
                classes.iter().any(|&k| part.used[k]) && classes.iter().all(|&k| mono[k])
            })
            .collect();
        let (collapsed, c) = collapse_monotonic(&flat, &monotonic);
        flat = collapsed;
        log.collapse = c;
    }

    let mut required = Vec::new();
    if cfg.expand {
        let part = infer_subsorts(&flat);
        let mono = monotonic_classes(&flat, &part);
        let skip: BTreeSet<SortId> = log.collapse.iter().map(|c| c.sort).collect();
        let (expanded, expansions, le) = expand_subsorts(&flat, &part, &mono, &skip);
        flat = expanded;
        log.expansions = expansions;
        required = le;
    }

    if let Some(k) = cfg.split_max_vars {
        let (clauses, _) = split_clauses(&flat.clauses, &mut flat.signature, k);
        flat.clauses = clauses;
    }

    let part = infer_subsorts(&flat);
    let class_mono = monotonic_classes(&flat, &part);
    let sorts = flat.signature.sort_count();
    let monotonic: Vec<bool> =
        (0..sorts as u32).map(|s| part.classes_of_sort(SortId(s)).iter().all(|&k| class_mono[k])).collect();
    let frozen: Vec<bool> = (0..sorts as u32).map(|s| part.classes_of_sort(SortId(s)).is_empty()).collect();
    let max = detect_max_sizes(&flat, &part, &class_mono);

    let mut inter = required.clone();
    if cfg.bounds {
        for c in bounds_from_facts(&detect_function_facts(&original), &flat.signature) {
            if !inter.contains(&c) {
                inter.push(c);
            }
        }
    }
    let mut seed: Vec<Constraint> =
        max.per_sort.iter().map(|(s, b)| Constraint::single(SizeAtom::Cmp(*s, Rel::Le, *b))).collect();
    seed.extend(inter.iter().cloned());
    let info = GroundInfo::with_subsorts(&flat, &part, &max.per_class, monotonic.clone(), cfg.symmetry, inter);
    Prepared { original, flat, info, log, seed, required, max_sizes: max.per_sort, frozen, monotonic }
}
