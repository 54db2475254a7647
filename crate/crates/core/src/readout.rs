//! Decoding network states into multi-valued assignments, expanding those into
//! concrete verified solutions, and color-permutation diversity analysis.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::Network;
use crate::csp::{Assignment, Csp, ProblemKind};
use crate::sampler::SamplerState;

pub const DEFAULT_EXPANSION_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReadoutError {
    #[error("variable `{0}` has no active value; state is not a solution candidate")]
    NotExpandable(String),
    #[error("canonical coloring needs a coloring CSP, got {0}")]
    NotColoring(ProblemKind),
    #[error("multi-assignment covers {got} variables, CSP has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("value {val} outside the domain of `{var}`")]
    OutOfDomain { var: String, val: usize },
}

/// Per-variable sets of active value indices, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiAssignment {
    pub sets: Vec<Vec<usize>>,
}

impl MultiAssignment {
    pub fn new(mut sets: Vec<Vec<usize>>) -> Self {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        MultiAssignment { sets }
    }

    pub fn from_assignment(values: &[usize]) -> Self {
        MultiAssignment { sets: values.iter().map(|&v| vec![v]).collect() }
    }

    pub fn all_nonempty(&self) -> bool {
        self.sets.iter().all(|s| !s.is_empty())
    }

    pub fn is_singleton(&self) -> bool {
        self.sets.iter().all(|s| s.len() == 1)
    }

    /// Number of combinations in the Cartesian product, saturating.
    pub fn product_size(&self) -> u128 {
        self.sets.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    /// Variables holding more than one value.
    pub fn multi_valued(&self) -> Vec<usize> {
        (0..self.sets.len()).filter(|&v| self.sets[v].len() > 1).collect()
    }
}

/// Value sets of every variable from the principal neurons active in `state`.
pub fn decode(net: &Network, state: &SamplerState) -> MultiAssignment {
    let mut sets = Vec::with_capacity(net.n_vars());
    decode_into(net, state, &mut sets);
    MultiAssignment { sets }
}

pub(crate) fn decode_into(net: &Network, state: &SamplerState, sets: &mut Vec<Vec<usize>>) {
    sets.resize_with(net.n_vars(), Vec::new);
    for (var, set) in sets.iter_mut().enumerate() {
        set.clear();
        for (val, &n) in net.var_neurons(var).iter().enumerate() {
            if state.is_active(n) {
                set.push(val);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub solutions: Vec<Assignment>,
    /// More solutions exist beyond the cap.
    pub truncated: bool,
}

/// Backtracking expander over value sets, checking each constraint as soon as
/// its last variable is assigned. Build once per CSP and reuse.
#[derive(Debug, Clone)]
pub struct SolutionExpander<'a> {
    csp: &'a Csp,
    by_last: Vec<Vec<usize>>,
}

impl<'a> SolutionExpander<'a> {
    pub fn new(csp: &'a Csp) -> Self {
        let mut by_last = vec![Vec::new(); csp.num_vars()];
        for (ci, c) in csp.constraints().iter().enumerate() {
            let last = c.lits().iter().map(|l| l.var).max().expect("constraints are non-empty");
            by_last[last].push(ci);
        }
        SolutionExpander { csp, by_last }
    }

    /// All verified solutions inside the product of `sets`, up to `cap`.
    /// Returns the value vectors and whether the cap cut the search short.
    pub fn expand_values(&self, sets: &[Vec<usize>], cap: usize) -> (Vec<Vec<usize>>, bool) {
        let mut out = Vec::new();
        if sets.iter().any(|s| s.is_empty()) || cap == 0 {
            return (out, cap == 0 && sets.iter().all(|s| !s.is_empty()));
        }
        let mut values = vec![0usize; sets.len()];
        let truncated = self.search(sets, 0, &mut values, cap, &mut out);
        for sol in &out {
            assert!(self.csp.satisfied_by(sol), "expansion produced an invalid assignment");
        }
        (out, truncated)
    }

    fn search(&self, sets: &[Vec<usize>], var: usize, values: &mut [usize], cap: usize, out: &mut Vec<Vec<usize>>) -> bool {
        if var == sets.len() {
            if out.len() == cap {
                return true;
            }
            out.push(values.to_vec());
            return false;
        }
        let constraints = self.csp.constraints();
        for &val in &sets[var] {
            values[var] = val;
            if self.by_last[var].iter().all(|&ci| constraints[ci].holds(values))
                && self.search(sets, var + 1, values, cap, out)
            {
                return true;
            }
        }
        false
    }
}

/// Verified solutions contained in a multi-valued assignment.
pub fn expand_solutions(m: &MultiAssignment, csp: &Csp, cap: usize) -> Result<Expansion, ReadoutError> {
    if m.sets.len() != csp.num_vars() {
        return Err(ReadoutError::Dimension { expected: csp.num_vars(), got: m.sets.len() });
    }
    for (var, set) in m.sets.iter().enumerate() {
        if set.is_empty() {
            return Err(ReadoutError::NotExpandable(csp.variables()[var].clone()));
        }
        if let Some(&val) = set.iter().find(|&&v| v >= csp.domain_size(var)) {
            return Err(ReadoutError::OutOfDomain { var: csp.variables()[var].clone(), val });
        }
    }
    let (values, truncated) = SolutionExpander::new(csp).expand_values(&m.sets, cap);
    Ok(Expansion { solutions: values.into_iter().map(Assignment::complete).collect(), truncated })
}

/// Relabels values by order of first appearance, starting at 1.
pub fn canonical_form(values: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    values
        .iter()
        .map(|v| {
            let next = map.len() + 1;
            *map.entry(*v).or_insert(next)
        })
        .collect()
}

/// Canonical representative of a coloring's color-permutation class.
pub fn canonical_coloring(csp: &Csp, a: &Assignment) -> Result<Vec<usize>, ReadoutError> {
    if csp.kind() != ProblemKind::Coloring {
        return Err(ReadoutError::NotColoring(csp.kind()));
    }
    let values = a
        .complete_values(csp)
        .map_err(|e| ReadoutError::NotExpandable(e.to_string()))?;
    Ok(canonical_form(&values))
}

/// Class key: the canonical form for colorings, the exact assignment otherwise.
pub fn class_key(kind: ProblemKind, values: &[usize]) -> Vec<usize> {
    if kind == ProblemKind::Coloring {
        canonical_form(values)
    } else {
        values.to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub n_solutions: usize,
    pub n_classes: usize,
    pub duplicate_count: usize,
}

/// Counts distinct classes and exact repeats. Partial assignments count as
/// their own class and never as duplicates of complete ones.
pub fn diversity_report(solutions: &[Assignment], csp: &Csp) -> DiversityReport {
    let mut exact = HashSet::new();
    let mut classes = HashSet::new();
    let mut duplicate_count = 0;
    for a in solutions {
        if !exact.insert(a.values().to_vec()) {
            duplicate_count += 1;
        }
        match a.complete_values(csp) {
            Ok(v) => classes.insert(class_key(csp.kind(), &v)),
            Err(_) => classes.insert(a.values().iter().map(|v| v.map_or(usize::MAX, |x| x)).collect()),
        };
    }
    DiversityReport { n_solutions: solutions.len(), n_classes: classes.len(), duplicate_count }
}

/// One entry of the solutions JSON export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionEntry {
    pub assignment: BTreeMap<String, String>,
    pub discovery_sweep: u64,
    /// Index of the solution's class in order of first appearance.
    pub canonical_class: usize,
}

/// Builds export entries, numbering classes by first appearance.
pub fn solution_entries(csp: &Csp, found: &[(Vec<usize>, u64)]) -> Vec<SolutionEntry> {
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    found
        .iter()
        .map(|(values, sweep)| {
            let next = ids.len();
            let class = *ids.entry(class_key(csp.kind(), values)).or_insert(next);
            SolutionEntry {
                assignment: values
                    .iter()
                    .enumerate()
                    .map(|(v, &val)| (csp.variables()[v].clone(), csp.domain(v)[val].clone()))
                    .collect(),
                discovery_sweep: *sweep,
                canonical_class: class,
            }
        })
        .collect()
}

/// Maps a labeled assignment back to value indices. Missing variables stay unassigned.
pub fn entry_to_assignment(csp: &Csp, entry: &SolutionEntry) -> Result<Assignment, crate::csp::CspError> {
    let mut values = vec![None; csp.num_vars()];
    for (name, label) in &entry.assignment {
        let v = csp.var_index(name)?;
        let val = csp
            .domain(v)
            .iter()
            .position(|d| d == label)
            .ok_or_else(|| crate::csp::CspError::UnknownVariable(format!("{name}={label}")))?;
        values[v] = Some(val);
    }
    Ok(Assignment::new(values))
}
