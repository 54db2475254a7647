//! CSP data model: variables with finite domains, mutual-exclusion pairs and
//! disjunctive clauses, plus the constraint graph used for degree queries.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Problem family tag. Only `Coloring` enables color-permutation canonicalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Sat,
    Coloring,
    Sudoku,
    Ising,
    Generic,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProblemKind::Sat => "sat",
            ProblemKind::Coloring => "coloring",
            ProblemKind::Sudoku => "sudoku",
            ProblemKind::Ising => "ising",
            ProblemKind::Generic => "generic",
        };
        f.write_str(s)
    }
}

/// A `(variable, value)` pair, both as indices into the owning [`Csp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lit {
    pub var: usize,
    pub val: usize,
}

impl Lit {
    pub fn new(var: usize, val: usize) -> Self {
        Lit { var, val }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// The two assignments may not hold simultaneously.
    MutexPair(Lit, Lit),
    /// At least one of the listed assignments must hold. Negation is expressed
    /// through the value (`¬x` is `x = false`).
    Clause(Vec<Lit>),
}

impl Constraint {
    pub fn lits(&self) -> Vec<Lit> {
        match self {
            Constraint::MutexPair(a, b) => vec![*a, *b],
            Constraint::Clause(lits) => lits.clone(),
        }
    }

    /// Evaluates the constraint under a complete assignment given as value indices.
    pub fn holds(&self, values: &[usize]) -> bool {
        match self {
            Constraint::MutexPair(a, b) => !(values[a.var] == a.val && values[b.var] == b.val),
            Constraint::Clause(lits) => lits.iter().any(|l| values[l.var] == l.val),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CspError {
    #[error("duplicate variable id `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{var}` has duplicate value `{value}`")]
    DuplicateValue { var: String, value: String },
    #[error("domains given for {domains} variables but {vars} variables declared")]
    DomainCount { vars: usize, domains: usize },
    #[error("constraint {index} references unknown variable index {var}")]
    UnknownVariableIndex { index: usize, var: usize },
    #[error("constraint {index} references value {val} outside the domain of `{var}`")]
    ValueOutOfDomain { index: usize, var: String, val: usize },
    #[error("constraint {0}: mutex pair endpoints coincide")]
    DegenerateMutex(usize),
    #[error("constraint {0}: clause has no literals")]
    EmptyClause(usize),
    #[error("constraint {0}: clause repeats a literal")]
    DuplicateLiteral(usize),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("assignment has {got} entries, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment is partial: variable `{0}` is unassigned")]
    PartialAssignment(String),
    #[error("value index {val} outside the domain of `{var}`")]
    AssignmentOutOfDomain { var: String, val: usize },
}

/// The ⟨X, D, C⟩ triplet. Immutable once built; `Csp::new` validates every invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Csp {
    kind: ProblemKind,
    variables: Vec<String>,
    domains: Vec<Vec<String>>,
    constraints: Vec<Constraint>,
}

impl Csp {
    pub fn new(
        kind: ProblemKind,
        variables: Vec<String>,
        domains: Vec<Vec<String>>,
        constraints: Vec<Constraint>,
    ) -> Result<Self, CspError> {
        if variables.len() != domains.len() {
            return Err(CspError::DomainCount { vars: variables.len(), domains: domains.len() });
        }
        let mut seen = HashSet::with_capacity(variables.len());
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(CspError::DuplicateVariable(v.clone()));
            }
        }
        for (v, d) in variables.iter().zip(&domains) {
            if d.is_empty() {
                return Err(CspError::EmptyDomain(v.clone()));
            }
            let mut vals = HashSet::with_capacity(d.len());
            for val in d {
                if !vals.insert(val.as_str()) {
                    return Err(CspError::DuplicateValue { var: v.clone(), value: val.clone() });
                }
            }
        }
        for (index, c) in constraints.iter().enumerate() {
            let lits = c.lits();
            for l in &lits {
                if l.var >= variables.len() {
                    return Err(CspError::UnknownVariableIndex { index, var: l.var });
                }
                if l.val >= domains[l.var].len() {
                    return Err(CspError::ValueOutOfDomain { index, var: variables[l.var].clone(), val: l.val });
                }
            }
            match c {
                Constraint::MutexPair(a, b) if a == b => return Err(CspError::DegenerateMutex(index)),
                Constraint::Clause(lits) if lits.is_empty() => return Err(CspError::EmptyClause(index)),
                Constraint::Clause(lits) => {
                    let distinct: HashSet<_> = lits.iter().collect();
                    if distinct.len() != lits.len() {
                        return Err(CspError::DuplicateLiteral(index));
                    }
                }
                _ => {}
            }
        }
        Ok(Csp { kind, variables, domains, constraints })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn domains(&self) -> &[Vec<String>] {
        &self.domains
    }

    pub fn domain(&self, var: usize) -> &[String] {
        &self.domains[var]
    }

    pub fn domain_size(&self, var: usize) -> usize {
        self.domains[var].len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var_index(&self, id: &str) -> Result<usize, CspError> {
        self.variables
            .iter()
            .position(|v| v == id)
            .ok_or_else(|| CspError::UnknownVariable(id.to_string()))
    }

    /// Product of domain sizes, saturating at `u128::MAX`.
    pub fn search_space(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    pub fn constraint_graph(&self) -> ConstraintGraph {
        ConstraintGraph::from_csp(self)
    }

    pub fn variable_degree(&self, id: &str) -> Result<usize, CspError> {
        let v = self.var_index(id)?;
        Ok(self.constraint_graph().degree(v))
    }

    /// Checks a complete assignment; returns the indices of violated constraints.
    pub fn check_assignment(&self, a: &Assignment) -> Result<Verdict, CspError> {
        let values = a.complete_values(self)?;
        let violations: Vec<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.holds(&values))
            .map(|(i, _)| i)
            .collect();
        Ok(if violations.is_empty() { Verdict::Satisfied } else { Verdict::Violations(violations) })
    }

    /// Same check over raw value indices without the completeness wrapper.
    pub(crate) fn satisfied_by(&self, values: &[usize]) -> bool {
        self.constraints.iter().all(|c| c.holds(values))
    }
}

/// Undirected, self-loop-free variable graph; one edge per coupled pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintGraph {
    adj: Vec<Vec<usize>>,
}

impl ConstraintGraph {
    pub fn from_csp(csp: &Csp) -> Self {
        let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); csp.num_vars()];
        for c in csp.constraints() {
            let vars: BTreeSet<usize> = c.lits().iter().map(|l| l.var).collect();
            let vars: Vec<usize> = vars.into_iter().collect();
            for (i, &a) in vars.iter().enumerate() {
                for &b in &vars[i + 1..] {
                    sets[a].insert(b);
                    sets[b].insert(a);
                }
            }
        }
        ConstraintGraph { adj: sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }
}

/// Per-variable value index, `None` when unassigned.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    values: Vec<Option<usize>>,
}

impl Assignment {
    pub fn new(values: Vec<Option<usize>>) -> Self {
        Assignment { values }
    }

    pub fn complete(values: Vec<usize>) -> Self {
        Assignment { values: values.into_iter().map(Some).collect() }
    }

    pub fn values(&self) -> &[Option<usize>] {
        &self.values
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.values.get(var).copied().flatten()
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Value indices of a complete, in-domain assignment.
    pub fn complete_values(&self, csp: &Csp) -> Result<Vec<usize>, CspError> {
        if self.values.len() != csp.num_vars() {
            return Err(CspError::AssignmentLength { expected: csp.num_vars(), got: self.values.len() });
        }
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                None => Err(CspError::PartialAssignment(csp.variables()[i].clone())),
                Some(val) if *val >= csp.domain_size(i) => {
                    Err(CspError::AssignmentOutOfDomain { var: csp.variables()[i].clone(), val: *val })
                }
                Some(val) => Ok(*val),
            })
            .collect()
    }

    /// Human-readable `(variable, value label)` pairs; unassigned variables are skipped.
    pub fn labeled<'a>(&self, csp: &'a Csp) -> Vec<(&'a str, &'a str)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|val| (csp.variables()[i].as_str(), csp.domain(i)[val].as_str())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Violations(Vec<usize>),
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Verdict::Satisfied)
    }

    pub fn violations(&self) -> &[usize] {
        match self {
            Verdict::Satisfied => &[],
            Verdict::Violations(v) => v,
        }
    }
}

/// Boolean domain used by SAT-style encodings: index 0 is true, 1 is false.
pub const BOOL_DOMAIN: [&str; 2] = ["T", "F"];
pub const TRUE: usize = 0;
pub const FALSE: usize = 1;

pub(crate) fn labels<I, S>(it: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: ToString,
{
    it.into_iter().map(|s| s.to_string()).collect()
}
