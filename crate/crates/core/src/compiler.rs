//! CSP → spiking network compilation.
//!
//! Every `(variable, value)` pair becomes a principal neuron. Motifs add
//! quadratic energy terms on top of `E(x) = -Σ b_i x_i - ½ Σ w_ij x_i x_j`:
//!
//! * `Bias`: positive bias on each principal neuron.
//! * `VariableWta`: pairwise inhibition among a variable's value neurons. Its
//!   strength follows the degree heuristic when enabled.
//! * `MutexWta`: inhibition between the two neurons of a mutex pair.
//! * `OrClause`: a push auxiliary that excites the literals, a veto
//!   auxiliary excited by the literals that inhibits the push unit, and
//!   inhibition among the clause's literals. With the auxiliaries at their
//!   minimizing state the motif contributes `Δ·[no literal active] - 2Δ`, so
//!   every satisfying literal pattern has the same energy. Clauses with more
//!   than three literals get one extra veto unit per additional literal.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csp::{Constraint, Csp, Lit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("WTA weight undefined for domain size {0} (need >= 2)")]
    DomainTooSmall(usize),
    #[error("invalid compiler parameter: {0}")]
    InvalidParams(String),
    #[error("state has {got} entries, network has {expected} neurons")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompilerParams {
    pub w_max: f64,
    pub bias_default: f64,
    pub or_push_strength: f64,
    pub heuristic_enabled: bool,
}

impl Default for CompilerParams {
    fn default() -> Self {
        CompilerParams { w_max: 2.0, bias_default: 1.0, or_push_strength: 2.0, heuristic_enabled: true }
    }
}

impl CompilerParams {
    pub fn baseline(self) -> Self {
        CompilerParams { heuristic_enabled: false, ..self }
    }

    pub fn heuristic(self) -> Self {
        CompilerParams { heuristic_enabled: true, ..self }
    }

    fn validate(&self) -> Result<(), CompileError> {
        if !(self.w_max > 0.0 && self.w_max.is_finite()) {
            return Err(CompileError::InvalidParams(format!("w_max must be positive, got {}", self.w_max)));
        }
        if !self.bias_default.is_finite() {
            return Err(CompileError::InvalidParams("bias_default must be finite".into()));
        }
        if !(self.or_push_strength > 0.0 && self.or_push_strength.is_finite()) {
            return Err(CompileError::InvalidParams(format!(
                "or_push_strength must be positive, got {}",
                self.or_push_strength
            )));
        }
        Ok(())
    }
}

/// Degree-scaled WTA weight: `w_max` once `degree >= D - 1`, otherwise
/// `degree / (D - 1) * w_max`.
pub fn heuristic_weight(degree: usize, domain_size: usize, w_max: f64) -> Result<f64, CompileError> {
    if domain_size < 2 {
        return Err(CompileError::DomainTooSmall(domain_size));
    }
    let slack = domain_size - 1;
    Ok(if degree >= slack { w_max } else { degree as f64 / slack as f64 * w_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MotifKind {
    VariableWta,
    MutexWta,
    OrClause,
    Bias,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotifSource {
    Variable(usize),
    Constraint(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifInstance {
    pub kind: MotifKind,
    /// Principal neurons the motif acts on, followed by any auxiliaries it owns.
    pub members: Vec<usize>,
    pub strength: f64,
    pub source: MotifSource,
    /// Weight contributions `(i, j, w)` with `i < j`.
    pub couplings: Vec<(usize, usize, f64)>,
    /// Bias contributions `(i, b)`.
    pub biases: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub bias: f64,
    pub wta: f64,
    pub or: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.bias + self.wta + self.or
    }
}

/// Compiled network. Principal neurons occupy indices `0..n_principal` in
/// `(variable, value)` order; auxiliaries follow.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n_principal: usize,
    biases: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    neuron_map: Vec<Lit>,
    lit_index: Vec<Vec<usize>>,
    motifs: Vec<MotifInstance>,
    aux_owner: Vec<usize>,
}

impl Network {
    /// A bare network with explicit biases and symmetric couplings and no CSP
    /// semantics. All neurons count as principal. Repeated pairs accumulate.
    pub fn from_parts(biases: Vec<f64>, couplings: &[(usize, usize, f64)]) -> Result<Self, CompileError> {
        let n = biases.len();
        let mut acc = BTreeMap::new();
        for &(i, j, w) in couplings {
            if i >= n || j >= n || i == j || !w.is_finite() {
                return Err(CompileError::InvalidParams(format!("bad coupling ({i}, {j}, {w})")));
            }
            *acc.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        Ok(Self::assemble(n, biases, &acc, Vec::new(), Vec::new(), Vec::new(), Vec::new()))
    }

    fn assemble(
        n_principal: usize,
        biases: Vec<f64>,
        pairs: &BTreeMap<(usize, usize), f64>,
        neuron_map: Vec<Lit>,
        lit_index: Vec<Vec<usize>>,
        motifs: Vec<MotifInstance>,
        aux_owner: Vec<usize>,
    ) -> Self {
        let n = biases.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(i, j), &w) in pairs {
            if w != 0.0 {
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for row in &mut adj {
            row.sort_by_key(|&(j, _)| j);
            for &(j, w) in row.iter() {
                targets.push(j);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        Network { n_principal, biases, offsets, targets, weights, neuron_map, lit_index, motifs, aux_owner }
    }

    pub fn n_neurons(&self) -> usize {
        self.biases.len()
    }

    pub fn n_principal(&self) -> usize {
        self.n_principal
    }

    pub fn n_auxiliary(&self) -> usize {
        self.biases.len() - self.n_principal
    }

    pub fn bias(&self, i: usize) -> f64 {
        self.biases[i]
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// `(neighbor, weight)` pairs of neuron `i`, sorted by neighbor.
    pub fn synapses(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub(crate) fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.targets[r.clone()], &self.weights[r])
    }

    /// Weight between `i` and `j` (0 if unconnected).
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (t, w) = self.row(i);
        t.binary_search(&j).map(|k| w[k]).unwrap_or(0.0)
    }

    /// Non-zero couplings as `(i, j, w)` with `i < j`, sorted.
    pub fn weight_triples(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n_neurons())
            .flat_map(|i| self.synapses(i).filter(move |&(j, _)| j > i).map(move |(j, w)| (i, j, w)))
            .collect()
    }

    pub fn motifs(&self) -> &[MotifInstance] {
        &self.motifs
    }

    /// `(variable, value)` of a principal neuron; `None` for auxiliaries or bare networks.
    pub fn lit_of(&self, neuron: usize) -> Option<Lit> {
        self.neuron_map.get(neuron).copied()
    }

    pub fn neuron_of(&self, lit: Lit) -> Option<usize> {
        self.lit_index.get(lit.var).and_then(|v| v.get(lit.val)).copied()
    }

    /// Principal neurons of a variable, in value order.
    pub fn var_neurons(&self, var: usize) -> &[usize] {
        &self.lit_index[var]
    }

    pub fn n_vars(&self) -> usize {
        self.lit_index.len()
    }

    /// Motif index owning an auxiliary neuron.
    pub fn aux_owner(&self, neuron: usize) -> Option<usize> {
        neuron.checked_sub(self.n_principal).and_then(|k| self.aux_owner.get(k)).copied()
    }

    /// Strength of the VariableWta motif of `var`, if it has one.
    pub fn variable_wta_strength(&self, var: usize) -> Option<f64> {
        self.motifs
            .iter()
            .find(|m| m.kind == MotifKind::VariableWta && m.source == MotifSource::Variable(var))
            .map(|m| m.strength)
    }

    fn check_dim(&self, len: usize) -> Result<(), CompileError> {
        if len != self.n_neurons() {
            return Err(CompileError::Dimension { expected: self.n_neurons(), got: len });
        }
        Ok(())
    }

    /// `E(x) = -Σ b_i x_i - Σ_{i<j} w_ij x_i x_j`.
    pub fn energy(&self, x: &[bool]) -> Result<f64, CompileError> {
        self.check_dim(x.len())?;
        Ok(self.energy_unchecked(|i| x[i]))
    }

    pub(crate) fn energy_unchecked(&self, active: impl Fn(usize) -> bool) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n_neurons() {
            if !active(i) {
                continue;
            }
            e -= self.biases[i];
            for (j, w) in self.synapses(i) {
                if j > i && active(j) {
                    e -= w;
                }
            }
        }
        e
    }

    /// Energy split by motif family. Auxiliary biases count toward their motif.
    pub fn energy_breakdown(&self, x: &[bool]) -> Result<EnergyBreakdown, CompileError> {
        self.check_dim(x.len())?;
        let mut out = EnergyBreakdown::default();
        for m in &self.motifs {
            let mut e = 0.0;
            for &(i, b) in &m.biases {
                if x[i] {
                    e -= b;
                }
            }
            for &(i, j, w) in &m.couplings {
                if x[i] && x[j] {
                    e -= w;
                }
            }
            match m.kind {
                MotifKind::Bias => out.bias += e,
                MotifKind::VariableWta | MotifKind::MutexWta => out.wta += e,
                MotifKind::OrClause => out.or += e,
            }
        }
        Ok(out)
    }

    pub fn dump(&self) -> NetworkDump {
        let neurons = (0..self.n_neurons())
            .map(|i| NeuronEntry {
                index: i,
                role: if i < self.n_principal { "principal" } else { "auxiliary" }.to_string(),
                var: self.lit_of(i).map(|l| l.var),
                value: self.lit_of(i).map(|l| l.val),
                motif: self.aux_owner(i),
                bias: self.biases[i],
            })
            .collect();
        NetworkDump {
            n_principal: self.n_principal,
            n_auxiliary: self.n_auxiliary(),
            neurons,
            weights: self.weight_triples(),
            motifs: self
                .motifs
                .iter()
                .map(|m| MotifEntry { kind: m.kind, source: m.source, strength: m.strength, members: m.members.clone() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronEntry {
    pub index: usize,
    pub role: String,
    pub var: Option<usize>,
    pub value: Option<usize>,
    pub motif: Option<usize>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifEntry {
    pub kind: MotifKind,
    pub source: MotifSource,
    pub strength: f64,
    pub members: Vec<usize>,
}

/// Deterministic listing of a compiled network for inspection and golden files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDump {
    pub n_principal: usize,
    pub n_auxiliary: usize,
    pub neurons: Vec<NeuronEntry>,
    pub weights: Vec<(usize, usize, f64)>,
    pub motifs: Vec<MotifEntry>,
}

impl NetworkDump {
    pub fn to_text(&self, csp: Option<&Csp>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# neurons principal={} auxiliary={}", self.n_principal, self.n_auxiliary);
        for n in &self.neurons {
            let label = match (n.var, n.value, csp) {
                (Some(v), Some(val), Some(c)) => format!("{}={}", c.variables()[v], c.domain(v)[val]),
                (Some(v), Some(val), None) => format!("{v}={val}"),
                _ => format!("aux(motif {})", n.motif.map_or("-".into(), |m| m.to_string())),
            };
            let _ = writeln!(out, "neuron {} {} bias {}", n.index, label, n.bias);
        }
        let _ = writeln!(out, "# weights {}", self.weights.len());
        for (i, j, w) in &self.weights {
            let _ = writeln!(out, "w {i} {j} {w}");
        }
        let _ = writeln!(out, "# motifs {}", self.motifs.len());
        for (k, m) in self.motifs.iter().enumerate() {
            let src = match m.source {
                MotifSource::Variable(v) => format!("var {v}"),
                MotifSource::Constraint(c) => format!("constraint {c}"),
            };
            let members: Vec<String> = m.members.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "motif {k} {:?} {src} strength {} members {}", m.kind, m.strength, members.join(","));
        }
        out
    }
}

struct Builder {
    biases: Vec<f64>,
    pairs: BTreeMap<(usize, usize), f64>,
    motifs: Vec<MotifInstance>,
    aux_owner: Vec<usize>,
}

impl Builder {
    fn push(&mut self, m: MotifInstance) {
        for &(i, b) in &m.biases {
            self.biases[i] += b;
        }
        for &(i, j, w) in &m.couplings {
            *self.pairs.entry((i, j)).or_insert(0.0) += w;
        }
        self.motifs.push(m);
    }

    fn new_aux(&mut self) -> usize {
        self.biases.push(0.0);
        self.aux_owner.push(self.motifs.len());
        self.biases.len() - 1
    }
}

fn pair(i: usize, j: usize, w: f64) -> (usize, usize, f64) {
    (i.min(j), i.max(j), w)
}

/// Compiles a CSP into a network. Deterministic: identical inputs give identical networks.
pub fn compile(csp: &Csp, params: &CompilerParams) -> Result<Network, CompileError> {
    params.validate()?;
    let mut neuron_map = Vec::new();
    let mut lit_index = Vec::with_capacity(csp.num_vars());
    for var in 0..csp.num_vars() {
        let mut row = Vec::with_capacity(csp.domain_size(var));
        for val in 0..csp.domain_size(var) {
            row.push(neuron_map.len());
            neuron_map.push(Lit::new(var, val));
        }
        lit_index.push(row);
    }
    let n_principal = neuron_map.len();
    let degrees = csp.constraint_graph().degrees();
    let mut b = Builder {
        biases: vec![0.0; n_principal],
        pairs: BTreeMap::new(),
        motifs: Vec::new(),
        aux_owner: Vec::new(),
    };

    for var in 0..csp.num_vars() {
        let members = lit_index[var].clone();
        let d = members.len();
        let bias = if d == 1 { 4.0 * params.bias_default } else { params.bias_default };
        b.push(MotifInstance {
            kind: MotifKind::Bias,
            biases: members.iter().map(|&i| (i, bias)).collect(),
            members: members.clone(),
            strength: bias,
            source: MotifSource::Variable(var),
            couplings: Vec::new(),
        });
        if d >= 2 {
            let w = if params.heuristic_enabled {
                heuristic_weight(degrees[var], d, params.w_max)?
            } else {
                params.w_max
            };
            let mut couplings = Vec::new();
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    couplings.push(pair(i, j, -w));
                }
            }
            b.push(MotifInstance {
                kind: MotifKind::VariableWta,
                members,
                strength: w,
                source: MotifSource::Variable(var),
                couplings,
                biases: Vec::new(),
            });
        }
    }

    let delta = params.or_push_strength;
    for (ci, c) in csp.constraints().iter().enumerate() {
        match c {
            Constraint::MutexPair(x, y) => {
                let (i, j) = (lit_index[x.var][x.val], lit_index[y.var][y.val]);
                b.push(MotifInstance {
                    kind: MotifKind::MutexWta,
                    members: vec![i, j],
                    strength: params.w_max,
                    source: MotifSource::Constraint(ci),
                    couplings: vec![pair(i, j, -params.w_max)],
                    biases: Vec::new(),
                });
            }
            Constraint::Clause(lits) => {
                let lits: Vec<usize> = lits.iter().map(|l| lit_index[l.var][l.val]).collect();
                let k = lits.len();
                let push = b.new_aux();
                let veto = b.new_aux();
                let extra: Vec<usize> = (3..k).map(|_| b.new_aux()).collect();
                let mut couplings = Vec::new();
                let mut biases = vec![(push, delta), (veto, -delta)];
                for (a, &l) in lits.iter().enumerate() {
                    couplings.push(pair(push, l, delta));
                    couplings.push(pair(veto, l, delta));
                    for &m in &lits[a + 1..] {
                        couplings.push(pair(l, m, -delta));
                    }
                    for &e in &extra {
                        couplings.push(pair(e, l, delta));
                    }
                }
                couplings.push(pair(push, veto, -delta));
                for (t, &e) in extra.iter().enumerate() {
                    biases.push((e, -((t + 3) as f64) * delta));
                }
                let mut members = lits;
                members.push(push);
                members.push(veto);
                members.extend(&extra);
                b.push(MotifInstance {
                    kind: MotifKind::OrClause,
                    members,
                    strength: delta,
                    source: MotifSource::Constraint(ci),
                    couplings,
                    biases,
                });
            }
        }
    }

    Ok(Network::assemble(n_principal, b.biases, &b.pairs, neuron_map, lit_index, b.motifs, b.aux_owner))
}
