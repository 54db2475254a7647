//! Discrete-time neural sampling.
//!
//! Each pick selects one neuron uniformly at random. An inactive neuron fires
//! with probability `min(1, e^u / τ)` and then stays active for exactly `τ`
//! ticks; it cannot be renewed while active. One tick is `N` picks, so after a
//! full sweep every neuron has aged by one tick. Expiry is stored as the pick
//! index at which the neuron lapses, which makes aging free.

use std::collections::HashSet;
use std::io::Write;
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compiler::Network;
use crate::csp::Csp;
use crate::readout::{decode_into, SolutionExpander, DEFAULT_EXPANSION_CAP};

pub const DEFAULT_TAU: u32 = 20;
pub const DEFAULT_MAX_SWEEPS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerParams {
    pub tau: u32,
    /// Budget in sweeps.
    pub max_sweeps: u64,
    pub seed: u64,
    pub record_trace: bool,
    pub expansion_cap: usize,
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams {
            tau: DEFAULT_TAU,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            seed: 0,
            record_trace: false,
            expansion_cap: DEFAULT_EXPANSION_CAP,
        }
    }
}

impl SamplerParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.tau == 0 {
            return Err("tau must be at least 1".into());
        }
        if self.max_sweeps == 0 {
            return Err("max_sweeps must be at least 1".into());
        }
        Ok(())
    }
}

/// Activity of every neuron plus its expiry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerState {
    lapse: Vec<u64>,
    step: u64,
}

impl SamplerState {
    pub fn new(n_neurons: usize) -> Self {
        SamplerState { lapse: vec![0; n_neurons], step: 0 }
    }

    /// State with the given neurons just fired (full window remaining).
    pub fn with_active(n_neurons: usize, tau: u32, active: &[usize]) -> Self {
        let mut s = Self::new(n_neurons);
        for &i in active {
            s.lapse[i] = tau as u64 * n_neurons as u64;
        }
        s
    }

    pub fn n_neurons(&self) -> usize {
        self.lapse.len()
    }

    #[inline]
    pub fn is_active(&self, i: usize) -> bool {
        self.lapse[i] > self.step
    }

    pub fn x(&self) -> Vec<bool> {
        (0..self.lapse.len()).map(|i| self.is_active(i)).collect()
    }

    pub fn n_active(&self) -> usize {
        self.lapse.iter().filter(|&&l| l > self.step).count()
    }

    /// Picks taken so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Completed sweeps.
    pub fn sweep(&self) -> u64 {
        self.step / self.lapse.len().max(1) as u64
    }

    /// Remaining active time of neuron `i` in ticks (0 when inactive, at most τ).
    pub fn expiry(&self, i: usize) -> f64 {
        self.lapse[i].saturating_sub(self.step) as f64 / self.lapse.len() as f64
    }

    /// Principal-neuron activity packed into a bitmask (first 64 neurons).
    pub fn bits(&self, n: usize) -> u64 {
        (0..n.min(64)).filter(|&i| self.is_active(i)).fold(0, |acc, i| acc | 1 << i)
    }
}

/// `u_i = b_i + Σ_j w_ij x_j`.
pub fn membrane_potential(net: &Network, s: &SamplerState, i: usize) -> f64 {
    let (targets, weights) = net.row(i);
    let mut u = net.bias(i);
    for (&j, &w) in targets.iter().zip(weights) {
        if s.is_active(j) {
            u += w;
        }
    }
    u
}

/// `min(1, e^u / τ)`.
pub fn fire_probability(u: f64, tau: u32) -> f64 {
    assert!(tau >= 1, "tau must be at least 1");
    (u.exp() / tau as f64).min(1.0)
}

/// A seeded single chain over one network.
#[derive(Debug, Clone)]
pub struct Chain<'a> {
    net: &'a Network,
    state: SamplerState,
    rng: ChaCha8Rng,
    tau: u32,
    window: u64,
}

impl<'a> Chain<'a> {
    pub fn new(net: &'a Network, tau: u32, seed: u64) -> Self {
        assert!(tau >= 1, "tau must be at least 1");
        Chain {
            net,
            state: SamplerState::new(net.n_neurons()),
            rng: ChaCha8Rng::seed_from_u64(seed),
            tau,
            window: tau as u64 * net.n_neurons() as u64,
        }
    }

    pub fn state(&self) -> &SamplerState {
        &self.state
    }

    /// One pick. Returns the neuron that fired, if any.
    #[inline]
    pub fn step(&mut self) -> Option<usize> {
        let n = self.net.n_neurons();
        if n == 0 {
            return None;
        }
        let i = self.rng.random_range(0..n);
        let mut fired = None;
        if !self.state.is_active(i) {
            let p = fire_probability(membrane_potential(self.net, &self.state, i), self.tau);
            if p >= 1.0 || self.rng.random::<f64>() < p {
                self.state.lapse[i] = self.state.step + 1 + self.window;
                fired = Some(i);
            }
        }
        self.state.step += 1;
        fired
    }

    /// `N` picks.
    pub fn sweep(&mut self) {
        for _ in 0..self.net.n_neurons() {
            self.step();
        }
    }
}

/// One pick on an explicit state; the functional form of [`Chain::step`].
pub fn step(net: &Network, s: &mut SamplerState, tau: u32, rng: &mut impl Rng) {
    let n = net.n_neurons();
    if n == 0 {
        return;
    }
    let i = rng.random_range(0..n);
    if !s.is_active(i) {
        let p = fire_probability(membrane_potential(net, s, i), tau);
        if p >= 1.0 || rng.random::<f64>() < p {
            s.lapse[i] = s.step + 1 + tau as u64 * n as u64;
        }
    }
    s.step += 1;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundSolution {
    pub values: Vec<usize>,
    pub sweep: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub sweep: u64,
    pub energy: f64,
    pub n_active: usize,
    pub solutions_found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub seed: u64,
    /// Sweep of the first solution event, if any.
    pub first_solution_sweep: Option<u64>,
    /// Distinct solutions in discovery order.
    pub solutions: Vec<FoundSolution>,
    pub sweeps_run: u64,
    pub final_energy: f64,
    /// Some expansion hit the cap.
    pub truncated: bool,
    /// Expanded solutions that had already been found earlier in the run.
    pub repeats: usize,
    pub trace: Vec<TraceRow>,
}

impl RunOutcome {
    pub fn solved(&self) -> bool {
        self.first_solution_sweep.is_some()
    }

    pub fn last_discovery_sweep(&self) -> Option<u64> {
        self.solutions.last().map(|s| s.sweep)
    }
}

/// Runs until `max_sweeps` or until `on_solution` breaks. After every sweep
/// the principal state is decoded; each new verified solution is passed to
/// `on_solution` together with the index of its solution event (0-based).
pub fn run<F>(net: &Network, csp: &Csp, params: &SamplerParams, mut on_solution: F) -> RunOutcome
where
    F: FnMut(&FoundSolution, usize) -> ControlFlow<()>,
{
    params.validate().expect("invalid sampler parameters");
    assert_eq!(net.n_vars(), csp.num_vars(), "network was not compiled from this CSP");
    let expander = SolutionExpander::new(csp);
    let mut chain = Chain::new(net, params.tau, params.seed);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut solutions = Vec::new();
    let mut trace = Vec::new();
    let mut first = None;
    let mut truncated = false;
    let mut events = 0usize;
    let mut repeats = 0usize;
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut last_sets: Option<Vec<Vec<usize>>> = None;
    let mut sweeps = 0;

    'outer: while sweeps < params.max_sweeps {
        chain.sweep();
        sweeps += 1;
        decode_into(net, chain.state(), &mut sets);
        let candidate = sets.iter().all(|s| !s.is_empty());
        let mut stop = false;
        if candidate && last_sets.as_ref() != Some(&sets) {
            let (found, cut) = expander.expand_values(&sets, params.expansion_cap);
            truncated |= cut;
            if !found.is_empty() {
                first.get_or_insert(sweeps);
                let event = events;
                events += 1;
                for values in found {
                    if seen.insert(values.clone()) {
                        let sol = FoundSolution { values, sweep: sweeps };
                        let flow = on_solution(&sol, event);
                        solutions.push(sol);
                        if flow.is_break() {
                            stop = true;
                        }
                    } else {
                        repeats += 1;
                    }
                }
            }
            last_sets = Some(sets.clone());
        } else if !candidate {
            last_sets = None;
        }
        if params.record_trace {
            trace.push(TraceRow {
                sweep: sweeps,
                energy: net.energy_unchecked(|i| chain.state().is_active(i)),
                n_active: chain.state().n_active(),
                solutions_found: solutions.len(),
            });
        }
        if stop {
            break 'outer;
        }
    }
    RunOutcome {
        seed: params.seed,
        first_solution_sweep: first,
        solutions,
        sweeps_run: sweeps,
        final_energy: net.energy_unchecked(|i| chain.state().is_active(i)),
        truncated,
        repeats,
        trace,
    }
}

/// Stops at the end of the first solution event.
pub fn run_until_first(net: &Network, csp: &Csp, params: &SamplerParams) -> RunOutcome {
    run(net, csp, params, |_, _| ControlFlow::Break(()))
}

/// Trace CSV: `sweep,energy,n_active,solutions_found`.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["sweep", "energy", "n_active", "solutions_found"])?;
    }
    w.flush()?;
    Ok(())
}
