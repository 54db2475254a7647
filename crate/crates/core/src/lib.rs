//! Constraint satisfaction with stochastic spiking networks.
//!
//! A [`csp::Csp`] is compiled into a [`compiler::Network`] of winner-take-all,
//! OR and bias motifs. The [`sampler`] runs neural-sampling dynamics over that
//! network and [`readout`] turns visited states into verified solutions.
//! [`oracle`] provides exhaustive ground truth and [`bench`] the experiment harness.

pub mod bench;
pub mod cli;
pub mod compiler;
pub mod csp;
pub mod oracle;
pub mod problems;
pub mod readout;
pub mod sampler;

pub use compiler::{compile, heuristic_weight, CompilerParams, Network};
pub use csp::{Assignment, Constraint, Csp, Lit, ProblemKind, Verdict};
pub use readout::{decode, expand_solutions, MultiAssignment};
pub use sampler::{run, RunOutcome, SamplerParams, SamplerState};
