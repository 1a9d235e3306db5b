//! Exact event-driven simulation of pulse-coupled oscillators with
//! propagation delays.
//!
//! The crate is organised bottom-up:
//!
//! - [`prc`]: phases, phase response curves and their validity checks.
//! - [`graphs`]: directed weighted graphs, time-varying sequences, the
//!   generators used by the experiments and the graph conditions the
//!   convergence results depend on (aperiodicity, coverage depth).
//! - [`engine`]: the event-driven simulator.
//! - [`maps`]: closed-form window maps used as oracles against the engine.
//! - [`analysis`]: convergence detection, theoretical bounds, Monte Carlo
//!   basin estimation and the sleep schedule.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod engine;
pub mod graphs;
pub mod maps;
pub mod prc;
pub mod seed;

pub use analysis::{BasinEstimate, ConvergenceReport, InitSampler};
pub use engine::{InitPhases, SimConfig, SimError, Trace};
pub use graphs::{DirectedGraph, Edge, GraphError, GraphSequence, GraphStats, SequencePolicy};
pub use maps::PhaseVector;
pub use prc::{Phase, PiecewiseLinear, PrcError, PrcSpec, Response, S2Params};

/// Absolute tolerance for phase boundary membership and phase equality.
pub const PHASE_TOL: f64 = 1e-12;

/// Absolute tolerance used when deciding that two event times coincide.
pub const TIME_TOL: f64 = 1e-12;
