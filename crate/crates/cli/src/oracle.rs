//! Engine against closed-form maps on random in-basin states.

use pco_core::analysis::rho0;
use pco_core::engine::{phase_distance, run_window_map, simulate, InitPhases, SimConfig, SimError};
use pco_core::graphs::{gen_random_aperiodic, gen_random_undirected, DirectedGraph, GraphSequence};
use pco_core::maps::{sf_next_fire_times, sr_time_map, PhaseVector};
use pco_core::prc::PrcSpec;
use pco_core::seed::derive_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest deviation tolerated between engine and map.
pub const ORACLE_TOL: f64 = 1e-9;

pub const TAUS: [f64; 3] = [0.05, 0.1, 0.2];

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error("no graphs to check")]
    NoGraphs,
}

/// One sampled state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub n: usize,
    pub tau: f64,
    pub b0: f64,
    pub rho: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<OracleCase>,
    pub max_deviation: f64,
}

impl SuiteReport {
    fn new(suite: &str, cases: Vec<OracleCase>) -> Self {
        let max_deviation = cases.iter().map(|c| c.deviation).fold(0.0, f64::max);
        SuiteReport {
            suite: suite.into(),
            cases,
            max_deviation,
        }
    }

    pub fn passed(&self) -> bool {
        self.max_deviation <= ORACLE_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub cases: usize,
    pub seed: u64,
    /// Added to the delay the maps see; the engine keeps the true one.
    pub corrupt_tau: f64,
}

/// Draws τ, B0 ∈ (2τ, 0.8) and phases in the window frame with range
/// below ρ₀(B0, B0).
fn sample_state(rng: &mut ChaCha8Rng, n: usize) -> (f64, f64, Vec<f64>) {
    let tau = TAUS[rng.gen_range(0..TAUS.len())];
    let b0 = rng.gen_range(2.0 * tau..0.8);
    let basin = rho0(b0, b0, tau);
    let width = rng.gen_range(0.0..basin);
    let leader = rng.gen_range(0..n);
    let phases = (0..n)
        .map(|i| {
            if i == leader {
                1.0
            } else {
                1.0 - width * rng.gen::<f64>()
            }
        })
        .collect();
    (tau, b0, phases)
}

fn sr_case(g: &DirectedGraph, rng: &mut ChaCha8Rng, corrupt: f64) -> Result<OracleCase, OracleError> {
    let n = g.node_count();
    let (tau, b0, phases) = sample_state(rng, n);
    let prc = PrcSpec::StrongReset { b0 };
    let engine = run_window_map(&phases, g, &prc, tau)?;
    // a map that refuses the state disagrees with the engine outright
    let deviation = match sr_time_map(&PhaseVector::new(phases.clone()), g, tau + corrupt, b0) {
        Ok(map) => engine
            .iter()
            .zip(map.as_slice())
            .map(|(a, b)| phase_distance(*a, *b))
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    Ok(OracleCase {
        n,
        tau,
        b0,
        rho: pco_core::maps::range_of(&phases),
        deviation,
    })
}

fn sf_case(g: &DirectedGraph, rng: &mut ChaCha8Rng, corrupt: f64) -> Result<OracleCase, OracleError> {
    let n = g.node_count();
    let (tau, b0, phases) = sample_state(rng, n);
    let mut cfg = SimConfig::new(
        PrcSpec::StrongFire { b0 },
        GraphSequence::fixed(g.clone()),
        tau,
        InitPhases::Explicit { phases: phases.clone() },
    );
    cfg.horizon = 1.0 + tau;
    cfg.stop_on_convergence = false;
    let trace = simulate(&cfg)?;
    let fired = trace.first_fire_times(0.0);
    let deviation = match sf_next_fire_times(&PhaseVector::new(phases.clone()), g, tau + corrupt, b0, 0.0) {
        Ok(lambda) => fired
            .iter()
            .zip(&lambda)
            .map(|(f, l)| f.map_or(f64::INFINITY, |f| (f - l).abs()))
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    Ok(OracleCase {
        n,
        tau,
        b0,
        rho: pco_core::maps::range_of(&phases),
        deviation,
    })
}

type CaseFn = fn(&DirectedGraph, &mut ChaCha8Rng, f64) -> Result<OracleCase, OracleError>;

fn run_suite(
    name: &str,
    opts: &OracleOptions,
    graphs: Option<&[DirectedGraph]>,
    gen: fn(u64, &mut ChaCha8Rng) -> DirectedGraph,
    case: CaseFn,
) -> Result<SuiteReport, OracleError> {
    let count = match graphs {
        Some([]) => return Err(OracleError::NoGraphs),
        Some(gs) => gs.len(),
        None => opts.cases,
    };
    let cases: Result<Vec<OracleCase>, OracleError> = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(opts.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = match graphs {
                Some(gs) => gs[i].clone(),
                None => gen(seed, &mut rng),
            };
            case(&g, &mut rng, opts.corrupt_tau)
        })
        .collect();
    Ok(SuiteReport::new(name, cases?))
}

fn random_digraph(seed: u64, rng: &mut ChaCha8Rng) -> DirectedGraph {
    let n = rng.gen_range(3..=8);
    let p = rng.gen_range(0.2..0.7);
    gen_random_aperiodic(n, p, seed).expect("aperiodic digraph for n >= 3")
}

fn random_undirected(seed: u64, rng: &mut ChaCha8Rng) -> DirectedGraph {
    let n = rng.gen_range(3..=8);
    let p = rng.gen_range(0.3..0.8);
    gen_random_undirected(n, p, seed).expect("connected graph for n >= 3")
}

/// Strong resetting: one engine window against `H`.
pub fn sr_suite(opts: &OracleOptions, graphs: Option<&[DirectedGraph]>) -> Result<SuiteReport, OracleError> {
    run_suite("sr", opts, graphs, random_digraph, sr_case)
}

/// Strong firing: engine firing times against the λ fixed point.
/// Supplied graphs that are not undirected are skipped.
pub fn sf_suite(opts: &OracleOptions, graphs: Option<&[DirectedGraph]>) -> Result<SuiteReport, OracleError> {
    let filtered: Option<Vec<DirectedGraph>> =
        graphs.map(|gs| gs.iter().filter(|g| g.is_undirected()).cloned().collect());
    match filtered.as_deref() {
        Some([]) => Ok(SuiteReport::new("sf", Vec::new())),
        other => run_suite("sf", opts, other, random_undirected, sf_case),
    }
}
