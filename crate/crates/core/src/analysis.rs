//! Convergence detection, theorem bounds, Monte Carlo basin estimates and
//! the adaptive sleep schedule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use thiserror::Error;

use crate::engine::{simulate, ConvergenceTracker, InitPhases, SimConfig, SimError, Trace};
use crate::graphs::{gen_random_in_regular, GraphSequence};
use crate::maps::range_of;
use crate::prc::{sleep_curve, PrcSpec, S2Params};
use crate::seed::derive_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `min(x − τ, 1 − y + τ)`.
pub fn rho0(x: f64, y: f64, tau: f64) -> f64 {
    (x - tau).min(1.0 - y + tau)
}

/// The convergence-time bound `ρ·d / min(τ, κ)`.
pub fn t_star(rho: f64, d: usize, tau: f64, kappa: f64) -> Result<f64, AnalysisError> {
    if !(rho >= 0.0) || d == 0 || !(tau > 0.0) || !(kappa > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "t_star needs rho >= 0, d >= 1, tau > 0, kappa > 0 (got {rho}, {d}, {tau}, {kappa})"
        )));
    }
    Ok(rho * d as f64 / tau.min(kappa))
}

/// First sample time whose range is below `tol` and stays below it for
/// the following `1 + τ`. A single oscillator is converged at 0.
pub fn detect_convergence(trace: &Trace, tol: f64, tau: f64) -> Option<f64> {
    if trace.node_count() == 1 {
        return Some(0.0);
    }
    let mut tracker = ConvergenceTracker::new(tol, tau);
    trace.range_series.iter().find_map(|&(t, rho)| tracker.push(t, rho))
}

/// The sampled circular-range series of a run.
pub fn sync_error_series(trace: &Trace) -> Vec<(f64, f64)> {
    if trace.node_count() == 1 {
        return trace.range_series.iter().map(|&(t, _)| (t, 0.0)).collect();
    }
    trace.range_series.clone()
}

/// Outcome of one run measured against the theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub time: Option<f64>,
    pub rho_initial: f64,
    pub basin_ok: bool,
    pub t_star: Option<f64>,
    pub d: Option<usize>,
    pub windows_used: usize,
}

impl ConvergenceReport {
    /// Builds a report from a finished trace. `s2` supplies the basin and
    /// `κ`; without it neither is judged.
    pub fn from_trace(trace: &Trace, tau: f64, s2: Option<&S2Params>, d: Option<usize>) -> Self {
        let rho_initial = range_of(&trace.initial_phases);
        let basin_ok = s2.is_some_and(|p| rho_initial < rho0(p.b0, p.b1, tau));
        let t_star = match (s2, d) {
            (Some(p), Some(d)) => t_star(rho_initial, d, tau, p.kappa).ok(),
            _ => None,
        };
        let time = trace.converged_at;
        let span = time.unwrap_or(trace.end_time);
        ConvergenceReport {
            converged: time.is_some(),
            time,
            rho_initial,
            basin_ok,
            t_star,
            d,
            windows_used: (span / (1.0 + tau) - 1e-9).ceil().max(0.0) as usize,
        }
    }

    /// True when the run met the bound, with one window of grace for the
    /// persistence rule.
    pub fn within_bound(&self, tau: f64) -> bool {
        match (self.time, self.t_star) {
            (Some(t), Some(b)) => t <= b + 1.0 + tau + 1e-9,
            _ => false,
        }
    }
}

/// Initial-phase distribution for Monte Carlo trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InitSampler {
    Uniform,
    Window { width: f64 },
}

impl InitSampler {
    pub fn init(self) -> InitPhases {
        match self {
            InitSampler::Uniform => InitPhases::Uniform,
            InitSampler::Window { width } => InitPhases::Window { width },
        }
    }
}

/// Fraction of trials that converged, with a 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinEstimate {
    pub trials: usize,
    pub converged_count: usize,
    /// Runs that ended in a simulation error; they count as not converged.
    pub errors: usize,
    pub fraction: f64,
    pub ci95_halfwidth: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

impl BasinEstimate {
    pub fn from_counts(trials: usize, converged_count: usize, errors: usize) -> Self {
        let n = trials.max(1) as f64;
        let p = converged_count as f64 / n;
        // normal approximation with continuity correction
        let hw = (Z95 * (p * (1.0 - p) / n).sqrt() + 0.5 / n).min(1.0);
        BasinEstimate {
            trials,
            converged_count,
            errors,
            fraction: p,
            ci95_halfwidth: hw,
        }
    }

    /// Exact Clopper–Pearson 95% interval, for small trial counts.
    pub fn clopper_pearson(&self) -> (f64, f64) {
        let n = self.trials as f64;
        let k = self.converged_count as f64;
        let lo = if self.converged_count == 0 {
            0.0
        } else {
            Beta::new(k, n - k + 1.0).map(|b| b.inverse_cdf(0.025)).unwrap_or(0.0)
        };
        let hi = if self.converged_count == self.trials {
            1.0
        } else {
            Beta::new(k + 1.0, n - k).map(|b| b.inverse_cdf(0.975)).unwrap_or(1.0)
        };
        (lo, hi)
    }
}

/// Converged flags of `trials` runs of `template`, each with its own seed
/// derived from `master_seed` and phases drawn by `sampler`.
pub fn basin_trials(
    template: &SimConfig,
    sampler: InitSampler,
    trials: usize,
    parallel: bool,
    master_seed: u64,
) -> Vec<Result<bool, SimError>> {
    seeded_trials(
        |seed| {
            let mut cfg = template.clone();
            cfg.seed = seed;
            cfg.init = sampler.init();
            Ok(cfg)
        },
        trials,
        parallel,
        master_seed,
    )
}

/// Runs `trials` simulations, trial `i` built by `build` from
/// `derive_seed(master_seed, i)`. Results are in trial order whatever the
/// parallelism.
pub fn seeded_trials<F>(build: F, trials: usize, parallel: bool, master_seed: u64) -> Vec<Result<bool, SimError>>
where
    F: Fn(u64) -> Result<SimConfig, SimError> + Sync,
{
    let run = |i: usize| {
        let mut cfg = build(derive_seed(master_seed, i as u64))?;
        cfg.record_firings = false;
        cfg.record_log = false;
        simulate(&cfg).map(|t| t.converged_at.is_some())
    };
    if parallel {
        (0..trials).into_par_iter().map(run).collect()
    } else {
        (0..trials).map(run).collect()
    }
}

/// Tallies trial outcomes; failed runs count as not converged.
pub fn tally(outcomes: &[Result<bool, SimError>]) -> BasinEstimate {
    let converged = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
    let errors = outcomes.iter().filter(|o| o.is_err()).count();
    BasinEstimate::from_counts(outcomes.len(), converged, errors)
}

pub fn basin_monte_carlo(
    template: &SimConfig,
    sampler: InitSampler,
    trials: usize,
    parallel: bool,
    master_seed: u64,
) -> Result<BasinEstimate, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(tally(&basin_trials(template, sampler, trials, parallel, master_seed)))
}

/// One stage of the adaptive sleep schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SleepStep {
    pub window: usize,
    pub b0: f64,
    pub b1: f64,
}

/// Largest `B1` the schedule will use.
pub const SLEEP_B1_CAP: f64 = 1.0 - 1e-6;

/// Starts at `B0 = B1 = 1/2 + τ` and every `2d` windows moves `B0` down
/// and `B1` up by `τ`, stopping once `B0` reaches `2τ`.
pub fn sleep_schedule(tau: f64, d: usize) -> Result<Vec<SleepStep>, AnalysisError> {
    if !(tau > 0.0 && tau < 0.5) || d == 0 {
        return Err(AnalysisError::InvalidParameter(format!(
            "sleep schedule needs 0 < tau < 0.5 and d >= 1 (got {tau}, {d})"
        )));
    }
    let start = 0.5 + tau;
    let floor = 2.0 * tau;
    let mut steps = Vec::new();
    for k in 0.. {
        let b0 = (start - k as f64 * tau).max(floor);
        let b1 = (start + k as f64 * tau).min(SLEEP_B1_CAP);
        steps.push(SleepStep {
            window: 2 * d * k,
            b0,
            b1,
        });
        if b0 <= floor + 1e-12 {
            break;
        }
    }
    Ok(steps)
}

/// The schedule as engine PRC switches, one sleep curve per step.
pub fn sleep_prc_schedule(tau: f64, d: usize) -> Result<Vec<(usize, PrcSpec)>, AnalysisError> {
    sleep_schedule(tau, d)?
        .into_iter()
        .map(|s| {
            sleep_curve(s.b0, s.b1)
                .map(|p| (s.window, p))
                .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))
        })
        .collect()
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub estimate: BasinEstimate,
}

/// Settings for [`indegree_convergence_sweep`].
#[derive(Debug, Clone)]
pub struct IndegreeSweep {
    pub n: usize,
    pub prc: PrcSpec,
    pub tau: f64,
    pub horizon: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub parallel: bool,
}

/// Convergence fraction from uniform initial phases on random graphs where
/// every node has in-degree `k`, for each `k`. Each trial draws a fresh
/// graph.
pub fn indegree_convergence_sweep(s: &IndegreeSweep, k_values: &[usize]) -> Result<Vec<SweepRow>, AnalysisError> {
    if s.trials == 0 {
        return Err(AnalysisError::InvalidParameter("trials must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(k_values.len());
    for (ki, &k) in k_values.iter().enumerate() {
        let run = |i: usize| -> Result<bool, SimError> {
            let seed = derive_seed(derive_seed(s.master_seed, ki as u64), i as u64);
            let g = gen_random_in_regular(s.n, k, seed).map_err(SimError::Graph)?;
            let mut cfg = SimConfig::new(s.prc.clone(), GraphSequence::fixed(g), s.tau, InitPhases::Uniform);
            cfg.seed = seed;
            cfg.horizon = s.horizon;
            cfg.record_firings = false;
            Ok(simulate(&cfg)?.converged_at.is_some())
        };
        let outcomes: Vec<Result<bool, SimError>> = if s.parallel {
            (0..s.trials).into_par_iter().map(run).collect()
        } else {
            (0..s.trials).map(run).collect()
        };
        rows.push(SweepRow {
            parameter: k as f64,
            estimate: tally(&outcomes),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::DirectedGraph;
    use crate::prc::{basin_bound, preset, s2_default, validate_s2};
    use proptest::prelude::*;

    fn trace_with(series: Vec<(f64, f64)>, n: usize) -> Trace {
        Trace {
            firings: vec![],
            range_series: series,
            converged_at: None,
            events_processed: 0,
            final_phases: vec![0.0; n],
            end_time: 0.0,
            initial_phases: vec![0.0; n],
            frequencies: vec![1.0; n],
            log: vec![],
        }
    }

    #[test]
    fn rho0_examples() {
        assert!((rho0(0.5, 0.5, 0.1) - 0.4).abs() < 1e-15);
        assert!((rho0(0.6, 0.6, 0.1) - 0.5).abs() < 1e-12);
        assert_eq!(rho0(0.1, 0.1, 0.1), 0.0);
    }

    #[test]
    fn t_star_examples() {
        assert!((t_star(0.3, 4, 0.05, 0.1).unwrap() - 24.0).abs() < 1e-12);
        assert_eq!(t_star(0.0, 3, 0.1, 0.2).unwrap(), 0.0);
        assert!((t_star(0.2, 5, 0.1, 0.1).unwrap() - 10.0).abs() < 1e-12);
        assert!(t_star(0.2, 0, 0.1, 0.1).is_err());
        assert!(t_star(-0.1, 1, 0.1, 0.1).is_err());
        assert!(t_star(0.1, 1, 0.0, 0.1).is_err());
    }

    #[test]
    fn detection_examples() {
        let tau = 0.1;
        let w = 1.0 + tau;
        let zero = trace_with((0..5).map(|k| (k as f64 * w, 0.0)).collect(), 3);
        assert_eq!(detect_convergence(&zero, 1e-9, tau), Some(0.0));
        let dip = trace_with(vec![(0.0, 0.3), (w, 0.0), (2.0 * w, 0.2), (3.0 * w, 0.1)], 3);
        assert_eq!(detect_convergence(&dip, 1e-9, tau), None);
        let late = trace_with(
            vec![(0.0, 0.3), (w, 0.0), (2.0 * w, 0.2), (3.0 * w, 0.0), (4.0 * w, 0.0)],
            3,
        );
        assert_eq!(detect_convergence(&late, 1e-9, tau), Some(3.0 * w));
        let single = trace_with(vec![(0.0, 0.0)], 1);
        assert_eq!(detect_convergence(&single, 1e-9, tau), Some(0.0));
        assert!(sync_error_series(&single).iter().all(|&(_, e)| e == 0.0));
    }

    #[test]
    fn rho0_matches_basin_bound_on_diagonal() {
        for i in 1..50 {
            let tau = 0.01 * i as f64 / 5.0;
            let x = tau + (1.0 - tau) * 0.37;
            assert!((rho0(x, x, tau) - basin_bound(x, x, tau).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn sleep_schedule_examples() {
        let s = sleep_schedule(0.1, 3).unwrap();
        let expect = [
            (0, 0.6, 0.6),
            (6, 0.5, 0.7),
            (12, 0.4, 0.8),
            (18, 0.3, 0.9),
            (24, 0.2, SLEEP_B1_CAP),
        ];
        assert_eq!(s.len(), expect.len());
        for (got, (w, b0, b1)) in s.iter().zip(expect) {
            assert_eq!(got.window, w);
            assert!((got.b0 - b0).abs() < 1e-12, "{got:?}");
            assert!((got.b1 - b1).abs() < 1e-12, "{got:?}");
        }
        assert!(sleep_schedule(0.5, 3).is_err());
        assert!(sleep_schedule(0.1, 0).is_err());
        let s = sleep_schedule(0.1, 1).unwrap();
        assert_eq!(s[1].window, 2);
        assert!(sleep_prc_schedule(0.1, 3).unwrap().len() == 5);
    }

    #[test]
    fn clopper_pearson_brackets_fraction() {
        let e = BasinEstimate::from_counts(20, 15, 0);
        let (lo, hi) = e.clopper_pearson();
        assert!(lo < 0.75 && 0.75 < hi);
        // known value for 15/20
        assert!((lo - 0.5090).abs() < 1e-3 && (hi - 0.9134).abs() < 1e-3);
        let all = BasinEstimate::from_counts(1, 1, 0);
        assert_eq!(all.fraction, 1.0);
        assert_eq!(all.clopper_pearson().1, 1.0);
    }

    fn k5_template() -> (SimConfig, f64) {
        let tau = 0.1;
        let prc = s2_default();
        let s2 = validate_s2(&prc, tau).unwrap();
        let mut cfg = SimConfig::new(
            prc,
            GraphSequence::fixed(DirectedGraph::complete(5)),
            tau,
            InitPhases::Uniform,
        );
        cfg.horizon = 60.0;
        (cfg, s2.basin())
    }

    #[test]
    fn in_basin_windows_always_converge() {
        let (cfg, basin) = k5_template();
        let est = basin_monte_carlo(&cfg, InitSampler::Window { width: 0.9 * basin }, 200, true, 11).unwrap();
        assert_eq!(est.converged_count, 200);
        assert_eq!(est.fraction, 1.0);
        let again = basin_monte_carlo(&cfg, InitSampler::Window { width: 0.9 * basin }, 200, false, 11).unwrap();
        assert_eq!(est, again);
        let one = basin_monte_carlo(&cfg, InitSampler::Uniform, 1, false, 3).unwrap();
        assert!(one.fraction == 0.0 || one.fraction == 1.0);
        assert!(basin_monte_carlo(&cfg, InitSampler::Uniform, 0, false, 3).is_err());
    }

    #[test]
    fn report_flags_basin_and_bound() {
        let (mut cfg, basin) = k5_template();
        cfg.init = InitPhases::Window { width: 0.5 * basin };
        let s2 = validate_s2(&cfg.prc, cfg.tau).unwrap();
        let trace = simulate(&cfg).unwrap();
        // without self-loops a node only hears the others: depth 2
        let d = crate::graphs::coverage_depth(&cfg.graphs, 0, 10).unwrap();
        assert_eq!(d, 2);
        let r = ConvergenceReport::from_trace(&trace, cfg.tau, Some(&s2), Some(d));
        assert!(r.converged && r.basin_ok);
        assert!(r.within_bound(cfg.tau), "{r:?}");
    }

    #[test]
    fn complete_graph_sweep_end_converges() {
        let tau = 0.1;
        let sweep = IndegreeSweep {
            n: 6,
            prc: preset("s2-default").unwrap(),
            tau,
            horizon: 80.0,
            trials: 20,
            master_seed: 5,
            parallel: true,
        };
        let rows = indegree_convergence_sweep(&sweep, &[2, 5]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].estimate.errors, 0);
    }

    proptest! {
        #[test]
        fn detection_is_monotone_in_tol(
            rs in proptest::collection::vec(0.0f64..0.01, 2..30),
            t1 in 1e-4f64..5e-3,
            extra in 0.0f64..5e-3,
        ) {
            let tau = 0.1;
            let series: Vec<(f64, f64)> = rs.iter().enumerate().map(|(k, &r)| (k as f64 * 1.1, r)).collect();
            let tr = trace_with(series, 4);
            let a = detect_convergence(&tr, t1, tau);
            let b = detect_convergence(&tr, t1 + extra, tau);
            if let Some(ta) = a {
                prop_assert!(b.is_some_and(|tb| tb <= ta));
            }
        }
    }
}
