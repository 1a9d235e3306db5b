//! Command implementations. Each returns its artifacts in memory; writing
//! happens once, at the end, together with the manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use pco_core::analysis::{seeded_trials, sync_error_series, tally, BasinEstimate, ConvergenceReport, InitSampler};
use pco_core::engine::{simulate, InitPhases, SimError};
use pco_core::graphs::{self, gen_binary_tree_triangle, gen_random_geometric, max_coverage_depth, GraphSequence};
use pco_core::prc::{validate_s2, PrcSpec};
use pco_core::seed::derive_seed;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::config::{Command, ConfigError, ExperimentSpec, PrcEntry};
use crate::oracle::{self, OracleError, OracleOptions, ORACLE_TOL};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("cannot write {path}: {msg}")]
    Io { path: String, msg: String },
}

/// Named output files, kept sorted so writing order is fixed.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Artifacts {
    pub files: BTreeMap<String, Vec<u8>>,
}

impl Artifacts {
    fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.insert(name.into(), bytes.into());
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut s = serde_json::to_string_pretty(value).expect("serialisable");
        s.push('\n');
        self.add(name, s);
    }

    /// Writes every file plus `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path, command: Command, spec: &ExperimentSpec) -> Result<(), CommandError> {
        let io = |p: &Path, e: std::io::Error| CommandError::Io {
            path: p.display().to_string(),
            msg: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
            }
            std::fs::write(&path, bytes).map_err(|e| io(&path, e))?;
        }
        let manifest = json!({
            "format": "pco-manifest v1",
            "command": command,
            "config": spec,
            "files": self.files.keys().collect::<Vec<_>>(),
        });
        let path = dir.join("manifest.json");
        let mut s = serde_json::to_string_pretty(&manifest).expect("serialisable");
        s.push('\n');
        std::fs::write(&path, s).map_err(|e| io(&path, e))
    }
}

/// Outcome of a command: artifacts and whether its check passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Artifacts,
    pub passed: bool,
    pub summary: String,
}

impl Outcome {
    fn ok(artifacts: Artifacts, summary: String) -> Self {
        Outcome {
            artifacts,
            passed: true,
            summary,
        }
    }
}

pub fn execute(command: Command, spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    match command {
        Command::Run => cmd_run(spec),
        Command::Sweep => cmd_sweep(spec),
        Command::Basin => cmd_basin(spec),
        Command::OracleCheck => cmd_oracle_check(spec),
        Command::Figure2 => cmd_figure2(spec),
        Command::Figure3 => cmd_figure3(spec),
        Command::GenGraph => cmd_gen_graph(spec),
    }
}

fn series_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut s = format!("{header}\n");
    for (a, b) in rows {
        writeln!(s, "{a},{b}").unwrap();
    }
    s
}

const TABLE_HEADER: &str = "parameter,trials,converged,fraction,ci95";

fn table_row(s: &mut String, parameter: &str, e: &BasinEstimate) {
    writeln!(
        s,
        "{parameter},{},{},{},{}",
        e.trials, e.converged_count, e.fraction, e.ci95_halfwidth
    )
    .unwrap();
}

/// Coverage depth for the theorem bound, when the graphs admit one.
fn theorem_depth(seq: &GraphSequence) -> Option<usize> {
    let n = seq.node_count();
    max_coverage_depth(seq, seq.len(), 2 * n * n + 2)
}

pub fn cmd_run(spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    let cfg = spec.sim_config()?;
    let trace = simulate(&cfg)?;
    let s2 = validate_s2(&cfg.prc, cfg.tau).ok();
    let d = theorem_depth(&cfg.graphs);
    let report = ConvergenceReport::from_trace(&trace, cfg.tau, s2.as_ref(), d);
    let mut a = Artifacts::default();
    a.add("range.csv", series_csv("time,range", &sync_error_series(&trace)));
    if cfg.record_firings {
        let mut s = String::from("time,node\n");
        for (t, v) in &trace.firings {
            writeln!(s, "{t},{v}").unwrap();
        }
        a.add("firings.csv", s);
    }
    a.add_json(
        "summary.json",
        &json!({
            "report": report,
            "end_time": trace.end_time,
            "events_processed": trace.events_processed,
            "initial_phases": trace.initial_phases,
            "final_phases": trace.final_phases,
        }),
    );
    let summary = match report.time {
        Some(t) => format!("converged at t={t} (initial range {})", report.rho_initial),
        None => format!(
            "not converged by t={} (initial range {})",
            trace.end_time, report.rho_initial
        ),
    };
    Ok(Outcome::ok(a, summary))
}

fn sampler(name: &str, width: Option<f64>) -> InitSampler {
    match name {
        "window" => InitSampler::Window {
            width: width.unwrap_or(1.0),
        },
        _ => InitSampler::Uniform,
    }
}

/// Runs `trials` seeded trials of `spec`; random graph generators redraw
/// per trial.
fn estimate(spec: &ExperimentSpec, prc: &PrcSpec, init: InitSampler, trials: usize) -> BasinEstimate {
    let outcomes = seeded_trials(
        |seed| {
            let graphs = spec
                .graphs_with_seed(seed)
                .map_err(|e| SimError::Config(e.to_string()))?;
            let mut cfg = spec
                .sim_config_with(prc.clone(), graphs)
                .map_err(|e| SimError::Config(e.to_string()))?;
            cfg.seed = seed;
            cfg.init = init.init();
            Ok(cfg)
        },
        trials,
        true,
        spec.seed,
    );
    tally(&outcomes)
}

pub fn cmd_basin(spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    let prc = spec.prc_spec()?;
    // fail fast on a config that cannot run at all
    spec.sim_config()?;
    let sampler = sampler(&spec.basin.sampler, spec.basin.width);
    let est = estimate(spec, &prc, sampler, spec.basin.trials);
    let mut table = format!("{TABLE_HEADER}\n");
    table_row(&mut table, &spec.prc.label(), &est);
    let mut a = Artifacts::default();
    a.add("basin.csv", table);
    a.add_json(
        "basin.json",
        &json!({ "prc": spec.prc.label(), "sampler": sampler, "estimate": est }),
    );
    let summary = format!(
        "{}/{} converged ({:.4} ± {:.4})",
        est.converged_count, est.trials, est.fraction, est.ci95_halfwidth
    );
    Ok(Outcome::ok(a, summary))
}

pub fn cmd_sweep(spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    let sweep = spec.sweep.clone().ok_or_else(|| ConfigError::Validation {
        field: "sweep".into(),
        constraint: "a [sweep] table for the sweep command".into(),
    })?;
    let mut table = format!("{TABLE_HEADER}\n");
    let mut rows = Vec::new();
    for (i, &value) in sweep.values.iter().enumerate() {
        let mut s = spec.clone();
        s.seed = derive_seed(spec.seed, i as u64);
        let mut width = sweep.width;
        match sweep.parameter.as_str() {
            "tau" => s.tau = value,
            "b0" => {
                let mut t = match &s.prc {
                    PrcEntry::Name(n) => crate::config::PrcTable {
                        name: Some(n.clone()),
                        ..Default::default()
                    },
                    PrcEntry::Table(t) => t.clone(),
                };
                t.b0 = Some(value);
                s.prc = PrcEntry::Table(t);
            }
            "width" => width = Some(value),
            "quiescent" => s.variant.quiescent = value,
            "k" => s.graph.params.k = Some(value as usize),
            _ => unreachable!("validated"),
        }
        s.validate("")?;
        let prc = s.prc_spec()?;
        s.sim_config()?;
        let est = estimate(&s, &prc, sampler(&sweep.sampler, width), sweep.trials);
        table_row(&mut table, &value.to_string(), &est);
        rows.push(json!({ "value": value, "estimate": est }));
    }
    let mut a = Artifacts::default();
    a.add("sweep.csv", table);
    a.add_json("sweep.json", &json!({ "parameter": sweep.parameter, "rows": rows }));
    Ok(Outcome::ok(a, format!("{} sweep points", sweep.values.len())))
}

/// Label per entry, numbered when several share one.
fn labels(entries: &[PrcEntry]) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    entries
        .iter()
        .map(|e| {
            let base = e.label();
            let k = seen.entry(base.clone()).or_insert(0);
            *k += 1;
            if *k == 1 {
                base
            } else {
                format!("{base}-{k}")
            }
        })
        .collect()
}

/// Basin estimate of every configured PRC on the tree with a triangle,
/// from uniform initial phases.
pub fn figure2_estimates(spec: &ExperimentSpec) -> Result<Vec<(String, BasinEstimate)>, CommandError> {
    let f = &spec.figure2;
    let g = gen_binary_tree_triangle(f.depth).map_err(|e| ConfigError::Validation {
        field: "figure2.depth".into(),
        constraint: e.to_string(),
    })?;
    let mut s = spec.clone();
    s.graph = crate::config::GraphSection::default();
    let seq = GraphSequence::fixed(g);
    let mut results = Vec::new();
    for (label, entry) in labels(&f.prcs).into_iter().zip(&f.prcs) {
        let prc = entry.resolve().map_err(|e| ConfigError::Validation {
            field: "figure2.prcs".into(),
            constraint: e.to_string(),
        })?;
        let outcomes = seeded_trials(
            |seed| {
                let mut cfg = s
                    .sim_config_with(prc.clone(), seq.clone())
                    .map_err(|e| SimError::Config(e.to_string()))?;
                cfg.seed = seed;
                cfg.init = InitPhases::Uniform;
                Ok(cfg)
            },
            f.trials,
            true,
            spec.seed,
        );
        results.push((label, tally(&outcomes)));
    }
    Ok(results)
}

pub fn cmd_figure2(spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    let results = figure2_estimates(spec)?;
    let mut table = format!("{TABLE_HEADER}\n");
    for (label, est) in &results {
        table_row(&mut table, label, est);
    }
    let summary = results
        .iter()
        .map(|(l, e)| format!("{l}={:.3}±{:.3}", e.fraction, e.ci95_halfwidth))
        .collect::<Vec<_>>()
        .join(" ");
    let mut a = Artifacts::default();
    a.add("figure2.csv", table);
    a.add_json(
        "figure2.json",
        &json!({
            "depth": spec.figure2.depth,
            "nodes": (1usize << (spec.figure2.depth + 1)) - 1,
            "tau": spec.tau,
            "results": results.iter().map(|(l, e)| json!({ "prc": l, "estimate": e })).collect::<Vec<_>>(),
        }),
    );
    Ok(Outcome::ok(a, summary))
}

/// Noise settings of the two sync-error settings: A is noiseless, B adds
/// frequency error and delay jitter.
pub const FIGURE3_SETTINGS: [(&str, f64, f64); 2] = [("A", 0.0, 0.0), ("B", 0.025, 0.025)];

/// Median of the second half of a sync-error series.
pub fn steady_state_error(series: &[(f64, f64)]) -> f64 {
    let mut tail: Vec<f64> = series[series.len() / 2..].iter().map(|x| x.1).collect();
    if tail.is_empty() {
        return 0.0;
    }
    tail.sort_by(f64::total_cmp);
    let m = tail.len() / 2;
    if tail.len() % 2 == 1 {
        tail[m]
    } else {
        0.5 * (tail[m - 1] + tail[m])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure3Run {
    pub setting: String,
    pub prc: String,
    pub seed_index: usize,
    pub converged_at: Option<f64>,
    pub min_error: f64,
    pub final_error: f64,
    pub steady_state_error: f64,
    pub series: Vec<(f64, f64)>,
}

/// Every (setting, PRC, seed) sync-error run, in a fixed order.
pub fn figure3_runs(spec: &ExperimentSpec) -> Result<Vec<Figure3Run>, CommandError> {
    use rayon::prelude::*;
    let f = &spec.figure3;
    let prcs: Vec<(String, PrcSpec)> = labels(&f.prcs)
        .into_iter()
        .zip(&f.prcs)
        .map(|(l, e)| {
            e.resolve().map(|p| (l, p)).map_err(|e| ConfigError::Validation {
                field: "figure3.prcs".into(),
                constraint: e.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut jobs = Vec::new();
    for (setting, fe, dj) in FIGURE3_SETTINGS {
        for (label, prc) in &prcs {
            for k in 0..f.seeds {
                jobs.push((setting, fe, dj, label.clone(), prc.clone(), k));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(setting, fe, dj, label, prc, k)| {
            let seed = derive_seed(spec.seed, k as u64);
            let g = gen_random_geometric(f.n, f.radius, seed).map_err(|e| ConfigError::Validation {
                field: "figure3".into(),
                constraint: e.to_string(),
            })?;
            let mut s = spec.clone();
            s.noise.freq_error = fe;
            s.noise.delay_jitter = dj;
            let mut cfg = s.sim_config_with(prc, GraphSequence::fixed(g))?;
            cfg.seed = seed;
            cfg.init = InitPhases::Uniform;
            cfg.stop_on_convergence = false;
            cfg.record_firings = false;
            let trace = simulate(&cfg)?;
            let series = sync_error_series(&trace);
            Ok(Figure3Run {
                setting: setting.into(),
                prc: label,
                seed_index: k,
                converged_at: trace.converged_at,
                min_error: series.iter().map(|x| x.1).fold(f64::INFINITY, f64::min),
                final_error: series.last().map_or(0.0, |x| x.1),
                steady_state_error: steady_state_error(&series),
                series,
            })
        })
        .collect()
}

pub fn cmd_figure3(spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    let runs = figure3_runs(spec)?;
    let mut a = Artifacts::default();
    for r in &runs {
        a.add(
            format!("figure3_{}_{}_s{}.csv", r.setting, r.prc, r.seed_index),
            series_csv("time,sync_error", &r.series),
        );
    }
    let summary: Vec<_> = runs
        .iter()
        .map(|r| {
            json!({
                "setting": r.setting,
                "prc": r.prc,
                "seed_index": r.seed_index,
                "converged_at": r.converged_at,
                "min_error": r.min_error,
                "final_error": r.final_error,
                "steady_state_error": r.steady_state_error,
            })
        })
        .collect();
    a.add_json(
        "figure3.json",
        &json!({ "n": spec.figure3.n, "radius": spec.figure3.radius, "tau": spec.tau, "runs": summary }),
    );
    Ok(Outcome::ok(a, format!("{} runs", runs.len())))
}

pub fn cmd_oracle_check(spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    let opts = OracleOptions {
        cases: spec.oracle.cases,
        seed: spec.seed,
        corrupt_tau: spec.oracle.corrupt_tau,
    };
    let graphs = match &spec.oracle.graph_files {
        Some(files) => {
            let mut gs = Vec::with_capacity(files.len());
            for f in files {
                let path = if f.is_absolute() {
                    f.clone()
                } else {
                    spec.base_dir.join(f)
                };
                let text = std::fs::read_to_string(&path).map_err(|e| ConfigError::Io {
                    path: path.display().to_string(),
                    msg: e.to_string(),
                })?;
                gs.push(graphs::parse_edge_list(&text).map_err(|e| ConfigError::Validation {
                    field: "oracle.graph_files".into(),
                    constraint: e.to_string(),
                })?);
            }
            Some(gs)
        }
        None => None,
    };
    let sr = oracle::sr_suite(&opts, graphs.as_deref())?;
    let sf = oracle::sf_suite(&opts, graphs.as_deref())?;
    let passed = sr.passed() && sf.passed();
    let mut a = Artifacts::default();
    a.add_json(
        "oracle.json",
        &json!({
            "tolerance": ORACLE_TOL,
            "passed": passed,
            "suites": [&sr, &sf],
        }),
    );
    let summary = format!(
        "sr: {} cases, max deviation {:e}; sf: {} cases, max deviation {:e}",
        sr.cases.len(),
        sr.max_deviation,
        sf.cases.len(),
        sf.max_deviation
    );
    Ok(Outcome {
        artifacts: a,
        passed,
        summary,
    })
}

pub fn cmd_gen_graph(spec: &ExperimentSpec) -> Result<Outcome, CommandError> {
    let seq = spec.graphs()?;
    let mut a = Artifacts::default();
    if seq.len() == 1 {
        a.add("graph.txt", graphs::write_edge_list(seq.at(0)));
    } else {
        for (name, text) in graphs::sequence_files(&seq) {
            a.add(format!("sequence/{name}"), text);
        }
    }
    let stats = graphs::graph_stats(seq.at(0));
    Ok(Outcome::ok(
        a,
        format!(
            "{} graph(s), {} nodes, in-degree {}..{}",
            seq.len(),
            seq.node_count(),
            stats.min_indegree,
            stats.max_indegree
        ),
    ))
}
