//! Experiment configuration files.
//!
//! A config is a TOML document. Everything except `tau`, `prc` and `graph`
//! has a default, and every default is written back out in the manifest so
//! a run can be repeated from its outputs alone.

use std::path::{Path, PathBuf};

use pco_core::engine::{InitPhases, SimConfig};
use pco_core::graphs::{self, DirectedGraph, GraphSequence};
use pco_core::prc::{self, PiecewiseLinear, PrcError, PrcSpec, PresetParams, PRESET_NAMES};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, field `{field}`: {msg}")]
    Parse { line: usize, field: String, msg: String },
    #[error("invalid `{field}`: requires {constraint}")]
    Validation { field: String, constraint: String },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

impl ConfigError {
    fn validation(field: &str, constraint: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.to_string(),
            constraint: constraint.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Run,
    Sweep,
    Basin,
    OracleCheck,
    Figure2,
    Figure3,
    GenGraph,
}

/// A PRC given by preset name, either as `prc = "sr"` or as a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrcEntry {
    Name(String),
    Table(PrcTable),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrcTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Inline piecewise-linear curve, `[[phase, f], ...]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
}

impl PrcEntry {
    fn table(&self) -> PrcTable {
        match self {
            PrcEntry::Name(n) => PrcTable {
                name: Some(n.clone()),
                ..PrcTable::default()
            },
            PrcEntry::Table(t) => t.clone(),
        }
    }

    /// A short label for tables and file names.
    pub fn label(&self) -> String {
        let t = self.table();
        t.name.unwrap_or_else(|| "custom".into())
    }

    pub fn resolve(&self) -> Result<PrcSpec, PrcError> {
        let t = self.table();
        match (&t.name, &t.vertices) {
            (_, Some(v)) => Ok(PrcSpec::PiecewiseLinear(PiecewiseLinear::new(v.clone())?)),
            (Some(name), None) => prc::preset_with(
                name,
                &PresetParams {
                    b0: t.b0,
                    b: t.b,
                    eps: t.eps,
                    cap: t.cap,
                },
            ),
            (None, None) => Err(PrcError::InvalidCurve("prc needs `name` or `vertices`".into())),
        }
    }
}

/// Generator parameters; each generator reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fail: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_loops: Option<bool>,
    /// Uniform edge weight applied after generation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

pub const GENERATORS: [&str; 11] = [
    "complete",
    "cycle",
    "path",
    "star",
    "grid",
    "grid-failures",
    "rgg",
    "tree-triangle",
    "random-aperiodic",
    "random-undirected",
    "in-regular",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default)]
    pub params: GraphParams,
    /// Edge-list file, or a directory holding a graph sequence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitSection {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
    #[serde(default)]
    pub align_first_fire: bool,
}

impl Default for InitSection {
    fn default() -> Self {
        InitSection {
            mode: "uniform".into(),
            width: None,
            phases: None,
            align_first_fire: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub freq_error: f64,
    #[serde(default)]
    pub delay_jitter: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSection {
    #[serde(default)]
    pub quiescent: f64,
    #[serde(default)]
    pub self_loop: bool,
    #[serde(default)]
    pub edge_weighted: bool,
    #[serde(default)]
    pub drop_on_switch: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    /// Defaults to one window, `1 + τ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<f64>,
    #[serde(default)]
    pub record_firings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasinSection {
    pub trials: usize,
    pub sampler: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl Default for BasinSection {
    fn default() -> Self {
        BasinSection {
            trials: 100,
            sampler: "uniform".into(),
            width: None,
        }
    }
}

pub const SWEEP_PARAMETERS: [&str; 5] = ["tau", "b0", "width", "quiescent", "k"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<f64>,
    pub trials: usize,
    #[serde(default = "default_sampler")]
    pub sampler: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

fn default_sampler() -> String {
    "uniform".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure2Section {
    pub trials: usize,
    pub depth: usize,
    pub prcs: Vec<PrcEntry>,
}

impl Default for Figure2Section {
    fn default() -> Self {
        Figure2Section {
            trials: 500,
            depth: 3,
            prcs: ["limited-reset", "sr", "sf"].map(|n| PrcEntry::Name(n.into())).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure3Section {
    pub n: usize,
    pub radius: f64,
    pub seeds: usize,
    pub prcs: Vec<PrcEntry>,
}

impl Default for Figure3Section {
    fn default() -> Self {
        Figure3Section {
            n: 100,
            radius: 0.2,
            seeds: 1,
            prcs: ["s2-default", "ms"].map(|n| PrcEntry::Name(n.into())).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    /// Random cases per suite.
    pub cases: usize,
    /// Explicit graphs to check instead of random ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_files: Option<Vec<PathBuf>>,
    /// Added to the delay given to the closed-form maps only.
    #[serde(default)]
    pub corrupt_tau: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            cases: 100,
            graph_files: None,
            corrupt_tau: 0.0,
        }
    }
}

/// The document as written, with defaults filled in on resolution.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    command: Option<Command>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    tau: Option<f64>,
    horizon: Option<f64>,
    tolerance: Option<f64>,
    threads: Option<usize>,
    prc: Option<PrcEntry>,
    graph: Option<GraphSection>,
    init: Option<InitSection>,
    noise: Option<NoiseSection>,
    variant: Option<VariantSection>,
    sampling: Option<SamplingSection>,
    basin: Option<BasinSection>,
    sweep: Option<SweepSection>,
    figure2: Option<Figure2Section>,
    figure3: Option<Figure3Section>,
    oracle: Option<OracleSection>,
}

/// A validated experiment. Serialising it gives the fully resolved config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Where artifacts go; not echoed, so outputs do not depend on it.
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub seed: u64,
    pub tau: f64,
    pub horizon: f64,
    pub tolerance: f64,
    /// Worker threads for trial fan-out; 0 lets the pool decide. Outputs
    /// do not depend on it, and it is not echoed.
    #[serde(skip)]
    pub threads: usize,
    pub prc: PrcEntry,
    pub graph: GraphSection,
    pub init: InitSection,
    pub noise: NoiseSection,
    pub variant: VariantSection,
    pub sampling: SamplingSection,
    pub basin: BasinSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub figure2: Figure2Section,
    pub figure3: Figure3Section,
    pub oracle: OracleSection,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first occurrence of `needle`, or 1.
fn line_of(text: &str, needle: &str) -> usize {
    text.find(needle).map_or(1, |o| line_of_offset(text, o))
}

fn field_from_message(msg: &str) -> String {
    // toml reports the offending key as "unknown field `x`" or "missing field `x`"
    msg.split('`').nth(1).unwrap_or("document").to_string()
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of_offset(text, s.start));
        ConfigError::Parse {
            line,
            field: field_from_message(e.message()),
            msg: e.message().trim().to_string(),
        }
    })?;
    resolve(raw, text)
}

/// Reads a config file; relative paths inside resolve against its folder.
pub fn load_config(path: &Path) -> Result<ExperimentSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let mut spec = parse_config(&text)?;
    spec.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(spec)
}

fn resolve(raw: RawConfig, text: &str) -> Result<ExperimentSpec, ConfigError> {
    let tau = raw.tau.ok_or_else(|| ConfigError::Parse {
        line: 1,
        field: "tau".into(),
        msg: "missing required key `tau`".into(),
    })?;
    let prc = raw.prc.ok_or_else(|| ConfigError::Parse {
        line: 1,
        field: "prc".into(),
        msg: "missing required key `prc`".into(),
    })?;
    let graph = raw.graph.ok_or_else(|| ConfigError::Parse {
        line: 1,
        field: "graph".into(),
        msg: "missing required table `graph`".into(),
    })?;
    let spec = ExperimentSpec {
        name: raw.name.unwrap_or_else(|| "experiment".into()),
        command: raw.command,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        seed: raw.seed.unwrap_or(0),
        tau,
        horizon: raw.horizon.unwrap_or(100.0),
        tolerance: raw.tolerance.unwrap_or(1e-9),
        threads: raw.threads.unwrap_or(0),
        prc,
        graph,
        init: raw.init.unwrap_or_default(),
        noise: raw.noise.unwrap_or_default(),
        variant: raw.variant.unwrap_or_default(),
        sampling: raw.sampling.unwrap_or_default(),
        basin: raw.basin.unwrap_or_default(),
        sweep: raw.sweep,
        figure2: raw.figure2.unwrap_or_default(),
        figure3: raw.figure3.unwrap_or_default(),
        oracle: raw.oracle.unwrap_or_default(),
        base_dir: PathBuf::new(),
    };
    spec.validate(text)?;
    Ok(spec)
}

fn check_prc(entry: &PrcEntry, field: &str, tau: f64, text: &str) -> Result<PrcSpec, ConfigError> {
    let spec = entry.resolve().map_err(|e| match e {
        PrcError::UnknownPreset { name } => ConfigError::Parse {
            line: line_of(text, &format!("\"{name}\"")),
            field: format!("{field}.name"),
            msg: format!("unknown preset `{name}`; expected one of {}", PRESET_NAMES.join(", ")),
        },
        other => ConfigError::validation(field, other.to_string()),
    })?;
    if let PrcSpec::StrongReset { b0 } | PrcSpec::StrongFire { b0 } = spec {
        if b0 <= tau {
            return Err(ConfigError::validation(
                &format!("{field}.b0"),
                format!("b0 > tau (got b0 = {b0}, tau = {tau})"),
            ));
        }
    }
    spec.validate_for_tau(tau)
        .map_err(|e| ConfigError::validation(field, e.to_string()))?;
    Ok(spec)
}

impl ExperimentSpec {
    /// Cross-field checks; `text` is only used to locate errors.
    pub fn validate(&self, text: &str) -> Result<(), ConfigError> {
        let v = ConfigError::validation;
        if !(self.tau > 0.0) {
            return Err(v("tau", "tau > 0"));
        }
        if !(self.tau < 0.5) {
            return Err(v("tau", "tau < 0.5"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(v("horizon", "horizon > 0"));
        }
        if !(self.tolerance > 0.0) {
            return Err(v("tolerance", "tolerance > 0"));
        }
        check_prc(&self.prc, "prc", self.tau, text)?;
        if let Some(b0) = self.prc.table().b0 {
            if !(b0 > self.tau) {
                return Err(v("prc.b0", "b0 > tau"));
            }
        }
        match (&self.graph.generator, &self.graph.file) {
            (Some(_), Some(_)) => return Err(v("graph", "exactly one of generator, file")),
            (None, None) => return Err(v("graph", "one of generator, file")),
            (Some(g), None) if !GENERATORS.contains(&g.as_str()) => {
                return Err(ConfigError::Parse {
                    line: line_of(text, &format!("\"{g}\"")),
                    field: "graph.generator".into(),
                    msg: format!("unknown generator `{g}`; expected one of {}", GENERATORS.join(", ")),
                })
            }
            _ => {}
        }
        match self.init.mode.as_str() {
            "uniform" => {}
            "window" => match self.init.width {
                Some(w) if w > 0.0 && w <= 1.0 => {}
                _ => return Err(v("init.width", "0 < width <= 1 for mode = \"window\"")),
            },
            "explicit" => match &self.init.phases {
                Some(p) if p.iter().all(|x| (0.0..=1.0).contains(x)) => {}
                _ => return Err(v("init.phases", "phases in [0, 1] for mode = \"explicit\"")),
            },
            _ => return Err(v("init.mode", "one of uniform, window, explicit")),
        }
        if !(0.0..1.0).contains(&self.noise.freq_error) {
            return Err(v("noise.freq_error", "0 <= freq_error < 1"));
        }
        if !(0.0..1.0).contains(&self.noise.delay_jitter) {
            return Err(v("noise.delay_jitter", "0 <= delay_jitter < 1"));
        }
        if !(self.variant.quiescent >= 0.0) {
            return Err(v("variant.quiescent", "quiescent >= 0"));
        }
        if let Some(i) = self.sampling.interval {
            if !(i > 0.0) {
                return Err(v("sampling.interval", "interval > 0"));
            }
        }
        check_sampler(&self.basin.sampler, self.basin.width, "basin")?;
        if self.basin.trials == 0 {
            return Err(v("basin.trials", "trials >= 1"));
        }
        if let Some(s) = &self.sweep {
            if !SWEEP_PARAMETERS.contains(&s.parameter.as_str()) {
                return Err(ConfigError::validation(
                    "sweep.parameter",
                    format!("one of {}", SWEEP_PARAMETERS.join(", ")),
                ));
            }
            if s.values.is_empty() {
                return Err(v("sweep.values", "at least one value"));
            }
            if s.trials == 0 {
                return Err(v("sweep.trials", "trials >= 1"));
            }
            if s.parameter == "width" {
                if s.values.iter().any(|w| !(*w > 0.0 && *w <= 1.0)) {
                    return Err(v("sweep.values", "0 < width <= 1"));
                }
                check_sampler(&s.sampler, Some(1.0), "sweep")?;
            } else {
                check_sampler(&s.sampler, s.width, "sweep")?;
            }
        }
        if self.figure2.trials == 0 {
            return Err(v("figure2.trials", "trials >= 1"));
        }
        for p in &self.figure2.prcs {
            check_prc(p, "figure2.prcs", self.tau, text)?;
        }
        if self.figure3.seeds == 0 {
            return Err(v("figure3.seeds", "seeds >= 1"));
        }
        for p in &self.figure3.prcs {
            check_prc(p, "figure3.prcs", self.tau, text)?;
        }
        if self.oracle.cases == 0 {
            return Err(v("oracle.cases", "cases >= 1"));
        }
        if self.oracle.graph_files.as_ref().is_some_and(Vec::is_empty) {
            return Err(v("oracle.graph_files", "a non-empty graph list"));
        }
        Ok(())
    }

    pub fn prc_spec(&self) -> Result<PrcSpec, ConfigError> {
        check_prc(&self.prc, "prc", self.tau, "")
    }

    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Builds the configured graph sequence with `seed` for generators
    /// that draw randomness, unless the config pins `graph.params.seed`.
    pub fn graphs_with_seed(&self, seed: u64) -> Result<GraphSequence, ConfigError> {
        let field = "graph";
        let gerr = |e: graphs::GraphError| ConfigError::validation(field, e.to_string());
        let prm = &self.graph.params;
        let need = |x: Option<usize>, name: &str| {
            x.ok_or_else(|| ConfigError::validation(&format!("graph.params.{name}"), "a value for this generator"))
        };
        let needf = |x: Option<f64>, name: &str| {
            x.ok_or_else(|| ConfigError::validation(&format!("graph.params.{name}"), "a value for this generator"))
        };
        let seed = prm.seed.unwrap_or(seed);
        let seq = if let Some(file) = &self.graph.file {
            let path = self.path(file);
            if path.is_dir() {
                graphs::read_sequence(&path).map_err(gerr)?
            } else {
                let text = std::fs::read_to_string(&path).map_err(|e| ConfigError::Io {
                    path: path.display().to_string(),
                    msg: e.to_string(),
                })?;
                GraphSequence::fixed(graphs::parse_edge_list(&text).map_err(gerr)?)
            }
        } else {
            let name = self.graph.generator.as_deref().unwrap_or_default();
            let g: Result<DirectedGraph, graphs::GraphError> = match name {
                "complete" => Ok(DirectedGraph::complete(need(prm.n, "n")?)),
                "cycle" => Ok(DirectedGraph::directed_cycle(need(prm.n, "n")?)),
                "path" => Ok(DirectedGraph::path(need(prm.n, "n")?)),
                "star" => Ok(DirectedGraph::star(need(prm.n, "n")?)),
                "grid" => graphs::grid(need(prm.w, "w")?, need(prm.h, "h")?),
                "grid-failures" => {
                    let seq = graphs::gen_grid_with_failures(
                        need(prm.w, "w")?,
                        need(prm.h, "h")?,
                        prm.fail.unwrap_or(1),
                        seed,
                        prm.windows.unwrap_or(100),
                    )
                    .map_err(gerr)?;
                    return self.finish_graphs(seq);
                }
                "rgg" => graphs::gen_random_geometric(need(prm.n, "n")?, needf(prm.radius, "radius")?, seed),
                "tree-triangle" => graphs::gen_binary_tree_triangle(need(prm.depth, "depth")?),
                "random-aperiodic" => graphs::gen_random_aperiodic(need(prm.n, "n")?, needf(prm.p, "p")?, seed),
                "random-undirected" => graphs::gen_random_undirected(need(prm.n, "n")?, needf(prm.p, "p")?, seed),
                "in-regular" => graphs::gen_random_in_regular(need(prm.n, "n")?, need(prm.k, "k")?, seed),
                other => {
                    return Err(ConfigError::validation(
                        "graph.generator",
                        format!("one of {} (got {other})", GENERATORS.join(", ")),
                    ))
                }
            };
            GraphSequence::fixed(g.map_err(gerr)?)
        };
        self.finish_graphs(seq)
    }

    fn finish_graphs(&self, seq: GraphSequence) -> Result<GraphSequence, ConfigError> {
        let prm = &self.graph.params;
        let mut seq = seq;
        if prm.self_loops == Some(true) {
            seq = seq.map(|g| g.with_self_loops());
        }
        if let Some(w) = prm.weight {
            if !(w > 0.0) {
                return Err(ConfigError::validation("graph.params.weight", "weight > 0"));
            }
            seq = seq.map(|g| g.with_uniform_weight(w).expect("positive weight"));
        }
        Ok(seq)
    }

    pub fn graphs(&self) -> Result<GraphSequence, ConfigError> {
        self.graphs_with_seed(self.seed)
    }

    pub fn init_phases(&self) -> InitPhases {
        match self.init.mode.as_str() {
            "window" => InitPhases::Window {
                width: self.init.width.unwrap_or(1.0),
            },
            "explicit" => InitPhases::Explicit {
                phases: self.init.phases.clone().unwrap_or_default(),
            },
            _ => InitPhases::Uniform,
        }
    }

    /// The engine configuration for a single run.
    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        self.sim_config_with(self.prc_spec()?, self.graphs()?)
    }

    pub fn sim_config_with(&self, prc: PrcSpec, graphs: GraphSequence) -> Result<SimConfig, ConfigError> {
        let mut cfg = SimConfig::new(prc, graphs, self.tau, self.init_phases());
        cfg.seed = self.seed;
        cfg.horizon = self.horizon;
        cfg.conv_tolerance = self.tolerance;
        cfg.align_first_fire = self.init.align_first_fire;
        cfg.freq_error = self.noise.freq_error;
        cfg.delay_jitter = self.noise.delay_jitter;
        cfg.quiescent = self.variant.quiescent;
        cfg.self_loop_sim = self.variant.self_loop;
        cfg.edge_weighted = self.variant.edge_weighted;
        cfg.drop_on_switch = self.variant.drop_on_switch;
        if let Some(i) = self.sampling.interval {
            cfg.sample_interval = i;
        }
        cfg.record_firings = self.sampling.record_firings;
        cfg.validate()
            .map_err(|e| ConfigError::validation("config", e.to_string()))?;
        Ok(cfg)
    }
}

fn check_sampler(sampler: &str, width: Option<f64>, section: &str) -> Result<(), ConfigError> {
    match sampler {
        "uniform" => Ok(()),
        "window" => match width {
            Some(w) if w > 0.0 && w <= 1.0 => Ok(()),
            _ => Err(ConfigError::validation(
                &format!("{section}.width"),
                "0 < width <= 1 for sampler = \"window\"",
            )),
        },
        _ => Err(ConfigError::validation(
            &format!("{section}.sampler"),
            "one of uniform, window",
        )),
    }
}
