//! Exact event-driven simulation of delayed pulse coupling.
//!
//! Phases advance linearly at each oscillator's frequency between events.
//! When a phase reaches 1 the oscillator fires: it resets to 0 and one
//! pulse per successor (in the graph of the current window) is scheduled
//! `τ · delay_scale · jitter` later. A pulse applies the PRC to its target;
//! if that carries the target to phase 1 it fires at the same instant.
//!
//! Events whose times agree within [`TIME_TOL`] form one instant. Graph
//! switches of an instant are applied first, then fires and arrivals in an
//! order drawn uniformly at random (seeded), then range samples. An
//! oscillator fires at most once per instant.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{DirectedGraph, GraphError, GraphSequence};
use crate::maps;
use crate::prc::{self, Phase, PrcError, PrcSpec};
use crate::{PHASE_TOL, TIME_TOL};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("more than {limit} events at the single instant t={time}")]
    Zeno { time: f64, limit: usize },
    #[error(transparent)]
    Prc(#[from] PrcError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How initial phases are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InitPhases {
    /// Given phases in `[0, 1]`; phase 1 fires at `t = 0`.
    Explicit { phases: Vec<f64> },
    /// Independent uniform phases on `[0, 1)`.
    Uniform,
    /// Uniform inside an arc of the given width at a random offset.
    Window { width: f64 },
}

/// Full description of one run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub prc: PrcSpec,
    /// PRC replacements taking effect at the start of the given window.
    pub prc_schedule: Vec<(usize, PrcSpec)>,
    /// Wrap the PRC of every arrival as `Weighted(prc, edge weight)`.
    pub edge_weighted: bool,
    pub graphs: GraphSequence,
    pub tau: f64,
    pub init: InitPhases,
    /// Rotate the initial phases so the leading oscillator fires at `t = 0`.
    pub align_first_fire: bool,
    pub seed: u64,
    pub horizon: f64,
    /// Per-oscillator frequency drawn uniformly from `[1 − e, 1 + e]`.
    pub freq_error: f64,
    /// Per-pulse delay factor drawn uniformly from `[1 − j, 1 + j]`.
    pub delay_jitter: f64,
    /// Signals arriving within this time after an accepted signal are ignored.
    pub quiescent: f64,
    /// Deliver every oscillator its own pulse `τ` after it fires.
    pub self_loop_sim: bool,
    /// Drop pulses still in flight when the topology switches.
    pub drop_on_switch: bool,
    pub sample_interval: f64,
    pub conv_tolerance: f64,
    pub stop_on_convergence: bool,
    pub record_firings: bool,
    pub record_log: bool,
}

impl SimConfig {
    pub fn new(prc: PrcSpec, graphs: GraphSequence, tau: f64, init: InitPhases) -> Self {
        SimConfig {
            prc,
            prc_schedule: Vec::new(),
            edge_weighted: false,
            graphs,
            tau,
            init,
            align_first_fire: false,
            seed: 0,
            horizon: 100.0,
            freq_error: 0.0,
            delay_jitter: 0.0,
            quiescent: 0.0,
            self_loop_sim: false,
            drop_on_switch: false,
            sample_interval: 1.0 + tau,
            conv_tolerance: 1e-9,
            stop_on_convergence: true,
            record_firings: true,
            record_log: false,
        }
    }

    /// Length of one topology window, `1 + τ`.
    pub fn window(&self) -> f64 {
        1.0 + self.tau
    }

    pub fn node_count(&self) -> usize {
        self.graphs.node_count()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        if !(self.tau > 0.0 && self.tau < 0.5) {
            return bad(format!("tau < 0.5 required and tau > 0 (got {})", self.tau));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be > 0 (got {})", self.horizon));
        }
        if !(self.conv_tolerance > 0.0) {
            return bad(format!("conv_tolerance must be > 0 (got {})", self.conv_tolerance));
        }
        if !(self.sample_interval > 0.0) {
            return bad(format!("sample_interval must be > 0 (got {})", self.sample_interval));
        }
        if !(0.0..1.0).contains(&self.freq_error) {
            return bad(format!("freq_error must be in [0, 1) (got {})", self.freq_error));
        }
        if !(0.0..1.0).contains(&self.delay_jitter) {
            return bad(format!("delay_jitter must be in [0, 1) (got {})", self.delay_jitter));
        }
        if !(self.quiescent >= 0.0) {
            return bad(format!("quiescent must be >= 0 (got {})", self.quiescent));
        }
        if self.graphs.is_empty() || self.node_count() == 0 {
            return bad("graph sequence is empty".into());
        }
        let n = self.node_count();
        match &self.init {
            InitPhases::Explicit { phases } => {
                if phases.len() != n {
                    return bad(format!("{} initial phases for {n} nodes", phases.len()));
                }
                if let Some(p) = phases.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    return bad(format!("initial phase {p} outside [0, 1]"));
                }
            }
            InitPhases::Uniform => {}
            InitPhases::Window { width } => {
                if !(*width > 0.0 && *width <= 1.0) {
                    return bad(format!("init window width {width} not in (0, 1]"));
                }
            }
        }
        self.prc.validate_for_tau(self.tau)?;
        for (_, p) in &self.prc_schedule {
            p.validate_for_tau(self.tau)?;
        }
        Ok(())
    }
}

/// State of one oscillator; `phase` is the phase at the time it was last
/// updated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorState {
    pub phase: Phase,
    pub freq: f64,
    pub quiescent_until: Option<f64>,
    pub last_fire: Option<f64>,
}

impl OscillatorState {
    pub fn new(phase: Phase, freq: f64) -> Self {
        OscillatorState {
            phase,
            freq,
            quiescent_until: None,
            last_fire: None,
        }
    }
}

/// Outcome of delivering one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub ignored: bool,
    pub phase: Phase,
    pub fired: bool,
}

/// Applies an incoming pulse to `state`, whose phase must already be
/// advanced to `now`.
///
/// Quiescent receivers drop the signal. Otherwise the PRC is applied
/// (wrapped by the edge weight when one is given) and, for `quiescent > 0`,
/// a new quiescent window starts.
pub fn deliver(
    state: &mut OscillatorState,
    prc: &PrcSpec,
    edge_weight: Option<f64>,
    now: f64,
    quiescent: f64,
) -> Delivery {
    if state.quiescent_until.is_some_and(|q| q > now) {
        return Delivery {
            ignored: true,
            phase: state.phase,
            fired: false,
        };
    }
    let phi = state.phase.value();
    let f = match edge_weight {
        Some(w) => prc::eval_weighted(prc, w.min(prc.inhibitory_end()), phi),
        None => prc.eval(phi),
    };
    let r = prc::respond(phi + f);
    state.phase = r.phase;
    if quiescent > 0.0 {
        state.quiescent_until = Some(now + quiescent);
    }
    Delivery {
        ignored: false,
        phase: r.phase,
        fired: r.fired,
    }
}

/// Time at which an oscillator at `phase` reaches 1 without input.
pub fn intrinsic_fire_time(phase: f64, freq: f64, now: f64) -> f64 {
    now + (1.0 - phase).max(0.0) / freq
}

/// Earliest of the queue head and the intrinsic fire times.
pub fn next_event_time(states: &[OscillatorState], now: f64, queue_head: Option<f64>) -> Option<f64> {
    states
        .iter()
        .map(|s| intrinsic_fire_time(s.phase.value(), s.freq, now))
        .chain(queue_head)
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Fire {
        node: usize,
        forced: bool,
    },
    Arrival {
        target: usize,
        source: usize,
        emit_time: f64,
        phase_before: f64,
        phase_after: f64,
        ignored: bool,
    },
    GraphSwitch {
        index: usize,
    },
}

/// A processed event, recorded when `record_log` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Recorded history of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub firings: Vec<(f64, usize)>,
    pub range_series: Vec<(f64, f64)>,
    pub converged_at: Option<f64>,
    pub events_processed: u64,
    /// Phases at `end_time`.
    pub final_phases: Vec<f64>,
    pub end_time: f64,
    /// Initial phases after resolution and alignment.
    pub initial_phases: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub log: Vec<Event>,
}

impl Trace {
    pub fn node_count(&self) -> usize {
        self.final_phases.len()
    }

    /// First firing time of each node at or after `t0`.
    pub fn first_fire_times(&self, t0: f64) -> Vec<Option<f64>> {
        let mut out = vec![None; self.node_count()];
        for &(t, v) in &self.firings {
            if t >= t0 - TIME_TOL && out[v].is_none() {
                out[v] = Some(t);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Arrival {
    target: usize,
    source: usize,
    emit_time: f64,
    emit_window: usize,
    weight: f64,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Fire { node: usize, version: u64 },
    Arrival(Arrival),
    GraphSwitch(usize),
    Sample,
}

#[derive(Debug)]
struct Queued {
    time: f64,
    seq: u64,
    kind: Kind,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // reversed: BinaryHeap pops the earliest event first
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy)]
enum Pending {
    Fire { node: usize, version: u64 },
    Forced(usize),
    Arrival(Arrival),
}

#[derive(Debug, Clone)]
struct Osc {
    state: OscillatorState,
    t_ref: f64,
    version: u64,
}

impl Osc {
    fn phase_at(&self, t: f64) -> f64 {
        (self.state.phase.value() + self.state.freq * (t - self.t_ref)).min(1.0)
    }

    fn advance(&mut self, t: f64) {
        let p = self.phase_at(t);
        // a due oscillator sits just below 1 until its fire is processed
        self.state.phase = Phase::new(p.min(1.0 - f64::EPSILON)).unwrap_or(Phase::ZERO);
        self.t_ref = t;
    }
}

/// Tracks the persistence rule of convergence detection incrementally.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConvergenceTracker {
    tol: f64,
    hold: f64,
    candidate: Option<f64>,
    pub(crate) confirmed: Option<f64>,
}

impl ConvergenceTracker {
    pub(crate) fn new(tol: f64, tau: f64) -> Self {
        ConvergenceTracker {
            tol,
            hold: 1.0 + tau,
            candidate: None,
            confirmed: None,
        }
    }

    pub(crate) fn push(&mut self, t: f64, rho: f64) -> Option<f64> {
        if self.confirmed.is_some() {
            return self.confirmed;
        }
        if rho < self.tol {
            let start = *self.candidate.get_or_insert(t);
            if t - start >= self.hold - TIME_TOL {
                self.confirmed = Some(start);
            }
        } else {
            self.candidate = None;
        }
        self.confirmed
    }
}

struct Simulator<'a> {
    cfg: &'a SimConfig,
    osc: Vec<Osc>,
    queue: BinaryHeap<Queued>,
    seq: u64,
    rng: ChaCha8Rng,
    window: usize,
    prc_index: Option<usize>,
    now: f64,
    events: u64,
    firings: Vec<(f64, usize)>,
    range_series: Vec<(f64, f64)>,
    log: Vec<Event>,
    tracker: ConvergenceTracker,
    initial: Vec<f64>,
    zeno_limit: usize,
}

/// Resolves the initial phases of a config with its init stream.
pub fn resolve_initial_phases(cfg: &SimConfig) -> Vec<f64> {
    let n = cfg.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let phases: Vec<f64> = match &cfg.init {
        InitPhases::Explicit { phases } => phases.clone(),
        InitPhases::Uniform => (0..n).map(|_| rng.gen::<f64>()).collect(),
        InitPhases::Window { width } => {
            let offset: f64 = rng.gen();
            (0..n)
                .map(|_| Phase::wrap(offset + width * rng.gen::<f64>()).value())
                .collect()
        }
    };
    if cfg.align_first_fire {
        maps::align_leader_to_one(&phases)
    } else {
        phases
    }
}

impl<'a> Simulator<'a> {
    fn new(cfg: &'a SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let n = cfg.node_count();
        let initial = resolve_initial_phases(cfg);
        let mut freq_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        freq_rng.set_stream(2);
        let osc: Vec<Osc> = initial
            .iter()
            .map(|&p| {
                let freq = if cfg.freq_error > 0.0 {
                    freq_rng.gen_range(1.0 - cfg.freq_error..=1.0 + cfg.freq_error)
                } else {
                    1.0
                };
                Osc {
                    // phase 1 is kept as "due now"; the fire event resets it
                    state: OscillatorState::new(Phase::new(p.min(1.0 - f64::EPSILON)).unwrap_or(Phase::ZERO), freq),
                    t_ref: 0.0,
                    version: 0,
                }
            })
            .collect();
        let mut sim = Simulator {
            cfg,
            osc,
            queue: BinaryHeap::new(),
            seq: 0,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            window: 0,
            prc_index: None,
            now: 0.0,
            events: 0,
            firings: Vec::new(),
            range_series: Vec::new(),
            log: Vec::new(),
            tracker: ConvergenceTracker::new(cfg.conv_tolerance, cfg.tau),
            initial: initial.clone(),
            zeno_limit: n * n + n,
        };
        sim.update_prc_index();
        for (i, &p) in initial.iter().enumerate() {
            let t = intrinsic_fire_time(p, sim.osc[i].state.freq, 0.0);
            sim.push(t, Kind::Fire { node: i, version: 0 });
        }
        sim.push(cfg.window(), Kind::GraphSwitch(1));
        sim.push(0.0, Kind::Sample);
        Ok(sim)
    }

    fn push(&mut self, time: f64, kind: Kind) {
        self.seq += 1;
        self.queue.push(Queued {
            time,
            seq: self.seq,
            kind,
        });
    }

    fn is_stale(&self, q: &Queued) -> bool {
        matches!(q.kind, Kind::Fire { node, version } if self.osc[node].version != version)
    }

    fn peek_time(&mut self) -> Option<f64> {
        while let Some(q) = self.queue.peek() {
            if self.is_stale(q) {
                self.queue.pop();
            } else {
                return Some(q.time);
            }
        }
        None
    }

    fn update_prc_index(&mut self) {
        self.prc_index = self
            .cfg
            .prc_schedule
            .iter()
            .enumerate()
            .filter(|(_, (w, _))| *w <= self.window)
            .max_by_key(|(_, (w, _))| *w)
            .map(|(i, _)| i);
    }

    fn current_prc(&self) -> &'a PrcSpec {
        match self.prc_index {
            Some(i) => &self.cfg.prc_schedule[i].1,
            None => &self.cfg.prc,
        }
    }

    fn graph(&self) -> &'a DirectedGraph {
        self.cfg.graphs.at(self.window)
    }

    fn schedule_fire(&mut self, node: usize) {
        let o = &self.osc[node];
        let t = intrinsic_fire_time(o.state.phase.value(), o.state.freq, self.now);
        let version = o.version;
        self.push(t, Kind::Fire { node, version });
    }

    fn jitter(&mut self) -> f64 {
        let j = self.cfg.delay_jitter;
        if j > 0.0 {
            self.rng.gen_range(1.0 - j..=1.0 + j)
        } else {
            1.0
        }
    }

    fn fire(&mut self, node: usize, forced: bool) {
        if self.osc[node].state.last_fire == Some(self.now) {
            return;
        }
        let now = self.now;
        {
            let o = &mut self.osc[node];
            o.state.phase = Phase::ZERO;
            o.t_ref = now;
            o.version += 1;
            o.state.last_fire = Some(now);
        }
        self.schedule_fire(node);
        if self.cfg.record_firings {
            self.firings.push((now, node));
        }
        if self.cfg.record_log {
            self.log.push(Event {
                time: now,
                kind: EventKind::Fire { node, forced },
            });
        }
        let g = self.graph();
        let tau = self.cfg.tau;
        let window = self.window;
        let mut has_loop = false;
        for e in g.out_edges(node) {
            has_loop |= e.to == node;
            let delay = tau * e.delay_scale * self.jitter();
            self.push(
                now + delay,
                Kind::Arrival(Arrival {
                    target: e.to,
                    source: node,
                    emit_time: now,
                    emit_window: window,
                    weight: e.weight,
                }),
            );
        }
        if self.cfg.self_loop_sim && !has_loop {
            let delay = tau * self.jitter();
            self.push(
                now + delay,
                Kind::Arrival(Arrival {
                    target: node,
                    source: node,
                    emit_time: now,
                    emit_window: window,
                    weight: 1.0,
                }),
            );
        }
    }

    /// Returns true when the arrival forces the target to fire.
    fn arrive(&mut self, a: Arrival) -> bool {
        let now = self.now;
        let dropped = self.cfg.drop_on_switch && a.emit_window != self.window;
        let prc = self.current_prc();
        let weight = self.cfg.edge_weighted.then_some(a.weight);
        let q = self.cfg.quiescent;
        let o = &mut self.osc[a.target];
        o.advance(now);
        let before = o.state.phase.value();
        let d = if dropped {
            Delivery {
                ignored: true,
                phase: o.state.phase,
                fired: false,
            }
        } else {
            deliver(&mut o.state, prc, weight, now, q)
        };
        if !d.ignored {
            o.version += 1;
        }
        if self.cfg.record_log {
            self.log.push(Event {
                time: now,
                kind: EventKind::Arrival {
                    target: a.target,
                    source: a.source,
                    emit_time: a.emit_time,
                    phase_before: before,
                    phase_after: d.phase.value(),
                    ignored: d.ignored,
                },
            });
        }
        if !d.ignored {
            self.schedule_fire(a.target);
        }
        d.fired
    }

    fn process_instant(&mut self, mut pending: Vec<Pending>) -> Result<(), SimError> {
        let mut count = 0usize;
        while !pending.is_empty() {
            count += 1;
            if count > self.zeno_limit {
                return Err(SimError::Zeno {
                    time: self.now,
                    limit: self.zeno_limit,
                });
            }
            self.events += 1;
            let i = self.rng.gen_range(0..pending.len());
            match pending.swap_remove(i) {
                Pending::Fire { node, version } => {
                    if self.osc[node].version == version {
                        self.fire(node, false);
                    }
                }
                Pending::Forced(node) => self.fire(node, true),
                Pending::Arrival(a) => {
                    if self.arrive(a) {
                        pending.push(Pending::Forced(a.target));
                    }
                }
            }
        }
        Ok(())
    }

    fn sample(&mut self) -> bool {
        let now = self.now;
        let phases: Vec<f64> = self.osc.iter().map(|o| Phase::wrap(o.phase_at(now)).value()).collect();
        let rho = maps::range_of(&phases);
        self.range_series.push((now, rho));
        let next = now + self.cfg.sample_interval;
        if next <= self.cfg.horizon + TIME_TOL {
            // re-anchor on the index to avoid accumulating rounding
            let k = (next / self.cfg.sample_interval).round();
            self.push(k * self.cfg.sample_interval, Kind::Sample);
        }
        self.tracker.push(now, rho).is_some() && self.cfg.stop_on_convergence
    }

    fn run(mut self) -> Result<Trace, SimError> {
        let horizon = self.cfg.horizon;
        let mut stopped = false;
        while let Some(t) = self.peek_time() {
            if t > horizon + TIME_TOL {
                break;
            }
            self.now = t;
            let mut pending = Vec::new();
            let mut switches = Vec::new();
            let mut samples = 0usize;
            while let Some(q) = self.queue.peek() {
                if q.time > t + TIME_TOL {
                    break;
                }
                let q = self.queue.pop().expect("peeked");
                if self.is_stale(&q) {
                    continue;
                }
                match q.kind {
                    Kind::Fire { node, version } => pending.push(Pending::Fire { node, version }),
                    Kind::Arrival(a) => pending.push(Pending::Arrival(a)),
                    Kind::GraphSwitch(i) => switches.push(i),
                    Kind::Sample => samples += 1,
                }
            }
            for index in switches {
                self.window = index;
                self.update_prc_index();
                if self.cfg.record_log {
                    self.log.push(Event {
                        time: t,
                        kind: EventKind::GraphSwitch { index },
                    });
                }
                self.push((index + 1) as f64 * self.cfg.window(), Kind::GraphSwitch(index + 1));
            }
            self.process_instant(pending)?;
            if samples > 0 && self.sample() {
                stopped = true;
                break;
            }
        }
        let end_time = if stopped { self.now } else { horizon };
        let final_phases = self
            .osc
            .iter()
            .map(|o| Phase::wrap(o.phase_at(end_time)).value())
            .collect();
        let n = self.osc.len();
        let converged_at = if n == 1 { Some(0.0) } else { self.tracker.confirmed };
        Ok(Trace {
            firings: self.firings,
            range_series: self.range_series,
            converged_at,
            events_processed: self.events,
            final_phases,
            end_time,
            initial_phases: self.initial,
            frequencies: self.osc.iter().map(|o| o.state.freq).collect(),
            log: self.log,
        })
    }
}

/// Runs the configured experiment to its horizon or to confirmed
/// convergence.
pub fn simulate(config: &SimConfig) -> Result<Trace, SimError> {
    Simulator::new(config)?.run()
}

/// Simulates exactly one window `1 + τ` from `phases` with nothing in
/// flight, starting when the leading oscillator fires.
///
/// The input is rotated so its maximum sits at phase 1; the returned
/// phases are rotated back into the caller's frame and reduced mod 1.
pub fn run_window_map(phases: &[f64], g: &DirectedGraph, prc: &PrcSpec, tau: f64) -> Result<Vec<f64>, SimError> {
    if phases.len() != g.node_count() {
        return Err(SimError::Config(format!(
            "{} phases for {} nodes",
            phases.len(),
            g.node_count()
        )));
    }
    let max = phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shift = 1.0 - max;
    let start: Vec<f64> = phases.iter().map(|p| p + shift).collect();
    if let Some(p) = start.iter().find(|p| **p < 0.0) {
        return Err(SimError::Config(format!("phase span exceeds one period ({p})")));
    }
    let mut cfg = SimConfig::new(
        prc.clone(),
        GraphSequence::fixed(g.clone()),
        tau,
        InitPhases::Explicit { phases: start },
    );
    cfg.horizon = 1.0 + tau;
    cfg.stop_on_convergence = false;
    cfg.record_firings = false;
    let trace = simulate(&cfg)?;
    Ok(trace
        .final_phases
        .iter()
        .map(|p| Phase::wrap(p - shift).value())
        .collect())
}

/// Circular distance between two phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// True when all phases agree within `tol` on the circle.
pub fn is_synchronized(phases: &[f64], tol: f64) -> bool {
    maps::range_of(phases) < tol.max(PHASE_TOL)
}
