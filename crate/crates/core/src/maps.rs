//! Closed-form window maps for the strong resetting and strong firing
//! curves.
//!
//! The maps work in the window frame: time starts when the leading
//! oscillator is about to fire, so the largest phase is 1 and, inside the
//! basin, every phase lies in `(1 − ρ, 1]`. In that frame phases are
//! treated as plain reals; outside the basin the maps have no meaning and
//! refuse to run.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graphs::{DirectedGraph, GraphSequence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Phases indexed by node, in the window frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    pub fn new(phases: Vec<f64>) -> Self {
        PhaseVector(phases)
    }

    /// Rotates circular phases so that the leader sits at 1.
    pub fn window_frame(phases: &[f64]) -> Self {
        PhaseVector(align_leader_to_one(phases))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn span(&self) -> f64 {
        let max = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.0.iter().copied().fold(f64::INFINITY, f64::min);
        if self.0.is_empty() {
            0.0
        } else {
            max - min
        }
    }

    /// Shifts all entries so the maximum is exactly 1.
    fn rebased(&self) -> Self {
        let max = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        PhaseVector(self.0.iter().map(|p| p + 1.0 - max).collect())
    }
}

/// Circular range: 1 minus the largest gap between cyclically sorted
/// phases.
pub fn range_of(phases: &[f64]) -> f64 {
    if phases.len() < 2 {
        return 0.0;
    }
    let mut p: Vec<f64> = phases.iter().map(|x| x.rem_euclid(1.0) % 1.0).collect();
    p.sort_by(f64::total_cmp);
    // cutting the circle at the largest gap; the wrap cut is exact
    let inner = p.windows(2).map(|w| w[0] + 1.0 - w[1]).fold(f64::INFINITY, f64::min);
    (p[p.len() - 1] - p[0]).min(inner).max(0.0)
}

/// Rotates phases on the circle so the leader (the phase just before the
/// largest gap) becomes 1 and the rest lie in `(0, 1]` behind it.
pub fn align_leader_to_one(phases: &[f64]) -> Vec<f64> {
    if phases.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = phases.iter().map(|x| x.rem_euclid(1.0) % 1.0).collect();
    sorted.sort_by(f64::total_cmp);
    let last = sorted.len() - 1;
    let mut leader = sorted[last];
    let mut largest = sorted[0] + 1.0 - sorted[last];
    for w in sorted.windows(2) {
        if w[1] - w[0] > largest {
            largest = w[1] - w[0];
            leader = w[0];
        }
    }
    phases
        .iter()
        .map(|p| 1.0 - (leader - p).rem_euclid(1.0) % 1.0)
        .collect()
}

/// `ρ₀ = min(B0 − τ, 1 − B0 + τ)`, the range below which the map is valid.
fn sr_basin(tau: f64, b0: f64) -> f64 {
    (b0 - tau).min(1.0 - b0 + tau)
}

/// One window of strong resetting dynamics:
/// `H(φᵢ) = min(φᵢ + τ, min_{j ∈ P(i)} φⱼ)`.
pub fn sr_time_map(phi: &PhaseVector, g: &DirectedGraph, tau: f64, b0: f64) -> Result<PhaseVector, MapError> {
    if phi.len() != g.node_count() {
        return Err(MapError::PreconditionViolated(format!(
            "{} phases for {} nodes",
            phi.len(),
            g.node_count()
        )));
    }
    let basin = sr_basin(tau, b0);
    if phi.span() >= basin {
        return Err(MapError::PreconditionViolated(format!(
            "range {} not below {basin}",
            phi.span()
        )));
    }
    let p = phi.as_slice();
    let out = (0..g.node_count())
        .map(|i| g.predecessors(i).map(|j| p[j]).fold(p[i] + tau, f64::min))
        .collect();
    Ok(PhaseVector(out))
}

/// Next firing times under strong firing dynamics: the least solution of
/// `λᵢ = min(t0 + 1 − φᵢ, min_{j ∈ P(i)} λⱼ + τ)`.
///
/// Solved as a multi-source shortest-path problem with source offsets
/// `t0 + 1 − φᵢ` and edge length `τ`.
pub fn sf_next_fire_times(
    phi: &PhaseVector,
    g: &DirectedGraph,
    tau: f64,
    b0: f64,
    t0: f64,
) -> Result<Vec<f64>, MapError> {
    if !g.is_undirected() {
        return Err(MapError::PreconditionViolated("graph has one-way edges".into()));
    }
    if phi.len() != g.node_count() {
        return Err(MapError::PreconditionViolated(format!(
            "{} phases for {} nodes",
            phi.len(),
            g.node_count()
        )));
    }
    let basin = sr_basin(tau, b0);
    if phi.span() >= basin {
        return Err(MapError::PreconditionViolated(format!(
            "range {} not below {basin}",
            phi.span()
        )));
    }
    let mut lambda: Vec<f64> = phi.as_slice().iter().map(|p| t0 + 1.0 - p).collect();
    let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = lambda
        .iter()
        .enumerate()
        .map(|(i, &l)| Reverse((OrdF64(l), i)))
        .collect();
    while let Some(Reverse((OrdF64(l), u))) = heap.pop() {
        if l > lambda[u] {
            continue;
        }
        for v in g.successors(u) {
            let cand = l + tau;
            if cand < lambda[v] {
                lambda[v] = cand;
                heap.push(Reverse((OrdF64(cand), v)));
            }
        }
    }
    Ok(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// `k` successive applications of [`sr_time_map`], one graph of `seq` per
/// window, rebasing the frame before each step. The trajectory includes
/// the (rebased) start.
pub fn iterate_sr(
    phi: &PhaseVector,
    seq: &GraphSequence,
    tau: f64,
    b0: f64,
    k: usize,
) -> Result<Vec<PhaseVector>, MapError> {
    let mut traj = vec![phi.rebased()];
    for step in 0..k {
        let next = sr_time_map(&traj[step], seq.at(step), tau, b0)?.rebased();
        traj.push(next);
    }
    Ok(traj)
}
