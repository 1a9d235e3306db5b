//! Phases and phase response curves.
//!
//! A phase response curve (PRC) `f` maps the phase `φ` at which a pulse is
//! received to the phase offset the receiver undergoes, `φ → φ + f(φ)`.
//! Offsets that carry the phase to 1 make the receiver fire immediately.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::PHASE_TOL;

/// Default number of sample points used when validating curves that are
/// not piecewise linear.
pub const DEFAULT_VALIDATION_SAMPLES: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrcError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid piecewise-linear curve: {0}")]
    InvalidCurve(String),
    #[error("phase {0} outside [0, 1)")]
    PhaseOutOfRange(f64),
    #[error("not a strong type II curve: clause ({clause}) violated at phase {phase}")]
    NotS2 { clause: S2Clause, phase: f64 },
    #[error("unknown PRC preset `{name}` (available: {})", PRESET_NAMES.join(", "))]
    UnknownPreset { name: String },
}

/// The three defining clauses of a strong type II curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum S2Clause {
    /// `f(φ) = −φ` on the reset zone `[0, τ+κ]`.
    ResetZone,
    /// `f(φ) ≤ −τ−κ` on the inhibitory band up to `B0`.
    Inhibition,
    /// `f(φ) ≥ 0` on `(B1, 1)`.
    Excitation,
}

impl fmt::Display for S2Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            S2Clause::ResetZone => write!(f, "a: reset zone"),
            S2Clause::Inhibition => write!(f, "b: inhibition"),
            S2Clause::Excitation => write!(f, "c: excitation"),
        }
    }
}

/// Oscillator phase as a fraction of the intrinsic period, in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Phase(f64);

impl Phase {
    pub const ZERO: Phase = Phase(0.0);

    pub fn new(value: f64) -> Result<Self, PrcError> {
        if (0.0..1.0).contains(&value) {
            Ok(Phase(value))
        } else {
            Err(PrcError::PhaseOutOfRange(value))
        }
    }

    /// Reduces any finite real to its representative in `[0, 1)`.
    pub fn wrap(value: f64) -> Self {
        let r = value.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        Phase(if r >= 1.0 { 0.0 } else { r })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Phase> for f64 {
    fn from(p: Phase) -> f64 {
        p.0
    }
}

/// Result of applying a PRC to a receiving oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub phase: Phase,
    pub fired: bool,
}

/// A piecewise-linear curve given by `(phase, value)` vertices.
///
/// Phases are non-decreasing from 0 to 1. Two consecutive vertices with
/// the same phase encode a jump; the curve takes the left value at the jump
/// phase itself so that intervals such as `0 ≤ φ ≤ B0` are closed on the
/// right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseLinear {
    vertices: Vec<(f64, f64)>,
}

/// One linear piece `(x0, x1]` of a [`PiecewiseLinear`] curve; `y0` is the
/// right limit at `x0` and `y1` the value at `x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Segment {
    fn at(&self, x: f64) -> f64 {
        let t = ((x - self.x0) / (self.x1 - self.x0)).clamp(0.0, 1.0);
        self.y0 + t * (self.y1 - self.y0)
    }
}

impl PiecewiseLinear {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self, PrcError> {
        if vertices.len() < 2 {
            return Err(PrcError::InvalidCurve("need at least two vertices".into()));
        }
        if vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(PrcError::InvalidCurve("non-finite vertex".into()));
        }
        if vertices[0].0 != 0.0 {
            return Err(PrcError::InvalidCurve("first vertex must be at phase 0".into()));
        }
        if vertices[vertices.len() - 1].0 != 1.0 {
            return Err(PrcError::InvalidCurve("last vertex must be at phase 1".into()));
        }
        for w in vertices.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(PrcError::InvalidCurve(format!(
                    "phases must be non-decreasing ({} after {})",
                    w[1].0, w[0].0
                )));
            }
        }
        for w in vertices.windows(3) {
            if w[0].0 == w[1].0 && w[1].0 == w[2].0 {
                return Err(PrcError::InvalidCurve(format!(
                    "more than two vertices at phase {}",
                    w[0].0
                )));
            }
        }
        if vertices[0].0 == vertices[1].0 {
            return Err(PrcError::InvalidCurve("jump at phase 0".into()));
        }
        Ok(PiecewiseLinear { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Non-degenerate linear pieces in increasing phase order.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).filter(|w| w[1].0 > w[0].0).map(|w| Segment {
            x0: w[0].0,
            y0: w[0].1,
            x1: w[1].0,
            y1: w[1].1,
        })
    }

    pub fn eval(&self, phi: f64) -> f64 {
        if phi <= 0.0 {
            return self.vertices[0].1;
        }
        for seg in self.segments() {
            if phi <= seg.x1 + PHASE_TOL {
                return seg.at(phi);
            }
        }
        self.vertices[self.vertices.len() - 1].1
    }
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseLinear {
    type Error = PrcError;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        PiecewiseLinear::new(v)
    }
}

impl From<PiecewiseLinear> for Vec<(f64, f64)> {
    fn from(p: PiecewiseLinear) -> Self {
        p.vertices
    }
}

/// A phase response curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrcSpec {
    /// `−φ` on `[0, B0]`, 0 above.
    StrongReset {
        b0: f64,
    },
    /// `−φ` on `[0, B0]`, `1 − φ` above (forces a fire).
    StrongFire {
        b0: f64,
    },
    /// A strong type II curve with its declared parameters.
    StrongTypeII {
        curve: PiecewiseLinear,
        kappa: f64,
        b0: f64,
        b1: f64,
    },
    /// `V⁻¹(ε + V(φ)) − φ` with `V(φ) = ln(1 + (eᵇ − 1)φ)/b`.
    MirolloStrogatz {
        b: f64,
        eps: f64,
    },
    PiecewiseLinear(PiecewiseLinear),
    /// Edge-weighted reset: `−φ` for `φ ≤ w`, inhibition capped at `w` on
    /// `(w, B0]`, and the inner curve elsewhere.
    Weighted {
        inner: Box<PrcSpec>,
        w: f64,
    },
}

pub const PRESET_NAMES: [&str; 5] = ["sr", "sf", "s2-default", "ms", "limited-reset"];

/// Optional overrides for preset parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub b0: Option<f64>,
    pub b: Option<f64>,
    pub eps: Option<f64>,
    /// Inhibition cap of the limited-reset curve.
    pub cap: Option<f64>,
}

/// Looks up a preset by name with default parameters.
pub fn preset(name: &str) -> Result<PrcSpec, PrcError> {
    preset_with(name, &PresetParams::default())
}

pub fn preset_with(name: &str, p: &PresetParams) -> Result<PrcSpec, PrcError> {
    let spec = match name {
        "sr" => PrcSpec::StrongReset {
            b0: p.b0.unwrap_or(0.5),
        },
        "sf" => PrcSpec::StrongFire {
            b0: p.b0.unwrap_or(0.5),
        },
        "s2-default" => s2_default(),
        "ms" => PrcSpec::MirolloStrogatz {
            b: p.b.unwrap_or(3.0),
            eps: p.eps.unwrap_or(0.05),
        },
        "limited-reset" => limited_reset(p.b0.unwrap_or(0.5), p.cap.unwrap_or(0.1))?,
        _ => return Err(PrcError::UnknownPreset { name: name.to_string() }),
    };
    spec.validate()?;
    Ok(spec)
}

/// The default strong type II curve: full reset on `[0, 0.3]`, a flat
/// `−0.3` band to 0.5, a dead zone to 0.7 and a linear excitatory ramp
/// reaching `+0.1` at phase 1.
pub fn s2_default() -> PrcSpec {
    let curve = PiecewiseLinear::new(vec![
        (0.0, 0.0),
        (0.3, -0.3),
        (0.5, -0.3),
        (0.5, 0.0),
        (0.7, 0.0),
        (1.0, 0.1),
    ])
    .expect("static curve");
    PrcSpec::StrongTypeII {
        curve,
        kappa: 0.2,
        b0: 0.5,
        b1: 0.7,
    }
}

/// `max(−φ, −cap)` on `[0, B0]`, 0 above.
pub fn limited_reset(b0: f64, cap: f64) -> Result<PrcSpec, PrcError> {
    if !(cap > 0.0 && cap < b0 && b0 < 1.0) {
        return Err(PrcError::InvalidParameter(format!(
            "limited-reset needs 0 < cap < b0 < 1 (cap={cap}, b0={b0})"
        )));
    }
    Ok(PrcSpec::PiecewiseLinear(PiecewiseLinear::new(vec![
        (0.0, 0.0),
        (cap, -cap),
        (b0, -cap),
        (b0, 0.0),
        (1.0, 0.0),
    ])?))
}

/// Reset on `[0, B0]`, silent on `(B0, B1]`, forced fire above `B1`.
///
/// The silent band is the sleep interval of the adaptive schedule.
pub fn sleep_curve(b0: f64, b1: f64) -> Result<PrcSpec, PrcError> {
    if !(b0 > 0.0 && b0 <= b1 && b1 < 1.0) {
        return Err(PrcError::InvalidParameter(format!(
            "sleep curve needs 0 < b0 <= b1 < 1 (b0={b0}, b1={b1})"
        )));
    }
    let v = if b1 > b0 {
        vec![(0.0, 0.0), (b0, -b0), (b0, 0.0), (b1, 0.0), (b1, 1.0 - b1), (1.0, 0.0)]
    } else {
        vec![(0.0, 0.0), (b0, -b0), (b0, 1.0 - b0), (1.0, 0.0)]
    };
    let curve = PiecewiseLinear::new(v)?;
    Ok(PrcSpec::StrongTypeII {
        curve,
        kappa: b0,
        b0,
        b1,
    })
}

fn ms_v(b: f64, phi: f64) -> f64 {
    (b.exp_m1() * phi).ln_1p() / b
}

fn ms_v_inv(b: f64, u: f64) -> f64 {
    (b * u).exp_m1() / b.exp_m1()
}

/// Evaluates the weighted variant without allocating a wrapper.
pub fn eval_weighted(inner: &PrcSpec, w: f64, phi: f64) -> f64 {
    if phi <= w + PHASE_TOL {
        -phi
    } else if phi <= inner.inhibitory_end() + PHASE_TOL {
        inner.eval(phi).max(-w)
    } else {
        inner.eval(phi)
    }
}

/// Maps a candidate phase `φ + f(φ)` to the receiver's new state.
pub fn respond(candidate: f64) -> Response {
    if candidate >= 1.0 - PHASE_TOL {
        Response {
            phase: Phase::ZERO,
            fired: true,
        }
    } else {
        Response {
            phase: Phase(candidate.max(0.0)),
            fired: false,
        }
    }
}

impl PrcSpec {
    /// The phase offset `f(φ)`.
    pub fn eval(&self, phi: f64) -> f64 {
        match self {
            PrcSpec::StrongReset { b0 } => {
                if phi <= b0 + PHASE_TOL {
                    -phi
                } else {
                    0.0
                }
            }
            PrcSpec::StrongFire { b0 } => {
                if phi <= b0 + PHASE_TOL {
                    -phi
                } else {
                    1.0 - phi
                }
            }
            PrcSpec::StrongTypeII { curve, .. } | PrcSpec::PiecewiseLinear(curve) => curve.eval(phi),
            PrcSpec::MirolloStrogatz { b, eps } => ms_v_inv(*b, eps + ms_v(*b, phi)) - phi,
            PrcSpec::Weighted { inner, w } => eval_weighted(inner, *w, phi),
        }
    }

    /// Applies the curve to a receiver at phase `phi`.
    ///
    /// Excitation that reaches phase 1 fires the receiver at once; the
    /// phase is never wrapped past 0.
    pub fn apply(&self, phi: Phase) -> Response {
        respond(phi.0 + self.eval(phi.0))
    }

    /// Upper end of the inhibitory region (`B0`). Zero for curves without
    /// one.
    pub fn inhibitory_end(&self) -> f64 {
        match self {
            PrcSpec::StrongReset { b0 } | PrcSpec::StrongFire { b0 } => *b0,
            PrcSpec::StrongTypeII { b0, .. } => *b0,
            PrcSpec::MirolloStrogatz { .. } => 0.0,
            PrcSpec::PiecewiseLinear(curve) => curve
                .segments()
                .filter(|s| s.y0 < -PHASE_TOL || s.y1 < -PHASE_TOL)
                .map(|s| {
                    if s.y1 < -PHASE_TOL {
                        s.x1
                    } else {
                        // crossing from negative to non-negative inside the piece
                        s.x0 + (-s.y0) / (s.y1 - s.y0) * (s.x1 - s.x0)
                    }
                })
                .fold(0.0, f64::max),
            PrcSpec::Weighted { inner, .. } => inner.inhibitory_end(),
        }
    }

    /// Structural checks that do not depend on the delay.
    pub fn validate(&self) -> Result<(), PrcError> {
        match self {
            PrcSpec::StrongReset { b0 } | PrcSpec::StrongFire { b0 } => {
                if !(*b0 > 0.0 && *b0 < 1.0) {
                    return Err(PrcError::InvalidParameter(format!("b0={b0} not in (0, 1)")));
                }
            }
            PrcSpec::StrongTypeII { kappa, b0, b1, .. } => {
                if !(*kappa > 0.0) {
                    return Err(PrcError::InvalidParameter(format!("kappa={kappa} must be > 0")));
                }
                if !(*b0 <= *b1 && *b1 < 1.0 && *b0 > 0.0) {
                    return Err(PrcError::InvalidParameter(format!(
                        "need 0 < b0 <= b1 < 1 (b0={b0}, b1={b1})"
                    )));
                }
            }
            PrcSpec::MirolloStrogatz { b, eps } => {
                if !(*b > 0.0 && *eps > 0.0 && *eps < 1.0) {
                    return Err(PrcError::InvalidParameter(format!(
                        "Mirollo-Strogatz needs b > 0 and 0 < eps < 1 (b={b}, eps={eps})"
                    )));
                }
            }
            PrcSpec::PiecewiseLinear(_) => {}
            PrcSpec::Weighted { inner, w } => {
                inner.validate()?;
                let b0 = inner.inhibitory_end();
                if !(*w > 0.0 && *w <= b0 + PHASE_TOL) {
                    return Err(PrcError::InvalidParameter(format!("weight w={w} not in (0, B0={b0}]")));
                }
            }
        }
        Ok(())
    }

    /// Checks the constraints that involve the propagation delay.
    pub fn validate_for_tau(&self, tau: f64) -> Result<(), PrcError> {
        self.validate()?;
        match self {
            PrcSpec::StrongReset { b0 } | PrcSpec::StrongFire { b0 } if *b0 <= tau => {
                Err(PrcError::InvalidParameter(format!("B0={b0} must exceed tau={tau}")))
            }
            _ => Ok(()),
        }
    }

    /// Exact piecewise-linear form, when the curve has one.
    pub fn to_piecewise(&self) -> Option<PiecewiseLinear> {
        match self {
            PrcSpec::StrongReset { b0 } => {
                PiecewiseLinear::new(vec![(0.0, 0.0), (*b0, -b0), (*b0, 0.0), (1.0, 0.0)]).ok()
            }
            PrcSpec::StrongFire { b0 } => {
                PiecewiseLinear::new(vec![(0.0, 0.0), (*b0, -b0), (*b0, 1.0 - b0), (1.0, 0.0)]).ok()
            }
            PrcSpec::StrongTypeII { curve, .. } | PrcSpec::PiecewiseLinear(curve) => Some(curve.clone()),
            PrcSpec::MirolloStrogatz { .. } | PrcSpec::Weighted { .. } => None,
        }
    }

    /// Polyline through dense samples, including the known breakpoints of
    /// the curve on both sides.
    fn sampled(&self, samples: usize) -> PiecewiseLinear {
        let samples = samples.max(2);
        let mut xs: Vec<f64> = (0..=samples).map(|k| k as f64 / samples as f64).collect();
        let mut marks = Vec::new();
        if let PrcSpec::Weighted { inner, w } = self {
            marks.push(*w);
            marks.push(inner.inhibitory_end());
            if let Some(pl) = inner.to_piecewise() {
                marks.extend(pl.vertices().iter().map(|v| v.0));
            }
        }
        for m in marks {
            if m > 0.0 && m < 1.0 {
                xs.push(m);
                xs.push((m + 1e-9).min(1.0));
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let vertices = xs
            .into_iter()
            .map(|x| {
                let probe = if x >= 1.0 { 1.0 - 1e-9 } else { x };
                (x, self.eval(probe))
            })
            .collect();
        PiecewiseLinear::new(vertices).expect("sample grid is increasing from 0 to 1")
    }
}

/// Parameters of a validated strong type II curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S2Params {
    pub kappa: f64,
    pub b0: f64,
    pub b1: f64,
    /// The delay the curve was validated against.
    pub tau_ref: f64,
}

impl S2Params {
    /// `min(B0 − τ, 1 − B1 + τ)` for the validation delay.
    pub fn basin(&self) -> f64 {
        (self.b0 - self.tau_ref).min(1.0 - self.b1 + self.tau_ref)
    }

    /// The per-block contraction `min(τ, κ)`.
    pub fn epsilon(&self) -> f64 {
        self.tau_ref.min(self.kappa)
    }
}

/// Checks that `prc` is a strong type II curve for delay `tau` and
/// returns the largest `κ` together with the tightest `B0`, `B1`.
pub fn validate_s2(prc: &PrcSpec, tau: f64) -> Result<S2Params, PrcError> {
    validate_s2_with(prc, tau, DEFAULT_VALIDATION_SAMPLES)
}

/// As [`validate_s2`], with the sampling density used for curves without
/// an exact piecewise-linear form.
pub fn validate_s2_with(prc: &PrcSpec, tau: f64, samples: usize) -> Result<S2Params, PrcError> {
    if !(tau > 0.0 && tau < 0.5) {
        return Err(PrcError::InvalidParameter(format!("tau={tau} not in (0, 0.5)")));
    }
    prc.validate()?;
    let curve = prc.to_piecewise().unwrap_or_else(|| prc.sampled(samples));
    validate_piecewise(&curve, tau)
}

fn validate_piecewise(curve: &PiecewiseLinear, tau: f64) -> Result<S2Params, PrcError> {
    let segs: Vec<Segment> = curve.segments().collect();

    // (a) reset zone: maximal initial run of pieces on which f = −φ
    if (curve.eval(0.0)).abs() > PHASE_TOL {
        return Err(PrcError::NotS2 {
            clause: S2Clause::ResetZone,
            phase: 0.0,
        });
    }
    let mut reset_end = 0.0;
    let mut first_after_reset = 0;
    for (i, s) in segs.iter().enumerate() {
        if (s.y0 + s.x0).abs() <= PHASE_TOL && (s.y1 + s.x1).abs() <= PHASE_TOL {
            reset_end = s.x1;
            first_after_reset = i + 1;
        } else {
            break;
        }
    }
    if reset_end <= tau + PHASE_TOL {
        return Err(PrcError::NotS2 {
            clause: S2Clause::ResetZone,
            phase: reset_end,
        });
    }
    let kappa = reset_end - tau;
    let threshold = -(tau + kappa);

    // (b) inhibitory band [τ+κ, B0] with f ≤ −τ−κ
    let mut b0 = reset_end;
    for s in &segs[first_after_reset..] {
        if s.y0 > threshold + PHASE_TOL {
            break;
        }
        if s.y1 <= threshold + PHASE_TOL {
            b0 = s.x1;
        } else {
            b0 = s.x0 + (threshold - s.y0) / (s.y1 - s.y0) * (s.x1 - s.x0);
            break;
        }
    }
    if b0 < reset_end {
        return Err(PrcError::NotS2 {
            clause: S2Clause::Inhibition,
            phase: reset_end,
        });
    }

    // (c) excitation on (B1, 1), scanned from the right
    let last = segs.last().expect("curve has at least one piece");
    if last.y1 < -PHASE_TOL {
        return Err(PrcError::NotS2 {
            clause: S2Clause::Excitation,
            phase: 1.0,
        });
    }
    // B1 opens the trailing strictly positive run; zero plateaus in front
    // of it belong to the unrestricted gap. A curve whose tail is
    // identically zero (strong resetting) takes the whole non-negative tail.
    let mut b1 = 1.0;
    let mut seen_positive = false;
    let mut seen_zero = false;
    for s in segs.iter().rev() {
        if s.y1 < -PHASE_TOL {
            b1 = s.x1;
            break;
        }
        if s.y0 >= -PHASE_TOL {
            if s.y0.max(s.y1) > PHASE_TOL {
                if seen_zero && !seen_positive {
                    b1 = s.x0;
                    continue;
                }
                seen_positive = true;
            } else if seen_positive {
                break;
            } else {
                seen_zero = true;
            }
            b1 = s.x0;
        } else {
            b1 = s.x0 + (-s.y0) / (s.y1 - s.y0) * (s.x1 - s.x0);
            break;
        }
    }
    let b1 = b1.max(b0);
    if b1 >= 1.0 {
        return Err(PrcError::NotS2 {
            clause: S2Clause::Excitation,
            phase: b1,
        });
    }
    Ok(S2Params {
        kappa,
        b0,
        b1,
        tau_ref: tau,
    })
}

/// Radius of the proven basin around synchrony, `min(B0 − τ, 1 − B1 + τ)`.
pub fn basin_bound(b0: f64, b1: f64, tau: f64) -> Result<f64, PrcError> {
    if !(tau < b0 && b0 <= b1 && b1 < 1.0) {
        return Err(PrcError::InvalidParameter(format!(
            "basin bound needs tau < B0 <= B1 < 1 (tau={tau}, B0={b0}, B1={b1})"
        )));
    }
    Ok((b0 - tau).min(1.0 - b1 + tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    /// Bisection inverse of `V`, independent of the closed form.
    fn v_inverse_numeric(b: f64, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ms_v(b, mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn strong_reset_and_fire_values() {
        let sr = PrcSpec::StrongReset { b0: 0.5 };
        assert!(close(sr.eval(0.3), -0.3));
        assert_eq!(sr.eval(0.7), 0.0);
        let sf = PrcSpec::StrongFire { b0: 0.5 };
        assert!(close(sf.eval(0.8), 0.2));
        assert!(close(sf.eval(0.5), -0.5));
    }

    #[test]
    fn mirollo_strogatz_matches_numeric_inversion() {
        let ms = PrcSpec::MirolloStrogatz { b: 3.0, eps: 0.05 };
        let numeric = v_inverse_numeric(3.0, 0.05 + ms_v(3.0, 0.5)) - 0.5;
        assert!((ms.eval(0.5) - numeric).abs() < 1e-12);
        // frozen from an independent bisection run
        assert!((ms.eval(0.5) - 0.089_396_539_228_025_04).abs() < 1e-12);
        assert!(ms.eval(0.0) > 0.0);
    }

    #[test]
    fn apply_examples() {
        let sf = PrcSpec::StrongFire { b0: 0.5 };
        assert_eq!(
            sf.apply(Phase::new(0.8).unwrap()),
            Response {
                phase: Phase::ZERO,
                fired: true
            }
        );
        let sr = PrcSpec::StrongReset { b0: 0.5 };
        assert_eq!(
            sr.apply(Phase::new(0.3).unwrap()),
            Response {
                phase: Phase::ZERO,
                fired: false
            }
        );
        let pl = PrcSpec::PiecewiseLinear(PiecewiseLinear::new(vec![(0.0, 0.0), (0.8, 0.0), (1.0, 0.1)]).unwrap());
        assert!(close(pl.eval(0.9), 0.05));
        let r = pl.apply(Phase::new(0.9).unwrap());
        assert!(!r.fired);
        assert!(close(r.phase.value(), 0.95));
    }

    #[test]
    fn piecewise_jump_takes_left_value() {
        let c = PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, -0.5), (0.5, 0.0), (1.0, 0.0)]).unwrap();
        assert!(close(c.eval(0.5), -0.5));
        assert_eq!(c.eval(0.5 + 1e-9), 0.0);
    }

    #[test]
    fn piecewise_rejects_bad_vertices() {
        assert!(PiecewiseLinear::new(vec![(0.1, 0.0), (1.0, 0.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (0.9, 0.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (0.6, 0.0), (0.5, 0.0), (1.0, 0.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.5, 2.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn validate_s2_on_reference_curve() {
        let p = validate_s2(&s2_default(), 0.1).unwrap();
        assert!(close(p.kappa, 0.2));
        assert!(close(p.b0, 0.5));
        assert!(close(p.b1, 0.7));
        assert!(close(p.basin(), 0.4));
        // declared parameters of the preset agree with the derived ones at τ = 0.1
        if let PrcSpec::StrongTypeII { kappa, b0, b1, .. } = s2_default() {
            assert!(close(kappa, p.kappa) && close(b0, p.b0) && close(b1, p.b1));
        }
    }

    #[test]
    fn strong_reset_passes_the_s2_clauses() {
        // reset zone covers [0, B0], so κ = B0 − τ and the band is empty
        let p = validate_s2(&PrcSpec::StrongReset { b0: 0.5 }, 0.1).unwrap();
        assert!(close(p.kappa, 0.4));
        assert!(close(p.b0, 0.5));
        assert!(close(p.b1, 0.5));
    }

    #[test]
    fn zero_curve_is_not_s2() {
        let zero = PrcSpec::PiecewiseLinear(PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 0.0)]).unwrap());
        match validate_s2(&zero, 0.1) {
            Err(PrcError::NotS2 { clause, .. }) => assert_eq!(clause, S2Clause::ResetZone),
            other => panic!("expected NotS2, got {other:?}"),
        }
    }

    #[test]
    fn reset_zone_shorter_than_delay_is_rejected() {
        let lr = limited_reset(0.5, 0.1).unwrap();
        assert!(validate_s2(&lr, 0.05).is_ok());
        match validate_s2(&lr, 0.1) {
            Err(PrcError::NotS2 { clause, phase }) => {
                assert_eq!(clause, S2Clause::ResetZone);
                assert!(close(phase, 0.1));
            }
            other => panic!("expected NotS2, got {other:?}"),
        }
    }

    #[test]
    fn negative_tail_fails_excitation_clause() {
        let c = PrcSpec::PiecewiseLinear(
            PiecewiseLinear::new(vec![(0.0, 0.0), (0.4, -0.4), (0.4, 0.0), (0.9, 0.0), (1.0, -0.05)]).unwrap(),
        );
        match validate_s2(&c, 0.1) {
            Err(PrcError::NotS2 { clause, .. }) => assert_eq!(clause, S2Clause::Excitation),
            other => panic!("expected NotS2, got {other:?}"),
        }
    }

    #[test]
    fn sampled_validation_of_weighted_curve() {
        let w = PrcSpec::Weighted {
            inner: Box::new(PrcSpec::StrongReset { b0: 0.5 }),
            w: 0.3,
        };
        let p = validate_s2(&w, 0.1).unwrap();
        assert!((p.kappa - 0.2).abs() < 1e-6);
        assert!((p.b0 - 0.5).abs() < 1e-6);
        let ms = PrcSpec::MirolloStrogatz { b: 3.0, eps: 0.05 };
        assert!(matches!(
            validate_s2(&ms, 0.1),
            Err(PrcError::NotS2 {
                clause: S2Clause::ResetZone,
                ..
            })
        ));
    }

    #[test]
    fn sleep_curve_parameters() {
        let c = sleep_curve(0.4, 0.8).unwrap();
        let p = validate_s2(&c, 0.1).unwrap();
        assert!(close(p.b0, 0.4));
        assert!(close(p.b1, 0.8));
        assert!(c.apply(Phase::new(0.9).unwrap()).fired);
        assert_eq!(c.eval(0.6), 0.0);
        let equal = sleep_curve(0.6, 0.6).unwrap();
        assert!(equal.apply(Phase::new(0.61).unwrap()).fired);
    }

    #[test]
    fn basin_bound_examples() {
        assert!(close(basin_bound(0.6, 0.6, 0.1).unwrap(), 0.5));
        assert!(close(basin_bound(0.6, 0.8, 0.1).unwrap(), 0.3));
        assert!(basin_bound(0.1, 0.5, 0.1).is_err());
        assert!(basin_bound(0.6, 0.5, 0.1).is_err());
    }

    #[test]
    fn presets_resolve() {
        for name in PRESET_NAMES {
            assert!(preset(name).is_ok(), "{name}");
        }
        let err = preset("chaos08").unwrap_err();
        assert!(err.to_string().contains("limited-reset"));
    }

    #[test]
    fn weighted_validation() {
        let inner = Box::new(PrcSpec::StrongReset { b0: 0.5 });
        assert!(PrcSpec::Weighted {
            inner: inner.clone(),
            w: 0.6
        }
        .validate()
        .is_err());
        assert!(PrcSpec::Weighted { inner, w: 0.2 }.validate().is_ok());
    }

    fn any_prc() -> impl Strategy<Value = PrcSpec> {
        prop_oneof![
            (0.05f64..0.95).prop_map(|b0| PrcSpec::StrongReset { b0 }),
            (0.05f64..0.95).prop_map(|b0| PrcSpec::StrongFire { b0 }),
            (0.5f64..6.0, 0.01f64..0.5).prop_map(|(b, eps)| PrcSpec::MirolloStrogatz { b, eps }),
            Just(s2_default()),
            (0.2f64..0.9, 0.01f64..0.19).prop_map(|(b0, cap)| limited_reset(b0, cap).unwrap()),
            (0.2f64..0.9, 0.01f64..0.2).prop_map(|(b0, w)| PrcSpec::Weighted {
                inner: Box::new(PrcSpec::StrongReset { b0 }),
                w,
            }),
        ]
    }

    proptest! {
        #[test]
        fn apply_stays_in_unit_interval(prc in any_prc(), phi in 0.0f64..1.0) {
            let r = prc.apply(Phase::new(phi).unwrap());
            prop_assert!(r.phase.value() >= 0.0 && r.phase.value() < 1.0);
            if r.fired {
                prop_assert_eq!(r.phase.value(), 0.0);
            }
        }

        #[test]
        fn sr_and_sf_reset_below_b0(b0 in 0.05f64..0.95, u in 0.0f64..1.0) {
            let phi = u * b0;
            for prc in [PrcSpec::StrongReset { b0 }, PrcSpec::StrongFire { b0 }] {
                let r = prc.apply(Phase::new(phi).unwrap());
                prop_assert_eq!(r.phase.value(), 0.0);
                prop_assert!(!r.fired);
            }
            let above = b0 + (1.0 - b0) * 0.5;
            let sf = PrcSpec::StrongFire { b0 };
            prop_assert!(sf.apply(Phase::new(above).unwrap()).fired);
        }

        #[test]
        fn weighted_resets_exactly_below_weight(b0 in 0.2f64..0.9, wf in 0.01f64..1.0, u in 0.0f64..1.0) {
            let w = wf * b0;
            let prc = PrcSpec::Weighted { inner: Box::new(PrcSpec::StrongReset { b0 }), w };
            let phi = u * w;
            prop_assert_eq!(prc.eval(phi), -phi);
        }

        #[test]
        fn validated_s2_respects_clauses(tau in 0.02f64..0.28, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let prc = s2_default();
            let p = validate_s2(&prc, tau).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..1000 {
                let phi = rng.gen_range(tau + p.kappa..=p.b0);
                prop_assert!(prc.eval(phi) <= -tau - p.kappa + PHASE_TOL);
                let phi = rng.gen_range(p.b1..1.0);
                if phi > p.b1 {
                    prop_assert!(prc.eval(phi) >= -PHASE_TOL);
                }
            }
            prop_assert!((basin_bound(p.b0, p.b1, tau).unwrap() - p.basin()).abs() < 1e-15);
        }
    }
}
