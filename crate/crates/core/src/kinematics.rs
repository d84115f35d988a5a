//! The p-limaçon and the analytic choreography on it.
//!
//! Body `k` runs the curve `q(t) = a(cos t, sin t) + b(cos pt, sin pt)` with
//! phase lag `2πk/N`. Positions, velocities and accelerations are exact
//! closed forms; the curve parameter is physical time.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::coefficients::{check_body_count, CouplingVector};
use crate::dynamics::pairwise_accel;
use crate::error::{ChoreoError, Result};
use crate::vec2::Vec2;

/// Arguments larger than this are reduced mod 2π before trig evaluation.
const REDUCE_ABOVE: f64 = 1e6;

/// Uniform points on `[0, 2π)` used to certify a solution.
pub const DEFAULT_CERT_GRID: usize = 64;

fn reduce(x: f64) -> f64 {
    if x.abs() > REDUCE_ABOVE {
        x.rem_euclid(TAU)
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub a: f64,
    pub b: f64,
    pub p: i64,
}

impl CurveParams {
    pub fn new(a: f64, b: f64, p: i64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a * b == 0.0 {
            return Err(ChoreoError::DegenerateCurve { a, b });
        }
        if p.unsigned_abs() < 2 {
            return Err(ChoreoError::ExcludedExponent(p));
        }
        Ok(Self { a, b, p })
    }

    fn pf(&self) -> f64 {
        self.p as f64
    }
}

/// A curve plus a body count: one full problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoreoConfig {
    pub curve: CurveParams,
    pub n_bodies: usize,
}

impl ChoreoConfig {
    /// Admissibility is not checked here; solvers check it on entry.
    pub fn new(curve: CurveParams, n_bodies: usize) -> Result<Self> {
        check_body_count(n_bodies)?;
        Ok(Self { curve, n_bodies })
    }

    /// Phase of body `k` at time `t`. Body 0 at `t + 2πk/N` takes the same
    /// arithmetic path as body `k` at `t`.
    pub fn phase(&self, k: usize, t: f64) -> f64 {
        t + (TAU * k as f64) / self.n_bodies as f64
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.n_bodies {
            return Err(ChoreoError::IndexOutOfRange {
                index: k as i64,
                lo: 0,
                hi: self.n_bodies as i64 - 1,
            });
        }
        Ok(())
    }
}

/// Positions and velocities of all bodies at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub t: f64,
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
}

impl SystemState {
    pub fn new(t: f64, positions: Vec<Vec2>, velocities: Vec<Vec2>) -> Result<Self> {
        if positions.len() != velocities.len() {
            return Err(ChoreoError::DimensionMismatch {
                expected: positions.len(),
                found: velocities.len(),
            });
        }
        Ok(Self {
            t,
            positions,
            velocities,
        })
    }

    pub fn n_bodies(&self) -> usize {
        self.positions.len()
    }

    /// Largest position or velocity difference to `other`.
    pub fn max_deviation(&self, other: &SystemState) -> f64 {
        let pos = self.max_position_deviation(other);
        let vel = self
            .velocities
            .iter()
            .zip(&other.velocities)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max);
        pos.max(vel)
    }

    pub fn max_position_deviation(&self, other: &SystemState) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }
}

/// Ordered states with strictly increasing time. `config` is set for
/// analytic samples and left empty for integrated ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: Option<ChoreoConfig>,
    pub samples: Vec<SystemState>,
}

/// `(a cos t + b cos pt, a sin t + b sin pt)`.
pub fn curve_point(curve: &CurveParams, t: f64) -> Vec2 {
    let (s1, c1) = reduce(t).sin_cos();
    let (sp, cp) = reduce(curve.pf() * t).sin_cos();
    Vec2::new(curve.a * c1 + curve.b * cp, curve.a * s1 + curve.b * sp)
}

fn curve_velocity(curve: &CurveParams, t: f64) -> Vec2 {
    let (s1, c1) = reduce(t).sin_cos();
    let (sp, cp) = reduce(curve.pf() * t).sin_cos();
    let pb = curve.pf() * curve.b;
    Vec2::new(-curve.a * s1 - pb * sp, curve.a * c1 + pb * cp)
}

fn curve_accel(curve: &CurveParams, t: f64) -> Vec2 {
    let (s1, c1) = reduce(t).sin_cos();
    let (sp, cp) = reduce(curve.pf() * t).sin_cos();
    let p2b = curve.pf() * curve.pf() * curve.b;
    Vec2::new(-curve.a * c1 - p2b * cp, -curve.a * s1 - p2b * sp)
}

/// Position and velocity of body `k` at time `t`.
pub fn body_state(config: &ChoreoConfig, k: usize, t: f64) -> Result<(Vec2, Vec2)> {
    config.check_index(k)?;
    let phase = config.phase(k, t);
    Ok((
        curve_point(&config.curve, phase),
        curve_velocity(&config.curve, phase),
    ))
}

/// Exact acceleration of body `k` along the prescribed motion.
pub fn analytic_accel(config: &ChoreoConfig, k: usize, t: f64) -> Result<Vec2> {
    config.check_index(k)?;
    Ok(curve_accel(&config.curve, config.phase(k, t)))
}

/// Analytic state of all bodies at time `t`.
pub fn state_at(config: &ChoreoConfig, t: f64) -> SystemState {
    let (positions, velocities) = (0..config.n_bodies)
        .map(|k| {
            let phase = config.phase(k, t);
            (
                curve_point(&config.curve, phase),
                curve_velocity(&config.curve, phase),
            )
        })
        .unzip();
    SystemState {
        t,
        positions,
        velocities,
    }
}

pub fn initial_state(config: &ChoreoConfig) -> SystemState {
    state_at(config, 0.0)
}

/// `count` uniform points on `[0, 2π)`.
pub fn period_grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| TAU * i as f64 / count as f64).collect()
}

/// Largest mismatch between the prescribed acceleration and the harmonic
/// force law, over all bodies and grid times.
pub fn eom_residual(
    config: &ChoreoConfig,
    couplings: &CouplingVector,
    t_grid: &[f64],
) -> Result<f64> {
    if couplings.n_bodies != config.n_bodies {
        return Err(ChoreoError::DimensionMismatch {
            expected: config.n_bodies,
            found: couplings.n_bodies,
        });
    }
    let mut worst = 0.0f64;
    for &t in t_grid {
        let state = state_at(config, t);
        let force = pairwise_accel(&state.positions, couplings);
        for (k, f) in force.iter().enumerate() {
            let want = curve_accel(&config.curve, config.phase(k, t));
            worst = worst.max((want - *f).norm());
        }
    }
    Ok(worst)
}

/// Whether the right end of a sampling range is included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endpoint {
    #[default]
    Closed,
    Open,
}

/// Uniform analytic samples on `[t0, t1]`.
pub fn sample_trajectory(
    config: &ChoreoConfig,
    t0: f64,
    t1: f64,
    count: usize,
) -> Result<Trajectory> {
    sample_trajectory_with(config, t0, t1, count, Endpoint::Closed)
}

pub fn sample_trajectory_with(
    config: &ChoreoConfig,
    t0: f64,
    t1: f64,
    count: usize,
    endpoint: Endpoint,
) -> Result<Trajectory> {
    if !t0.is_finite() || !t1.is_finite() || t1 <= t0 || count < 2 {
        return Err(ChoreoError::BadRange { t0, t1, count });
    }
    let intervals = match endpoint {
        Endpoint::Closed => count - 1,
        Endpoint::Open => count,
    };
    let span = t1 - t0;
    let samples = (0..count)
        .map(|i| {
            let t = if endpoint == Endpoint::Closed && i == count - 1 {
                t1
            } else {
                t0 + span * (i as f64 / intervals as f64)
            };
            state_at(config, t)
        })
        .collect();
    Ok(Trajectory {
        config: Some(*config),
        samples,
    })
}
