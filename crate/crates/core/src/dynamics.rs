//! Two independent engines for the harmonic N-body equations of motion.
//!
//! [`rk4_integrate`] steps the pairwise force law directly. [`spectral_propagate`]
//! diagonalizes the circulant interaction over the body index and evolves
//! each discrete Fourier mode in closed form. The force law is linear, so the
//! second engine is exact up to roundoff.

use serde::{Deserialize, Serialize};

use crate::coefficients::{cos_turns, sin_turns, CouplingVector};
use crate::error::{ChoreoError, Result};
use crate::kinematics::{SystemState, Trajectory};
use crate::vec2::Vec2;

/// Couplings together with the eigenvalues of the circulant stiffness
/// operator, one per discrete Fourier mode `m = 0 … N-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub n_bodies: usize,
    pub couplings: CouplingVector,
    pub mode_stiffness: Vec<f64>,
}

/// `λ_m = Σ_ℓ w_ℓ κ_ℓ 2(1 - cos(2πℓm/N))`, with `w = 1/2` on the antipodal
/// bond of even N and `w = 1` otherwise.
pub fn build_interaction(n_bodies: usize, couplings: &CouplingVector) -> Result<InteractionSpec> {
    if couplings.n_bodies != n_bodies {
        return Err(ChoreoError::DimensionMismatch {
            expected: n_bodies,
            found: couplings.n_bodies,
        });
    }
    let half = n_bodies / 2;
    let mode_stiffness = (0..n_bodies)
        .map(|m| {
            (1..=half)
                .map(|ell| {
                    let weight = if n_bodies.is_multiple_of(2) && ell == half {
                        1.0
                    } else {
                        2.0
                    };
                    couplings.kappa(ell) * weight * (1.0 - cos_turns((ell * m) as i64, n_bodies))
                })
                .sum()
        })
        .collect();
    Ok(InteractionSpec {
        n_bodies,
        couplings: couplings.clone(),
        mode_stiffness,
    })
}

/// `Σ_{l≠j} κ_{jl}(q_l - q_j)` for every body, one pair at a time.
pub fn pairwise_accel(positions: &[Vec2], couplings: &CouplingVector) -> Vec<Vec2> {
    let n = positions.len();
    let mut acc = vec![Vec2::ZERO; n];
    for j in 0..n {
        for l in (j + 1)..n {
            let f = couplings.between(j, l) * (positions[l] - positions[j]);
            acc[j] += f;
            acc[l] -= f;
        }
    }
    acc
}

fn check_state(state: &SystemState, spec: &InteractionSpec) -> Result<()> {
    if state.n_bodies() != spec.n_bodies || state.velocities.len() != spec.n_bodies {
        return Err(ChoreoError::DimensionMismatch {
            expected: spec.n_bodies,
            found: state.n_bodies(),
        });
    }
    Ok(())
}

/// Accelerations of all bodies from the pairwise force law.
pub fn accel(state: &SystemState, spec: &InteractionSpec) -> Result<Vec<Vec2>> {
    check_state(state, spec)?;
    Ok(pairwise_accel(&state.positions, &spec.couplings))
}

fn axpy(base: &[Vec2], dir: &[Vec2], h: f64) -> Vec<Vec2> {
    base.iter().zip(dir).map(|(b, d)| *b + *d * h).collect()
}

/// Classical fixed-step Runge–Kutta. Returns `steps + 1` samples starting
/// at `initial`.
pub fn rk4_integrate(
    initial: &SystemState,
    spec: &InteractionSpec,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(ChoreoError::BadStep(dt));
    }
    check_state(initial, spec)?;
    let force = |q: &[Vec2]| pairwise_accel(q, &spec.couplings);

    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(initial.clone());
    let mut q = initial.positions.clone();
    let mut v = initial.velocities.clone();
    let half = 0.5 * dt;
    for step in 1..=steps {
        let k1q = v.clone();
        let k1v = force(&q);
        let k2q = axpy(&v, &k1v, half);
        let k2v = force(&axpy(&q, &k1q, half));
        let k3q = axpy(&v, &k2v, half);
        let k3v = force(&axpy(&q, &k2q, half));
        let k4q = axpy(&v, &k3v, dt);
        let k4v = force(&axpy(&q, &k3q, dt));
        let sixth = dt / 6.0;
        for i in 0..q.len() {
            q[i] += (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]) * sixth;
            v[i] += (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]) * sixth;
        }
        samples.push(SystemState {
            t: initial.t + step as f64 * dt,
            positions: q.clone(),
            velocities: v.clone(),
        });
    }
    Ok(Trajectory {
        config: None,
        samples,
    })
}

/// One real Fourier profile over the body index.
struct Mode {
    index: usize,
    profile: Vec<f64>,
    norm_sq: f64,
}

fn real_modes(n_bodies: usize) -> Vec<Mode> {
    let mut modes = Vec::with_capacity(n_bodies);
    let nf = n_bodies as f64;
    for m in 0..=n_bodies / 2 {
        let cos_profile = (0..n_bodies)
            .map(|j| cos_turns((m * j) as i64, n_bodies))
            .collect();
        let self_conjugate = m == 0 || 2 * m == n_bodies;
        modes.push(Mode {
            index: m,
            profile: cos_profile,
            norm_sq: if self_conjugate { nf } else { nf / 2.0 },
        });
        if !self_conjugate {
            let sin_profile = (0..n_bodies)
                .map(|j| sin_turns((m * j) as i64, n_bodies))
                .collect();
            modes.push(Mode {
                index: m,
                profile: sin_profile,
                norm_sq: nf / 2.0,
            });
        }
    }
    modes
}

/// Exact flow of `ẍ = -λ x` over time `t`.
fn evolve_mode(x0: f64, v0: f64, stiffness: f64, t: f64) -> (f64, f64) {
    if stiffness > 0.0 {
        let w = stiffness.sqrt();
        let (s, c) = (w * t).sin_cos();
        (x0 * c + v0 * s / w, -x0 * w * s + v0 * c)
    } else if stiffness < 0.0 {
        let w = (-stiffness).sqrt();
        let (s, c) = ((w * t).sinh(), (w * t).cosh());
        (x0 * c + v0 * s / w, x0 * w * s + v0 * c)
    } else {
        (x0 + t * v0, v0)
    }
}

/// Propagate `initial` forward by `t` in the circulant eigenbasis.
pub fn spectral_propagate(
    initial: &SystemState,
    spec: &InteractionSpec,
    t: f64,
) -> Result<SystemState> {
    check_state(initial, spec)?;
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let n = spec.n_bodies;
    let mut positions = vec![Vec2::ZERO; n];
    let mut velocities = vec![Vec2::ZERO; n];
    for mode in real_modes(n) {
        let project = |xs: &[Vec2]| {
            let s: Vec2 = xs.iter().zip(&mode.profile).map(|(x, w)| *x * *w).sum();
            s * (1.0 / mode.norm_sq)
        };
        let q0 = project(&initial.positions);
        let v0 = project(&initial.velocities);
        let lambda = spec.mode_stiffness[mode.index];
        let (qx, vx) = evolve_mode(q0.x, v0.x, lambda, t);
        let (qy, vy) = evolve_mode(q0.y, v0.y, lambda, t);
        for (j, w) in mode.profile.iter().enumerate() {
            positions[j] += Vec2::new(qx, qy) * *w;
            velocities[j] += Vec2::new(vx, vy) * *w;
        }
    }
    Ok(SystemState {
        t: initial.t + t,
        positions,
        velocities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::solve_couplings;
    use crate::kinematics::{analytic_accel, state_at, ChoreoConfig, CurveParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    fn config(a: f64, b: f64, p: i64, n: usize) -> ChoreoConfig {
        ChoreoConfig::new(CurveParams::new(a, b, p).unwrap(), n).unwrap()
    }

    #[test]
    fn stiffness_examples() {
        let k = CouplingVector::new(4, vec![1.0, -0.5]).unwrap();
        let spec = build_interaction(4, &k).unwrap();
        for (got, want) in spec.mode_stiffness.iter().zip([0.0, 1.0, 4.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }

        let k = CouplingVector::new(6, vec![1.5, -1.0 / 6.0, 0.0]).unwrap();
        let spec = build_interaction(6, &k).unwrap();
        assert_abs_diff_eq!(spec.mode_stiffness[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.mode_stiffness[2], 4.0, epsilon = 1e-14);

        let spec = build_interaction(4, &CouplingVector::zeros(4)).unwrap();
        assert!(spec.mode_stiffness.iter().all(|&x| x == 0.0));
        assert!(build_interaction(5, &CouplingVector::zeros(4)).is_err());
    }

    #[test]
    fn stiffness_symmetry() {
        let k = CouplingVector::new(9, vec![0.3, -1.1, 2.0, 0.7]).unwrap();
        let spec = build_interaction(9, &k).unwrap();
        assert_eq!(spec.mode_stiffness[0], 0.0);
        for m in 1..9 {
            assert_eq!(spec.mode_stiffness[m], spec.mode_stiffness[9 - m]);
        }
    }

    #[test]
    fn pairwise_force() {
        let k = CouplingVector::new(5, vec![1.3, -0.4]).unwrap();
        let spec = build_interaction(5, &k).unwrap();
        let same =
            SystemState::new(0.0, vec![Vec2::new(0.3, -2.0); 5], vec![Vec2::ZERO; 5]).unwrap();
        assert!(accel(&same, &spec).unwrap().iter().all(|a| a.norm() == 0.0));

        let cfg = config(1.2, 1.0, 2, 4);
        let k = solve_couplings(4, 2, &[]).unwrap();
        let spec = build_interaction(4, &k).unwrap();
        let s = state_at(&cfg, 0.0);
        for (j, f) in accel(&s, &spec).unwrap().iter().enumerate() {
            let want = analytic_accel(&cfg, j, 0.0).unwrap();
            assert!((want - *f).norm() < 1e-12);
        }

        let other = SystemState::new(0.0, vec![Vec2::ZERO; 3], vec![Vec2::ZERO; 3]).unwrap();
        assert!(accel(&other, &spec).is_err());
    }

    #[test]
    fn rk4_matches_analytic_for_n4() {
        let cfg = config(1.2, 1.0, 2, 4);
        let k = solve_couplings(4, 2, &[]).unwrap();
        let spec = build_interaction(4, &k).unwrap();
        let tr = rk4_integrate(&state_at(&cfg, 0.0), &spec, TAU / 4096.0, 4096).unwrap();
        assert_eq!(tr.samples.len(), 4097);
        let last = tr.samples.last().unwrap();
        assert!(last.max_position_deviation(&state_at(&cfg, TAU)) <= 1e-8);
    }

    #[test]
    fn rk4_rejects_bad_step() {
        let k = CouplingVector::zeros(4);
        let spec = build_interaction(4, &k).unwrap();
        let s = SystemState::new(0.0, vec![Vec2::ZERO; 4], vec![Vec2::ZERO; 4]).unwrap();
        assert_eq!(
            rk4_integrate(&s, &spec, 0.0, 10),
            Err(ChoreoError::BadStep(0.0))
        );
        assert!(rk4_integrate(&s, &spec, -1.0, 10).is_err());
        assert!(rk4_integrate(&s, &spec, f64::NAN, 10).is_err());
    }

    #[test]
    fn free_particles_move_uniformly() {
        let spec = build_interaction(4, &CouplingVector::zeros(4)).unwrap();
        let q: Vec<Vec2> = (0..4)
            .map(|i| Vec2::new(i as f64, 1.0 - i as f64))
            .collect();
        let v: Vec<Vec2> = (0..4).map(|i| Vec2::new(0.5, -0.25 * i as f64)).collect();
        let s = SystemState::new(0.0, q.clone(), v.clone()).unwrap();
        let tr = rk4_integrate(&s, &spec, 0.125, 16).unwrap();
        let last = tr.samples.last().unwrap();
        for j in 0..4 {
            assert!((last.positions[j] - (q[j] + v[j] * 2.0)).norm() < 1e-14);
        }
        let sp = spectral_propagate(&s, &spec, 2.0).unwrap();
        for j in 0..4 {
            assert!((sp.positions[j] - (q[j] + v[j] * 2.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn spectral_matches_analytic() {
        let cfg = config(1.2, 1.0, 2, 4);
        let k = solve_couplings(4, 2, &[]).unwrap();
        let spec = build_interaction(4, &k).unwrap();
        let s0 = state_at(&cfg, 0.0);
        for t in [0.3, 1.7, 5.9] {
            let s = spectral_propagate(&s0, &spec, t).unwrap();
            assert!(s.max_deviation(&state_at(&cfg, t)) <= 1e-10);
        }
        assert_eq!(spectral_propagate(&s0, &spec, 0.0).unwrap(), s0);
    }

    #[test]
    fn spectral_handles_unstable_modes() {
        // κ₁ < 0 only: every nonzero mode is hyperbolic.
        let k = CouplingVector::new(5, vec![-0.3, 0.0]).unwrap();
        let spec = build_interaction(5, &k).unwrap();
        assert!(spec.mode_stiffness[1..].iter().all(|&x| x < 0.0));
        let q: Vec<Vec2> = (0..5)
            .map(|i| Vec2::new((i * i) as f64 * 0.1, -(i as f64)))
            .collect();
        let v: Vec<Vec2> = (0..5).map(|i| Vec2::new(0.2, 0.05 * i as f64)).collect();
        let s0 = SystemState::new(0.0, q, v).unwrap();
        let exact = spectral_propagate(&s0, &spec, 1.5).unwrap();
        let rk = rk4_integrate(&s0, &spec, 1.5 / 3000.0, 3000).unwrap();
        assert!(rk.samples.last().unwrap().max_deviation(&exact) < 1e-9);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let cfg = config(1.2, 0.7, 3, 7);
        let k = solve_couplings(7, 3, &[0.0]).unwrap();
        let spec = build_interaction(7, &k).unwrap();
        let s0 = state_at(&cfg, 0.0);
        let target = state_at(&cfg, TAU);
        let err = |steps: usize| {
            let tr = rk4_integrate(&s0, &spec, TAU / steps as f64, steps).unwrap();
            tr.samples.last().unwrap().max_position_deviation(&target)
        };
        let ratio = err(256) / err(512);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }
}
