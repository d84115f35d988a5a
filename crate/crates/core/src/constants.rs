//! Conserved quantities: measured from states, predicted in closed form,
//! and monitored for drift along trajectories.

use serde::{Deserialize, Serialize};

use crate::admissibility::is_admissible;
use crate::coefficients::{cos_turns, CouplingVector};
use crate::error::{ChoreoError, Result};
use crate::kinematics::{state_at, ChoreoConfig, SystemState, Trajectory};
use crate::vec2::Vec2;

/// Largest deviation from the first sample, per quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub first_moment: f64,
    pub angular_momentum: f64,
    pub moment_of_inertia: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub energy: f64,
}

/// `g = Σ q`, `c = Σ q × q̇`, `I = Σ |q|²`, `K = ½ Σ |q̇|²` and
/// `V = ½ Σ_{j<l} κ_{jl} |q_j - q_l|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedReport {
    pub first_moment: Vec2,
    pub angular_momentum: f64,
    pub moment_of_inertia: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub drift: Option<Drift>,
}

impl ConservedReport {
    pub fn energy(&self) -> f64 {
        self.kinetic + self.potential
    }

    /// Each drift divided by the magnitude of its starting value. The first
    /// moment is scaled by `sqrt(I)` since it usually starts at zero.
    pub fn relative_drift(&self) -> Option<Drift> {
        let d = self.drift?;
        let rel = |x: f64, scale: f64| if scale > 0.0 { x / scale } else { x };
        Some(Drift {
            first_moment: rel(d.first_moment, self.moment_of_inertia.abs().sqrt()),
            angular_momentum: rel(d.angular_momentum, self.angular_momentum.abs()),
            moment_of_inertia: rel(d.moment_of_inertia, self.moment_of_inertia.abs()),
            kinetic: rel(d.kinetic, self.kinetic.abs()),
            potential: rel(d.potential, self.potential.abs()),
            energy: rel(d.energy, self.energy().abs()),
        })
    }
}

fn check_couplings(n: usize, couplings: &CouplingVector) -> Result<()> {
    if couplings.n_bodies != n {
        return Err(ChoreoError::DimensionMismatch {
            expected: n,
            found: couplings.n_bodies,
        });
    }
    Ok(())
}

pub fn potential_energy(positions: &[Vec2], couplings: &CouplingVector) -> f64 {
    let n = positions.len();
    let mut v = 0.0;
    for j in 0..n {
        for l in (j + 1)..n {
            v += couplings.between(j, l) * (positions[j] - positions[l]).norm_sq();
        }
    }
    0.5 * v
}

/// Instantaneous values of the classical constants.
pub fn measure(state: &SystemState, couplings: &CouplingVector) -> Result<ConservedReport> {
    check_couplings(state.n_bodies(), couplings)?;
    let q = &state.positions;
    let v = &state.velocities;
    Ok(ConservedReport {
        first_moment: q.iter().copied().sum(),
        angular_momentum: q.iter().zip(v).map(|(q, v)| q.cross(*v)).sum(),
        moment_of_inertia: q.iter().map(|q| q.norm_sq()).sum(),
        kinetic: 0.5 * v.iter().map(|v| v.norm_sq()).sum::<f64>(),
        potential: potential_energy(q, couplings),
        drift: None,
    })
}

/// `I = (a² + b²)N`, `c = (a² + pb²)N`, `K = V = (a² + p²b²)N/2`, `g = 0`.
pub fn closed_form_constants(config: &ChoreoConfig) -> Result<ConservedReport> {
    let (a, b, p) = (config.curve.a, config.curve.b, config.curve.p);
    let decision = is_admissible(p, config.n_bodies as i64);
    if !decision.admissible {
        return Err(ChoreoError::Inadmissible {
            p,
            n_bodies: config.n_bodies,
            decision,
        });
    }
    let nf = config.n_bodies as f64;
    let pf = p as f64;
    let (a2, b2) = (a * a, b * b);
    let kinetic = 0.5 * (a2 + pf * pf * b2) * nf;
    Ok(ConservedReport {
        first_moment: Vec2::ZERO,
        angular_momentum: (a2 + pf * b2) * nf,
        moment_of_inertia: (a2 + b2) * nf,
        kinetic,
        potential: kinetic,
        drift: Some(Drift::default()),
    })
}

/// `v±_ℓ = Σ_k |q_k ± q_{k+ℓ}|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParts {
    pub ell: usize,
    pub v_minus: f64,
    pub v_plus: f64,
}

fn check_ell(config_n: usize, ell: usize) -> Result<()> {
    if ell == 0 || ell > config_n / 2 {
        return Err(ChoreoError::IndexOutOfRange {
            index: ell as i64,
            lo: 1,
            hi: (config_n / 2) as i64,
        });
    }
    Ok(())
}

/// Closed form `v±_ℓ = 2N(a²(1 ± cos(2πℓ/N)) + b²(1 ± cos(2πpℓ/N)))`.
pub fn potential_parts(config: &ChoreoConfig, ell: usize) -> Result<PotentialParts> {
    let n = config.n_bodies;
    check_ell(n, ell)?;
    let (a2, b2) = (config.curve.a.powi(2), config.curve.b.powi(2));
    let c1 = cos_turns(ell as i64, n);
    let cp = cos_turns(ell as i64 * config.curve.p, n);
    let scale = 2.0 * n as f64;
    Ok(PotentialParts {
        ell,
        v_minus: scale * (a2 * (1.0 - c1) + b2 * (1.0 - cp)),
        v_plus: scale * (a2 * (1.0 + c1) + b2 * (1.0 + cp)),
    })
}

/// The same sums evaluated directly on a state.
pub fn measured_potential_parts(state: &SystemState, ell: usize) -> Result<PotentialParts> {
    let n = state.n_bodies();
    check_ell(n, ell)?;
    let q = &state.positions;
    let (mut v_minus, mut v_plus) = (0.0, 0.0);
    for k in 0..n {
        let other = q[(k + ell) % n];
        v_minus += (q[k] - other).norm_sq();
        v_plus += (q[k] + other).norm_sq();
    }
    Ok(PotentialParts {
        ell,
        v_minus,
        v_plus,
    })
}

/// `V = ½ Σ_ℓ κ_ℓ V_ℓ` with `V_ℓ = v⁻_ℓ`, halved for the antipodal term of
/// even N.
pub fn potential_from_parts(config: &ChoreoConfig, couplings: &CouplingVector) -> Result<f64> {
    let n = config.n_bodies;
    check_couplings(n, couplings)?;
    let mut v = 0.0;
    for ell in 1..=n / 2 {
        let mut part = potential_parts(config, ell)?.v_minus;
        if n.is_multiple_of(2) && ell == n / 2 {
            part *= 0.5;
        }
        v += couplings.kappa(ell) * part;
    }
    Ok(0.5 * v)
}

/// Closed-form values the subgroup sums are expected to take.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSumPrediction {
    /// `|g_m(ℓ)|`: `|b| m` when `ω^{pn} = 1`, else 0.
    pub first_moment_norm: f64,
    /// The rest are only predicted when `ω^{(p-1)n} ≠ 1`.
    pub moment_of_inertia: Option<f64>,
    pub angular_momentum: Option<f64>,
    pub kinetic: Option<f64>,
    pub pair_spread: Option<f64>,
}

/// Sums over the orbit `{ℓ, ℓ+n, …, ℓ+(m-1)n}` of the subgroup Z_m ⊂ Z_N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSumReport {
    pub m: usize,
    pub n: usize,
    pub ell: usize,
    pub t: f64,
    /// `n·p ≡ 0 (mod N)`.
    pub pn_trivial: bool,
    /// `n·(p-1) ≡ 0 (mod N)`.
    pub p_minus_1_n_trivial: bool,
    pub first_moment: Vec2,
    pub moment_of_inertia: f64,
    pub angular_momentum: f64,
    pub kinetic: f64,
    /// `Ĩ_m(ℓ) = Σ_{i<j} |q_{ℓ+in} - q_{ℓ+jn}|²`.
    pub pair_spread: f64,
    pub predicted: PartialSumPrediction,
}

pub fn partial_sums(
    config: &ChoreoConfig,
    m: usize,
    n: usize,
    ell: usize,
    t: f64,
) -> Result<PartialSumReport> {
    let total = config.n_bodies;
    if m < 2 || n < 2 || m.checked_mul(n) != Some(total) {
        return Err(ChoreoError::NotComposite {
            m,
            n,
            n_bodies: total,
        });
    }
    if ell >= n {
        return Err(ChoreoError::IndexOutOfRange {
            index: ell as i64,
            lo: 0,
            hi: n as i64 - 1,
        });
    }
    let state = state_at(config, t);
    Ok(partial_sums_of_state(config, &state, m, n, ell))
}

fn partial_sums_of_state(
    config: &ChoreoConfig,
    state: &SystemState,
    m: usize,
    n: usize,
    ell: usize,
) -> PartialSumReport {
    let total = config.n_bodies as i64;
    let (a, b, p) = (config.curve.a, config.curve.b, config.curve.p);
    let n_i = n as i64;
    let pn_trivial = (n_i * p).rem_euclid(total) == 0;
    let p_minus_1_n_trivial = (n_i * (p - 1)).rem_euclid(total) == 0;

    let members: Vec<usize> = (0..m).map(|k| ell + k * n).collect();
    let q = |i: usize| state.positions[i];
    let v = |i: usize| state.velocities[i];

    let mut pair_spread = 0.0;
    for (i, &ji) in members.iter().enumerate() {
        for &jj in &members[i + 1..] {
            pair_spread += (q(ji) - q(jj)).norm_sq();
        }
    }

    let mf = m as f64;
    let (a2, b2, pf) = (a * a, b * b, p as f64);
    let stable = !p_minus_1_n_trivial;
    let predicted = PartialSumPrediction {
        first_moment_norm: if pn_trivial { b.abs() * mf } else { 0.0 },
        moment_of_inertia: stable.then_some(mf * (a2 + b2)),
        angular_momentum: stable.then_some(mf * (a2 + pf * b2)),
        kinetic: stable.then_some(0.5 * mf * (a2 + pf * pf * b2)),
        pair_spread: stable.then_some({
            if pn_trivial {
                mf * mf * a2
            } else {
                mf * mf * (a2 + b2)
            }
        }),
    };

    PartialSumReport {
        m,
        n,
        ell,
        t: state.t,
        pn_trivial,
        p_minus_1_n_trivial,
        first_moment: members.iter().map(|&i| q(i)).sum(),
        moment_of_inertia: members.iter().map(|&i| q(i).norm_sq()).sum(),
        angular_momentum: members.iter().map(|&i| q(i).cross(v(i))).sum(),
        kinetic: 0.5 * members.iter().map(|&i| v(i).norm_sq()).sum::<f64>(),
        pair_spread,
        predicted,
    }
}

/// Values at the first sample plus the largest deviation from them.
pub fn drift_report(traj: &Trajectory, couplings: &CouplingVector) -> Result<ConservedReport> {
    let first = traj.samples.first().ok_or(ChoreoError::EmptyTrajectory)?;
    let mut report = measure(first, couplings)?;
    let mut drift = Drift::default();
    for s in &traj.samples[1..] {
        let r = measure(s, couplings)?;
        drift.first_moment = drift
            .first_moment
            .max((r.first_moment - report.first_moment).norm());
        drift.angular_momentum = drift
            .angular_momentum
            .max((r.angular_momentum - report.angular_momentum).abs());
        drift.moment_of_inertia = drift
            .moment_of_inertia
            .max((r.moment_of_inertia - report.moment_of_inertia).abs());
        drift.kinetic = drift.kinetic.max((r.kinetic - report.kinetic).abs());
        drift.potential = drift.potential.max((r.potential - report.potential).abs());
        drift.energy = drift.energy.max((r.energy() - report.energy()).abs());
    }
    report.drift = Some(drift);
    Ok(report)
}

/// Centered finite-difference `dI/dt` at the interior samples.
pub fn inertia_rate(traj: &Trajectory) -> Vec<f64> {
    let inertia: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| s.positions.iter().map(|q| q.norm_sq()).sum())
        .collect();
    (1..inertia.len().saturating_sub(1))
        .map(|i| {
            let dt = traj.samples[i + 1].t - traj.samples[i - 1].t;
            (inertia[i + 1] - inertia[i - 1]) / dt
        })
        .collect()
}
