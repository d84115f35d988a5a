//! Force coefficients that turn the limaçon motion into a solution.
//!
//! Balancing the `e^{it}` and `e^{ipt}` components of body 0's equation of
//! motion gives two linear equations in `κ₁ … κ_n` (`n = ⌊N/2⌋`):
//!
//! ```text
//!   A κ = (-1, -p²)ᵀ,   A[0][ℓ] = 2(cos(2πℓ/N) - 1),  A[1][ℓ] = 2(cos(2πℓp/N) - 1)
//! ```
//!
//! with the last column halved for even N (that bond joins antipodal bodies
//! and is counted once). Everything is real; the complex roots of unity only
//! ever appear in conjugate pairs.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::admissibility::{is_admissible, is_admissible_restricted};
use crate::error::{ChoreoError, Result};

/// A 2×2 real matrix, row major.
pub type Matrix2 = [[f64; 2]; 2];

/// Determinants below this are treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// Absolute tolerance for certifying `A κ = rhs`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `cos(2π·num/den)` with the numerator reduced exactly first. Folding onto
/// `[0, den/2]` makes `cos_turns(x, d)` and `cos_turns(-x, d)` bit-identical.
pub(crate) fn cos_turns(num: i64, den: usize) -> f64 {
    let r = num.rem_euclid(den as i64);
    let r = r.min(den as i64 - r);
    (TAU * r as f64 / den as f64).cos()
}

/// `sin(2π·num/den)` with the numerator reduced exactly first.
pub(crate) fn sin_turns(num: i64, den: usize) -> f64 {
    let r = num.rem_euclid(den as i64);
    (TAU * r as f64 / den as f64).sin()
}

pub(crate) fn check_body_count(n_bodies: usize) -> Result<()> {
    if n_bodies < 4 {
        return Err(ChoreoError::TooFewBodies(n_bodies as i64));
    }
    Ok(())
}

pub fn det2(m: &Matrix2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Solve `m x = rhs` with the adjugate formula. `None` when `m` is singular.
pub fn solve2(m: &Matrix2, rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = det2(m);
    if det.abs() < SINGULAR_DET || !det.is_finite() {
        return None;
    }
    Some([
        (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    ])
}

/// The two balance rows as a 2×n matrix. Column ℓ (1-based) multiplies κ_ℓ.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub n_bodies: usize,
    pub p: i64,
    rows: [Vec<f64>; 2],
}

impl CoefficientMatrix {
    /// Number of columns, `⌊N/2⌋`.
    pub fn columns(&self) -> usize {
        self.rows[0].len()
    }

    /// Entry at `row ∈ {0, 1}` and 1-based column `ell`.
    pub fn entry(&self, row: usize, ell: usize) -> f64 {
        self.rows[row][ell - 1]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.rows[row]
    }

    /// `A κ`.
    pub fn apply(&self, kappas: &[f64]) -> Result<[f64; 2]> {
        if kappas.len() != self.columns() {
            return Err(ChoreoError::DimensionMismatch {
                expected: self.columns(),
                found: kappas.len(),
            });
        }
        let dot = |row: &[f64]| row.iter().zip(kappas).map(|(a, k)| a * k).sum::<f64>();
        Ok([dot(&self.rows[0]), dot(&self.rows[1])])
    }

    /// The leading 2×2 block multiplying (κ₁, κ₂).
    pub fn leading_block(&self) -> Matrix2 {
        [
            [self.rows[0][0], self.rows[0][1]],
            [self.rows[1][0], self.rows[1][1]],
        ]
    }

    /// Right-hand side of the balance equations, `(-1, -p²)`.
    pub fn rhs(&self) -> [f64; 2] {
        balance_rhs(self.p)
    }
}

fn balance_rhs(p: i64) -> [f64; 2] {
    [-1.0, -((p * p) as f64)]
}

/// Build the balance matrix for `N ≥ 4` bodies on the p-limaçon.
pub fn build_matrix(n_bodies: usize, p: i64) -> Result<CoefficientMatrix> {
    check_body_count(n_bodies)?;
    let n = n_bodies / 2;
    let mut rows = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for ell in 1..=n {
        let ell_i = ell as i64;
        if n_bodies.is_multiple_of(2) && ell == n {
            // ω^n = -1, so the antipodal column is (ω^n - 1, ω^{pn} - 1).
            rows[0].push(-2.0);
            rows[1].push(if p.rem_euclid(2) == 0 { 0.0 } else { -2.0 });
        } else {
            rows[0].push(2.0 * (cos_turns(ell_i, n_bodies) - 1.0));
            rows[1].push(2.0 * (cos_turns(ell_i * p, n_bodies) - 1.0));
        }
    }
    Ok(CoefficientMatrix { n_bodies, p, rows })
}

/// Determinant of the leading 2×2 block, evaluated from the built matrix.
///
/// For `N = 4` the second column is the halved antipodal column.
pub fn det_mt(n_bodies: usize, p: i64) -> Result<f64> {
    Ok(det2(&build_matrix(n_bodies, p)?.leading_block()))
}

/// `8(cos(2π/N) - 1)(cos(2πp/N) - 1)(cos(2πp/N) - cos(2π/N))`.
///
/// Equals [`det_mt`] whenever both leading columns are generic (`N ≥ 5`).
pub fn det_mt_closed_form(n_bodies: usize, p: i64) -> f64 {
    let c1 = cos_turns(1, n_bodies);
    let cp = cos_turns(p, n_bodies);
    8.0 * (c1 - 1.0) * (cp - 1.0) * (cp - c1)
}

/// Z_N-symmetric force coefficients κ₁ … κ_⌊N/2⌋.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingVector {
    pub n_bodies: usize,
    kappas: Vec<f64>,
}

impl CouplingVector {
    pub fn new(n_bodies: usize, kappas: Vec<f64>) -> Result<Self> {
        if kappas.len() != n_bodies / 2 {
            return Err(ChoreoError::DimensionMismatch {
                expected: n_bodies / 2,
                found: kappas.len(),
            });
        }
        Ok(Self { n_bodies, kappas })
    }

    pub fn zeros(n_bodies: usize) -> Self {
        Self {
            n_bodies,
            kappas: vec![0.0; n_bodies / 2],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.kappas
    }

    /// κ_ℓ for 1-based `ell`.
    pub fn kappa(&self, ell: usize) -> f64 {
        self.kappas[ell - 1]
    }

    /// Coefficient of the bond between bodies `j` and `l`.
    pub fn between(&self, j: usize, l: usize) -> f64 {
        let d = j.abs_diff(l) % self.n_bodies;
        let sep = d.min(self.n_bodies - d);
        if sep == 0 {
            0.0
        } else {
            self.kappas[sep - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }
}

/// Solve for (κ₁, κ₂) given the free tail κ₃ … κ_n.
pub fn solve_couplings(n_bodies: usize, p: i64, free: &[f64]) -> Result<CouplingVector> {
    let a = build_matrix(n_bodies, p)?;
    let n = a.columns();
    if free.len() != n - 2 {
        return Err(ChoreoError::DimensionMismatch {
            expected: n - 2,
            found: free.len(),
        });
    }
    let mt = a.leading_block();
    let det = det2(&mt);
    if !is_admissible(p, n_bodies as i64).admissible || det.abs() < SINGULAR_DET {
        return Err(ChoreoError::IllPosed { p, n_bodies, det });
    }
    let mut rhs = a.rhs();
    for (i, &k) in free.iter().enumerate() {
        rhs[0] -= a.row(0)[i + 2] * k;
        rhs[1] -= a.row(1)[i + 2] * k;
    }
    let head = solve2(&mt, rhs).ok_or(ChoreoError::IllPosed { p, n_bodies, det })?;
    let mut kappas = Vec::with_capacity(n);
    kappas.extend_from_slice(&head);
    kappas.extend_from_slice(free);
    CouplingVector::new(n_bodies, kappas)
}

/// [`solve_couplings`] with the tail set to zero.
pub fn solve_couplings_zero_tail(n_bodies: usize, p: i64) -> Result<CouplingVector> {
    check_body_count(n_bodies)?;
    solve_couplings(n_bodies, p, &vec![0.0; n_bodies / 2 - 2])
}

/// `A κ - (-1, -p²)`; zero exactly when the limaçon motion is a solution.
pub fn residual(n_bodies: usize, p: i64, couplings: &CouplingVector) -> Result<[f64; 2]> {
    if couplings.n_bodies != n_bodies {
        return Err(ChoreoError::DimensionMismatch {
            expected: n_bodies,
            found: couplings.n_bodies,
        });
    }
    let a = build_matrix(n_bodies, p)?;
    let lhs = a.apply(couplings.as_slice())?;
    let rhs = a.rhs();
    Ok([lhs[0] - rhs[0], lhs[1] - rhs[1]])
}

/// Minimum-norm least-squares couplings for any `(p, N)`, including pairs
/// where the balance equations have no exact solution.
pub fn least_squares_couplings(n_bodies: usize, p: i64) -> Result<CouplingVector> {
    let a = build_matrix(n_bodies, p)?;
    let (r0, r1) = (a.row(0), a.row(1));
    let g00: f64 = r0.iter().map(|x| x * x).sum();
    let g11: f64 = r1.iter().map(|x| x * x).sum();
    let g01: f64 = r0.iter().zip(r1).map(|(x, y)| x * y).sum();

    // pseudo-inverse of the symmetric Gram matrix A Aᵀ
    let mean = 0.5 * (g00 + g11);
    let half_gap = (0.25 * (g00 - g11).powi(2) + g01 * g01).sqrt();
    let eigen = [mean + half_gap, mean - half_gap];
    let cutoff = eigen[0].abs() * 1e-12;
    let mut pinv = [[0.0; 2]; 2];
    for (i, &lambda) in eigen.iter().enumerate() {
        if lambda.abs() <= cutoff {
            continue;
        }
        let v = if g01.abs() > 0.0 {
            let (x, y) = (g01, lambda - g00);
            let len = x.hypot(y);
            [x / len, y / len]
        } else if (g00 >= g11) == (i == 0) {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        for r in 0..2 {
            for c in 0..2 {
                pinv[r][c] += v[r] * v[c] / lambda;
            }
        }
    }
    let rhs = a.rhs();
    let w = [
        pinv[0][0] * rhs[0] + pinv[0][1] * rhs[1],
        pinv[1][0] * rhs[0] + pinv[1][1] * rhs[1],
    ];
    let kappas = r0
        .iter()
        .zip(r1)
        .map(|(x, y)| x * w[0] + y * w[1])
        .collect();
    CouplingVector::new(n_bodies, kappas)
}

/// Alternating couplings: odd separations share κ_o, even ones κ_e.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedCoupling {
    pub kappa_o: f64,
    pub kappa_e: f64,
}

impl RestrictedCoupling {
    pub fn expand(&self, n_bodies: usize) -> CouplingVector {
        let kappas = (1..=n_bodies / 2)
            .map(|ell| {
                if ell % 2 == 1 {
                    self.kappa_o
                } else {
                    self.kappa_e
                }
            })
            .collect();
        CouplingVector { n_bodies, kappas }
    }
}

/// Balance matrix folded onto (κ_o, κ_e).
pub fn fold_matrix(n_bodies: usize, p: i64) -> Result<Matrix2> {
    let a = build_matrix(n_bodies, p)?;
    let mut m = [[0.0; 2]; 2];
    for (row, out) in m.iter_mut().enumerate() {
        for (i, x) in a.row(row).iter().enumerate() {
            out[i % 2] += x;
        }
    }
    Ok(m)
}

/// Non-trivial eigenvalue of the folded matrix for odd N (the other one is
/// `-N`). `None` for even N.
pub fn odd_fold_eigenvalue(n_bodies: usize, p: i64) -> Option<f64> {
    if n_bodies.is_multiple_of(2) {
        return None;
    }
    let nf = n_bodies as f64;
    let sign_p = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let base = 1.0 / (2.0 * (std::f64::consts::PI / nf).cos());
    let shifted = sign_p / (2.0 * (std::f64::consts::PI * p as f64 / nf).cos());
    Some(if n_bodies % 4 == 1 {
        base + shifted
    } else {
        -base - shifted
    })
}

/// Solve for the alternating coupling pattern.
///
/// Even N requires `p ≡ N/2 (mod N)` and yields `κ_o = p²/N`,
/// `κ_e = (2 - p²)/N`; any other even case is inconsistent. Odd N always has
/// a unique solution.
pub fn solve_restricted(n_bodies: usize, p: i64) -> Result<RestrictedCoupling> {
    check_body_count(n_bodies)?;
    let decision = is_admissible_restricted(p, n_bodies as i64);
    if !decision.admissible {
        return Err(ChoreoError::NotRestrictedAdmissible {
            p,
            n_bodies,
            decision,
        });
    }
    let nf = n_bodies as f64;
    let p2 = (p * p) as f64;
    if n_bodies.is_multiple_of(2) {
        return Ok(RestrictedCoupling {
            kappa_o: p2 / nf,
            kappa_e: (2.0 - p2) / nf,
        });
    }
    let m = fold_matrix(n_bodies, p)?;
    let [kappa_o, kappa_e] = solve2(&m, balance_rhs(p)).ok_or(ChoreoError::IllPosed {
        p,
        n_bodies,
        det: det2(&m),
    })?;
    Ok(RestrictedCoupling { kappa_o, kappa_e })
}

/// Equal masses `m` with alternating charges `±e`: `κ_o = m² + e²`,
/// `κ_e = m² - e²`. Only Z_N-symmetric for even N.
pub fn restricted_from_mass_charge(mass: f64, charge: f64) -> RestrictedCoupling {
    let m2 = mass * mass;
    let e2 = charge * charge;
    RestrictedCoupling {
        kappa_o: m2 + e2,
        kappa_e: m2 - e2,
    }
}
