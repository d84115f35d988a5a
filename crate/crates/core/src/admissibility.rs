//! Which `(p, N)` pairs admit a choreography on the p-limaçon.
//!
//! Everything here is exact integer arithmetic. Inputs outside the
//! meaningful range (`p ∈ {-1, 0, 1}`, `N < 4`) are not errors: they come
//! back as a rejected [`AdmissibilityDecision`] carrying the reasons.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ChoreoError, Result};

/// Reason a pair fails to admit a choreography.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Violation {
    #[serde(rename = "P_DIV_N")]
    PDivN,
    #[serde(rename = "P_MINUS_1_DIV_N")]
    PMinus1DivN,
    #[serde(rename = "P_PLUS_1_DIV_N")]
    PPlus1DivN,
    #[serde(rename = "P_EXCLUDED")]
    PExcluded,
    #[serde(rename = "N_TOO_SMALL")]
    NTooSmall,
    #[serde(rename = "RESTRICTED_PARITY")]
    RestrictedParity,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::PDivN => "P_DIV_N",
            Violation::PMinus1DivN => "P_MINUS_1_DIV_N",
            Violation::PPlus1DivN => "P_PLUS_1_DIV_N",
            Violation::PExcluded => "P_EXCLUDED",
            Violation::NTooSmall => "N_TOO_SMALL",
            Violation::RestrictedParity => "RESTRICTED_PARITY",
        };
        f.write_str(s)
    }
}

/// Which branch of the alternating-coupling analysis applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RestrictedCase {
    /// Even N; requires `p ≡ N/2 (mod N)`.
    #[serde(rename = "EVEN_N_HALF_MOD")]
    EvenNHalfMod,
    #[serde(rename = "ODD_N")]
    OddN,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityDecision {
    pub admissible: bool,
    pub violated_conditions: Vec<Violation>,
    pub restricted_case: Option<RestrictedCase>,
}

impl AdmissibilityDecision {
    fn from_violations(violated: Vec<Violation>, restricted_case: Option<RestrictedCase>) -> Self {
        Self {
            admissible: violated.is_empty(),
            violated_conditions: violated,
            restricted_case,
        }
    }

    pub fn has(&self, v: Violation) -> bool {
        self.violated_conditions.contains(&v)
    }
}

fn divides(n: i64, x: i64) -> bool {
    x.rem_euclid(n) == 0
}

/// Decide whether the choreography on the p-limaçon with N bodies exists
/// for some choice of Z_N-symmetric force coefficients.
///
/// When `p` is excluded the divisibility tags are not reported, since they
/// carry no extra information there.
pub fn is_admissible(p: i64, n_bodies: i64) -> AdmissibilityDecision {
    let mut violated = Vec::new();
    let excluded = (-1..=1).contains(&p);
    if excluded {
        violated.push(Violation::PExcluded);
    }
    if n_bodies < 4 {
        violated.push(Violation::NTooSmall);
    }
    if !excluded && n_bodies >= 1 {
        if divides(n_bodies, p) {
            violated.push(Violation::PDivN);
        }
        if divides(n_bodies, p - 1) {
            violated.push(Violation::PMinus1DivN);
        }
        if divides(n_bodies, p + 1) {
            violated.push(Violation::PPlus1DivN);
        }
    }
    violated.sort();
    AdmissibilityDecision::from_violations(violated, None)
}

/// Admissibility under the alternating coupling pattern
/// `κ₁ = κ₃ = … = κ_o`, `κ₂ = κ₄ = … = κ_e`.
pub fn is_admissible_restricted(p: i64, n_bodies: i64) -> AdmissibilityDecision {
    let mut violated = is_admissible(p, n_bodies).violated_conditions;
    let case = if n_bodies.rem_euclid(2) == 0 {
        if n_bodies >= 2 && p.rem_euclid(n_bodies) != n_bodies / 2 {
            violated.push(Violation::RestrictedParity);
        }
        RestrictedCase::EvenNHalfMod
    } else {
        RestrictedCase::OddN
    };
    violated.sort();
    AdmissibilityDecision::from_violations(violated, Some(case))
}

fn push_divisors(x: u64, out: &mut BTreeSet<u64>) {
    let mut d = 1;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.insert(d);
            out.insert(x / d);
        }
        d += 1;
    }
}

/// All positive divisors of `|p|`, `|p - 1|` and `|p + 1|`.
///
/// An `N ≥ 4` is admissible for `p` exactly when it is not in this set.
pub fn divisor_blockset(p: i64) -> Result<BTreeSet<u64>> {
    if p.unsigned_abs() < 2 {
        return Err(ChoreoError::ExcludedExponent(p));
    }
    let mut out = BTreeSet::new();
    for x in [p, p - 1, p + 1] {
        push_divisors(x.unsigned_abs(), &mut out);
    }
    Ok(out)
}

/// Admissible body counts `4 ≤ N ≤ max_n` for a fixed `p`.
pub fn admissible_body_counts(p: i64, max_n: u64) -> Result<Vec<u64>> {
    let blocked = divisor_blockset(p)?;
    Ok((4..=max_n).filter(|n| !blocked.contains(n)).collect())
}
