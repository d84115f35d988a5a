//! Collision analysis for choreographies on the p-limaçon.
//!
//! For separation `k`, `z₀(t) - z_k(t) = α e^{it} + β e^{ipt}` with
//! `α = a(1 - ω^k)` and `β = b(1 - ω^{pk})`, so
//!
//! ```text
//!   |q₀ - q_k|² = A² + B² + 2AB cos((p-1)t + φ),   A = |α|, B = |β|
//! ```
//!
//! The pair meets iff `A = B`, i.e. `|a| sin(πk/N) = |b sin(πpk/N)|`, and it
//! does so whenever `e^{i(p-1)t} = -α/β`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::coefficients::{cos_turns, sin_turns};
use crate::error::{ChoreoError, Result};
use crate::kinematics::{body_state, ChoreoConfig};
use crate::vec2::Vec2;

/// Witnesses at or below this distance certify a collision.
pub const COLLISION_TOL: f64 = 1e-10;

/// Near misses up to this distance are flagged as suspect.
pub const SUSPECT_TOL: f64 = 1e-8;

const RATIO_DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionRatio {
    pub k: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionWitness {
    pub k: usize,
    pub t_star: f64,
    pub bodies: (usize, usize),
    pub point: Vec2,
    pub min_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub collides: bool,
    /// Some separation comes within [`SUSPECT_TOL`] without a certified hit.
    pub suspect: bool,
    pub ratios: Vec<CollisionRatio>,
    pub witnesses: Vec<CollisionWitness>,
}

/// `sin(π·num/N)` via exact reduction mod 2N.
fn sin_half_turns(num: i64, n_bodies: usize) -> f64 {
    sin_turns(num, 2 * n_bodies)
}

/// Values of `a/b` at which some separation can collide:
/// `± sin(πpk/N) / sin(πk/N)` for `k = 1 … N-1`, deduplicated, zeros dropped.
pub fn collision_ratios(n_bodies: usize, p: i64) -> Vec<CollisionRatio> {
    let mut out: Vec<CollisionRatio> = Vec::new();
    for k in 1..n_bodies {
        let ki = k as i64;
        if (p * ki).rem_euclid(n_bodies as i64) == 0 {
            continue;
        }
        let r = sin_half_turns(p * ki, n_bodies) / sin_half_turns(ki, n_bodies);
        for ratio in [r.abs(), -r.abs()] {
            let seen = out
                .iter()
                .any(|c| (c.ratio - ratio).abs() <= RATIO_DEDUP_TOL * ratio.abs().max(1.0));
            if !seen {
                out.push(CollisionRatio { k, ratio });
            }
        }
    }
    out
}

/// The two complex amplitudes of `z₀ - z_k`, as (re, im) pairs.
fn separation_amplitudes(config: &ChoreoConfig, k: usize) -> ([f64; 2], [f64; 2]) {
    let n = config.n_bodies;
    let (a, b, p) = (config.curve.a, config.curve.b, config.curve.p);
    let ki = k as i64;
    let alpha = [a * (1.0 - cos_turns(ki, n)), -a * sin_turns(ki, n)];
    let beta = [b * (1.0 - cos_turns(p * ki, n)), -b * sin_turns(p * ki, n)];
    (alpha, beta)
}

/// `(A, B)` with `A = 2|a| sin(πk/N)` and `B = 2|b sin(πpk/N)|`.
pub fn separation_magnitudes(config: &ChoreoConfig, k: usize) -> (f64, f64) {
    let n = config.n_bodies;
    let ki = k as i64;
    (
        2.0 * config.curve.a.abs() * sin_half_turns(ki, n).abs(),
        2.0 * config.curve.b.abs() * sin_half_turns(config.curve.p * ki, n).abs(),
    )
}

/// Closed form of `|q₀(t) - q_k(t)|`.
pub fn pair_distance_closed_form(config: &ChoreoConfig, k: usize, t: f64) -> f64 {
    let (alpha, beta) = separation_amplitudes(config, k);
    let p = config.curve.p as f64;
    let (s1, c1) = t.sin_cos();
    let (sp, cp) = (p * t).sin_cos();
    let re = alpha[0] * c1 - alpha[1] * s1 + beta[0] * cp - beta[1] * sp;
    let im = alpha[0] * s1 + alpha[1] * c1 + beta[0] * sp + beta[1] * cp;
    re.hypot(im)
}

/// Times in `[0, 2π)` minimizing `|q₀(t) - q_k(t)|`: the `|p - 1|` roots
/// of `e^{i(p-1)t} = -α/β`. Empty when `β = 0`, where the distance is
/// constant.
fn closest_approach_times(config: &ChoreoConfig, k: usize) -> Vec<f64> {
    let (alpha, beta) = separation_amplitudes(config, k);
    if beta[0] == 0.0 && beta[1] == 0.0 {
        return Vec::new();
    }
    let target = (-alpha[1]).atan2(-alpha[0]) - beta[1].atan2(beta[0]);
    let q = config.curve.p - 1;
    let mut times: Vec<f64> = (0..q.abs())
        .map(|j| wrap_period((target + TAU * j as f64) / q as f64))
        .collect();
    times.sort_by(f64::total_cmp);
    times
}

/// Reduce into `[0, 2π)`, snapping values within 1e-12 of 2π to 0.
fn wrap_period(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if TAU - w < 1e-12 {
        0.0
    } else {
        w
    }
}

fn distance_at(config: &ChoreoConfig, j1: usize, j2: usize, t: f64) -> (f64, Vec2) {
    let (q1, _) = body_state(config, j1, t).expect("index checked");
    let (q2, _) = body_state(config, j2, t).expect("index checked");
    ((q1 - q2).norm(), q1)
}

/// Decide whether the choreography has a collision, with explicit
/// witnesses for every separation that meets or nearly meets.
///
/// Separations `k` and `N - k` describe the same pairs, so only
/// `k ≤ N/2` is enumerated.
pub fn has_collision(config: &ChoreoConfig) -> CollisionReport {
    let n = config.n_bodies;
    let mut witnesses = Vec::new();
    let mut suspect = false;
    for k in 1..=n / 2 {
        let (a_mag, b_mag) = separation_magnitudes(config, k);
        if (a_mag - b_mag).abs() > SUSPECT_TOL {
            continue;
        }
        let mut hit = false;
        for t0 in closest_approach_times(config, k) {
            for j in 0..n {
                let t_star = wrap_period(t0 - (TAU * j as f64) / n as f64);
                let partner = (j + k) % n;
                let (min_distance, point) = distance_at(config, j, partner, t_star);
                hit |= min_distance <= COLLISION_TOL;
                witnesses.push(CollisionWitness {
                    k,
                    t_star,
                    bodies: (j, partner),
                    point,
                    min_distance,
                });
            }
        }
        suspect |= !hit;
    }
    witnesses.sort_by(|x, y| {
        x.k.cmp(&y.k)
            .then(x.t_star.total_cmp(&y.t_star))
            .then(x.bodies.cmp(&y.bodies))
    });
    let collides = witnesses.iter().any(|w| w.min_distance <= COLLISION_TOL);
    CollisionReport {
        collides,
        suspect: suspect && !collides,
        ratios: collision_ratios(n, config.curve.p),
        witnesses,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMinimum {
    pub min_distance: f64,
    pub argmin_t: f64,
}

/// Numeric minimum of `|q₀(t) - q_k(t)|` over one period: dense sampling,
/// then bisection on the derivative of the squared distance.
pub fn min_pair_distance(config: &ChoreoConfig, k: usize, grid_size: usize) -> Result<PairMinimum> {
    let n = config.n_bodies;
    if k == 0 || k >= n {
        return Err(ChoreoError::IndexOutOfRange {
            index: k as i64,
            lo: 1,
            hi: n as i64 - 1,
        });
    }
    if grid_size < 8 {
        return Err(ChoreoError::BadGrid(grid_size));
    }
    let sep = |t: f64| -> (Vec2, Vec2) {
        let (q0, v0) = body_state(config, 0, t).expect("index checked");
        let (qk, vk) = body_state(config, k, t).expect("index checked");
        (q0 - qk, v0 - vk)
    };
    let dist_sq = |t: f64| sep(t).0.norm_sq();
    // half the derivative of the squared distance
    let slope = |t: f64| {
        let (d, v) = sep(t);
        d.dot(v)
    };

    let h = TAU / grid_size as f64;
    let (best_i, _) = (0..grid_size)
        .map(|i| (i, dist_sq(i as f64 * h)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("grid is nonempty");
    let centre = best_i as f64 * h;
    let (mut lo, mut hi) = (centre - h, centre + h);

    let t_min = if slope(lo) < 0.0 && slope(hi) > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-15 || mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    } else {
        golden_section(&dist_sq, lo, hi, 1e-12)
    };
    let candidates = [t_min, centre];
    let argmin_t = candidates
        .into_iter()
        .min_by(|x, y| dist_sq(*x).total_cmp(&dist_sq(*y)))
        .unwrap();
    Ok(PairMinimum {
        min_distance: dist_sq(argmin_t).sqrt(),
        argmin_t: wrap_period(argmin_t),
    })
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Smallest oracle distance over every separation.
pub fn min_distance_over_separations(config: &ChoreoConfig, grid_size: usize) -> Result<f64> {
    let mut best = f64::INFINITY;
    for k in 1..config.n_bodies {
        best = best.min(min_pair_distance(config, k, grid_size)?.min_distance);
    }
    Ok(best)
}
