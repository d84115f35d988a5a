use std::f64::consts::TAU;

use limacon::admissibility::{admissible_body_counts, divisor_blockset};
use limacon::coefficients::{det_mt, det_mt_closed_form, odd_fold_eigenvalue};
use limacon::collisions::{min_pair_distance, pair_distance_closed_form};
use limacon::kinematics::body_state;
use limacon::*;
use proptest::prelude::*;

fn admissible_pair() -> impl Strategy<Value = (i64, usize)> {
    (-15i64..=15, 4usize..=24).prop_filter("admissible", |(p, n)| {
        is_admissible(*p, *n as i64).admissible
    })
}

proptest! {
    #[test]
    fn admissibility_is_symmetric_in_p(p in -40i64..=40, n in -2i64..=60) {
        let a = is_admissible(p, n);
        let b = is_admissible(-p, n);
        prop_assert_eq!(a.admissible, b.admissible);
    }

    #[test]
    fn admissibility_matches_divisor_conditions(p in -40i64..=40, n in 4i64..=60) {
        let direct = p.abs() >= 2 && p % n != 0 && (p - 1) % n != 0 && (p + 1) % n != 0;
        prop_assert_eq!(is_admissible(p, n).admissible, direct);
        if p.abs() >= 2 {
            let blocked = divisor_blockset(p).unwrap().contains(&(n as u64));
            prop_assert_eq!(blocked, !direct);
        }
    }

    #[test]
    fn restricted_implies_general(p in -30i64..=30, n in 4i64..=40) {
        if is_admissible_restricted(p, n).admissible {
            prop_assert!(is_admissible(p, n).admissible);
        }
    }

    #[test]
    fn determinant_nonzero_on_admissible((p, n) in admissible_pair()) {
        prop_assert!(det_mt(n, p).unwrap().abs() > 1e-9);
    }

    #[test]
    fn determinant_closed_form((p, n) in admissible_pair()) {
        prop_assume!(n >= 5);
        prop_assert!((det_mt(n, p).unwrap() - det_mt_closed_form(n, p)).abs() <= 1e-12);
    }

    #[test]
    fn p_symmetry_is_exact((p, n) in admissible_pair(), seed in proptest::collection::vec(-2.0f64..2.0, 10)) {
        let tail = &seed[..n / 2 - 2];
        let a = solve_couplings(n, p, tail).unwrap();
        let b = solve_couplings(n, -p, tail).unwrap();
        prop_assert_eq!(a.as_slice(), b.as_slice());
    }

    #[test]
    fn couplings_are_affine_in_tail(
        (p, n) in admissible_pair().prop_filter("has tail", |(_, n)| *n >= 6),
        seed in proptest::collection::vec(-2.0f64..2.0, 10),
        delta in 0.1f64..3.0,
        j in 0usize..10,
    ) {
        let free = n / 2 - 2;
        let j = j % free;
        let base = seed[..free].to_vec();
        let mut once = base.clone();
        once[j] += delta;
        let mut twice = base.clone();
        twice[j] += 2.0 * delta;
        let k0 = solve_couplings(n, p, &base).unwrap();
        let k1 = solve_couplings(n, p, &once).unwrap();
        let k2 = solve_couplings(n, p, &twice).unwrap();
        for ell in 1..=2 {
            let d1 = k1.kappa(ell) - k0.kappa(ell);
            let d2 = k2.kappa(ell) - k1.kappa(ell);
            prop_assert!((d1 - d2).abs() <= 1e-9 * (1.0 + d1.abs()));
        }
        prop_assert!(residual(n, p, &k1).unwrap().iter().all(|r| r.abs() <= 1e-9));
    }

    #[test]
    fn fold_matrix_row_sums(n in 4usize..=60, p in -80i64..=80) {
        prop_assume!(p % n as i64 != 0);
        let m = fold_matrix(n, p).unwrap();
        let nf = n as f64;
        prop_assert!((m[0][0] + m[0][1] + nf).abs() <= 1e-9);
        prop_assert!((m[1][0] + m[1][1] + nf).abs() <= 1e-9);
    }

    #[test]
    fn odd_fold_eigenvalues(k in 2usize..=30, p in -40i64..=40) {
        let n = 2 * k + 1;
        prop_assume!(p % n as i64 != 0);
        let m = fold_matrix(n, p).unwrap();
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let nf = n as f64;
        let lambda = tr + nf;
        prop_assert!((det + nf * lambda).abs() <= 1e-8 * (1.0 + det.abs()));
        let sign = if n % 4 == 1 { 1.0 } else { -1.0 };
        let parity = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let pi = std::f64::consts::PI;
        let formula = sign
            * (1.0 / (2.0 * (pi / nf).cos()) + parity / (2.0 * (pi * p as f64 / nf).cos()));
        prop_assert!((lambda - formula).abs() <= 1e-10 * (1.0 + formula.abs()));
        prop_assert!((odd_fold_eigenvalue(n, p).unwrap() - formula).abs() <= 1e-10 * (1.0 + formula.abs()));
    }

    #[test]
    fn restricted_solution_solves_general_system(p in -12i64..=12, n in 4i64..=30) {
        prop_assume!(is_admissible_restricted(p, n).admissible);
        let n = n as usize;
        let r = solve_restricted(n, p).unwrap();
        let res = residual(n, p, &r.expand(n)).unwrap();
        prop_assert!(res[0].abs() <= 1e-10 && res[1].abs() <= 1e-10);
    }

    #[test]
    fn choreography_shift(
        (p, n) in admissible_pair(),
        a in 0.2f64..3.0,
        b in 0.2f64..3.0,
        t in -10.0f64..10.0,
        k in 0usize..24,
    ) {
        let config = ChoreoConfig::new(CurveParams::new(a, b, p).unwrap(), n).unwrap();
        let k = k % n;
        let (q, v) = body_state(&config, k, t).unwrap();
        let (q0, v0) = body_state(&config, 0, t + TAU * k as f64 / n as f64).unwrap();
        prop_assert!((q - q0).norm() <= 1e-12 * (a + b) * (1.0 + t.abs()));
        prop_assert!((v - v0).norm() <= 1e-12 * (a + b * p.abs() as f64) * (1.0 + t.abs()));
    }

    #[test]
    fn velocity_and_acceleration_match_finite_differences(
        p in prop_oneof![-7i64..=-2, 2i64..=7],
        a in 0.2f64..3.0,
        b in 0.2f64..3.0,
        t in 0.0f64..TAU,
    ) {
        let config = ChoreoConfig::new(CurveParams::new(a, b, p).unwrap(), 5).unwrap();
        let h = 1e-5;
        let (qm, vm) = body_state(&config, 1, t - h).unwrap();
        let (qp, vp) = body_state(&config, 1, t + h).unwrap();
        let (_, v) = body_state(&config, 1, t).unwrap();
        let acc = analytic_accel(&config, 1, t).unwrap();
        let scale = a + b * (p * p) as f64;
        prop_assert!(((qp - qm) * (0.5 / h) - v).norm() <= 1e-7 * scale);
        prop_assert!(((vp - vm) * (0.5 / h) - acc).norm() <= 1e-6 * scale * p.abs() as f64);
    }

    #[test]
    fn pair_distance_oracle_bounds_closed_form(
        p in prop_oneof![-5i64..=-2, 2i64..=5],
        n in 4usize..=10,
        a in 0.3f64..2.5,
        b in 0.3f64..2.5,
        k in 1usize..10,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let config = ChoreoConfig { curve: CurveParams::new(a, b, p).unwrap(), n_bodies: n };
        let k = 1 + (k - 1) % (n / 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = min_pair_distance(&config, k, 512).unwrap();
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.0..TAU);
            let (qa, _) = body_state(&config, 0, t).unwrap();
            let (qb, _) = body_state(&config, k, t).unwrap();
            let d = (qa - qb).norm();
            prop_assert!((pair_distance_closed_form(&config, k, t) - d).abs() <= 1e-12 * (a + b));
            prop_assert!(m.min_distance <= d + 1e-12);
        }
    }
}

#[test]
fn scan_lists_complement_of_blockset() {
    for p in (-12i64..=12).filter(|p| p.abs() >= 2) {
        let block = divisor_blockset(p).unwrap();
        let want: Vec<u64> = (4..=40).filter(|n| !block.contains(n)).collect();
        assert_eq!(admissible_body_counts(p, 40).unwrap(), want);
    }
}
