use approx::assert_relative_eq;
use proptest::prelude::*;
use qfock::qcomb::{
    bound_constants, crossing_sums, crossings, d_family, d_infinity, inversions, pair_partition_moment, q_binomial,
    q_factorial, q_int, wick_coefficients, SubsetPattern, DEFAULT_ENUM_CAP, DEFAULT_TOL,
};

const GRID: [f64; 6] = [-0.9, -0.5, 0.0, 0.3, 0.5, 0.9];

#[test]
fn small_values() {
    assert_eq!(q_int(0, 0.5).unwrap(), 0.0);
    assert_eq!(q_int(3, 0.5).unwrap(), 1.75);
    assert_eq!(q_int(4, 0.0).unwrap(), 1.0);
    assert_eq!(q_factorial(0, 0.9).unwrap(), 1.0);
    assert_eq!(q_factorial(3, 0.5).unwrap(), 2.625);
    assert_relative_eq!(q_binomial(3, 1, 0.5).unwrap(), 1.75, max_relative = 1e-15);
    assert_eq!(q_binomial(7, 0, 0.3).unwrap(), 1.0);
    assert!(q_binomial(2, 3, 0.3).is_err());
    assert!(q_int(2, 1.0).is_err());
    assert!(q_factorial(2, -1.0).is_err());
    assert_eq!(inversions(&[3, 1, 2]).unwrap(), 2);
    assert!(inversions(&[1, 1]).is_err());
    assert_eq!(crossings(&SubsetPattern::new(4, vec![3, 4]).unwrap()), 4);
    assert_eq!(crossings(&SubsetPattern::new(2, vec![2]).unwrap()), 1);
    assert_eq!(pair_partition_moment(6, 0.0).unwrap(), 5.0);
}

#[test]
fn pascal_identity() {
    for q in GRID {
        for n in 0..=20u32 {
            for k in 1..=n {
                let lhs = q.powi(k as i32) * q_binomial(n, k, q).unwrap() + q_binomial(n, k - 1, q).unwrap();
                let rhs = q_binomial(n + 1, k, q).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "q = {q}, n = {n}, k = {k}");
            }
        }
    }
}

#[test]
fn factorials_from_d_family() {
    for q in GRID {
        let fam = d_family(q, 30, DEFAULT_TOL).unwrap();
        for n in 0..=30 {
            let lhs = fam.d[n] * (1.0 - q).powi(-(n as i32));
            assert_relative_eq!(lhs, q_factorial(n as u32, q).unwrap(), max_relative = 1e-12);
        }
    }
}

#[test]
fn binomials_stabilize_at_inverse_d() {
    for q in GRID {
        let fam = d_family(q, 10, DEFAULT_TOL).unwrap();
        for k in 0..=10u32 {
            let limit = fam.c[k as usize];
            assert_relative_eq!(limit, 1.0 / fam.d[k as usize], max_relative = 1e-15);
            let at = |n: u32| q_binomial(n, k, q).unwrap();
            // exact gap: binom(n, k) - 1/d_k = (prod_{j = n-k+1}^n (1 - q^j) - 1) / d_k
            for n in [k + 5, 60, 120] {
                let head: f64 = (n - k + 1..=n).map(|j| 1.0 - q.powi(j as i32)).product();
                assert!((at(n) - limit - (head - 1.0) * limit).abs() < 1e-13 * limit.max(1.0));
            }
            // |q|^60 is only 1.8e-3 at |q| = 0.9, so 1e-10 needs n of about 260 there
            let n_stable = if q.abs() <= 0.5 { 60 } else { 300 };
            assert!((at(n_stable) - limit).abs() < 1e-10 * limit.max(1.0), "q = {q}, k = {k}");
            if q >= 0.0 {
                // monotone in n for q >= 0
                assert!((k..60).all(|n| at(n) <= at(n + 1) + 1e-12));
            }
        }
    }
}

#[test]
fn frozen_constants() {
    let table = [
        (0.1, 0.890010099998999, 1.1235827548486525),
        (0.3, 0.6126481542132565, 1.632258243369995),
        (0.5, 0.2887880950866024, 3.462_746_619_455_064),
        (-0.5, 1.2107241303010592, 3.462_746_619_455_064),
        (0.8, 0.003368005852423116, 296.911598084234),
        (-0.8, 0.599728893167061, 296.911598084234),
        (0.9, 1.2860674342766e-6, 777564.2033595849),
    ];
    for (q, d_inf, c_q) in table {
        let d = d_infinity(q, DEFAULT_TOL).unwrap();
        assert_relative_eq!(d.value, d_inf, max_relative = 1e-12);
        assert!(d.rel_tail <= 1e-13);
        let b = bound_constants(q, DEFAULT_TOL).unwrap();
        assert_relative_eq!(b.c_q.value, c_q, max_relative = 1e-12);
    }
    let zero = bound_constants(0.0, DEFAULT_TOL).unwrap();
    assert_eq!((zero.c_q.value, zero.d_q), (1.0, 1.0));
    // D(q) for q < 0 is attained at n = 1 for the grid values
    for q in [-0.3, -0.5, -0.8] {
        assert_relative_eq!(bound_constants(q, DEFAULT_TOL).unwrap().d_q, 1.0 - q, max_relative = 1e-15);
    }
    assert_eq!(bound_constants(0.5, DEFAULT_TOL).unwrap().d_q, 1.0);
    assert_relative_eq!(d_family(0.5, 3, DEFAULT_TOL).unwrap().d[3], 0.328125);
}

#[test]
fn d_values_bounded_by_c_q() {
    for q in GRID {
        let fam = d_family(q, 80, DEFAULT_TOL).unwrap();
        let cq = bound_constants(q, DEFAULT_TOL).unwrap().c_q.value;
        for &d in &fam.d {
            assert!(d <= cq * (1.0 + 1e-14) && 1.0 / d <= cq * (1.0 + 1e-14));
        }
    }
}

#[test]
fn crossing_sums_are_gaussian_binomials() {
    for q in GRID {
        for n in 0..=8 {
            let sums = crossing_sums(n, q, DEFAULT_ENUM_CAP).unwrap();
            for (k, s) in sums.iter().enumerate() {
                let b = q_binomial(n as u32, k as u32, q).unwrap();
                assert!((s - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }
    assert!(crossing_sums(9, 0.5, DEFAULT_ENUM_CAP).is_err());
}

#[test]
fn wick_coefficient_bound() {
    for q in [-0.85, -0.4, 0.0, 0.25, 0.6, 0.85] {
        let cq = bound_constants(q, DEFAULT_TOL).unwrap().c_q.value;
        for n in 0..=6 {
            let m = wick_coefficients(n, q, DEFAULT_ENUM_CAP).unwrap();
            for k in 0..=n {
                for l in 0..=n {
                    let bound = cq * cq * q.abs().powi(((n - k) * l) as i32);
                    assert!(m.get(k, l).abs() <= bound * (1.0 + 1e-12), "q = {q}, ({n}, {k}, {l})");
                }
            }
        }
    }
    let m1 = wick_coefficients(1, 0.4, DEFAULT_ENUM_CAP).unwrap();
    assert_eq!([m1.get(0, 0), m1.get(0, 1), m1.get(1, 0), m1.get(1, 1)], [1.0, 0.4, 1.0, 1.0]);
    assert!(wick_coefficients(9, 0.4, DEFAULT_ENUM_CAP).is_err());
}

#[test]
fn pairing_moments() {
    assert_eq!(pair_partition_moment(0, 0.3).unwrap(), 1.0);
    assert_eq!(pair_partition_moment(2, 0.3).unwrap(), 1.0);
    assert_relative_eq!(pair_partition_moment(4, 0.3).unwrap(), 2.3);
    // q = 1 limit would be (2k - 1)!!; q -> 0 gives Catalan numbers
    for (k, cat) in [(1, 1.0), (2, 2.0), (3, 5.0), (4, 14.0), (8, 1430.0)] {
        assert_eq!(pair_partition_moment(2 * k, 0.0).unwrap(), cat);
    }
    assert!(pair_partition_moment(3, 0.3).is_err());
    assert!(pair_partition_moment(18, 0.3).is_err());
}

proptest! {
    #[test]
    fn inversions_of_reversal(n in 1usize..12) {
        let rev: Vec<usize> = (1..=n).rev().collect();
        prop_assert_eq!(inversions(&rev).unwrap(), n * (n - 1) / 2);
    }

    #[test]
    fn crossings_of_complement_sum(n in 1usize..10, mask in any::<u64>()) {
        // c(J, J^c) + c(J^c, J) = |J| |J^c|
        let p = SubsetPattern::from_mask(n, mask & ((1u64 << n) - 1));
        let c = SubsetPattern::new(n, p.complement()).unwrap();
        prop_assert_eq!(crossings(&p) + crossings(&c), p.members().len() * (n - p.members().len()));
    }

    #[test]
    fn binomial_symmetry(n in 0u32..25, k in 0u32..25, q in -0.95f64..0.95) {
        prop_assume!(k <= n);
        let a = q_binomial(n, k, q).unwrap();
        let b = q_binomial(n, n - k, q).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn q_int_matches_closed_form(n in 0u32..40, q in -0.95f64..0.95) {
        let closed = (1.0 - q.powi(n as i32)) / (1.0 - q);
        prop_assert!((q_int(n, q).unwrap() - closed).abs() <= 1e-13 * closed.abs().max(1.0));
    }
}
