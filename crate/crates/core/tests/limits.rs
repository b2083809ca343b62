use qfock::fock::{FockSpace, FockVector, Letter, ModelParams, Word};
use qfock::limits::*;
use qfock::ops::{c_star, op_norm, wick, Elem, FockMap, FockOperator, OpExpr, Side, DEFAULT_WICK_CAP};
use qfock::qcomb::{bound_constants, d_family, wick_coefficients, DEFAULT_TOL};
use qfock::{Complex64, Error};

use Letter::{EBar, E};

fn space(q: f64, lambda: f64, aux: u8, depth: usize) -> FockSpace {
    FockSpace::new(ModelParams::new(q, lambda, aux, depth).unwrap()).unwrap()
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn d_inf(q: f64) -> f64 {
    d_family(q, 0, DEFAULT_TOL).unwrap().d_inf.value
}

fn minus(a: &OpExpr, b: &OpExpr) -> OpExpr {
    a.add(&b.scale(re(-1.0)))
}

fn full_norm(sp: &FockSpace, expr: &OpExpr) -> f64 {
    op_norm(sp, &FockOperator::full(sp, expr), sp.depth()).unwrap()
}

#[test]
fn t_eigenvalues_three_routes() {
    for q in [-0.5, 0.0, 0.3, 0.7] {
        let sp = space(q, 0.3, 0, 10);
        let report = t_limit_check(&sp, 4, 10).unwrap();
        assert_eq!(report.rows.len(), 10);
        for row in &report.rows {
            assert!(row.summary["exact_err"] < 1e-12, "q={q} n={}", row.n);
            assert!(row.summary["normal_err"] < 1e-12, "q={q} n={}", row.n);
            assert!(row.summary["t_limit_err"] < 1e-12);
        }
        // |T_n - d_inf/d_k| = eigenvalue * relative tail
        for row in &report.rows {
            let top = (0..=4).map(|k| t_eigenvalue(q, row.n, k)).fold(0.0, f64::max);
            assert!(row.summary["limit_gap"] <= top * row.summary["tail"] + 1e-13, "q={q} n={}", row.n);
        }
        assert!(report.monotone_from(1) || q < 0.0);
    }
}

#[test]
fn t_at_q_zero_is_the_identity() {
    let sp = space(0.0, 0.4, 1, 6);
    let id = FockOperator::identity(&sp);
    let t = FockOperator::full(&sp, &t_limit(0.0, 0.4, 6).unwrap());
    assert!(t.rel_diff(&sp, &id, 6) < 1e-15);
    for n in 1..=4 {
        let tn = t_n_operator(&sp, n).unwrap();
        assert!(tn.rel_diff(&sp, &id.restricted(&sp, 6 - n), 6 - n) < 1e-15);
    }
}

#[test]
fn composed_t_n_matches_normal_order_on_safe_levels() {
    for q in [-0.6, 0.4] {
        let sp = space(q, 0.25, 1, 7);
        for n in 1..=4 {
            let composed = t_n_operator(&sp, n).unwrap();
            let normal = FockOperator::materialize(&sp, &t_n_normal(q, 0.25, n, 7).unwrap(), 7 - n);
            assert!(composed.rel_diff(&sp, &normal, 7 - n) < 1e-12, "q={q} n={n}");
        }
    }
}

#[test]
fn t_n_converges_to_t_in_norm() {
    for q in [-0.5, 0.3, 0.6] {
        let sp = space(q, 0.3, 0, 10);
        let t = t_limit(q, 0.3, 10).unwrap();
        let fam = d_family(q, 80, DEFAULT_TOL).unwrap();
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8, 16] {
            let gap = full_norm(&sp, &minus(&t_n_normal(q, 0.3, n, 10).unwrap(), &t));
            let tail = (0..=10)
                .map(|k| (1.0 - fam.d_inf.value / (fam.d[k] * t_eigenvalue(q, n, k))).abs())
                .fold(0.0, f64::max);
            // K = 2 C_q covers the diagonal part and the off-diagonal corrections
            let k = 2.0 * bound_constants(q, DEFAULT_TOL).unwrap().c_q.value;
            assert!(gap <= k * tail, "q={q} n={n}: {gap:e} > {k} * {tail:e}");
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-3);
    }
}

#[test]
fn t_spectrum_within_bounds() {
    for q in [-0.8, -0.3, 0.0, 0.5, 0.8] {
        let sp = space(q, 0.3, 0, 8);
        let s = t_spectrum(&sp).unwrap();
        assert!(s.within(1e-10), "q={q}: {s:?}");
        assert!(s.min > 0.0);
    }
}

#[test]
fn negative_q_sup_is_attained_at_the_vacuum() {
    // d_k >= 1 for all k iff |q|(1 + |q|) <= 1
    for q in [-0.3, -0.5, -0.6] {
        let fam = d_family(q, 300, DEFAULT_TOL).unwrap();
        let sup = (0..=300).map(|k| fam.d_inf.value / fam.d[k]).fold(0.0, f64::max);
        assert!((sup - fam.d_inf.value).abs() < 1e-15, "q={q}");
    }
    let fam = d_family(-0.8, 300, DEFAULT_TOL).unwrap();
    let sup = (0..=300).map(|k| fam.d_inf.value / fam.d[k]).fold(0.0, f64::max);
    assert!(sup > fam.d_inf.value * 1.01);
}

#[test]
fn t_limit_check_needs_room() {
    let sp = space(0.3, 0.3, 0, 4);
    assert!(matches!(t_limit_check(&sp, 4, 2), Err(Error::Truncation(_))));
    assert!(matches!(t_n_operator(&sp, 5), Err(Error::Truncation(_))));
}

#[test]
fn composed_s_n_matches_normal_order_on_safe_levels() {
    for q in [-0.5, 0.0, 0.4] {
        let sp = space(q, 0.3, 0, 9);
        for n in 0..=4 {
            let composed = s_n_operator(&sp, n).unwrap();
            let normal = FockOperator::materialize(&sp, &s_n_normal(q, 0.3, n, 9).unwrap(), 9 - n);
            assert!(composed.rel_diff(&sp, &normal, 9 - n) < 1e-12, "q={q} n={n}");
        }
    }
    let sp = space(0.4, 0.3, 0, 6);
    let s0 = s_n_operator(&sp, 0).unwrap();
    assert!(s0.rel_diff(&sp, &FockOperator::identity(&sp), 6) < 1e-15);
}

fn balanced_expansion(sp: &FockSpace, n: usize) -> FockVector {
    let (q, lambda) = (sp.q(), sp.lambda());
    let fam = d_family(q, n, DEFAULT_TOL).unwrap();
    let terms = (0..=n).map(|k| {
        let x = (1.0 - q).powi(k as i32) * fam.d[n] * fam.d[n] / (fam.d[n - k] * fam.d[k] * fam.d[k])
            * lambda.powf(k as f64 / 2.0);
        (balanced_word(k), re(x))
    });
    FockVector::from_terms(sp.basis(), terms).unwrap()
}

#[test]
fn s_n_adjoint_on_the_vacuum() {
    for q in [-0.5, 0.0, 0.3] {
        let lambda = 0.3;
        let sp = space(q, lambda, 0, 8);
        let omega = FockVector::vacuum(sp.basis());
        for n in 1..=4 {
            let expected = balanced_expansion(&sp, n);
            // route 1: lambda^(n/2) (1-q)^n W(ebar^n) e^n
            let en = FockVector::word(sp.basis(), Word::power(E, n)).unwrap();
            let wick_route = wick(Word::power(EBar, n), q, DEFAULT_WICK_CAP)
                .unwrap()
                .apply(&sp, &en)
                .scaled(re(lambda.powf(n as f64 / 2.0) * (1.0 - q).powi(n as i32)));
            // route 2: q-adjoint of the normal-ordered S_n
            let s = FockOperator::full(&sp, &s_n_normal(q, lambda, n, 8).unwrap());
            let adjoint_route = s.q_adjoint(&sp).unwrap().apply(&omega);
            for v in [&wick_route, &adjoint_route] {
                assert!(v.sub(&expected).max_abs() < 1e-12, "q={q} n={n}");
            }
            // <Omega, S_n Omega> = d_n
            let vac = sp.inner(&omega, &s.apply(&omega)).re;
            assert!((vac - t_eigenvalue(q, n, 0)).abs() < 1e-14);
        }
    }
}

#[test]
fn vacuum_expectation_of_s_n_tends_to_d_inf() {
    let q = 0.5;
    let gaps: Vec<f64> = (1..=12).map(|n| (t_eigenvalue(q, n, 0) - d_inf(q)).abs()).collect();
    assert!(gaps.windows(2).all(|p| p[1] < p[0]));
    assert!(gaps[11] < 1e-3 * d_inf(q));
}

#[test]
fn s_n_converges_to_s_infinity() {
    for q in [-0.3, 0.3] {
        let lambda = 0.2;
        let sp = space(q, lambda, 0, 8);
        let s_inf = s_infinity(&sp, 4).unwrap();
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8, 12] {
            let gap = full_norm(&sp, &minus(&s_n_normal(q, lambda, n, 8).unwrap(), &s_inf.expr));
            assert!(gap < prev, "q={q} n={n}");
            prev = gap;
        }
        assert!(prev < 2e-3, "q={q}: {prev:e}");
    }
}

#[test]
fn s_infinity_at_q_zero() {
    let lambda = 0.4;
    let sp = space(0.0, lambda, 0, 8);
    let s_inf = s_infinity(&sp, 4).unwrap();
    let mut direct = OpExpr::zero();
    for k in 0..=4 {
        let term = c_star(E).pow(k).mul(&c_star(EBar).pow(k));
        direct = direct.add(&term.scale(re(lambda.powf(k as f64 / 2.0))));
    }
    let a = FockOperator::full(&sp, &s_inf.expr);
    let b = FockOperator::full(&sp, &direct);
    assert!(a.rel_diff(&sp, &b, 8) < 1e-14);
}

#[test]
fn s_infinity_adjoint_on_the_vacuum_is_xi() {
    for q in [-0.4, 0.0, 0.3] {
        let sp = space(q, 0.3, 0, 8);
        let s = FockOperator::full(&sp, &s_infinity(&sp, 4).unwrap().expr);
        let v = s.q_adjoint(&sp).unwrap().apply(&FockVector::vacuum(sp.basis()));
        let xi = xi_vector(&sp, 4).unwrap();
        assert!(v.sub(&xi.vector).max_abs() < 1e-12, "q={q}");
    }
}

#[test]
fn s_infinity_budget() {
    let sp = space(0.3, 0.3, 0, 6);
    assert!(matches!(s_infinity(&sp, 4), Err(Error::Budget(_))));
    assert!(matches!(xi_vector(&sp, 4), Err(Error::Budget(_))));
    assert!(s_tail_bound(0.3, 0.3, 4).unwrap() > s_tail_bound(0.3, 0.3, 8).unwrap());
}

#[test]
fn invertibility_thresholds() {
    let t1 = invertibility_threshold(0.1).unwrap();
    let t5 = invertibility_threshold(0.5).unwrap();
    assert!((t1 - 0.19536490356513794).abs() < 1e-12);
    assert!((t5 - 0.005925713267144613).abs() < 1e-12);
    assert!(invertibility_certificate(0.1, 0.15, &[]).unwrap().analytic_verdict);
    assert!(!invertibility_certificate(0.1, 0.25, &[]).unwrap().analytic_verdict);
    assert!(invertibility_certificate(0.5, 0.004, &[]).unwrap().analytic_verdict);
    let c0 = invertibility_certificate(0.0, 0.2, &[]).unwrap();
    assert!(c0.q_zero);
    // the product is increasing in lambda and crosses 1 at the threshold
    for q in [-0.7, -0.2, 0.1, 0.5, 0.9] {
        let t = invertibility_threshold(q).unwrap();
        for lambda in [0.001, 0.01, 0.05, 0.1, 0.2, 0.4, 0.8] {
            let c = invertibility_certificate(q, lambda, &[]).unwrap();
            assert_eq!(c.analytic_verdict, c.below_threshold, "q={q} lambda={lambda}");
            assert_eq!(c.analytic_verdict, c.product < 1.0);
        }
        let at = invertibility_certificate(q, t, &[]).unwrap();
        assert!((at.product - 1.0).abs() < 1e-10, "q={q}");
    }
}

#[test]
fn certificate_bounds_the_truncated_spectrum() {
    let c = invertibility_certificate(0.1, 0.15, &[6, 8]).unwrap();
    assert!(c.certified_lower_bound > 0.0);
    for t in &c.numeric {
        assert!(t.min_singular >= c.certified_lower_bound, "{t:?}");
        assert_eq!(t.terms, t.depth / 2);
    }
    // the truncations are nested invariant subspaces, so sigma_min cannot grow
    assert!(c.numeric[1].min_singular <= c.numeric[0].min_singular * (1.0 + 1e-12));
}

#[test]
fn certificate_csv_and_json() {
    let c = invertibility_certificate(0.2, 0.1, &[4, 6]).unwrap();
    let csv = c.csv_rows();
    assert_eq!(csv.lines().count(), 2);
    let cols = InvertibilityCertificate::CSV_HEADER.split(',').count();
    assert!(csv.lines().all(|l| l.split(',').count() == cols));
    let back: InvertibilityCertificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn xi_norms() {
    for lambda in [0.1, 0.5, 0.9] {
        assert!((xi_norm_sq(0.0, lambda, None).unwrap() - 1.0 / (1.0 - lambda)).abs() < 1e-12);
    }
    assert!((xi_norm_sq(0.3, 0.3, None).unwrap() - 0.7262768905615511).abs() < 1e-13);
    assert!((xi_norm_sq(0.3, 0.3, Some(1)).unwrap() - 0.6051363899594266).abs() < 1e-13);
    for q in [-0.8, -0.3, 0.0, 0.5, 0.8] {
        for lambda in [0.05, 0.3, 0.75] {
            let sp = space(q, lambda, 0, 8);
            let xi = xi_vector(&sp, 4).unwrap();
            assert!((xi.norm_sq - xi.norm_sq_closed_form).abs() <= 1e-10 * xi.norm_sq_closed_form);
            assert!(
                xi.norm_sq_full - xi.norm_sq_closed_form <= xi.tail_bound + 1e-14 * xi.norm_sq_full,
                "q={q} lambda={lambda}: {} {} {}",
                xi.norm_sq_full,
                xi.norm_sq_closed_form,
                xi.tail_bound
            );
            let vac = xi.vector.coeff(sp.basis(), Word::EMPTY).re;
            assert!((vac - d_inf(q)).abs() < 1e-15);
        }
    }
    let sp = space(0.0, 0.5, 0, 6);
    let xi = xi_vector(&sp, 3).unwrap();
    for k in 0..=3 {
        assert!((xi.vector.coeff(sp.basis(), balanced_word(k)).re - 0.5f64.powf(k as f64 / 2.0)).abs() < 1e-15);
    }
}

#[test]
fn fixed_point_identity() {
    for q in [-0.5, 0.0, 0.3] {
        let sp = space(q, 0.15, 0, 10);
        let fp = fixed_point_residual(&sp).unwrap();
        assert_eq!(fp.terms, 4);
        assert!(fp.residual < 1e-3, "q={q}: {}", fp.residual);
    }
    // the residual shrinks with the truncation
    let r8 = fixed_point_residual(&space(0.3, 0.3, 0, 8)).unwrap().residual;
    let r10 = fixed_point_residual(&space(0.3, 0.3, 0, 10)).unwrap().residual;
    assert!(r10 < r8);
}

#[test]
fn compressed_z_n_matches_direct_composition() {
    let (q, lambda) = (0.35, 0.4);
    let sp = space(q, lambda, 1, 6);
    for (n, window) in [(1, 2), (1, 4), (2, 2)] {
        let z = z_n_operator(&sp, n, window).unwrap();
        let x = balanced_word(n);
        let direct = wick_right(x, q, lambda)
            .mul(&wick(x, q, DEFAULT_WICK_CAP).unwrap())
            .scale(re((1.0 - q).powi(2 * n as i32)));
        for id in sp.basis().blocks_up_to(window) {
            for &word in &sp.basis().block(id).words {
                let v = FockVector::word(sp.basis(), word).unwrap();
                let a = z.apply(&v);
                let b = direct.apply(&sp, &v).truncated(sp.basis(), window);
                assert!(a.sub(&b).max_abs() < 1e-12 * b.max_abs().max(1.0), "n={n} window={window} word={word}");
            }
        }
    }
    assert!(matches!(z_n_operator(&sp, 2, 3), Err(Error::Truncation(_))));
}

fn wick_right(x: Word, q: f64, lambda: f64) -> OpExpr {
    qfock::ops::wick_right(x, q, lambda, DEFAULT_WICK_CAP).unwrap()
}

#[test]
fn z_n_vacuum_entry_tends_to_d_inf_squared() {
    let (q, lambda) = (0.3, 0.3);
    let sp = space(q, lambda, 0, 10);
    let omega = FockVector::vacuum(sp.basis());
    let mut prev = f64::INFINITY;
    for n in 1..=5 {
        let z = z_n_operator(&sp, n, 0).unwrap();
        let gap = (sp.inner(&omega, &z.apply(&omega)).re - d_inf(q).powi(2)).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-2 * d_inf(q).powi(2));
}

#[test]
fn rank_one_trend() {
    let sp = space(0.3, 0.3, 0, 10);
    let report = rank_one_diagnostics(&sp, &[1, 2, 3, 4], 2).unwrap();
    let ratios: Vec<f64> = report.rows.iter().map(|r| r.summary["sigma2_over_sigma1"]).collect();
    let cosines: Vec<f64> = report.rows.iter().map(|r| r.summary["cosine"]).collect();
    assert!(ratios.windows(2).all(|p| p[1] < p[0]), "{ratios:?}");
    assert!(cosines.windows(2).all(|p| p[1] >= p[0] - 1e-12), "{cosines:?}");
    assert!(cosines[3] > 0.999);
    assert!(report.verdict.monotone);
}

#[test]
fn comp_examples() {
    let (q, lambda) = (0.3, 0.3);
    let sp = space(q, lambda, 0, 11);
    let d2 = d_inf(q).powi(2);
    let zero = CompIndex { a: 0, b: 0, alpha: 0, beta: 0 };
    let shifted = CompIndex { a: 1, ..zero };

    let base = comp_limit(&sp, zero, Word::EMPTY, Word::EMPTY, 5).unwrap();
    assert!((base.rows[0].limit - d2).abs() < 1e-15);
    assert!(base.monotone_from(2));

    let dirac = comp_limit(&sp, shifted, Word::EMPTY, Word::EMPTY, 5).unwrap();
    for row in &dirac.rows {
        assert_eq!(row.limit, 0.0);
        assert_eq!(row.value, 0.0);
        assert_eq!(row.summary["forced_zero"], 1.0);
    }

    let bar = comp_limit(&sp, shifted, w("Ebar"), Word::EMPTY, 5).unwrap();
    assert!((bar.rows[0].limit - d2 * lambda.sqrt() / (1.0 - q)).abs() < 1e-15);
    assert!(bar.monotone_from(2));
    assert!(bar.verdict.final_gap < 0.1 * bar.rows[0].limit);
}

#[test]
fn comp_closed_form_dirac_condition() {
    let (q, lambda) = (0.4, 0.3);
    let idx = CompIndex { a: 2, b: 1, alpha: 0, beta: 1 };
    let x = comp_closed_form(q, lambda, idx, w("Ebar"), w("e")).unwrap();
    let expected = d_inf(q).powi(2) * lambda.powf(0.5) / (1.0 - q).powi(3);
    assert!((x - expected).abs() < 1e-15);
    assert_eq!(comp_closed_form(q, lambda, idx, w("e"), w("e")).unwrap(), 0.0);
    assert_eq!(comp_closed_form(q, lambda, idx, w("Ebar"), w("Ebar")).unwrap(), 0.0);
    assert_eq!(comp_closed_form(q, lambda, idx, w("Ebar"), Word::EMPTY).unwrap(), 0.0);
}

#[test]
fn decay_of_annihilated_balanced_words() {
    let sp = space(0.0, 0.3, 1, 8);
    let r = lim_decay(&sp, 0, 0, Word::EMPTY, 4).unwrap();
    for row in &r.rows[1..] {
        assert_eq!(row.value, 0.0);
        assert_eq!(row.summary["b"], 0.0);
    }
    let sp = space(0.5, 0.3, 1, 8);
    for psi in [Word::EMPTY, w("Aux1")] {
        let r = lim_decay(&sp, 0, 0, psi, 3).unwrap();
        let a: Vec<f64> = r.rows.iter().map(|x| x.value).collect();
        assert!(a[1] > 0.0);
        for p in a[1..].windows(2) {
            assert!(p[1] < 0.75 * p[0], "{a:?}");
        }
        assert!(r.monotone_from(1));
    }
}

#[test]
fn centralizer_examples() {
    assert!(centralizer_word(w("Ebare")));
    assert!(centralizer_word(Word::EMPTY));
    assert!(centralizer_word(w("Aux1eAux2Ebar")));
    assert!(!centralizer_word(w("e")));
    assert!(!centralizer_word(w("EbarEbareAux1")));
}

#[test]
fn vacuum_moments() {
    for q in [-0.5, 0.0, 0.3] {
        let sp = space(q, 0.3, 1, 5);
        let r = moment_check(&sp, 5).unwrap();
        assert_eq!(r.rows.len(), 10);
        for row in &r.rows {
            assert!(row.gap < 1e-8, "q={q} j={}", row.n);
        }
        assert!((r.row(2).unwrap().value - 1.0).abs() < 1e-12);
        assert!((r.row(4).unwrap().value - (2.0 + q)).abs() < 1e-12);
        assert_eq!(r.row(3).unwrap().value, 0.0);
    }
    assert!(matches!(moment_check(&space(0.3, 0.3, 0, 5), 2), Err(Error::Parameter(_))));
}

#[test]
fn wick_coefficients_match_the_expansion() {
    for q in [-0.7, -0.2, 0.0, 0.4, 0.8] {
        let cq = bound_constants(q, DEFAULT_TOL).unwrap().c_q.value;
        for n in 0..=4 {
            let coefs = wick_coefficients(n, q, 8).unwrap();
            let expr = wick(balanced_word(n), q, DEFAULT_WICK_CAP).unwrap();
            for k in 0..=n {
                for l in 0..=n {
                    let mut factors = vec![Elem::create(EBar).on(Side::Left); k];
                    factors.extend(vec![Elem::create(E).on(Side::Left); l]);
                    factors.extend(vec![Elem::annihilate(E).on(Side::Left); n - k]);
                    factors.extend(vec![Elem::annihilate(EBar).on(Side::Left); n - l]);
                    let extracted = expr.coefficient(&factors).re;
                    assert!((extracted - coefs.get(k, l)).abs() < 1e-12, "q={q} n={n} k={k} l={l}");
                    assert!(coefs.get(k, l).abs() <= cq * cq * q.abs().powi(((n - k) * l) as i32) + 1e-15);
                }
            }
        }
    }
}

#[test]
fn scans_respect_bounds() {
    let sp = space(0.5, 0.3, 0, 10);
    for kind in [ScanKind::CreationPowers, ScanKind::WenPowers] {
        let r = boundedness_scan(&sp, kind, 5).unwrap();
        assert!(r.verdict.within_bounds, "{kind}");
    }
    let r = boundedness_scan(&sp, ScanKind::WeewPowers, 4).unwrap();
    assert!(r.verdict.within_bounds);
    let sp = space(-0.5, 0.3, 0, 8);
    let r = boundedness_scan(&sp, ScanKind::CreationPowers, 8).unwrap();
    assert!(r.verdict.within_bounds);
    let r = boundedness_scan(&sp, ScanKind::MixedWord, 3).unwrap();
    assert!(r.verdict.within_bounds);
    assert!(matches!(boundedness_scan(&sp, ScanKind::WeewPowers, 5), Err(Error::Truncation(_))));
}

#[test]
fn weew_bound_needs_both_endpoint_terms() {
    // at q = 0 the norm exceeds 1/(1 - sqrt(lambda)) but not twice that
    let lambda: f64 = 0.05;
    let r = boundedness_scan(&space(0.0, lambda, 0, 12), ScanKind::WeewPowers, 6).unwrap();
    assert!(r.verdict.within_bounds);
    let top = r.rows.iter().map(|row| row.value).fold(0.0, f64::max);
    assert!(top * (1.0 - lambda.sqrt()) > 1.5, "{top}");
}

#[test]
fn scan_kind_names() {
    for kind in ScanKind::ALL {
        assert_eq!(kind.name().parse::<ScanKind>().unwrap(), kind);
    }
    assert!(matches!("sideways".parse::<ScanKind>(), Err(Error::UnknownSelector(_))));
}

#[test]
fn reports_round_trip() {
    let sp = space(0.3, 0.3, 1, 5);
    let a = moment_check(&sp, 2).unwrap();
    let b = lim_decay(&sp, 0, 0, Word::EMPTY, 2).unwrap();
    let back: ConvergenceReport = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
    assert_eq!(back, b);
    let csv = reports_to_csv(&[a.clone(), b.clone()]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "report,q,lambda,depth,n,value,limit,gap,bound,b");
    assert_eq!(lines.count(), a.rows.len() + b.rows.len());
    // 17 significant digits round-trip
    let row = csv.lines().nth(1).unwrap();
    let value: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
    assert_eq!(value, a.rows[0].value);
}
