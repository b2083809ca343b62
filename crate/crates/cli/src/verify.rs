//! The verification suite: every invariant of the library evaluated over the
//! configured grid, one [`Check`] per invariant and grid point.

use std::fmt;

use qfock::fock::{gram_brute_force, FockSpace, FockVector, Letter, ModelParams, Word};
use qfock::limits::*;
use qfock::ops::{
    annihilation, creation, flip, modular_ops, op_norm, right_annihilation, right_creation, wen_operator, wick,
    wick_by_subsets, wick_right, Elem, FockMap, FockOperator, OneParticleVector, OpExpr, Side,
};
use qfock::qcomb::{
    bound_constants, crossing_sums, d_family, pair_partition_moment, q_binomial, q_factorial, q_int,
    wick_coefficients, DEFAULT_TOL,
};
use qfock::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{with_pool, write_file, CliError, RunConfig};

use Letter::{Aux, EBar, E};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// `module/invariant`.
    pub name: String,
    pub q: Option<f64>,
    pub lambda: Option<f64>,
    pub depth: Option<usize>,
    pub passed: bool,
    /// The error measure; absent when the check could not run.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if let Some(q) = self.q {
            write!(f, " q={q}")?;
        }
        if let Some(l) = self.lambda {
            write!(f, " lambda={l}")?;
        }
        if let Some(n) = self.depth {
            write!(f, " N={n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub config: RunConfig,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
    pub checks: Vec<Check>,
}

/// Collects checks for one grid point (or none).
struct Sink<'a> {
    cfg: &'a RunConfig,
    q: Option<f64>,
    lambda: Option<f64>,
    depth: Option<usize>,
    checks: Vec<Check>,
}

/// `(measured, tolerance, detail)`; passes when `measured <= tolerance`.
type Measure = qfock::Result<(f64, f64, String)>;

impl<'a> Sink<'a> {
    fn new(cfg: &'a RunConfig, q: Option<f64>, lambda: Option<f64>, depth: Option<usize>) -> Self {
        Sink {
            cfg,
            q,
            lambda,
            depth,
            checks: Vec::new(),
        }
    }

    fn run(&mut self, name: &str, f: impl FnOnce() -> Measure) {
        let check = match f() {
            Ok((measured, tolerance, detail)) => Check {
                name: name.into(),
                q: self.q,
                lambda: self.lambda,
                depth: self.depth,
                passed: measured <= tolerance,
                measured: measured.is_finite().then_some(measured),
                tolerance,
                detail,
            },
            Err(e) => Check {
                name: name.into(),
                q: self.q,
                lambda: self.lambda,
                depth: self.depth,
                passed: false,
                measured: None,
                tolerance: 0.0,
                detail: e.to_string(),
            },
        };
        self.checks.push(check);
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}

fn space(q: f64, lambda: f64, aux: u8, depth: usize) -> qfock::Result<FockSpace> {
    FockSpace::new(ModelParams::new(q, lambda, aux, depth)?)
}

/// A fixed, irregular vector on levels `<= level`.
fn probe_vector(sp: &FockSpace, level: usize, seed: f64) -> qfock::Result<FockVector> {
    let basis = sp.basis();
    let terms: Vec<_> = basis
        .blocks_up_to(level)
        .flat_map(|id| basis.block(id).words.clone())
        .enumerate()
        .map(|(i, w)| {
            let t = seed + i as f64;
            (w, Complex64::new((1.7 * t).sin(), (0.9 * t + 0.3).cos()))
        })
        .collect();
    FockVector::from_terms(basis, terms)
}

fn unit_letters() -> Vec<OneParticleVector> {
    vec![
        OneParticleVector::letter(E),
        OneParticleVector::letter(EBar),
        OneParticleVector::letter(Aux(1)),
        OneParticleVector::new(vec![(E, Complex64::new(0.6, 0.2)), (EBar, re(-0.4)), (Aux(1), Complex64::new(0.1, 0.7))]),
    ]
}

const OPS_DEPTH: usize = 6;

fn global_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut s = Sink::new(cfg, None, None, None);
    s.run("limits/frozen_thresholds", || {
        let a = (invertibility_threshold(0.1)? - 0.19536490356513794).abs();
        let b = (invertibility_threshold(0.5)? - 0.005925713267144613).abs();
        Ok((a.max(b), 1e-12, "thresholds at q = 0.1 and 0.5".into()))
    });
    s.run("limits/centralizer_examples", || {
        let cases = [("Ebare", true), ("", true), ("e", false), ("EbarEbareAux1", false), ("Aux1eAux2Ebar", true)];
        let mut wrong = 0;
        for (w, expected) in cases {
            if centralizer_word(w.parse()?) != expected {
                wrong += 1;
            }
        }
        Ok((wrong as f64, 0.0, "misclassified words".into()))
    });
    s.checks
}

fn per_q_checks(cfg: &RunConfig, q: f64) -> Vec<Check> {
    let tol = cfg.tolerances;
    let mut s = Sink::new(cfg, Some(q), None, None);
    s.run("qcomb/pascal", || {
        let mut worst: f64 = 0.0;
        for n in 1..=20u32 {
            for k in 1..n {
                let lhs = q_binomial(n, k, q)?;
                let rhs = q_binomial(n - 1, k - 1, q)? + q.powi(k as i32) * q_binomial(n - 1, k, q)?;
                worst = worst.max(rel(rhs, lhs));
            }
        }
        Ok((worst, tol.identity, "n <= 20".into()))
    });
    s.run("qcomb/factorial_from_d", || {
        let fam = d_family(q, 30, DEFAULT_TOL)?;
        let mut worst: f64 = 0.0;
        for n in 0..=30 {
            worst = worst.max(rel(fam.d[n] * (1.0 - q).powi(-(n as i32)), q_factorial(n as u32, q)?));
        }
        Ok((worst, tol.identity, "[n]! = d_n (1-q)^-n, n <= 30".into()))
    });
    s.run("qcomb/binomial_limit", || {
        let n = if q.abs() <= 0.5 { 60 } else { 300 };
        let fam = d_family(q, 5, DEFAULT_TOL)?;
        let mut worst: f64 = 0.0;
        for k in 0..=5 {
            worst = worst.max((q_binomial(n, k as u32, q)? - fam.c[k]).abs());
        }
        Ok((worst, tol.identity, format!("binom(n, k) -> 1/d_k at n = {n}, k <= 5")))
    });
    s.run("qcomb/d_bounds", || {
        let fam = d_family(q, 200, DEFAULT_TOL)?;
        let b = bound_constants(q, DEFAULT_TOL)?;
        let mut worst: f64 = 0.0;
        for &d in &fam.d {
            worst = worst.max(d / b.d_q - 1.0).max(1.0 / (d * b.c_q.value) - 1.0);
        }
        Ok((worst, tol.bound_slack, "d_n <= D(q) and 1/d_n <= C_q, n <= 200".into()))
    });
    s.run("qcomb/crossing_sums", || {
        let mut worst: f64 = 0.0;
        for n in 0..=cfg.caps.enumeration {
            let sums = crossing_sums(n, q, cfg.caps.enumeration)?;
            for (k, x) in sums.iter().enumerate() {
                worst = worst.max(rel(*x, q_binomial(n as u32, k as u32, q)?));
            }
        }
        Ok((worst, tol.identity, "subset crossing sums = q-binomials".into()))
    });
    s.run("qcomb/wick_coefficient_bound", || {
        let cq = bound_constants(q, DEFAULT_TOL)?.c_q.value;
        let mut worst: f64 = 0.0;
        for n in 0..=6.min(cfg.caps.enumeration) {
            let m = wick_coefficients(n, q, cfg.caps.enumeration)?;
            for k in 0..=n {
                for l in 0..=n {
                    let bound = cq * cq * q.abs().powi(((n - k) * l) as i32);
                    if bound > 0.0 {
                        worst = worst.max(m.get(k, l).abs() / bound - 1.0);
                    } else if m.get(k, l) != 0.0 {
                        worst = f64::INFINITY;
                    }
                }
            }
        }
        Ok((worst.max(0.0), tol.bound_slack, "|q_kl| <= C_q^2 |q|^((n-k)l), n <= 6".into()))
    });
    s.run("qcomb/pairing_moments", || {
        let got = [pair_partition_moment(2, q)?, pair_partition_moment(4, q)?, pair_partition_moment(6, q)?];
        let want = [1.0, 2.0 + q, 5.0 + 6.0 * q + 3.0 * q * q + q * q * q];
        let worst = got.iter().zip(want).map(|(a, b)| rel(*a, b)).fold(0.0, f64::max);
        Ok((worst, tol.identity, "2k = 2, 4, 6".into()))
    });
    s.run("fock/gram_paths", || {
        let sp = space(q, 0.5, 1, 5)?;
        let mut worst: f64 = 0.0;
        for (id, block) in sp.basis().blocks().iter().enumerate() {
            let brute = gram_brute_force(&block.words, q, 5)?;
            let scale = brute.amax().max(1.0);
            worst = worst.max((&brute - &*sp.q_gram(id)).amax() / scale);
        }
        Ok((worst, tol.identity, "recursion vs permutation sum, levels <= 5".into()))
    });
    s.run("fock/block_orthogonality", || {
        let sp = space(q, 0.5, 1, 4)?;
        let basis = sp.basis();
        let mut worst: f64 = 0.0;
        for level in 1..=4 {
            let words: Vec<Word> = basis
                .level_blocks(level)
                .iter()
                .flat_map(|&id| basis.block(id).words.clone())
                .collect();
            let g = gram_brute_force(&words, q, 4)?;
            for i in 0..words.len() {
                for j in 0..words.len() {
                    if words[i].signature() != words[j].signature() {
                        worst = worst.max(g[(i, j)].abs());
                    }
                }
            }
        }
        Ok((worst, 0.0, "different multisets are orthogonal".into()))
    });
    s.run("fock/orthonormal_frames", || {
        let sp = space(q, 0.3, 0, cfg.depth)?;
        let mut worst: f64 = 0.0;
        for id in 0..sp.basis().num_blocks() {
            let g = sp.gram_block(id);
            let t = sp.orthonormalize(id)?;
            let cond = sp.factor(id)?.cond_estimate;
            let m = t.transpose() * &g * &t;
            let mut err: f64 = 0.0;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    err = err.max((m[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
            // binary64 resolves T^T G T only to about 1e-16 cond(G)
            worst = worst.max(err / tol.identity.max(1e-16 * cond));
        }
        Ok((worst, 1.0, "T^T G T = I, error over its attainable tolerance".into()))
    });
    s.run("ops/wen_three_ways", || {
        let depth = cfg.depth.min(10);
        let sp = space(q, 0.3, 0, depth)?;
        let we = wick(Word::single(E), q, cfg.caps.wick)?;
        let mut worst: f64 = 0.0;
        for n in 0..=5.min(depth) {
            let level = depth - n;
            let closed = FockOperator::materialize(&sp, &wen_operator(n, q)?, level);
            let generic = FockOperator::materialize(&sp, &wick_by_subsets(Word::power(E, n), q, cfg.caps.wick)?, level);
            let power = FockOperator::materialize(&sp, &we.pow(n), level);
            worst = worst.max(closed.rel_diff(&sp, &generic, level)).max(closed.rel_diff(&sp, &power, level));
        }
        Ok((worst, tol.identity, format!("closed form, subset sum and W(e)^n, n <= 5, N = {depth}")))
    });
    s.run("limits/wick_coefficients", || {
        let mut worst: f64 = 0.0;
        for n in 0..=4 {
            let coefs = wick_coefficients(n, q, cfg.caps.enumeration)?;
            let expr = wick(balanced_word(n), q, cfg.caps.wick)?;
            for k in 0..=n {
                for l in 0..=n {
                    let mut factors = vec![Elem::create(EBar); k];
                    factors.extend(vec![Elem::create(E); l]);
                    factors.extend(vec![Elem::annihilate(E); n - k]);
                    factors.extend(vec![Elem::annihilate(EBar); n - l]);
                    worst = worst.max((expr.coefficient(&factors).re - coefs.get(k, l)).abs());
                }
            }
        }
        Ok((worst, tol.exact, "closed form vs W(ebar^n e^n) monomials, n <= 4".into()))
    });
    s.run("limits/moment_check", || {
        let sp = space(q, 0.5, 1, 5)?;
        let r = moment_check(&sp, 5)?;
        let worst = r.rows.iter().map(|row| row.gap).fold(0.0, f64::max);
        Ok((worst, tol.moment, "<Omega, s(aux)^j Omega>, j <= 10".into()))
    });
    s.run("ops/creation_norm", || {
        let sp = space(q, 0.3, 1, OPS_DEPTH)?;
        let ca = creation(&sp, &OneParticleVector::letter(Aux(1)));
        let mut worst: f64 = 0.0;
        let mut expected: f64 = 0.0;
        for level in 0..OPS_DEPTH {
            expected = expected.max(q_int(level as u32 + 1, q)?.sqrt());
            worst = worst.max(rel(op_norm(&sp, &ca, level)?, expected));
        }
        Ok((worst, tol.identity, "||c(aux)|| on levels <= n = max sqrt([m+1]_q)".into()))
    });
    s.checks
}

fn ops_checks(s: &mut Sink, sp: &FockSpace) {
    let tol = s.cfg.tolerances;
    let (q, lambda) = (sp.q(), sp.lambda());
    let top = OPS_DEPTH - 1;
    let cap = s.cfg.caps.wick;
    s.run("ops/commutation", || {
        let vs = unit_letters();
        let id = FockOperator::identity(sp).restricted(sp, top);
        let mut worst: f64 = 0.0;
        for v in &vs {
            for u in &vs {
                let expr = OpExpr::annihilation(v, Side::Left)
                    .mul(&OpExpr::creation(u, Side::Left))
                    .add(&OpExpr::creation(u, Side::Left).mul(&OpExpr::annihilation(v, Side::Left)).scale(re(-q)));
                let op = FockOperator::materialize(sp, &expr, top);
                let expected = id.combine(v.inner_u(u, lambda), &id, re(0.0));
                worst = worst.max(op.rel_diff(sp, &expected, top));
            }
        }
        Ok((worst, tol.identity, format!("c*(x) c(y) - q c(y) c*(x) = <x, y>, levels <= {top}")))
    });
    s.run("ops/split_adjoint", || {
        let basis = sp.basis();
        let star = OpExpr::elem(Elem::annihilate(E));
        let apply = |w: Word| -> qfock::Result<FockVector> { Ok(star.apply(sp, &FockVector::word(basis, w)?)) };
        let concat = |x: &FockVector, v: Word, left: bool| {
            FockVector::from_terms(
                basis,
                x.terms(basis).into_iter().map(|(u, c)| {
                    let joined = if left { u.concat(v) } else { v.concat(u) };
                    (joined.expect("short words"), c)
                }),
            )
        };
        let mut worst: f64 = 0.0;
        for id in basis.blocks_up_to(top) {
            for &word in &basis.block(id).words {
                for k in 0..=word.len() {
                    let (u, v) = word.split_at(k);
                    let lhs = apply(word)?;
                    let mut rhs = concat(&apply(u)?, v, true)?;
                    rhs.add_scaled(re(q.powi(k as i32)), &concat(&apply(v)?, u, false)?);
                    worst = worst.max(lhs.sub(&rhs).max_abs() / lhs.max_abs().max(1.0));
                }
            }
        }
        Ok((worst, tol.identity, "c*(uv) = c*(u) v + q^|u| u c*(v)".into()))
    });
    s.run("ops/annihilation_is_adjoint", || {
        let mut worst: f64 = 0.0;
        for v in unit_letters() {
            let adj = creation(sp, &v).q_adjoint(sp)?;
            worst = worst.max(adj.rel_diff(sp, &annihilation(sp, &v), top));
        }
        Ok((worst, tol.identity, "q-adjoint of c(x) is c*(x)".into()))
    });
    s.run("ops/right_flip", || {
        let j = flip(sp);
        let mut worst: f64 = 0.0;
        for v in unit_letters() {
            let conj = j.compose(&creation(sp, &v)).compose(&j);
            worst = worst.max(right_creation(sp, &v).rel_diff(sp, &conj, top));
            let conj = j.compose(&annihilation(sp, &v)).compose(&j);
            worst = worst.max(right_annihilation(sp, &v).rel_diff(sp, &conj, top));
        }
        Ok((worst, tol.exact, "right operators = flip conjugates".into()))
    });
    s.run("ops/wick_vacuum", || {
        let basis = sp.basis();
        let omega = FockVector::vacuum(basis);
        let mut worst: f64 = 0.0;
        for id in basis.blocks_up_to(4) {
            for &word in &basis.block(id).words {
                let target = FockVector::word(basis, word)?;
                for v in [
                    wick(word, q, cap)?.apply(sp, &omega),
                    wick_right(word, q, lambda, cap)?.apply(sp, &omega),
                ] {
                    worst = worst.max(v.sub(&target).max_abs());
                }
            }
        }
        Ok((worst, tol.exact, "W(w) Omega = W_r(w) Omega = w, levels <= 4".into()))
    });
    s.run("ops/wick_subset_sum", || {
        let mut worst: f64 = 0.0;
        for w in ["eEbare", "Aux1eAux1Ebar", "eeEbar", "EbarEbarAux1"] {
            let word: Word = w.parse()?;
            let level = OPS_DEPTH - word.len();
            let a = FockOperator::materialize(sp, &wick(word, q, cap)?, level);
            let b = FockOperator::materialize(sp, &wick_by_subsets(word, q, cap)?, level);
            worst = worst.max(a.rel_diff(sp, &b, level));
        }
        Ok((worst, tol.identity, "run-grouped Wick = subset sum".into()))
    });
    s.run("ops/left_right_commute", || {
        let mut worst: f64 = 0.0;
        for (a, b) in [("e", "Ebar"), ("Ebare", "eAux1"), ("Aux1", "EbarEbar")] {
            let left = wick(a.parse()?, q, cap)?;
            let right = wick_right(b.parse()?, q, lambda, cap)?;
            let (lr, rl) = (left.mul(&right), right.mul(&left));
            let level = OPS_DEPTH - lr.peak().max(rl.peak());
            let x = FockOperator::materialize(sp, &lr, level);
            let y = FockOperator::materialize(sp, &rl, level);
            worst = worst.max(x.rel_diff(sp, &y, level));
        }
        Ok((worst, tol.identity, "[W(a), W_r(b)] = 0".into()))
    });
    s.run("ops/modular", || {
        let m = modular_ops(sp);
        let half = qfock::ops::delta_power(sp, -0.5);
        let mut worst = m.j.rel_diff(sp, &m.s.compose(&half), OPS_DEPTH);
        worst = worst.max(m.j.compose(&m.j).rel_diff(sp, &FockOperator::identity(sp), OPS_DEPTH));
        let f = probe_vector(sp, 4, 0.0)?;
        let g = probe_vector(sp, 4, 5.0)?;
        let (a, b) = (sp.inner(&m.j.apply(&f), &m.j.apply(&g)), sp.inner(&g, &f));
        worst = worst.max((a - b).norm() / b.norm().max(1.0));
        Ok((worst, tol.identity, "J = S Delta^-1/2, J^2 = 1, <Jf, Jg> = <g, f>".into()))
    });
    s.run("fock/inner_hermitian", || {
        let f = probe_vector(sp, 4, 1.0)?;
        let g = probe_vector(sp, 4, 2.0)?;
        let (a, b) = (sp.inner(&f, &g), sp.inner(&g, &f).conj());
        let pos = sp.inner(&f, &f);
        let bad = if pos.re > 0.0 { 0.0 } else { 1.0 };
        Ok(((a - b).norm() / a.norm().max(1.0) + bad, tol.identity, "<f, g> = conj <g, f>, <f, f> > 0".into()))
    });
    s.run("fock/vector_json", || {
        let f = probe_vector(sp, 3, 3.0)?;
        let text = serde_json::to_string(&f.to_doc(sp.basis())).expect("vector serializes");
        let doc = serde_json::from_str(&text).map_err(|e| qfock::Error::Parse(e.to_string()))?;
        let back = FockVector::from_doc(sp.basis(), &doc)?;
        Ok((back.sub(&f).max_abs(), 0.0, "JSON round trip".into()))
    });
}

fn power_norm_check(s: &mut Sink, main: &FockSpace, aux: &FockSpace) {
    let tol = s.cfg.tolerances;
    let (q, lambda) = (main.q(), main.lambda());
    s.run("fock/power_norms", || {
        let mut worst: f64 = 0.0;
        for n in 0..=main.depth() {
            let fact = q_factorial(n as u32, q)?;
            let e = FockVector::word(main.basis(), Word::power(E, n))?;
            worst = worst.max(rel(main.norm(&e).powi(2), lambda.powf(-(n as f64) / 2.0) * fact));
            if n <= aux.depth() {
                let a = FockVector::word(aux.basis(), Word::power(Aux(1), n))?;
                worst = worst.max(rel(aux.norm(&a).powi(2), fact));
            }
        }
        Ok((worst, tol.identity, "||x^n||^2 = [n]_q! for unit x".into()))
    });
}

fn limits_checks(s: &mut Sink, sp: &FockSpace) {
    let cfg = s.cfg;
    let tol = cfg.tolerances;
    let (q, lambda, depth) = (sp.q(), sp.lambda(), sp.depth());
    let small = depth.min(8);
    let k_max = 4.min(depth - 1);
    let t_report = t_limit_check(sp, k_max, depth);
    s.run("limits/t_eigenvalues", || {
        let r = t_report.clone()?;
        let worst = r
            .rows
            .iter()
            .map(|row| row.summary["exact_err"].max(row.summary["normal_err"]).max(row.summary["t_limit_err"]))
            .fold(0.0, f64::max);
        Ok((worst, tol.exact, format!("T_n e^k = prod (1 - q^(k+j)) e^k, k <= {k_max}")))
    });
    s.run("limits/t_limit_tail", || {
        let r = t_report.clone()?;
        let mut worst: f64 = 0.0;
        for row in &r.rows {
            let top = (0..=k_max).map(|k| t_eigenvalue(q, row.n, k)).fold(0.0, f64::max);
            worst = worst.max(row.summary["limit_gap"] - top * row.summary["tail"]);
        }
        Ok((worst.max(0.0), tol.exact, "|T_n - T| on e^k within the product tail".into()))
    });
    s.run("limits/t_spectrum", || {
        let t = t_spectrum(sp)?;
        let worst = (t.lower_bound - t.min).max(t.max - t.upper_bound) / t.upper_bound;
        Ok((worst.max(0.0), tol.bound_slack, format!("spec(T) in [{:.6}, {:.6}]", t.lower_bound, t.upper_bound)))
    });
    s.run("limits/t_norm_convergence", || {
        let sp8 = space(q, lambda, 0, small)?;
        let t = t_limit(q, lambda, small)?;
        let mut gaps = Vec::new();
        for n in [1, 2, 4, 8, 16] {
            let d = t_n_normal(q, lambda, n, small)?.add(&t.scale(re(-1.0)));
            gaps.push(op_norm(&sp8, &FockOperator::full(&sp8, &d), small)?);
        }
        let rises = gaps.windows(2).filter(|p| p[1] >= p[0] && p[0] > 1e-14).count();
        Ok((rises as f64, 0.0, format!("||T_n - T|| at n = 1, 2, 4, 8, 16: {}", sci(&gaps))))
    });
    s.run("limits/s_n_normal_form", || {
        let sp8 = space(q, lambda, 0, small)?;
        let mut worst: f64 = 0.0;
        for n in 0..=3 {
            let composed = s_n_operator(&sp8, n)?;
            let normal = FockOperator::materialize(&sp8, &s_n_normal(q, lambda, n, small)?, small - n);
            worst = worst.max(composed.rel_diff(&sp8, &normal, small - n));
        }
        Ok((worst, tol.identity, "composed S_n = normal-ordered S_n on safe levels".into()))
    });
    s.run("limits/s_n_vacuum", || {
        let fam = d_family(q, depth, DEFAULT_TOL)?;
        let mut worst: f64 = 0.0;
        for n in 1..=depth / 2 {
            let en = FockVector::word(sp.basis(), Word::power(E, n))?;
            let v = wick(Word::power(EBar, n), q, depth)?
                .apply(sp, &en)
                .scaled(re(lambda.powf(n as f64 / 2.0) * (1.0 - q).powi(n as i32)));
            let expected = FockVector::from_terms(
                sp.basis(),
                (0..=n).map(|k| {
                    let x = (1.0 - q).powi(k as i32) * fam.d[n] * fam.d[n] / (fam.d[n - k] * fam.d[k] * fam.d[k])
                        * lambda.powf(k as f64 / 2.0);
                    (balanced_word(k), re(x))
                }),
            )?;
            worst = worst.max(v.sub(&expected).max_abs() / expected.max_abs());
        }
        Ok((worst, tol.identity, "S_n* Omega expansion".into()))
    });
    s.run("limits/s_inf_vacuum_is_xi", || {
        let sp8 = space(q, lambda, 0, small)?;
        let s_inf = FockOperator::full(&sp8, &s_infinity(&sp8, small / 2)?.expr);
        let v = s_inf.q_adjoint(&sp8)?.apply(&FockVector::vacuum(sp8.basis()));
        let xi = xi_vector(&sp8, small / 2)?;
        Ok((v.sub(&xi.vector).max_abs() / xi.vector.max_abs(), tol.identity, "S_inf* Omega = xi".into()))
    });
    s.run("limits/certificate", || {
        let c = invertibility_certificate(q, lambda, &[])?;
        let mut bad = (c.analytic_verdict != c.below_threshold) as u8 + (c.analytic_verdict != (c.product < 1.0)) as u8;
        let mut detail = format!("product {:.6}, threshold {:.6}", c.product, c.threshold);
        if c.analytic_verdict {
            // certified lower bound against the truncated S_inf
            let s_inf = s_infinity(sp, depth / 2)?;
            let m = qfock::ops::min_singular(sp, &FockOperator::full(sp, &s_inf.expr), depth)?;
            bad += (m < c.certified_lower_bound) as u8;
            detail += &format!(", min singular {m:.6} >= {:.6}", c.certified_lower_bound);
        }
        Ok((bad as f64, 0.0, detail))
    });
    s.run("limits/xi_norm", || {
        let xi = xi_vector(sp, cfg.terms_for(depth))?;
        let mut worst = rel(xi.norm_sq, xi.norm_sq_closed_form);
        if xi.norm_sq_full - xi.norm_sq_closed_form > xi.tail_bound * (1.0 + tol.bound_slack) + 1e-15 {
            worst = f64::INFINITY;
        }
        Ok((worst, tol.identity, format!("||xi_K||^2 = {:.12}", xi.norm_sq)))
    });
    s.run("limits/fixed_point", || {
        let r = fixed_point_residual(sp)?.residual;
        let r_small = fixed_point_residual(&space(q, lambda, 0, depth - 2)?)?.residual;
        // exact at q = 0 up to rounding
        let bad = r >= r_small && r > tol.identity;
        Ok((bad as u8 as f64, 0.0, format!("residual {r:.3e} at N, {r_small:.3e} at N - 2")))
    });
    s.run("limits/z_compression", || {
        let sp6 = space(q, lambda, 0, 6)?;
        let mut worst: f64 = 0.0;
        for (n, window) in [(1, 2), (1, 4), (2, 2)] {
            let z = z_n_operator(&sp6, n, window)?;
            let x = balanced_word(n);
            let direct = wick_right(x, q, lambda, cfg.caps.wick)?
                .mul(&wick(x, q, cfg.caps.wick)?)
                .scale(re((1.0 - q).powi(2 * n as i32)));
            for id in sp6.basis().blocks_up_to(window) {
                for &word in &sp6.basis().block(id).words {
                    let v = FockVector::word(sp6.basis(), word)?;
                    let b = direct.apply(&sp6, &v).truncated(sp6.basis(), window);
                    worst = worst.max(z.apply(&v).sub(&b).max_abs() / b.max_abs().max(1.0));
                }
            }
        }
        Ok((worst, tol.identity, "Gram-solve compression = direct composition".into()))
    });
    s.run("limits/rank_one", || {
        // sigma2/sigma1 oscillates at |q| = 0.8; the first-vs-last trend of
        // the sigma_1 gap and the cosine holds on the whole grid
        let n_max = (depth - 2) / 2;
        let r = rank_one_diagnostics(sp, &(1..=n_max).collect::<Vec<_>>(), 2)?;
        let (first, last) = (&r.rows[0], &r.rows[n_max - 1]);
        let (c0, c1) = (first.summary["cosine"], last.summary["cosine"]);
        let bad = (last.gap >= first.gap) as u8 + (c1 <= c0) as u8;
        Ok((
            bad as f64,
            0.0,
            format!(
                "n = 1 -> {n_max}: |sigma1 - ||P xi||^2| {:.3e} -> {:.3e}, cosine {c0:.4} -> {c1:.4}, sigma2/sigma1 {:.3e} -> {:.3e}",
                first.gap,
                last.gap,
                first.summary["sigma2_over_sigma1"],
                last.summary["sigma2_over_sigma1"]
            ),
        ))
    });
    s.run("limits/comp", || {
        let n_max = (depth - 1) / 2;
        let zero = CompIndex { a: 0, b: 0, alpha: 0, beta: 0 };
        let shifted = CompIndex { a: 1, ..zero };
        let tuples = [(zero, Word::EMPTY), (shifted, Word::EMPTY), (shifted, Word::single(EBar))];
        let mut bad = 0;
        for (idx, eta) in tuples {
            let r = comp_limit(sp, idx, eta, Word::EMPTY, n_max)?;
            let first = &r.rows[0];
            let last = r.rows.last().expect("rows");
            if first.summary["forced_zero"] == 1.0 {
                bad += r.rows.iter().filter(|row| row.value != 0.0).count();
            } else if last.gap >= first.gap && last.gap > tol.identity * last.limit.abs().max(1.0) {
                bad += 1;
            }
        }
        Ok((bad as f64, 0.0, format!("three index tuples, n <= {n_max}")))
    });
    s.run("limits/lim_decay", || {
        let n_max = (depth - 1) / 2;
        let r = lim_decay(sp, 0, 0, Word::EMPTY, n_max)?;
        let a: Vec<f64> = r.rows.iter().map(|row| row.value).collect();
        // for q < 0 the odd and even terms decay separately
        let rises = a[1..].windows(3).filter(|p| p[2] > p[0] * (1.0 + tol.bound_slack)).count();
        let zero_ok = q != 0.0 || a[1..].iter().all(|&x| x == 0.0);
        Ok((rises as f64 + (!zero_ok) as u8 as f64, 0.0, format!("a_n = {}", sci(&a))))
    });
    for kind in ScanKind::ALL {
        let name = format!("limits/scan_{}", kind.name());
        s.run(&name, || {
            let (scan_space, n_max) = match kind {
                ScanKind::CreationPowers | ScanKind::WenPowers => (sp.clone(), depth.min(10)),
                ScanKind::WeewPowers => (sp.clone(), depth / 2),
                ScanKind::MixedWord => (sp.clone(), 4.min(depth)),
            };
            let r = boundedness_scan(&scan_space, kind, n_max)?;
            let worst = r
                .rows
                .iter()
                .map(|row| row.value / row.bound.expect("scans carry bounds") - 1.0)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok((worst.max(0.0), tol.bound_slack, format!("n <= {n_max}, max value/bound - 1 = {worst:.3e}")))
        });
    }
}

fn per_point_checks(cfg: &RunConfig, q: f64, lambdas: &[f64]) -> Vec<Check> {
    let mut out = Vec::new();
    let spaces = (|| -> qfock::Result<(FockSpace, FockSpace)> {
        Ok((space(q, lambdas[0], 0, cfg.depth)?, space(q, lambdas[0], 1, OPS_DEPTH)?))
    })();
    for &lambda in lambdas {
        let mut s = Sink::new(cfg, Some(q), Some(lambda), Some(cfg.depth));
        let pair = spaces
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|(m, a)| Ok((m.with_lambda(lambda)?, a.with_lambda(lambda)?)));
        match pair {
            Ok((main, aux)) => {
                power_norm_check(&mut s, &main, &aux);
                ops_checks(&mut s, &aux);
                limits_checks(&mut s, &main);
            }
            Err(e) => s.run("fock/space", || Err(e)),
        }
        out.extend(s.checks);
    }
    out
}

/// Every check in deterministic order: global, per `q`, then per grid point.
pub fn run_checks(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    config.validate()?;
    let mut checks = global_checks(config);
    let per_q: Vec<Vec<Check>> = with_pool(config.jobs, || {
        config
            .q
            .par_iter()
            .map(|&q| {
                let mut v = per_q_checks(config, q);
                if !config.lambda.is_empty() {
                    v.extend(per_point_checks(config, q, &config.lambda));
                }
                v
            })
            .collect()
    })?;
    // per-q checks first, then the grid points, both in grid order
    let mut points = Vec::new();
    for v in per_q {
        let (a, b): (Vec<Check>, Vec<Check>) = v.into_iter().partition(|c| c.lambda.is_none());
        checks.extend(a);
        points.extend(b);
    }
    checks.extend(points);
    Ok(checks)
}

pub const VERIFY_SCHEMA: &str = "qfock-verify/1";

/// Runs the suite, writes `verify.json` into the output directory and
/// fails with the first failing check.
pub fn cmd_verify(config: &RunConfig) -> Result<VerifyReport, CliError> {
    let checks = run_checks(config)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let report = VerifyReport {
        schema: VERIFY_SCHEMA.into(),
        config: config.clone(),
        total: checks.len(),
        passed: checks.len() - failed,
        failed,
        first_failure: checks.iter().find(|c| !c.passed).map(|c| c.to_string()),
        checks,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(&config.out.join("verify.json"), &text)?;
    Ok(report)
}
