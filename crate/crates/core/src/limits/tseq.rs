//! `T_n = (1-q)^n lambda^(n/2) c(e)*^n c(e)^n` and its norm limit `T`.
//!
//! Normal ordering `c(e)*^n c(e)^n` with the commutation relation gives
//! `T_n = sum_r t_(n,r) c(e)^r c(e)*^r` with
//! `t_(n,r) = (1-q)^r lambda^(r/2) q^(r^2) d_n^2 / (d_r^2 d_(n-r))`, and
//! letting `n -> infinity`, `T = d_inf sum_r (1-q)^r lambda^(r/2) q^(r^2) / d_r^2 c(e)^r c(e)*^r`.
//! The normal-ordered forms never climb above their source level, so they are
//! exact on the whole truncated space, while the composed `T_n` is exact only
//! on levels `<= N - n`.

use num_complex::Complex64;

use super::report::{ConvergenceReport, ReportRow};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector, Letter, Word};
use crate::ops::{c, c_star, spectrum, FockMap, FockOperator, OpExpr};
use crate::qcomb::{d_family, d_infinity, DEFAULT_TOL};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn truncation(what: &str, needed: usize, space: &FockSpace) -> Error {
    Error::Truncation(format!("{what} needs level {needed}, depth is {}", space.depth()))
}

/// `(1-q)^n lambda^(n/2) c(e)*^n c(e)^n` as a composed expression.
pub fn t_n_composed(q: f64, lambda: f64, n: usize) -> OpExpr {
    let scale = (1.0 - q).powi(n as i32) * lambda.powf(n as f64 / 2.0);
    c_star(Letter::E)
        .pow(n)
        .mul(&c(Letter::E).pow(n))
        .scale(re(scale))
        .with_label(format!("T_{n}"))
}

/// The composed `T_n` materialized on its safe levels `<= N - n`.
pub fn t_n_operator(space: &FockSpace, n: usize) -> Result<FockOperator> {
    if n > space.depth() {
        return Err(truncation("T_n", n, space));
    }
    let expr = t_n_composed(space.q(), space.lambda(), n);
    Ok(FockOperator::materialize(space, &expr, space.depth() - n))
}

/// Normal-ordered `T_n`, terms `r <= min(n, depth)`.
pub fn t_n_normal(q: f64, lambda: f64, n: usize, depth: usize) -> Result<OpExpr> {
    let fam = d_family(q, n, DEFAULT_TOL)?;
    let mut out = OpExpr::zero();
    for r in 0..=n.min(depth) {
        let t = (1.0 - q).powi(r as i32) * lambda.powf(r as f64 / 2.0) * q.powi((r * r) as i32) * fam.d[n] * fam.d[n]
            / (fam.d[r] * fam.d[r] * fam.d[n - r]);
        out = out.add(&c(Letter::E).pow(r).mul(&c_star(Letter::E).pow(r)).scale(re(t)));
    }
    Ok(out.with_label(format!("T_{n} normal ordered")))
}

/// The limit `T`, exact on a space of the given depth (higher terms vanish).
pub fn t_limit(q: f64, lambda: f64, depth: usize) -> Result<OpExpr> {
    let fam = d_family(q, depth, DEFAULT_TOL)?;
    let mut out = OpExpr::zero();
    for r in 0..=depth {
        let t = fam.d_inf.value * (1.0 - q).powi(r as i32) * lambda.powf(r as f64 / 2.0) * q.powi((r * r) as i32)
            / (fam.d[r] * fam.d[r]);
        out = out.add(&c(Letter::E).pow(r).mul(&c_star(Letter::E).pow(r)).scale(re(t)));
    }
    Ok(out.with_label("T"))
}

/// `prod_(j=1..n) (1 - q^(k+j))`, the eigenvalue of `T_n` on `e^k`.
pub fn t_eigenvalue(q: f64, n: usize, k: usize) -> f64 {
    (1..=n).map(|j| 1.0 - q.powi((k + j) as i32)).product()
}

/// Coefficient of `e^k` in `map(e^k)`; `e^k` spans a one-dimensional block.
pub fn eigenvalue_on_power(space: &FockSpace, map: &dyn FockMap, k: usize) -> Result<f64> {
    let basis = space.basis();
    let v = FockVector::word(basis, Word::power(Letter::E, k))?;
    Ok(map.apply(space, &v).coeff(basis, Word::power(Letter::E, k)).re)
}

/// Eigenvalues of `T_n` on `e^k` for `n = 1..=n_max` against `d_inf/d_k`.
///
/// Row `n`: `value` is the eigenvalue on `e^0` (normal-ordered form) and
/// `limit` is `d_inf`. The summary keeps the worst errors over `k <= k_max`:
/// `exact_err` of the composed `T_n` against the finite product (only where
/// `n + k <= N`), `normal_err` of the normal-ordered form, `limit_gap`
/// against `d_inf/d_k`, and `tail` = `sup_k |1 - prod_(j>n)(1 - q^(k+j))|`.
/// `t_limit_err` is the error of the limit `T` itself.
pub fn t_limit_check(space: &FockSpace, k_max: usize, n_max: usize) -> Result<ConvergenceReport> {
    let (q, lambda, depth) = (space.q(), space.lambda(), space.depth());
    if k_max >= depth {
        return Err(truncation("t_limit_check", k_max + 1, space));
    }
    let fam = d_family(q, depth + 64, DEFAULT_TOL)?;
    let d_inf = fam.d_inf.value;
    let t = t_limit(q, lambda, depth)?;
    let mut t_limit_err: f64 = 0.0;
    for k in 0..=k_max {
        t_limit_err = t_limit_err.max((eigenvalue_on_power(space, &t, k)? - d_inf / fam.d[k]).abs());
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let composed = t_n_composed(q, lambda, n);
        let normal = t_n_normal(q, lambda, n, depth)?;
        let (mut exact_err, mut normal_err, mut limit_gap, mut tail) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let mut value = 0.0;
        for k in 0..=k_max {
            let exact = t_eigenvalue(q, n, k);
            if n + k <= depth {
                exact_err = exact_err.max((eigenvalue_on_power(space, &composed, k)? - exact).abs());
            }
            let b = eigenvalue_on_power(space, &normal, k)?;
            if k == 0 {
                value = b;
            }
            normal_err = normal_err.max((b - exact).abs());
            limit_gap = limit_gap.max((b - d_inf / fam.d[k]).abs());
            tail = tail.max((1.0 - d_inf / (fam.d[k] * exact)).abs());
        }
        rows.push(
            ReportRow::new(n, value, d_inf)
                .with("exact_err", exact_err)
                .with("normal_err", normal_err)
                .with("limit_gap", limit_gap)
                .with("tail", tail)
                .with("t_limit_err", t_limit_err),
        );
    }
    Ok(ConvergenceReport::new(
        space,
        "t_limit",
        format!("T_n e^k -> (d_inf/d_k) e^k, k <= {k_max}"),
        rows,
    ))
}

/// Spectrum of `T` on the truncated space against the analytic bounds
/// `[d_inf, 1]` for `q >= 0` and `[d_inf/(1-q), 1-q]` for `q < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TSpectrum {
    pub min: f64,
    pub max: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl TSpectrum {
    pub fn within(&self, slack: f64) -> bool {
        self.min >= self.lower_bound * (1.0 - slack) && self.max <= self.upper_bound * (1.0 + slack)
    }
}

pub fn t_bounds(q: f64) -> Result<(f64, f64)> {
    let d = d_infinity(q, DEFAULT_TOL)?.value;
    Ok(if q >= 0.0 { (d, 1.0) } else { (d / (1.0 - q), 1.0 - q) })
}

pub fn t_spectrum(space: &FockSpace) -> Result<TSpectrum> {
    let t = FockOperator::full(space, &t_limit(space.q(), space.lambda(), space.depth())?);
    let (mut min, mut max) = (f64::INFINITY, 0.0f64);
    for comp in spectrum(space, &t, space.depth())? {
        // T is positive, so singular values are eigenvalues
        min = min.min(comp.min_singular());
        max = max.max(comp.singular_values.first().copied().unwrap_or(0.0));
    }
    let (lower_bound, upper_bound) = t_bounds(space.q())?;
    Ok(TSpectrum {
        min,
        max,
        lower_bound,
        upper_bound,
    })
}
