//! `S_n = (1-q)^n lambda^(n/2) c(e)*^n W(e^n)`, its norm limit
//! `S_inf = sum_k c_k (1-q)^k lambda^(k/2) c(e)*^k T c(ebar)*^k` and the
//! invertibility certificate for `S_inf`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tseq::{t_bounds, t_limit, t_n_normal};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, Letter, ModelParams};
use crate::ops::{c_star, min_singular, wen_operator, FockOperator, OpExpr};
use crate::qcomb::{bound_constants, d_family, q_binomial, DEFAULT_TOL};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Composed `S_n`: the annihilation power applied after `W(e^n)`.
pub fn s_n_composed(q: f64, lambda: f64, n: usize) -> Result<OpExpr> {
    let scale = (1.0 - q).powi(n as i32) * lambda.powf(n as f64 / 2.0);
    Ok(c_star(Letter::E)
        .pow(n)
        .mul(&wen_operator(n, q)?)
        .scale(re(scale))
        .with_label(format!("S_{n}")))
}

/// The composed `S_n` materialized on its safe levels `<= N - n`.
pub fn s_n_operator(space: &FockSpace, n: usize) -> Result<FockOperator> {
    if n > space.depth() {
        return Err(Error::Truncation(format!("S_{n} needs level {n}, depth is {}", space.depth())));
    }
    let expr = s_n_composed(space.q(), space.lambda(), n)?;
    Ok(FockOperator::materialize(space, &expr, space.depth() - n))
}

/// `S_n = sum_k binom(n, k)_q (1-q)^k lambda^(k/2) c(e)*^k T_(n-k) c(ebar)*^k`
/// with normal-ordered `T_(n-k)`; never climbs above the source level.
pub fn s_n_normal(q: f64, lambda: f64, n: usize, depth: usize) -> Result<OpExpr> {
    let mut out = OpExpr::zero();
    for k in 0..=n.min(depth / 2) {
        let coef = q_binomial(n as u32, k as u32, q)? * (1.0 - q).powi(k as i32) * lambda.powf(k as f64 / 2.0);
        let t = t_n_normal(q, lambda, n - k, depth)?;
        let term = c_star(Letter::E).pow(k).mul(&t).mul(&c_star(Letter::EBar).pow(k));
        out = out.add(&term.scale(re(coef)));
    }
    Ok(out.with_label(format!("S_{n} normal ordered")))
}

/// Analytic bound on `sum_(k > terms) ||k-th term of S_inf||`.
pub fn s_tail_bound(q: f64, lambda: f64, terms: usize) -> Result<f64> {
    let b = bound_constants(q, DEFAULT_TOL)?;
    let cq = b.c_q.value;
    let geometric = lambda.powf((terms + 1) as f64 / 2.0) / (1.0 - lambda.sqrt());
    Ok(if q >= 0.0 {
        cq * geometric
    } else {
        cq * cq * b.d_q * (1.0 - q) * geometric
    })
}

/// `S_inf` truncated after `terms + 1` summands.
#[derive(Debug, Clone)]
pub struct SInfinity {
    pub expr: OpExpr,
    pub terms: usize,
    /// Bound on the norm of the omitted summands on the full Fock space.
    /// Summands with `2k > N` vanish on the truncated space, so with
    /// `terms = N/2` the expression is exact there.
    pub tail_bound: f64,
}

pub fn s_infinity_expr(q: f64, lambda: f64, terms: usize, depth: usize) -> Result<OpExpr> {
    let fam = d_family(q, terms, DEFAULT_TOL)?;
    let t = t_limit(q, lambda, depth)?;
    let mut out = OpExpr::zero();
    for k in 0..=terms {
        let coef = fam.c[k] * (1.0 - q).powi(k as i32) * lambda.powf(k as f64 / 2.0);
        let term = c_star(Letter::E).pow(k).mul(&t).mul(&c_star(Letter::EBar).pow(k));
        out = out.add(&term.scale(re(coef)));
    }
    Ok(out.with_label(format!("S_inf, {terms} terms")))
}

/// `S_inf` with `terms <= N/2` summands beyond the first.
pub fn s_infinity(space: &FockSpace, terms: usize) -> Result<SInfinity> {
    if 2 * terms > space.depth() {
        return Err(Error::Budget(format!(
            "S_inf with {terms} terms needs depth >= {}, have {}",
            2 * terms,
            space.depth()
        )));
    }
    Ok(SInfinity {
        expr: s_infinity_expr(space.q(), space.lambda(), terms, space.depth())?,
        terms,
        tail_bound: s_tail_bound(space.q(), space.lambda(), terms)?,
    })
}

/// Smallest singular value of `S_inf` on one truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedMinSingular {
    pub depth: usize,
    pub terms: usize,
    pub min_singular: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityCertificate {
    pub q: f64,
    pub lambda: f64,
    pub threshold: f64,
    pub c_q: f64,
    pub d_inf: f64,
    pub d_q: f64,
    pub t_inv_norm_bound: f64,
    pub v_norm_bound: f64,
    pub product: f64,
    /// `product < 1`; equivalent to `lambda < threshold`.
    pub analytic_verdict: bool,
    pub below_threshold: bool,
    /// `(1 - product) * inf spec(T)` when positive: a lower bound for the
    /// smallest singular value of `S_inf`, hence of every truncation.
    pub certified_lower_bound: f64,
    /// `q = 0` is outside the theorem; the `q > 0` formulas are evaluated.
    pub q_zero: bool,
    pub numeric: Vec<TruncatedMinSingular>,
}

/// `(1 + C_q/d_inf)^-2` for `q >= 0`, `(1 + (C_q (1-q))^2 D(q)/d_inf)^-2` for `q < 0`.
pub fn invertibility_threshold(q: f64) -> Result<f64> {
    let b = bound_constants(q, DEFAULT_TOL)?;
    let d_inf = d_family(q, 0, DEFAULT_TOL)?.d_inf.value;
    let cq = b.c_q.value;
    let x = if q >= 0.0 {
        cq / d_inf
    } else {
        (cq * (1.0 - q)).powi(2) * b.d_q / d_inf
    };
    Ok((1.0 + x).powi(-2))
}

/// The analytic certificate at `(q, lambda)` plus the smallest singular value
/// of `S_inf` on each truncation depth (no auxiliary letters; `S_inf` only
/// involves `e` and `ebar`).
pub fn invertibility_certificate(q: f64, lambda: f64, truncations: &[usize]) -> Result<InvertibilityCertificate> {
    let b = bound_constants(q, DEFAULT_TOL)?;
    let d_inf = d_family(q, 0, DEFAULT_TOL)?.d_inf.value;
    let cq = b.c_q.value;
    let s = lambda.sqrt();
    let (t_inv_norm_bound, v_norm_bound) = if q >= 0.0 {
        (1.0 / d_inf, cq * s / (1.0 - s))
    } else {
        ((1.0 - q) / d_inf, cq * cq * b.d_q * (1.0 - q) * s / (1.0 - s))
    };
    let product = t_inv_norm_bound * v_norm_bound;
    let threshold = invertibility_threshold(q)?;
    let (t_lower, _) = t_bounds(q)?;
    let mut numeric = Vec::with_capacity(truncations.len());
    for &depth in truncations {
        let space = FockSpace::new(ModelParams::new(q, lambda, 0, depth)?)?;
        let s_inf = s_infinity(&space, depth / 2)?;
        let op = FockOperator::full(&space, &s_inf.expr);
        numeric.push(TruncatedMinSingular {
            depth,
            terms: s_inf.terms,
            min_singular: min_singular(&space, &op, depth)?,
            tail_bound: s_inf.tail_bound,
        });
    }
    Ok(InvertibilityCertificate {
        q,
        lambda,
        threshold,
        c_q: cq,
        d_inf,
        d_q: b.d_q,
        t_inv_norm_bound,
        v_norm_bound,
        product,
        analytic_verdict: product < 1.0,
        below_threshold: lambda < threshold,
        certified_lower_bound: ((1.0 - product) * t_lower).max(0.0),
        q_zero: q == 0.0,
        numeric,
    })
}

impl InvertibilityCertificate {
    pub const CSV_HEADER: &'static str = "q,lambda,depth,threshold,c_q,d_inf,d_q,t_inv_norm_bound,v_norm_bound,product,analytic_verdict,below_threshold,certified_lower_bound,q_zero,terms,min_singular,tail_bound";

    /// One CSV row per truncation depth, without header.
    pub fn csv_rows(&self) -> String {
        use super::report::fmt17;
        let mut out = String::new();
        for t in &self.numeric {
            let fields = [
                fmt17(self.q),
                fmt17(self.lambda),
                t.depth.to_string(),
                fmt17(self.threshold),
                fmt17(self.c_q),
                fmt17(self.d_inf),
                fmt17(self.d_q),
                fmt17(self.t_inv_norm_bound),
                fmt17(self.v_norm_bound),
                fmt17(self.product),
                self.analytic_verdict.to_string(),
                self.below_threshold.to_string(),
                fmt17(self.certified_lower_bound),
                self.q_zero.to_string(),
                t.terms.to_string(),
                fmt17(t.min_singular),
                fmt17(t.tail_bound),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}
