//! The vector `xi = d_inf sum_k c_k^2 (1-q)^k lambda^(k/2) ebar^k e^k`, its
//! fixed-point identity, and `z_n = (1-q)^(2n) W_r(ebar^n e^n) W(ebar^n e^n)`
//! compressed to low levels, where it approaches the rank-one `|xi><xi|`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::report::{ConvergenceReport, ReportRow};
use crate::error::{Error, Result};
use crate::fock::{BlockId, FockSpace, FockVector, Letter, Word};
use crate::ops::{frame_matrix, frame_vector, wick, wick_right, FockMap, FockOperator, OpExpr, DEFAULT_WICK_CAP};
use crate::qcomb::{d_family, DEFAULT_TOL};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `ebar^k e^k`.
pub fn balanced_word(k: usize) -> Word {
    Word::power(Letter::EBar, k)
        .concat(Word::power(Letter::E, k))
        .expect("balanced words fit the packed word")
}

/// `d_inf c_k^2 (1-q)^k lambda^(k/2)` for `k = 0..=k_max`.
pub fn xi_coefficients(q: f64, lambda: f64, k_max: usize) -> Result<Vec<f64>> {
    let fam = d_family(q, k_max, DEFAULT_TOL)?;
    Ok((0..=k_max)
        .map(|k| fam.d_inf.value * fam.c[k] * fam.c[k] * (1.0 - q).powi(k as i32) * lambda.powf(k as f64 / 2.0))
        .collect())
}

/// `d_inf^2 sum_(k <= k_max) lambda^k / d_k^2`; `None` sums to convergence.
pub fn xi_norm_sq(q: f64, lambda: f64, k_max: Option<usize>) -> Result<f64> {
    // lambda^k / d_k^2 <= C_q^2 lambda^k; 4000 terms reach 1e-17 for lambda <= 0.99
    let k_max = k_max.unwrap_or(4000);
    let fam = d_family(q, k_max, DEFAULT_TOL)?;
    let mut sum = 0.0;
    let mut lk = 1.0;
    for k in 0..=k_max {
        let term = lk / (fam.d[k] * fam.d[k]);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        lk *= lambda;
    }
    Ok(fam.d_inf.value * fam.d_inf.value * sum)
}

#[derive(Debug, Clone)]
pub struct XiVector {
    pub terms: usize,
    pub vector: FockVector,
    /// `||xi_K||^2` from the Gram matrices.
    pub norm_sq: f64,
    pub norm_sq_closed_form: f64,
    /// `||xi||^2` of the untruncated vector.
    pub norm_sq_full: f64,
    /// `||xi - xi_K||^2 <= d_inf^2 C_q^2 lambda^(K+1) / (1 - lambda)`.
    pub tail_bound: f64,
}

/// `xi` truncated after `k <= terms`; needs `2 terms <= N`.
pub fn xi_vector(space: &FockSpace, terms: usize) -> Result<XiVector> {
    if 2 * terms > space.depth() {
        return Err(Error::Budget(format!(
            "xi with {terms} terms needs depth >= {}, have {}",
            2 * terms,
            space.depth()
        )));
    }
    let (q, lambda) = (space.q(), space.lambda());
    let coefs = xi_coefficients(q, lambda, terms)?;
    let vector = FockVector::from_terms(
        space.basis(),
        coefs.iter().enumerate().map(|(k, &x)| (balanced_word(k), re(x))),
    )?;
    let fam = d_family(q, 0, DEFAULT_TOL)?;
    let cq = crate::qcomb::bound_constants(q, DEFAULT_TOL)?.c_q.value;
    Ok(XiVector {
        terms,
        norm_sq: space.norm(&vector).powi(2),
        vector,
        norm_sq_closed_form: xi_norm_sq(q, lambda, Some(terms))?,
        norm_sq_full: xi_norm_sq(q, lambda, None)?,
        tail_bound: (fam.d_inf.value * cq).powi(2) * lambda.powi(terms as i32 + 1) / (1.0 - lambda),
    })
}

/// `W_xi = d_inf sum_(k <= terms) c_k^2 (1-q)^k lambda^(k/2) W(ebar^k e^k)`.
pub fn wick_xi(q: f64, lambda: f64, terms: usize) -> Result<OpExpr> {
    let coefs = xi_coefficients(q, lambda, terms)?;
    let mut out = OpExpr::zero();
    for (k, &x) in coefs.iter().enumerate() {
        out = out.add(&wick(balanced_word(k), q, DEFAULT_WICK_CAP)?.scale(re(x)));
    }
    Ok(out.with_label(format!("W_xi, {terms} terms")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    /// Summands kept in `W_xi`.
    pub terms: usize,
    /// `||xi - lambda^(1/2) (1-q) W(ebar) W_xi e|| / ||xi||`, with `xi` kept
    /// to the full depth.
    pub residual: f64,
}

/// Residual of `xi = lambda^(1/2) (1-q) W(ebar) W_xi e`, with as many
/// summands as fit: `W(ebar^k e^k) e` reaches level `2k + 1`.
pub fn fixed_point_residual(space: &FockSpace) -> Result<FixedPoint> {
    let (q, lambda, depth) = (space.q(), space.lambda(), space.depth());
    if depth < 2 {
        return Err(Error::Truncation("the fixed-point identity needs depth >= 2".into()));
    }
    let terms = (depth - 2) / 2;
    let xi = xi_vector(space, depth / 2)?;
    let rhs_op = wick(Word::single(Letter::EBar), q, DEFAULT_WICK_CAP)?.mul(&wick_xi(q, lambda, terms)?);
    let e = FockVector::word(space.basis(), Word::single(Letter::E))?;
    let rhs = rhs_op.apply(space, &e).scaled(re(lambda.sqrt() * (1.0 - q)));
    Ok(FixedPoint {
        terms,
        residual: space.norm(&xi.vector.sub(&rhs)) / space.norm(&xi.vector),
    })
}

/// Blocks of levels `<= window`.
fn window_blocks(space: &FockSpace, window: usize) -> Vec<BlockId> {
    space.basis().blocks_up_to(window).collect()
}

/// `P z_n P` for the projection `P` onto levels `<= window`, in word
/// coordinates. Computed from `<Psi, z_n Phi> = (1-q)^(2n) <W_r(x) Psi, W(x) Phi>`
/// with `x = ebar^n e^n`, which only needs levels `<= 2n + window`.
pub fn z_n_operator(space: &FockSpace, n: usize, window: usize) -> Result<FockOperator> {
    let (q, lambda, depth) = (space.q(), space.lambda(), space.depth());
    if 2 * n + window > depth {
        return Err(Error::Truncation(format!(
            "z_{n} on levels <= {window} needs depth {}, have {depth}",
            2 * n + window
        )));
    }
    let x = balanced_word(n);
    let left = FockOperator::materialize(space, &wick(x, q, DEFAULT_WICK_CAP)?, window);
    let right = FockOperator::materialize(space, &wick_right(x, q, lambda, DEFAULT_WICK_CAP)?, window);
    let scale = (1.0 - q).powi(2 * n as i32);
    // Sum_t Br(t <- d)^H G_t Bl(t <- s), grouped by (s, d).
    let mut inner: BTreeMap<(BlockId, BlockId), DMatrix<Complex64>> = BTreeMap::new();
    let mut grams: BTreeMap<BlockId, DMatrix<Complex64>> = BTreeMap::new();
    for (&(s, t), bl) in left.blocks() {
        let g = grams
            .entry(t)
            .or_insert_with(|| space.gram_block(t).map(re))
            .clone();
        let gbl = &g * bl;
        for (&(d, t2), br) in right.blocks() {
            if t2 != t {
                continue;
            }
            let m = br.adjoint() * &gbl;
            match inner.get_mut(&(s, d)) {
                Some(acc) => *acc += m,
                None => {
                    inner.insert((s, d), m);
                }
            }
        }
    }
    let mut blocks = BTreeMap::new();
    for ((s, d), m) in inner {
        let gd = space.gram_block(d).map(re);
        let chol = nalgebra::Cholesky::new(gd).ok_or_else(|| Error::Factorization {
            block: format!("{d}"),
            reason: "Gram block not positive definite".into(),
        })?;
        blocks.insert((s, d), chol.solve(&(m * re(scale))));
    }
    Ok(FockOperator::from_blocks(blocks, window, 0, 0, false, format!("P z_{n} P, levels <= {window}")))
}

/// Singular data of `P z_n P` in orthonormal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneSummary {
    pub sigma1: f64,
    pub sigma2: f64,
    /// `|<u_1, P xi>| / ||P xi||` for the top left singular vector `u_1`.
    pub cosine: f64,
}

pub fn rank_one_summary(space: &FockSpace, z: &FockOperator, window: usize) -> Result<RankOneSummary> {
    let ids = window_blocks(space, window);
    let m = frame_matrix(space, z, &ids, &ids)?;
    let xi = xi_vector(space, window / 2)?;
    let coords = frame_vector(space, &xi.vector)?;
    let mut x = Vec::with_capacity(m.nrows());
    for &id in &ids {
        match coords.get(&id) {
            Some(v) => x.extend(v.iter().copied()),
            None => x.extend(std::iter::repeat_n(Complex64::default(), space.basis().block(id).dim())),
        }
    }
    let x = DVector::from_vec(x);
    let svd = m.svd(true, false);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let u = svd.u.as_ref().expect("requested left singular vectors");
    let top = u.column(order[0]);
    Ok(RankOneSummary {
        sigma1: svd.singular_values[order[0]],
        sigma2: order.get(1).map_or(0.0, |&i| svd.singular_values[i]),
        cosine: top.dotc(&x).norm() / x.norm(),
    })
}

/// `z_n` diagnostics on levels `<= window` for each `n`, against the
/// rank-one limit `P |xi><xi| P`, whose only nonzero singular value is
/// `||P xi||^2 = d_inf^2 sum_(k <= window/2) lambda^k / d_k^2`.
///
/// `value` is `sigma_1`; summary: `sigma2_over_sigma1`, `cosine` and
/// `ratio_to_full_xi` = `sigma_1 / ||xi||^2`.
pub fn rank_one_diagnostics(space: &FockSpace, n_list: &[usize], window: usize) -> Result<ConvergenceReport> {
    let limit = xi_norm_sq(space.q(), space.lambda(), Some(window / 2))?;
    let full = xi_norm_sq(space.q(), space.lambda(), None)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let z = z_n_operator(space, n, window)?;
        let s = rank_one_summary(space, &z, window)?;
        rows.push(
            ReportRow::new(n, s.sigma1, limit)
                .with("sigma2_over_sigma1", s.sigma2 / s.sigma1)
                .with("cosine", s.cosine)
                .with("ratio_to_full_xi", s.sigma1 / full),
        );
    }
    Ok(ConvergenceReport::new(
        space,
        "rank_one",
        format!("sigma_1(P z_n P) -> ||P xi||^2, levels <= {window}"),
        rows,
    ))
}
