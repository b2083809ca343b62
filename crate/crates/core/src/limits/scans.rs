//! Decoupled limits of balanced-word pairings, boundedness scans, decay of
//! annihilated balanced words, the centralizer predicate and vacuum moments.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{ConvergenceReport, ReportRow};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector, Letter, Word};
use crate::ops::{c, c_star, op_norm, wen_operator, wick, FockMap, FockOperator, OneParticleVector, OpExpr, Side};
use crate::qcomb::{bound_constants, d_family, pair_partition_moment, q_binomial, DEFAULT_TOL, MAX_PAIRING_SIZE};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn power(l: Letter, n: usize) -> Word {
    Word::power(l, n)
}

fn join(parts: &[Word]) -> Result<Word> {
    parts.iter().try_fold(Word::EMPTY, |acc, &w| {
        acc.concat(w)
            .ok_or_else(|| Error::Truncation(format!("word {acc}{w} is too long")))
    })
}

fn need_level(space: &FockSpace, level: usize, what: &str) -> Result<()> {
    if level > space.depth() {
        Err(Error::Truncation(format!("{what} needs level {level}, depth is {}", space.depth())))
    } else {
        Ok(())
    }
}

/// Exponents of `<eta ebar^(n+b) e^(n+beta), ebar^(n+a) e^(n+alpha) chi>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompIndex {
    pub a: usize,
    pub b: usize,
    pub alpha: usize,
    pub beta: usize,
}

/// The closed-form limit of `(1-q)^(2n) <eta ebar^(n+b) e^(n+beta), ebar^(n+a) e^(n+alpha) chi>`:
/// nonzero only for `eta = ebar^j`, `chi = e^i`, `a = b + j` and
/// `alpha + i = beta`, where it is `d_inf^2 lambda^((a-beta)/2) (1-q)^-(a+beta)`.
pub fn comp_closed_form(q: f64, lambda: f64, idx: CompIndex, eta: Word, chi: Word) -> Result<f64> {
    let (j, i) = (eta.len(), chi.len());
    let dirac = eta == power(Letter::EBar, j) && chi == power(Letter::E, i) && idx.a == idx.b + j && idx.alpha + i == idx.beta;
    if !dirac {
        return Ok(0.0);
    }
    let d_inf = d_family(q, 0, DEFAULT_TOL)?.d_inf.value;
    Ok(d_inf * d_inf * lambda.powf((idx.a as f64 - idx.beta as f64) / 2.0) * (1.0 - q).powi(-((idx.a + idx.beta) as i32)))
}

/// Finite-n pairings for `n = 1..=n_max` against [`comp_closed_form`].
/// Summary `forced_zero` is 1 when the two words have different letter
/// multisets, so the pairing vanishes exactly.
pub fn comp_limit(
    space: &FockSpace,
    idx: CompIndex,
    eta: Word,
    chi: Word,
    n_max: usize,
) -> Result<ConvergenceReport> {
    let (q, lambda) = (space.q(), space.lambda());
    let limit = comp_closed_form(q, lambda, idx, eta, chi)?;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let left = join(&[eta, power(Letter::EBar, n + idx.b), power(Letter::E, n + idx.beta)])?;
        let right = join(&[power(Letter::EBar, n + idx.a), power(Letter::E, n + idx.alpha), chi])?;
        need_level(space, left.len().max(right.len()), "comp_limit")?;
        let value = (1.0 - q).powi(2 * n as i32) * space.word_inner(left, right)?;
        let forced = left.signature() != right.signature();
        rows.push(ReportRow::new(n, value, limit).with("forced_zero", if forced { 1.0 } else { 0.0 }));
    }
    Ok(ConvergenceReport::new(
        space,
        "comp_limit",
        format!(
            "(1-q)^(2n) <{eta} ebar^(n+{}) e^(n+{}), ebar^(n+{}) e^(n+{}) {chi}> -> {limit:e}",
            idx.b, idx.beta, idx.a, idx.alpha
        ),
        rows,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// `(1-q)^(n/2) lambda^(n/4) ||c(e)^n||`.
    CreationPowers,
    /// `(1-q)^(n/2) lambda^(n/4) ||W(e^n)||`.
    WenPowers,
    /// `(1-q)^n ||W(ebar^n e^n)||`.
    WeewPowers,
    /// `max ||xi_1 ... xi_n xi^m|| / (C_q^(n/2) sqrt([m]_q!))` over unit vectors.
    MixedWord,
}

impl ScanKind {
    pub const ALL: [ScanKind; 4] = [
        ScanKind::CreationPowers,
        ScanKind::WenPowers,
        ScanKind::WeewPowers,
        ScanKind::MixedWord,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanKind::CreationPowers => "creation_powers",
            ScanKind::WenPowers => "wen_powers",
            ScanKind::WeewPowers => "weew_powers",
            ScanKind::MixedWord => "mixed_word",
        }
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ScanKind> {
        ScanKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownSelector(format!("scan kind {s:?}")))
    }
}

/// `sup ||(1-q)^(n/2) lambda^(n/4) c(e)^n||`: 1 for `q >= 0`, `sqrt(C_q D(q))` for `q < 0`.
pub fn creation_power_bound(q: f64) -> Result<f64> {
    let b = bound_constants(q, DEFAULT_TOL)?;
    Ok(if q >= 0.0 { 1.0 } else { (b.c_q.value * b.d_q).sqrt() })
}

/// Operator norm of `scale * expr` on its safe levels.
fn scaled_norm(space: &FockSpace, expr: &OpExpr, scale: f64) -> Result<f64> {
    let level = space.depth().checked_sub(expr.peak()).ok_or_else(|| {
        Error::Truncation(format!("{} climbs {} levels, depth is {}", expr.label(), expr.peak(), space.depth()))
    })?;
    let op = FockOperator::materialize(space, expr, level);
    Ok(scale * op_norm(space, &op, level)?)
}

/// Unit vectors for the mixed-word scan: each letter rescaled to unit
/// `U`-norm, plus two superpositions of `e` and `ebar`.
fn unit_vectors(space: &FockSpace) -> Vec<OneParticleVector> {
    let lambda = space.lambda();
    let unit = |l: Letter| re(l.u_norm_sq(lambda).powf(-0.5));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<OneParticleVector> = space
        .params()
        .alphabet()
        .into_iter()
        .map(|l| OneParticleVector::new(vec![(l, unit(l))]))
        .collect();
    out.push(OneParticleVector::new(vec![
        (Letter::E, unit(Letter::E) * h),
        (Letter::EBar, unit(Letter::EBar) * h),
    ]));
    out.push(OneParticleVector::new(vec![
        (Letter::E, unit(Letter::E) * h),
        (Letter::EBar, unit(Letter::EBar) * Complex64::new(0.0, -h)),
    ]));
    out
}

fn mixed_word_ratio(space: &FockSpace, n: usize, m_max: usize, cq: f64) -> Result<f64> {
    let q = space.q();
    let units = unit_vectors(space);
    let omega = FockVector::vacuum(space.basis());
    let mut worst: f64 = 0.0;
    for m in 0..=m_max {
        for t in 0..units.len() {
            // deterministic tuples: xi_j cycles through the list with stride 2
            let prefix: Vec<&OneParticleVector> = (0..n).map(|j| &units[(t + 2 * j) % units.len()]).collect();
            let tail = &units[(t + n) % units.len()];
            let mut v = omega.clone();
            let create_tail = OpExpr::creation(tail, Side::Left);
            for _ in 0..m {
                v = create_tail.apply(space, &v);
            }
            for xi in prefix.iter().rev() {
                v = OpExpr::creation(xi, Side::Left).apply(space, &v);
            }
            let fact = crate::qcomb::q_factorial(m as u32, q)?;
            worst = worst.max(space.norm(&v) / (cq.powf(n as f64 / 2.0) * fact.sqrt()));
        }
    }
    Ok(worst)
}

/// Scaled norms for `n = 1..=n_max` (`0..=n_max` for the mixed word) on safe
/// levels, each with its analytic bound.
///
/// Bounds: creation powers as in [`creation_power_bound`]; `W(e^n)` by
/// `b^2 sum_k |binom(n, k)_q| lambda^(k/2)` with `b` the creation-power bound;
/// `W(ebar^n e^n)` by `2 C_q^6 / ((1-|q|)(1-sqrt(lambda)))`; mixed words by 1.
///
/// The factor 2: `sum_(k=j..n) |q|^((n-k)(k-j))` has two unit terms, `k = j`
/// and `k = n`, so it is at most `2/(1-|q|)`. At `q = 0` the norm reaches
/// about `1.6/(1-sqrt(lambda))`.
pub fn boundedness_scan(space: &FockSpace, kind: ScanKind, n_max: usize) -> Result<ConvergenceReport> {
    let (q, lambda, depth) = (space.q(), space.lambda(), space.depth());
    let cq = bound_constants(q, DEFAULT_TOL)?.c_q.value;
    let b1 = creation_power_bound(q)?;
    let mut rows = Vec::new();
    match kind {
        ScanKind::CreationPowers | ScanKind::WenPowers => {
            need_level(space, n_max, kind.name())?;
            for n in 1..=n_max {
                let scale = (1.0 - q).powf(n as f64 / 2.0) * lambda.powf(n as f64 / 4.0);
                let (expr, bound) = if kind == ScanKind::CreationPowers {
                    (c(Letter::E).pow(n), b1)
                } else {
                    let mut sum = 0.0;
                    for k in 0..=n {
                        sum += q_binomial(n as u32, k as u32, q)?.abs() * lambda.powf(k as f64 / 2.0);
                    }
                    (wen_operator(n, q)?, b1 * b1 * sum)
                };
                rows.push(ReportRow::new(n, scaled_norm(space, &expr, scale)?, 0.0).with_bound(bound));
            }
        }
        ScanKind::WeewPowers => {
            need_level(space, 2 * n_max, kind.name())?;
            let bound = 2.0 * cq.powi(6) / ((1.0 - q.abs()) * (1.0 - lambda.sqrt()));
            for n in 1..=n_max {
                let x = Word::power(Letter::EBar, n).concat(Word::power(Letter::E, n)).expect("short word");
                let value = scaled_norm(space, &wick(x, q, crate::ops::DEFAULT_WICK_CAP)?, (1.0 - q).powi(n as i32))?;
                rows.push(ReportRow::new(n, value, 0.0).with_bound(bound));
            }
        }
        ScanKind::MixedWord => {
            need_level(space, n_max, kind.name())?;
            for n in 0..=n_max {
                let m_max = 8.min(depth - n);
                rows.push(ReportRow::new(n, mixed_word_ratio(space, n, m_max, cq)?, 0.0).with_bound(1.0));
            }
        }
    }
    Ok(ConvergenceReport::new(space, kind.name(), "bounded uniformly in n", rows))
}

/// `a_n = (1-q)^n ||c(e)* (ebar^(n+n1) e^(n+n2) psi)||` (the value) and
/// `b_n = (1-q)^(n/2) lambda^(-n/4) ||c(e)* (ebar^(n+n1) psi)||` (summary `b`)
/// for `n = 0..=n_max`; both tend to 0.
pub fn lim_decay(space: &FockSpace, n1: usize, n2: usize, psi: Word, n_max: usize) -> Result<ConvergenceReport> {
    let (q, lambda) = (space.q(), space.lambda());
    let basis = space.basis();
    let star = c_star(Letter::E);
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let w1 = join(&[power(Letter::EBar, n + n1), power(Letter::E, n + n2), psi])?;
        let w2 = join(&[power(Letter::EBar, n + n1), psi])?;
        need_level(space, w1.len(), "lim_decay")?;
        let a = (1.0 - q).powi(n as i32) * space.norm(&star.apply(space, &FockVector::word(basis, w1)?));
        let b = (1.0 - q).powf(n as f64 / 2.0)
            * lambda.powf(-(n as f64) / 4.0)
            * space.norm(&star.apply(space, &FockVector::word(basis, w2)?));
        rows.push(ReportRow::new(n, a, 0.0).with("b", b));
    }
    Ok(ConvergenceReport::new(
        space,
        "lim_decay",
        format!("c(e)* of ebar^(n+{n1}) e^(n+{n2}) {psi} -> 0"),
        rows,
    ))
}

/// Whether the letters' `A`-eigenvalues multiply to 1: as many `e` as `ebar`.
pub fn centralizer_word(word: Word) -> bool {
    word.signature().charge() == 0
}

/// `<Omega, s(aux_1)^j Omega>` for `j = 1..=2 k_max` against the pairing
/// counts (0 for odd `j`). Needs an auxiliary letter and `k_max <= N`.
pub fn moment_check(space: &FockSpace, k_max: usize) -> Result<ConvergenceReport> {
    let aux = Letter::Aux(1);
    if !space.has_letter(aux) {
        return Err(Error::Parameter("moment_check needs an auxiliary letter".into()));
    }
    if 2 * k_max > MAX_PAIRING_SIZE {
        return Err(Error::CapExceeded {
            what: "pair-partition moments",
            requested: 2 * k_max,
            cap: MAX_PAIRING_SIZE,
        });
    }
    // a path of 2k steps back to the vacuum never climbs above level k
    need_level(space, k_max, "moment_check")?;
    let s = OpExpr::field(&OneParticleVector::letter(aux), Side::Left);
    let omega = FockVector::vacuum(space.basis());
    let mut v = omega.clone();
    let mut rows = Vec::with_capacity(2 * k_max);
    for j in 1..=2 * k_max {
        v = s.apply(space, &v);
        let value = space.inner(&omega, &v).re;
        let limit = if j % 2 == 1 { 0.0 } else { pair_partition_moment(j, space.q())? };
        rows.push(ReportRow::new(j, value, limit));
    }
    Ok(ConvergenceReport::new(
        space,
        "moment_check",
        "<Omega, s(aux)^j Omega> = sum over pairings of q^crossings",
        rows,
    ))
}
