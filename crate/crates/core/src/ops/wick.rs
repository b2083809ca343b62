//! Wick operators `W(w)`, the unique operators in the algebra generated by
//! the left fields with `W(w) Omega = w`, and their right counterparts.
//!
//! For `w = l_1 ... l_n` the expansion is
//! `sum_J q^c(J, J^c) c(l_j1)...c(l_ji) c(bar l_k1)*...c(bar l_k(n-i))*`
//! over subsets `J` with complement `K`. Grouping the word into runs of equal
//! letters turns the sum over subsets of one run into a q-binomial, and two
//! runs `r < s` contribute `q^((n_r - k_r) k_s)` crossings, which gives
//! [`wick`] with `prod (n_r + 1)` monomials instead of `2^n`.
//! [`wick_by_subsets`] keeps the literal subset sum.

use num_complex::Complex64;

use super::elem::{Elem, Side};
use super::expr::{Monomial, OpExpr};
use crate::error::{Error, Result};
use crate::fock::{Letter, Word};
use crate::qcomb::{crossings, q_binomial, SubsetPattern};

/// Default cap: at most `2^8` monomials, and words of length at most 8 for
/// the subset enumeration.
pub const DEFAULT_WICK_CAP: usize = 8;

/// Conjugation used by left Wick operators: `e <-> ebar`, aux fixed.
fn bar(l: Letter) -> (f64, Letter) {
    (1.0, l.bar())
}

/// Conjugation used by right Wick operators: `e -> lambda^-1 ebar`,
/// `ebar -> lambda e`, aux fixed.
fn right_bar(lambda: f64) -> impl Fn(Letter) -> (f64, Letter) {
    move |l| match l {
        Letter::E => (1.0 / lambda, Letter::EBar),
        Letter::EBar => (lambda, Letter::E),
        aux => (1.0, aux),
    }
}

fn expand_runs(
    runs: &[(Letter, usize)],
    conj: &dyn Fn(Letter) -> (f64, Letter),
    q: f64,
    side: Side,
) -> Result<Vec<Monomial>> {
    let mut out = Vec::new();
    let mut ks = vec![0usize; runs.len()];
    loop {
        let mut coef = 1.0;
        let mut crossing = 0usize;
        for (r, &(_, n)) in runs.iter().enumerate() {
            coef *= q_binomial(n as u32, ks[r] as u32, q)?;
            for s in r + 1..runs.len() {
                crossing += (n - ks[r]) * ks[s];
            }
        }
        coef *= q.powi(crossing as i32);
        let mut factors = Vec::new();
        for (r, &(l, _)) in runs.iter().enumerate() {
            factors.extend(std::iter::repeat_n(Elem::create(l).on(side), ks[r]));
        }
        for (r, &(l, n)) in runs.iter().enumerate() {
            let (scale, target) = conj(l);
            coef *= scale.powi((n - ks[r]) as i32);
            factors.extend(std::iter::repeat_n(Elem::annihilate(target).on(side), n - ks[r]));
        }
        out.push(Monomial {
            coef: Complex64::new(coef, 0.0),
            factors,
        });
        // odometer over 0 <= k_r <= n_r
        let mut r = 0;
        loop {
            if r == runs.len() {
                return Ok(out);
            }
            if ks[r] < runs[r].1 {
                ks[r] += 1;
                break;
            }
            ks[r] = 0;
            r += 1;
        }
    }
}

fn monomial_count(runs: &[(Letter, usize)]) -> usize {
    runs.iter().map(|&(_, n)| n + 1).product()
}

fn check_monomials(runs: &[(Letter, usize)], cap: usize) -> Result<()> {
    let count = monomial_count(runs);
    if cap >= usize::BITS as usize || count <= 1usize << cap {
        Ok(())
    } else {
        Err(Error::CapExceeded {
            what: "Wick expansion monomials",
            requested: count,
            cap: 1 << cap,
        })
    }
}

/// `W(w)` by the run-length grouped expansion.
pub fn wick(word: Word, q: f64, cap: usize) -> Result<OpExpr> {
    let runs = word.runs();
    check_monomials(&runs, cap)?;
    let terms = expand_runs(&runs, &bar, q, Side::Left)?;
    Ok(OpExpr::from_terms(terms, format!("W({word})")))
}

/// `W_r(w)`, obtained from the left expansion of the reversed word with the
/// right conjugation and every operator moved to the right side.
pub fn wick_right(word: Word, q: f64, lambda: f64, cap: usize) -> Result<OpExpr> {
    let runs = word.reversed().runs();
    check_monomials(&runs, cap)?;
    let terms = expand_runs(&runs, &right_bar(lambda), q, Side::Right)?;
    Ok(OpExpr::from_terms(terms, format!("W_r({word})")))
}

/// `W(w)` as the literal sum over all `2^n` subsets, for words of length
/// at most `cap`.
pub fn wick_by_subsets(word: Word, q: f64, cap: usize) -> Result<OpExpr> {
    let n = word.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "Wick subset enumeration",
            requested: n,
            cap,
        });
    }
    let letters: Vec<Letter> = word.letters().collect();
    let mut terms = Vec::with_capacity(1 << n);
    for mask in 0..1u64 << n {
        let pattern = SubsetPattern::from_mask(n, mask);
        let mut factors: Vec<Elem> = pattern
            .members()
            .iter()
            .map(|&j| Elem::create(letters[j - 1]))
            .collect();
        factors.extend(pattern.complement().iter().map(|&k| Elem::annihilate(letters[k - 1].bar())));
        terms.push(Monomial {
            coef: Complex64::new(q.powi(crossings(&pattern) as i32), 0.0),
            factors,
        });
    }
    Ok(OpExpr::from_terms(terms, format!("W({word}) by subsets")))
}

/// `sum_k binom(n, k)_q c(e)^(n-k) c(ebar)*^k`.
pub fn wen_operator(n: usize, q: f64) -> Result<OpExpr> {
    let mut terms = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut factors = vec![Elem::create(Letter::E); n - k];
        factors.extend(std::iter::repeat_n(Elem::annihilate(Letter::EBar), k));
        terms.push(Monomial {
            coef: Complex64::new(q_binomial(n as u32, k as u32, q)?, 0.0),
            factors,
        });
    }
    Ok(OpExpr::from_terms(terms, format!("W(e^{n})")))
}
