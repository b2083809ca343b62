//! Scalar q-combinatorics: q-integers, q-binomials, the `d`/`C`/`D` constants,
//! inversion and crossing statistics, Wick coefficient matrices and
//! pair-partition moments.
//!
//! Every function takes `q` explicitly and rejects `|q| >= 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation tolerance for the infinite products.
pub const DEFAULT_TOL: f64 = 1e-15;
/// Default cap on exponential subset enumerations.
pub const DEFAULT_ENUM_CAP: usize = 8;
/// Largest `2k` accepted by [`pair_partition_moment`].
pub const MAX_PAIRING_SIZE: usize = 16;

pub fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("q = {q} is outside (-1, 1)")))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("tolerance {tol} must be positive")))
    }
}

/// `[n]_q = 1 + q + ... + q^(n-1)`, with `[0]_q = 0`.
pub fn q_int(n: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    let mut acc = 0.0;
    let mut p = 1.0;
    for _ in 0..n {
        acc += p;
        p *= q;
    }
    Ok(acc)
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    let mut acc = 1.0;
    for j in 1..=n {
        acc *= q_int(j, q)?;
    }
    Ok(acc)
}

/// Gaussian binomial, evaluated as `prod_{i=1..k} (1 - q^(n-k+i)) / (1 - q^i)`,
/// which is `d_n / (d_k d_(n-k))` without forming the small products.
pub fn q_binomial(n: u32, k: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    if k > n {
        return Err(Error::Domain(format!("q_binomial: k = {k} > n = {n}")));
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 1..=k {
        acc *= (1.0 - q.powi((n - k + i) as i32)) / (1.0 - q.powi(i as i32));
    }
    Ok(acc)
}

/// A truncated infinite product with a certified relative tail bound:
/// the exact value lies within `value * (1 +- rel_tail)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedProduct {
    pub value: f64,
    /// Number of factors multiplied in.
    pub factors: usize,
    pub rel_tail: f64,
}

/// Number of factors `i` with `|q|^i >= tol`, and the relative tail bound for
/// `prod_{i > m} (1 -+ |q|^i)^(+-1)`.
fn truncation(q_abs: f64, tol: f64) -> (usize, f64) {
    let mut m = 0usize;
    let mut p = q_abs;
    while p >= tol {
        m += 1;
        p *= q_abs;
    }
    // p = |q|^(m+1); sum_{i>m} |q|^i / (1 - |q|^i) <= p / ((1 - |q|)(1 - p))
    let s = if p == 0.0 { 0.0 } else { p / ((1.0 - q_abs) * (1.0 - p)) };
    (m, s.exp_m1())
}

/// `d_inf = prod_{i>=1} (1 - q^i)`.
pub fn d_infinity(q: f64, tol: f64) -> Result<TruncatedProduct> {
    check_q(q)?;
    check_tol(tol)?;
    let (m, rel_tail) = truncation(q.abs(), tol);
    let mut value = 1.0;
    let mut p = 1.0;
    for _ in 0..m {
        p *= q;
        value *= 1.0 - p;
    }
    Ok(TruncatedProduct {
        value,
        factors: m,
        rel_tail,
    })
}

/// `d_j` for `j = 0..=j_max`, the limit `d_inf` and `c_k = 1/d_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DFamily {
    pub d: Vec<f64>,
    pub d_inf: TruncatedProduct,
    pub c: Vec<f64>,
}

pub fn d_family(q: f64, j_max: usize, tol: f64) -> Result<DFamily> {
    check_q(q)?;
    check_tol(tol)?;
    let mut d = Vec::with_capacity(j_max + 1);
    d.push(1.0);
    let mut p = 1.0;
    for _ in 1..=j_max {
        p *= q;
        let last = *d.last().unwrap();
        d.push(last * (1.0 - p));
    }
    let c = d.iter().map(|x| 1.0 / x).collect();
    Ok(DFamily {
        d,
        d_inf: d_infinity(q, tol)?,
        c,
    })
}

/// `C_q = prod 1/(1 - |q|^i)` and `D(q) = sup_n d_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub c_q: TruncatedProduct,
    pub d_q: f64,
}

pub fn bound_constants(q: f64, tol: f64) -> Result<BoundConstants> {
    check_q(q)?;
    check_tol(tol)?;
    let a = q.abs();
    let (m, rel_tail) = truncation(a, tol);
    let mut value = 1.0;
    let mut p = 1.0;
    for _ in 0..m {
        p *= a;
        value /= 1.0 - p;
    }
    // For q >= 0 the partial products decrease from d_0 = 1. For q < 0 the
    // odd factors exceed one; scan until the factors are within tol of one.
    let d_q = if q >= 0.0 {
        1.0
    } else {
        let mut best = 1.0f64;
        let mut dn = 1.0;
        let mut p = 1.0;
        for _ in 0..m.max(1) {
            p *= q;
            dn *= 1.0 - p;
            best = best.max(dn);
        }
        best
    };
    Ok(BoundConstants {
        c_q: TruncatedProduct {
            value,
            factors: m,
            rel_tail,
        },
        d_q,
    })
}

/// Inversion count of a permutation of `{1, ..., n}` given in one-line form.
pub fn inversions(perm: &[usize]) -> Result<usize> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::MalformedPermutation(format!(
                "{perm:?} is not a bijection of 1..={n}"
            )));
        }
        seen[p - 1] = true;
    }
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            if perm[a] > perm[b] {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// A subset `J` of `{1, ..., n}`, stored as its increasing member list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPattern {
    n: usize,
    members: Vec<usize>,
}

impl SubsetPattern {
    pub fn new(n: usize, members: Vec<usize>) -> Result<Self> {
        let increasing = members.windows(2).all(|w| w[0] < w[1]);
        let in_range = members.iter().all(|&m| (1..=n).contains(&m));
        if !(increasing && in_range) {
            return Err(Error::Domain(format!(
                "{members:?} is not an increasing subset of 1..={n}"
            )));
        }
        Ok(Self { n, members })
    }

    /// Subset encoded by the low `n` bits of `mask` (bit `i` is element `i + 1`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let members = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        Self { n, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n).filter(|x| self.members.binary_search(x).is_err()).collect()
    }
}

/// `c(J, J^c) = #{(a, b) : j_a > k_b}`.
pub fn crossings(pattern: &SubsetPattern) -> usize {
    let comp = pattern.complement();
    pattern
        .members
        .iter()
        .map(|&j| comp.iter().take_while(|&&k| k < j).count())
        .sum()
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded {
            what,
            requested: n,
            cap,
        })
    } else {
        Ok(())
    }
}

/// `sum_{J, |J| = k} q^c(J, J^c)` for every `k = 0..=n`, by enumerating subsets.
pub fn crossing_sums(n: usize, q: f64, cap: usize) -> Result<Vec<f64>> {
    check_q(q)?;
    check_cap("subset enumeration", n, cap)?;
    let mut sums = vec![0.0; n + 1];
    for mask in 0..1u64 << n {
        let pattern = SubsetPattern::from_mask(n, mask);
        sums[pattern.members.len()] += q.powi(crossings(&pattern) as i32);
    }
    Ok(sums)
}

/// The `(n+1) x (n+1)` coefficient matrix `q_{k,l}` of the normal-ordered
/// expansion of `W(ebar^n e^n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WickCoeffMatrix {
    pub n: usize,
    entries: Vec<f64>,
}

impl WickCoeffMatrix {
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k * (self.n + 1) + l]
    }
}

/// `q_{k,l} = q^((n-k) l) * S_k * S_l` with `S_k` the crossing sum over
/// `k`-subsets, evaluated by explicit subset enumeration.
pub fn wick_coefficients(n: usize, q: f64, cap: usize) -> Result<WickCoeffMatrix> {
    let sums = crossing_sums(n, q, cap)?;
    let mut entries = Vec::with_capacity((n + 1) * (n + 1));
    for k in 0..=n {
        for l in 0..=n {
            entries.push(q.powi(((n - k) * l) as i32) * sums[k] * sums[l]);
        }
    }
    Ok(WickCoeffMatrix { n, entries })
}

/// `sum over pair partitions of {1..2k}` of `q^crossings`.
pub fn pair_partition_moment(two_k: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    if two_k % 2 == 1 {
        return Err(Error::Domain(format!("pairing size {two_k} is odd")));
    }
    check_cap("pair partition enumeration", two_k, MAX_PAIRING_SIZE)?;
    let k = two_k / 2;
    let mut counts = vec![0u64; k * k.saturating_sub(1) / 2 + 1];
    let mut partner = vec![usize::MAX; two_k];
    count_pairings(&mut partner, 0, &mut counts);
    Ok(counts
        .iter()
        .enumerate()
        .map(|(c, &m)| m as f64 * q.powi(c as i32))
        .sum())
}

// Always pairs the smallest open point i, so every earlier pair (a, b) has
// a < i and crosses (i, j) exactly when i < b < j.
fn count_pairings(partner: &mut [usize], crossings: usize, counts: &mut [u64]) {
    let Some(i) = partner.iter().position(|&p| p == usize::MAX) else {
        counts[crossings] += 1;
        return;
    };
    for j in i + 1..partner.len() {
        if partner[j] != usize::MAX {
            continue;
        }
        let crossed = (i + 1..j).filter(|&b| partner[b] != usize::MAX && partner[b] < i).count();
        partner[i] = j;
        partner[j] = i;
        count_pairings(partner, crossings + crossed, counts);
        partner[i] = usize::MAX;
        partner[j] = usize::MAX;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(q_int(0, 0.5).unwrap(), 0.0);
        assert_eq!(q_int(3, 0.5).unwrap(), 1.75);
        assert_eq!(q_int(4, 0.0).unwrap(), 1.0);
        assert_eq!(q_factorial(0, 0.9).unwrap(), 1.0);
        assert_eq!(q_factorial(3, 0.5).unwrap(), 2.625);
        assert_eq!(q_binomial(3, 1, 0.5).unwrap(), 1.75);
        assert!(q_binomial(2, 3, 0.5).is_err());
        assert!(q_int(2, 1.0).is_err());
    }

    #[test]
    fn pairing_counts() {
        assert_eq!(pair_partition_moment(0, 0.3).unwrap(), 1.0);
        assert_eq!(pair_partition_moment(2, 0.3).unwrap(), 1.0);
        assert!((pair_partition_moment(4, 0.3).unwrap() - 2.3).abs() < 1e-15);
        assert_eq!(pair_partition_moment(6, 0.0).unwrap(), 5.0);
        // non-crossing pairings of 16 points: Catalan(8)
        assert_eq!(pair_partition_moment(16, 0.0).unwrap(), 1430.0);
        assert!(pair_partition_moment(18, 0.0).is_err());
    }
}
