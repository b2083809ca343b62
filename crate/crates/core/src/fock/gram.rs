use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};

use super::basis::{Basis, BlockId};
use super::word::Word;
use crate::error::{Error, Result};
use crate::qcomb::{check_q, inversions};

/// Factored blocks above this condition estimate are reported by
/// [`GramCache::conditioning_warnings`].
pub const CONDITION_WARNING: f64 = 1e8;
/// Factorization is refused above this condition estimate.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Cholesky factor `G = L L^T` of a q-only Gram block.
#[derive(Debug, Clone)]
pub struct GramFactor {
    pub lower: DMatrix<f64>,
    /// 2-norm condition number from power and inverse iteration (a lower bound).
    pub cond_estimate: f64,
}

/// Lazily built q-only Gram blocks (all letters of unit `U`-norm) and their
/// factors. Independent of lambda, so one cache serves a whole lambda sweep.
pub struct GramCache {
    basis: Arc<Basis>,
    q: f64,
    qpow: Vec<f64>,
    grams: Vec<OnceLock<Arc<DMatrix<f64>>>>,
    factors: Vec<OnceLock<Result<Arc<GramFactor>>>>,
}

impl std::fmt::Debug for GramCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GramCache")
            .field("q", &self.q)
            .field("blocks", &self.grams.len())
            .finish()
    }
}

impl GramCache {
    pub fn new(basis: Arc<Basis>, q: f64) -> Result<GramCache> {
        check_q(q)?;
        let n = basis.num_blocks();
        let qpow = (0..=basis.depth()).map(|p| q.powi(p as i32)).collect();
        Ok(GramCache {
            basis,
            q,
            qpow,
            grams: (0..n).map(|_| OnceLock::new()).collect(),
            factors: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// The q-only Gram block, built by the annihilation recursion
    /// `<l w, eta> = sum_{p : eta_p = l} q^p <w, eta minus letter p>`.
    pub fn gram(&self, id: BlockId) -> Arc<DMatrix<f64>> {
        self.grams[id].get_or_init(|| Arc::new(self.build(id))).clone()
    }

    fn build(&self, id: BlockId) -> DMatrix<f64> {
        let block = self.basis.block(id);
        let dim = block.dim();
        if block.level == 0 {
            return DMatrix::from_element(1, 1, 1.0);
        }
        // For each column word, every single-letter deletion located in the
        // child block of the deleted letter: (letter code, position, index).
        let deletions: Vec<Vec<(u8, usize, usize)>> = block
            .words
            .iter()
            .map(|&eta| {
                (0..eta.len())
                    .map(|p| {
                        let (_, idx) = self.locate(eta.remove(p));
                        (eta.get(p).code(), p, idx)
                    })
                    .collect()
            })
            .collect();
        let rows: Vec<(u8, usize, Arc<DMatrix<f64>>)> = block
            .words
            .iter()
            .map(|&w| {
                let (child, idx) = self.locate(w.tail());
                (w.get(0).code(), idx, self.gram(child))
            })
            .collect();
        let mut g = DMatrix::zeros(dim, dim);
        for (i, (code, t, child)) in rows.iter().enumerate() {
            for j in i..dim {
                let mut acc = 0.0;
                for &(c, p, idx) in &deletions[j] {
                    if c == *code {
                        acc += self.qpow[p] * child[(*t, idx)];
                    }
                }
                g[(i, j)] = acc;
                g[(j, i)] = acc;
            }
        }
        g
    }

    fn locate(&self, w: Word) -> (BlockId, usize) {
        self.basis
            .locate(w)
            .expect("subwords of basis words are basis words")
    }

    /// Cholesky factor of a q-only block. Refused when the condition estimate
    /// exceeds [`CONDITION_LIMIT`]: the frame would lose more than about 1e-4
    /// relative accuracy.
    pub fn factor(&self, id: BlockId) -> Result<Arc<GramFactor>> {
        self.factors[id]
            .get_or_init(|| {
                let g = self.gram(id);
                let block = self.basis.block(id);
                let name = format!("level {} {}", block.level, block.signature);
                let chol = nalgebra::Cholesky::new((*g).clone()).ok_or_else(|| Error::Factorization {
                    block: name.clone(),
                    reason: format!("Gram block not positive definite at q = {}", self.q),
                })?;
                let cond_estimate = condition_estimate(&g, &chol);
                if !(cond_estimate <= CONDITION_LIMIT) {
                    return Err(Error::Factorization {
                        block: name,
                        reason: format!(
                            "condition number about {cond_estimate:.1e} at q = {}; reduce |q| or the depth",
                            self.q
                        ),
                    });
                }
                Ok(Arc::new(GramFactor {
                    lower: chol.unpack(),
                    cond_estimate,
                }))
            })
            .clone()
    }

    /// Blocks that have been factored and exceed [`CONDITION_WARNING`].
    pub fn conditioning_warnings(&self) -> Vec<(BlockId, f64)> {
        self.factors
            .iter()
            .enumerate()
            .filter_map(|(id, f)| match f.get() {
                Some(Ok(f)) if f.cond_estimate > CONDITION_WARNING => Some((id, f.cond_estimate)),
                _ => None,
            })
            .collect()
    }
}

fn condition_estimate(g: &DMatrix<f64>, chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>) -> f64 {
    let n = g.nrows();
    if n == 1 {
        return 1.0;
    }
    let start = DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919) % 13) as f64);
    let mut hi = start.normalize();
    let mut lo = hi.clone();
    let (mut l_max, mut l_min) = (0.0, 0.0);
    for _ in 0..40 {
        let y = g * &hi;
        l_max = hi.dot(&y);
        hi = y.normalize();
        let z = chol.solve(&lo);
        l_min = 1.0 / lo.dot(&z);
        lo = z.normalize();
    }
    l_max / l_min
}

/// The q-only Gram block by the defining permutation sum
/// `sum_pi q^inv(pi) prod_i <w_i, eta_pi(i)>`. Factorial cost: for checking
/// the recursion on low levels only.
pub fn gram_brute_force(words: &[Word], q: f64, max_level: usize) -> Result<DMatrix<f64>> {
    check_q(q)?;
    let n = words.first().map_or(0, |w| w.len());
    if n > max_level {
        return Err(Error::CapExceeded {
            what: "permutation enumeration",
            requested: n,
            cap: max_level,
        });
    }
    let perms = permutations(n);
    let weights: Vec<f64> = perms
        .iter()
        .map(|p| {
            let one_based: Vec<usize> = p.iter().map(|&x| x + 1).collect();
            inversions(&one_based).map(|i| q.powi(i as i32))
        })
        .collect::<Result<_>>()?;
    let dim = words.len();
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        let (a, b) = (words[i], words[j]);
        perms
            .iter()
            .zip(&weights)
            .filter(|(p, _)| (0..n).all(|k| a.get(k) == b.get(p[k])))
            .map(|(_, w)| w)
            .sum()
    }))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut current, &mut out);
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, a, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, a, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heap_enumerates_all() {
        let mut p = permutations(4);
        assert_eq!(p.len(), 24);
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 24);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
