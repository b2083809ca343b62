use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Basis, BlockId};
use super::gram::{GramCache, GramFactor};
use super::vector::FockVector;
use super::word::{Letter, Word};
use super::ModelParams;
use crate::error::{Error, Result};

/// Resource and conditioning envelope for building a space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceLimits {
    pub max_words: usize,
    /// Memory for the Gram blocks and their factors, in bytes.
    pub max_gram_bytes: usize,
    /// Largest accepted `|q|`; beyond it deep Gram blocks lose too many digits.
    pub q_envelope: f64,
}

impl Default for SpaceLimits {
    fn default() -> Self {
        Self {
            max_words: 1 << 15,
            max_gram_bytes: 256 << 20,
            q_envelope: 0.9,
        }
    }
}

/// A truncated Fock space at fixed `(q, lambda, alphabet, depth)`: the basis,
/// the shared q-only Gram cache and the physical rescaling by letter norms.
#[derive(Debug, Clone)]
pub struct FockSpace {
    params: ModelParams,
    basis: Arc<Basis>,
    gram: Arc<GramCache>,
}

impl FockSpace {
    pub fn new(params: ModelParams) -> Result<FockSpace> {
        Self::with_limits(params, SpaceLimits::default())
    }

    pub fn with_limits(params: ModelParams, limits: SpaceLimits) -> Result<FockSpace> {
        if params.q.abs() > limits.q_envelope {
            return Err(Error::Parameter(format!(
                "|q| = {} exceeds the conditioning envelope {}; deep Gram blocks would lose \
                 more than 1e-4 relative accuracy",
                params.q.abs(),
                limits.q_envelope
            )));
        }
        let basis = Arc::new(Basis::build(&params.alphabet(), params.depth, limits.max_words)?);
        let bytes: usize = basis.blocks().iter().map(|b| 2 * 8 * b.dim() * b.dim()).sum();
        if bytes > limits.max_gram_bytes {
            return Err(Error::Budget(format!(
                "Gram blocks at depth {} need {} MiB, budget is {} MiB",
                params.depth,
                bytes >> 20,
                limits.max_gram_bytes >> 20
            )));
        }
        let gram = Arc::new(GramCache::new(basis.clone(), params.q)?);
        Ok(FockSpace {
            params,
            basis,
            gram,
        })
    }

    /// The same basis and Gram cache at another lambda.
    pub fn with_lambda(&self, lambda: f64) -> Result<FockSpace> {
        let p = &self.params;
        let params = ModelParams::new(p.q, lambda, p.aux_letters, p.depth)?;
        Ok(FockSpace {
            params,
            basis: self.basis.clone(),
            gram: self.gram.clone(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn q(&self) -> f64 {
        self.params.q
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    pub fn depth(&self) -> usize {
        self.params.depth
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn gram_cache(&self) -> &GramCache {
        &self.gram
    }

    /// `prod <l, l>_U` over the block's letters.
    pub fn block_scale(&self, id: BlockId) -> f64 {
        self.basis.block(id).signature.u_scale(self.params.lambda)
    }

    /// The physical Gram block.
    pub fn gram_block(&self, id: BlockId) -> DMatrix<f64> {
        &*self.gram.gram(id) * self.block_scale(id)
    }

    pub fn q_gram(&self, id: BlockId) -> Arc<DMatrix<f64>> {
        self.gram.gram(id)
    }

    pub fn factor(&self, id: BlockId) -> Result<Arc<GramFactor>> {
        self.gram.factor(id)
    }

    /// `T` with `T^T G T = I` for the physical Gram block `G`: `T = L^(-T) / sqrt(s)`.
    pub fn orthonormalize(&self, id: BlockId) -> Result<DMatrix<f64>> {
        let f = self.factor(id)?;
        let n = f.lower.nrows();
        let mut t = DMatrix::identity(n, n);
        f.lower.transpose().solve_upper_triangular_mut(&mut t);
        Ok(t / self.block_scale(id).sqrt())
    }

    /// `<f, g>`, antilinear in `f`.
    pub fn inner(&self, f: &FockVector, g: &FockVector) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&id, x) in f.blocks() {
            let Some(y) = g.block(id) else { continue };
            let gram = self.gram.gram(id);
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..y.len() {
                if y[j] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut col = Complex64::new(0.0, 0.0);
                for i in 0..x.len() {
                    col += x[i].conj() * gram[(i, j)];
                }
                s += col * y[j];
            }
            acc += s * self.block_scale(id);
        }
        acc
    }

    pub fn norm(&self, f: &FockVector) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }

    /// `<w, w'>` for two basis words.
    pub fn word_inner(&self, a: Word, b: Word) -> Result<f64> {
        let (ia, pa) = self.locate(a)?;
        let (ib, pb) = self.locate(b)?;
        if ia != ib {
            return Ok(0.0);
        }
        Ok(self.gram.gram(ia)[(pa, pb)] * self.block_scale(ia))
    }

    pub fn locate(&self, w: Word) -> Result<(BlockId, usize)> {
        self.basis.locate(w).ok_or_else(|| {
            Error::Truncation(format!(
                "word {w:?} (level {}) is outside the truncated space of depth {} with alphabet {:?}",
                w.len(),
                self.depth(),
                self.basis.alphabet()
            ))
        })
    }

    pub fn has_letter(&self, l: Letter) -> bool {
        self.basis.contains_letter(l)
    }

    /// The physical Gram blocks of one level.
    pub fn gram_doc(&self, level: usize) -> Result<GramDoc> {
        if level > self.depth() {
            return Err(Error::Truncation(format!("level {level} is above depth {}", self.depth())));
        }
        let blocks = self
            .basis
            .level_blocks(level)
            .iter()
            .map(|&id| {
                let g = self.gram_block(id);
                GramBlockDoc {
                    signature: self.basis.block(id).signature.to_string(),
                    words: self.basis.block(id).words.clone(),
                    entries: (0..g.nrows()).map(|i| g.row(i).iter().copied().collect()).collect(),
                }
            })
            .collect();
        Ok(GramDoc {
            q: self.q(),
            lambda: self.lambda(),
            level,
            blocks,
        })
    }
}

/// JSON layout of the Gram blocks of one level; entries are real, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramDoc {
    pub q: f64,
    pub lambda: f64,
    pub level: usize,
    pub blocks: Vec<GramBlockDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramBlockDoc {
    pub signature: String,
    pub words: Vec<Word>,
    pub entries: Vec<Vec<f64>>,
}
