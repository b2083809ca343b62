use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Basis, BlockId};
use super::word::Word;
use crate::error::{Error, Result};

/// A finitely supported vector in word coordinates, stored per block. Block
/// ids refer to the [`Basis`] the vector was built against.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockVector {
    blocks: BTreeMap<BlockId, DVector<Complex64>>,
}

impl FockVector {
    pub fn zero() -> FockVector {
        FockVector::default()
    }

    pub fn vacuum(basis: &Basis) -> FockVector {
        FockVector::word(basis, Word::EMPTY).expect("the vacuum is always in the basis")
    }

    pub fn word(basis: &Basis, w: Word) -> Result<FockVector> {
        FockVector::from_terms(basis, [(w, Complex64::new(1.0, 0.0))])
    }

    pub fn from_terms(
        basis: &Basis,
        terms: impl IntoIterator<Item = (Word, Complex64)>,
    ) -> Result<FockVector> {
        let mut v = FockVector::zero();
        for (w, c) in terms {
            let (id, i) = basis.locate(w).ok_or_else(|| {
                Error::Truncation(format!(
                    "word {w:?} is outside the basis of depth {}",
                    basis.depth()
                ))
            })?;
            let dim = basis.block(id).dim();
            v.blocks.entry(id).or_insert_with(|| DVector::zeros(dim))[i] += c;
        }
        Ok(v)
    }

    pub fn from_blocks(blocks: BTreeMap<BlockId, DVector<Complex64>>) -> FockVector {
        FockVector { blocks }
    }

    pub fn blocks(&self) -> &BTreeMap<BlockId, DVector<Complex64>> {
        &self.blocks
    }

    pub fn block(&self, id: BlockId) -> Option<&DVector<Complex64>> {
        self.blocks.get(&id)
    }

    pub fn into_blocks(self) -> BTreeMap<BlockId, DVector<Complex64>> {
        self.blocks
    }

    pub fn coeff(&self, basis: &Basis, w: Word) -> Complex64 {
        basis
            .locate(w)
            .and_then(|(id, i)| self.blocks.get(&id).map(|v| v[i]))
            .unwrap_or_default()
    }

    /// Nonzero coefficients, ordered by word.
    pub fn terms(&self, basis: &Basis) -> Vec<(Word, Complex64)> {
        let mut out: Vec<(Word, Complex64)> = self
            .blocks
            .iter()
            .flat_map(|(&id, v)| {
                let words = &basis.block(id).words;
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| **c != Complex64::default())
                    .map(move |(i, &c)| (words[i], c))
            })
            .collect();
        out.sort_by_key(|(w, _)| *w);
        out
    }

    pub fn add_scaled(&mut self, c: Complex64, other: &FockVector) {
        for (&id, x) in &other.blocks {
            match self.blocks.get_mut(&id) {
                Some(y) => y.axpy(c, x, Complex64::new(1.0, 0.0)),
                None => {
                    self.blocks.insert(id, x * c);
                }
            }
        }
    }

    pub fn scaled(&self, c: Complex64) -> FockVector {
        FockVector {
            blocks: self.blocks.iter().map(|(&id, v)| (id, v * c)).collect(),
        }
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(-1.0, 0.0), other);
        out
    }

    pub fn conj(&self) -> FockVector {
        FockVector {
            blocks: self.blocks.iter().map(|(&id, v)| (id, v.map(|c| c.conj()))).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .values()
            .flat_map(|v| v.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    /// Highest level carrying a nonzero coefficient.
    pub fn max_level(&self, basis: &Basis) -> Option<usize> {
        self.blocks
            .iter()
            .filter(|(_, v)| v.iter().any(|c| *c != Complex64::default()))
            .map(|(&id, _)| basis.block(id).level)
            .max()
    }

    /// Components on levels `<= max_level`.
    pub fn truncated(&self, basis: &Basis, max_level: usize) -> FockVector {
        FockVector {
            blocks: self
                .blocks
                .iter()
                .filter(|(&id, _)| basis.block(id).level <= max_level)
                .map(|(&id, v)| (id, v.clone()))
                .collect(),
        }
    }

    pub fn to_doc(&self, basis: &Basis) -> VectorDoc {
        let mut levels: BTreeMap<usize, Vec<TermDoc>> = BTreeMap::new();
        for (word, c) in self.terms(basis) {
            levels.entry(word.len()).or_default().push(TermDoc {
                word,
                coef: [c.re, c.im],
            });
        }
        VectorDoc {
            depth: basis.depth(),
            levels: levels
                .into_iter()
                .map(|(level, terms)| LevelDoc { level, terms })
                .collect(),
        }
    }

    pub fn from_doc(basis: &Basis, doc: &VectorDoc) -> Result<FockVector> {
        FockVector::from_terms(
            basis,
            doc.levels
                .iter()
                .flat_map(|l| l.terms.iter().map(|t| (t.word, Complex64::new(t.coef[0], t.coef[1])))),
        )
    }
}

/// JSON layout of a vector: nonzero terms grouped by level; words as letter
/// strings (`"eEbarAux1"`, `""` for the vacuum), coefficients as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorDoc {
    pub depth: usize,
    pub levels: Vec<LevelDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub level: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub word: Word,
    pub coef: [f64; 2],
}
