use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::elem::{Elem, ElemKind};
use crate::fock::{BlockId, FockSpace, FockVector};

/// A batch of `nvec` vectors stored per block as `nvec x dim` matrices, so a
/// basis coordinate is a contiguous column. Operators act column by column.
#[derive(Debug, Clone)]
pub struct Cols {
    nvec: usize,
    blocks: BTreeMap<BlockId, DMatrix<Complex64>>,
}

impl Cols {
    pub fn empty(nvec: usize) -> Cols {
        Cols {
            nvec,
            blocks: BTreeMap::new(),
        }
    }

    /// The basis words of one block, one vector each.
    pub fn identity(space: &FockSpace, id: BlockId) -> Cols {
        let dim = space.basis().block(id).dim();
        let mut blocks = BTreeMap::new();
        blocks.insert(id, DMatrix::identity(dim, dim));
        Cols { nvec: dim, blocks }
    }

    pub fn from_vector(v: &FockVector) -> Cols {
        Cols {
            nvec: 1,
            blocks: v
                .blocks()
                .iter()
                .map(|(&id, x)| (id, DMatrix::from_row_slice(1, x.len(), x.as_slice())))
                .collect(),
        }
    }

    /// Vector `k` of the batch.
    pub fn vector(&self, k: usize) -> FockVector {
        FockVector::from_blocks(
            self.blocks
                .iter()
                .map(|(&id, m)| (id, DVector::from_iterator(m.ncols(), m.row(k).iter().copied())))
                .collect(),
        )
    }

    pub fn nvec(&self) -> usize {
        self.nvec
    }

    pub fn blocks(&self) -> &BTreeMap<BlockId, DMatrix<Complex64>> {
        &self.blocks
    }

    pub fn into_blocks(self) -> BTreeMap<BlockId, DMatrix<Complex64>> {
        self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn insert_block(&mut self, id: BlockId, m: DMatrix<Complex64>) {
        debug_assert_eq!(m.nrows(), self.nvec);
        match self.blocks.get_mut(&id) {
            Some(y) => *y += m,
            None => {
                self.blocks.insert(id, m);
            }
        }
    }

    pub fn add_scaled(&mut self, c: Complex64, other: &Cols) {
        for (&id, x) in &other.blocks {
            match self.blocks.get_mut(&id) {
                Some(y) => y.zip_apply(x, |a, b| *a += c * b),
                None => {
                    self.blocks.insert(id, x * c);
                }
            }
        }
    }

    pub fn scale_mut(&mut self, c: Complex64) {
        for m in self.blocks.values_mut() {
            *m *= c;
        }
    }

    pub fn apply_elem(&self, space: &FockSpace, e: Elem) -> Cols {
        let basis = space.basis();
        let mut out = Cols::empty(self.nvec);
        for (&id, x) in &self.blocks {
            let block = basis.block(id);
            let target_sig = match e.kind {
                ElemKind::Create => Some(block.signature.add(e.letter)),
                ElemKind::Annihilate => block.signature.sub(e.letter),
            };
            let Some(target) = target_sig.and_then(|s| basis.block_of(s)) else {
                continue;
            };
            let mut y = DMatrix::zeros(self.nvec, basis.block(target).dim());
            for (i, &w) in block.words.iter().enumerate() {
                e.for_each_image(space, w, |img, c| {
                    let (_, j) = basis.locate(img).expect("image stays in the target block");
                    let c = Complex64::new(c, 0.0);
                    y.column_mut(j).zip_apply(&x.column(i), |a, b| *a += c * b);
                });
            }
            out.insert_block(target, y);
        }
        out
    }
}

/// A linear map on the truncated space that can act on batches of vectors.
///
/// `raise` is the largest net level increase and `peak` the largest level
/// reached above the source at any intermediate step. A result computed from
/// a source of level `<= depth - peak` never lost a component to truncation.
pub trait FockMap: Sync {
    fn apply_cols(&self, space: &FockSpace, x: &Cols) -> Cols;
    fn raise(&self) -> i64;
    fn peak(&self) -> usize;
    fn label(&self) -> String;

    fn apply(&self, space: &FockSpace, v: &FockVector) -> FockVector {
        self.apply_cols(space, &Cols::from_vector(v)).vector(0)
    }
}
