use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::cols::{Cols, FockMap};
use crate::error::{Error, Result};
use crate::fock::{BlockId, FockSpace, FockVector, Word};

/// A materialized operator: dense matrices between blocks, keyed by
/// `(source block, target block)`, for all source levels up to `domain_level`.
///
/// An antilinear operator acts as `f -> M conj(f)` blockwise.
#[derive(Debug, Clone)]
pub struct FockOperator {
    blocks: BTreeMap<(BlockId, BlockId), DMatrix<Complex64>>,
    domain_level: usize,
    raise: i64,
    peak: usize,
    antilinear: bool,
    label: String,
}

impl FockOperator {
    /// Materializes `map` on every source level `<= domain_level`.
    pub fn materialize(space: &FockSpace, map: &dyn FockMap, domain_level: usize) -> FockOperator {
        let domain_level = domain_level.min(space.depth());
        let mut blocks = BTreeMap::new();
        for src in space.basis().blocks_up_to(domain_level) {
            let image = map.apply_cols(space, &Cols::identity(space, src));
            for (dst, m) in image.into_blocks() {
                if m.iter().any(|c| *c != Complex64::default()) {
                    blocks.insert((src, dst), m.transpose());
                }
            }
        }
        FockOperator {
            blocks,
            domain_level,
            raise: map.raise(),
            peak: map.peak(),
            antilinear: false,
            label: map.label(),
        }
    }

    /// Materializes `map` on the whole truncated space.
    pub fn full(space: &FockSpace, map: &dyn FockMap) -> FockOperator {
        Self::materialize(space, map, space.depth())
    }

    /// A level-preserving operator sending each basis word to a multiple of
    /// another basis word.
    pub fn word_map(
        space: &FockSpace,
        f: impl Fn(Word) -> (Word, Complex64),
        antilinear: bool,
        label: impl Into<String>,
    ) -> FockOperator {
        let basis = space.basis();
        let mut blocks: BTreeMap<(BlockId, BlockId), DMatrix<Complex64>> = BTreeMap::new();
        for (src, block) in basis.blocks().iter().enumerate() {
            for (i, &w) in block.words.iter().enumerate() {
                let (image, c) = f(w);
                let (dst, j) = basis.locate(image).expect("word maps preserve the level");
                let dim = basis.block(dst).dim();
                blocks
                    .entry((src, dst))
                    .or_insert_with(|| DMatrix::zeros(dim, block.dim()))[(j, i)] += c;
            }
        }
        FockOperator {
            blocks,
            domain_level: space.depth(),
            raise: 0,
            peak: 0,
            antilinear,
            label: label.into(),
        }
    }

    pub fn identity(space: &FockSpace) -> FockOperator {
        Self::word_map(space, |w| (w, Complex64::new(1.0, 0.0)), false, "id")
    }

    pub fn from_blocks(
        blocks: BTreeMap<(BlockId, BlockId), DMatrix<Complex64>>,
        domain_level: usize,
        raise: i64,
        peak: usize,
        antilinear: bool,
        label: impl Into<String>,
    ) -> FockOperator {
        FockOperator {
            blocks,
            domain_level,
            raise,
            peak,
            antilinear,
            label: label.into(),
        }
    }

    pub fn blocks(&self) -> &BTreeMap<(BlockId, BlockId), DMatrix<Complex64>> {
        &self.blocks
    }

    pub fn block(&self, src: BlockId, dst: BlockId) -> Option<&DMatrix<Complex64>> {
        self.blocks.get(&(src, dst))
    }

    pub fn domain_level(&self) -> usize {
        self.domain_level
    }

    pub fn raise(&self) -> i64 {
        self.raise
    }

    pub fn peak(&self) -> usize {
        self.peak
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> FockOperator {
        self.label = label.into();
        self
    }

    /// Highest source level on which results are truncation-exact.
    pub fn safe_level(&self, space: &FockSpace) -> usize {
        space.depth().saturating_sub(self.peak).min(self.domain_level)
    }

    fn targets_of(&self, src: BlockId) -> impl Iterator<Item = (BlockId, &DMatrix<Complex64>)> {
        self.blocks
            .range((src, 0)..=(src, BlockId::MAX))
            .map(|(&(_, dst), m)| (dst, m))
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut out: BTreeMap<BlockId, nalgebra::DVector<Complex64>> = BTreeMap::new();
        for (&src, x) in v.blocks() {
            let x = if self.antilinear { x.map(|c| c.conj()) } else { x.clone() };
            for (dst, m) in self.targets_of(src) {
                let y = m * &x;
                match out.get_mut(&dst) {
                    Some(acc) => *acc += y,
                    None => {
                        out.insert(dst, y);
                    }
                }
            }
        }
        FockVector::from_blocks(out)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &FockOperator) -> FockOperator {
        let mut blocks: BTreeMap<(BlockId, BlockId), DMatrix<Complex64>> = BTreeMap::new();
        for (&(src, mid), b) in &other.blocks {
            let b = if self.antilinear { b.map(|c| c.conj()) } else { b.clone() };
            for (dst, a) in self.targets_of(mid) {
                let m = a * &b;
                match blocks.get_mut(&(src, dst)) {
                    Some(acc) => *acc += m,
                    None => {
                        blocks.insert((src, dst), m);
                    }
                }
            }
        }
        let shift = other.raise.max(0) as usize;
        FockOperator {
            blocks,
            domain_level: other.domain_level.min(self.domain_level.saturating_sub(shift)),
            raise: self.raise + other.raise,
            peak: other.peak.max((other.raise + self.peak as i64).max(0) as usize),
            antilinear: self.antilinear ^ other.antilinear,
            label: format!("({})({})", self.label, other.label),
        }
    }

    /// `a self + b other`; both must have the same linearity.
    pub fn combine(&self, a: Complex64, other: &FockOperator, b: Complex64) -> FockOperator {
        assert_eq!(self.antilinear, other.antilinear, "mixing linear and antilinear operators");
        let mut blocks: BTreeMap<(BlockId, BlockId), DMatrix<Complex64>> =
            self.blocks.iter().map(|(&k, m)| (k, m * a)).collect();
        for (&k, m) in &other.blocks {
            match blocks.get_mut(&k) {
                Some(acc) => *acc += m * b,
                None => {
                    blocks.insert(k, m * b);
                }
            }
        }
        FockOperator {
            blocks,
            domain_level: self.domain_level.min(other.domain_level),
            raise: self.raise.max(other.raise),
            peak: self.peak.max(other.peak),
            antilinear: self.antilinear,
            label: format!("{} + {}", self.label, other.label),
        }
    }

    pub fn sub(&self, other: &FockOperator) -> FockOperator {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// The same operator with only the source levels `<= level` kept.
    pub fn restricted(&self, space: &FockSpace, level: usize) -> FockOperator {
        let basis = space.basis();
        FockOperator {
            blocks: self
                .blocks
                .iter()
                .filter(|(&(src, _), _)| basis.block(src).level <= level)
                .map(|(&k, m)| (k, m.clone()))
                .collect(),
            domain_level: self.domain_level.min(level),
            ..self.clone()
        }
    }

    /// Largest entry modulus over source levels `<= level`.
    pub fn max_abs(&self, space: &FockSpace, level: usize) -> f64 {
        self.blocks
            .iter()
            .filter(|(&(src, _), _)| space.basis().block(src).level <= level)
            .flat_map(|(_, m)| m.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise over source levels `<= level`,
    /// relative to `max(1, max |other|)`.
    pub fn rel_diff(&self, space: &FockSpace, other: &FockOperator, level: usize) -> f64 {
        let d = self.sub(other).max_abs(space, level);
        d / other.max_abs(space, level).max(1.0)
    }

    /// The adjoint for the q-inner product, `<A* f, g> = <f, A g>`
    /// (conjugated for antilinear `A`). Requires `A` on the whole space.
    pub fn q_adjoint(&self, space: &FockSpace) -> Result<FockOperator> {
        if self.domain_level < space.depth() {
            return Err(Error::Truncation(format!(
                "q_adjoint needs {} materialized on all levels, have <= {}",
                self.label, self.domain_level
            )));
        }
        let mut blocks = BTreeMap::new();
        for (&(src, dst), m) in &self.blocks {
            let gs = space.q_gram(src);
            let gd = space.q_gram(dst);
            let ratio = space.block_scale(dst) / space.block_scale(src);
            let gd = gd.map(|x| Complex64::new(x * ratio, 0.0));
            // G_s^{-1} M^H G_d, or G_s^{-1} M^T G_d when antilinear.
            let mt = if self.antilinear { m.transpose() } else { m.adjoint() };
            let rhs = mt * gd;
            let chol = nalgebra::Cholesky::new(gs.map(|x| Complex64::new(x, 0.0)))
                .ok_or_else(|| Error::Factorization {
                    block: format!("{src}"),
                    reason: "Gram block not positive definite".into(),
                })?;
            blocks.insert((dst, src), chol.solve(&rhs));
        }
        Ok(FockOperator {
            blocks,
            domain_level: space.depth(),
            raise: -self.raise,
            peak: self.peak,
            antilinear: self.antilinear,
            label: format!("({})^*", self.label),
        })
    }

    /// `<Omega, A Omega>`.
    pub fn vacuum_expectation(&self, space: &FockSpace) -> Complex64 {
        let omega = FockVector::vacuum(space.basis());
        space.inner(&omega, &self.apply(&omega))
    }

    pub fn to_doc(&self, space: &FockSpace) -> OperatorDoc {
        let basis = space.basis();
        let describe = |id: BlockId| BlockRef {
            level: basis.block(id).level,
            signature: basis.block(id).signature.to_string(),
            words: basis.block(id).words.iter().map(|w| w.to_string()).collect(),
        };
        OperatorDoc {
            label: self.label.clone(),
            raise: self.raise,
            peak: self.peak,
            domain_level: self.domain_level,
            antilinear: self.antilinear,
            blocks: self
                .blocks
                .iter()
                .map(|(&(src, dst), m)| OperatorBlockDoc {
                    source: describe(src),
                    target: describe(dst),
                    entries: (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Debug dump layout of an operator.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorDoc {
    pub label: String,
    pub raise: i64,
    pub peak: usize,
    pub domain_level: usize,
    pub antilinear: bool,
    pub blocks: Vec<OperatorBlockDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockRef {
    pub level: usize,
    pub signature: String,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorBlockDoc {
    pub source: BlockRef,
    pub target: BlockRef,
    /// Row-major `[re, im]` entries, rows indexed by target words.
    pub entries: Vec<Vec<[f64; 2]>>,
}
