//! Norms and singular values in the q-geometry. The word basis is oblique, so
//! every block matrix `M` is conjugated into orthonormal frames,
//! `R_dst M R_src^-1` with `R = sqrt(s) L^T` from the Gram factor `G = s L L^T`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operator::FockOperator;
use crate::error::{Error, Result};
use crate::fock::{BlockId, FockSpace, FockVector};

/// `R_dst M R_src^-1` for one real matrix.
fn frame_real(space: &FockSpace, src: BlockId, dst: BlockId, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let fs = space.factor(src)?;
    let fd = space.factor(dst)?;
    let y = fd.lower.tr_mul(m) * space.block_scale(dst).sqrt();
    let mut zt = y.transpose();
    fs.lower.solve_lower_triangular_mut(&mut zt);
    Ok(zt.transpose() / space.block_scale(src).sqrt())
}

/// One operator block in orthonormal coordinates.
pub fn frame_block(
    space: &FockSpace,
    src: BlockId,
    dst: BlockId,
    m: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let re = frame_real(space, src, dst, &m.map(|c| c.re))?;
    if m.iter().all(|c| c.im == 0.0) {
        return Ok(re.map(|x| Complex64::new(x, 0.0)));
    }
    let im = frame_real(space, src, dst, &m.map(|c| c.im))?;
    Ok(re.zip_map(&im, Complex64::new))
}

/// Orthonormal coordinates `R x` of a vector, block by block.
pub fn frame_vector(space: &FockSpace, v: &FockVector) -> Result<BTreeMap<BlockId, DVector<Complex64>>> {
    let mut out = BTreeMap::new();
    for (&id, x) in v.blocks() {
        let f = space.factor(id)?;
        let s = space.block_scale(id).sqrt();
        let lt = f.lower.transpose().map(|r| Complex64::new(r * s, 0.0));
        out.insert(id, lt * x);
    }
    Ok(out)
}

/// A connected group of source and target blocks and the singular values of
/// the operator restricted to it.
#[derive(Debug, Clone)]
pub struct ComponentSpectrum {
    pub sources: Vec<BlockId>,
    pub targets: Vec<BlockId>,
    pub cols: usize,
    pub rows: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

impl ComponentSpectrum {
    /// Smallest singular value as a map on the source space (0 on a kernel).
    pub fn min_singular(&self) -> f64 {
        if self.rows < self.cols || self.singular_values.len() < self.cols {
            0.0
        } else {
            self.singular_values.last().copied().unwrap_or(0.0)
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn check_level(space: &FockSpace, op: &FockOperator, level: usize) -> Result<()> {
    let safe = op.safe_level(space);
    if level > safe {
        Err(Error::Truncation(format!(
            "{}: source level {level} exceeds the safe level {safe} (depth {}, peak {})",
            op.label(),
            space.depth(),
            op.peak()
        )))
    } else {
        Ok(())
    }
}

/// Dense orthonormal-frame matrix of `op` from the given source blocks to the
/// given target blocks, with the block offsets used.
pub fn frame_matrix(
    space: &FockSpace,
    op: &FockOperator,
    sources: &[BlockId],
    targets: &[BlockId],
) -> Result<DMatrix<Complex64>> {
    let basis = space.basis();
    let offsets = |ids: &[BlockId]| {
        let mut acc = 0;
        let mut map = BTreeMap::new();
        for &id in ids {
            map.insert(id, acc);
            acc += basis.block(id).dim();
        }
        (map, acc)
    };
    let (col_off, cols) = offsets(sources);
    let (row_off, rows) = offsets(targets);
    let mut out = DMatrix::zeros(rows, cols);
    for (&(src, dst), m) in op.blocks() {
        let (Some(&c0), Some(&r0)) = (col_off.get(&src), row_off.get(&dst)) else {
            continue;
        };
        let f = frame_block(space, src, dst, m)?;
        out.view_mut((r0, c0), (f.nrows(), f.ncols())).copy_from(&f);
    }
    Ok(out)
}

fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let mut sv: Vec<f64> = if m.iter().all(|c| c.im == 0.0) {
        m.map(|c| c.re).singular_values().iter().copied().collect()
    } else {
        m.singular_values().iter().copied().collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Singular values of `op` restricted to source levels `<= level`, split into
/// independent components of the block graph.
pub fn spectrum(space: &FockSpace, op: &FockOperator, level: usize) -> Result<Vec<ComponentSpectrum>> {
    check_level(space, op, level)?;
    let basis = space.basis();
    let sources: Vec<BlockId> = basis.blocks_up_to(level).collect();
    let src_index: BTreeMap<BlockId, usize> = sources.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut targets: Vec<BlockId> = op
        .blocks()
        .keys()
        .filter(|(s, _)| src_index.contains_key(s))
        .map(|&(_, d)| d)
        .collect();
    targets.sort();
    targets.dedup();
    let dst_index: BTreeMap<BlockId, usize> = targets.iter().enumerate().map(|(i, &b)| (b, i)).collect();

    let ns = sources.len();
    let mut parent: Vec<usize> = (0..ns + targets.len()).collect();
    for &(s, d) in op.blocks().keys() {
        if let (Some(&i), Some(&j)) = (src_index.get(&s), dst_index.get(&d)) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, ns + j));
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, (Vec<BlockId>, Vec<BlockId>)> = BTreeMap::new();
    for (i, &s) in sources.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().0.push(s);
    }
    for (j, &d) in targets.iter().enumerate() {
        let r = find(&mut parent, ns + j);
        groups.entry(r).or_default().1.push(d);
    }
    let mut out = Vec::with_capacity(groups.len());
    for (_, (srcs, dsts)) in groups {
        let m = frame_matrix(space, op, &srcs, &dsts)?;
        let cols = m.ncols();
        let rows = m.nrows();
        let sv = if rows == 0 { vec![0.0; cols] } else { singular_values(&m) };
        out.push(ComponentSpectrum {
            sources: srcs,
            targets: dsts,
            cols,
            rows,
            singular_values: sv,
        });
    }
    Ok(out)
}

/// Operator norm on source levels `<= level`.
pub fn op_norm(space: &FockSpace, op: &FockOperator, level: usize) -> Result<f64> {
    Ok(spectrum(space, op, level)?
        .iter()
        .filter_map(|c| c.singular_values.first().copied())
        .fold(0.0, f64::max))
}

/// Smallest singular value on source levels `<= level`.
pub fn min_singular(space: &FockSpace, op: &FockOperator, level: usize) -> Result<f64> {
    Ok(spectrum(space, op, level)?
        .iter()
        .map(ComponentSpectrum::min_singular)
        .fold(f64::INFINITY, f64::min))
}
