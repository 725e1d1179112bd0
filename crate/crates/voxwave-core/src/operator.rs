//! Scale masking and compilation of the extraction pipeline into a dense
//! linear operator.
//!
//! The iterative pipeline (decompose, zero the unwanted scales,
//! reconstruct) is linear in the input, so for a fixed configuration it
//! equals multiplication by a T by T matrix. [`build_operator`] obtains
//! that matrix by probing the pipeline with the T standard basis vectors,
//! which makes agreement with the iterative path hold by construction.
//! Building the matrix costs T pipeline runs once; applying it afterwards
//! is a plain matrix product per voxel, which is what makes whole-dataset
//! extraction cheap.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dwt::{decompose, reconstruct, Refilter, WaveletPyramid};
use crate::error::{Error, Result};
use crate::filters::FilterPair;

/// Selects which bands of a depth-I pyramid survive extraction.
///
/// Detail levels are numbered 1 (finest) through `depth` (coarsest); the
/// approximation band is tracked separately. An empty selection is legal
/// and yields the zero operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleMask {
    detail_bits: u32,
    keep_approx: bool,
    depth: usize,
}

impl ScaleMask {
    /// Deepest decomposition representable by the detail bitset.
    pub const MAX_DEPTH: usize = 32;

    /// Keeps the approximation band plus the listed detail levels.
    pub fn new(depth: usize, keep_approx: bool, detail_levels: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &level in detail_levels {
            if level == 0 || level > depth {
                return Err(Error::LevelOutOfRange { level, depth });
            }
            bits |= 1 << (level - 1);
        }
        Self::from_bits(depth, keep_approx, bits)
    }

    /// Raw-bitset constructor: bit `j-1` keeps detail level `j`.
    pub fn from_bits(depth: usize, keep_approx: bool, detail_bits: u32) -> Result<Self> {
        if depth == 0 || depth > Self::MAX_DEPTH {
            return Err(Error::BadDepth { depth, len: 0 });
        }
        if depth < 32 && detail_bits >> depth != 0 {
            return Err(Error::LevelOutOfRange {
                level: 32 - detail_bits.leading_zeros() as usize,
                depth,
            });
        }
        Ok(ScaleMask {
            detail_bits,
            keep_approx,
            depth,
        })
    }

    /// Keeps every band.
    pub fn all(depth: usize) -> Result<Self> {
        let bits = if depth >= 32 {
            u32::MAX
        } else {
            (1u32 << depth) - 1
        };
        Self::from_bits(depth, true, bits)
    }

    /// Keeps nothing; the corresponding operator is zero.
    pub fn none(depth: usize) -> Result<Self> {
        Self::from_bits(depth, false, 0)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn keeps_approx(&self) -> bool {
        self.keep_approx
    }

    /// Whether detail level `level` is kept; levels outside `1..=depth`
    /// never are.
    pub fn keeps_detail(&self, level: usize) -> bool {
        level >= 1 && level <= self.depth && self.detail_bits >> (level - 1) & 1 == 1
    }

    pub fn detail_bits(&self) -> u32 {
        self.detail_bits
    }

    pub fn keeps_everything(&self) -> bool {
        self.keep_approx && self.detail_bits.count_ones() as usize == self.depth
    }

    pub fn keeps_nothing(&self) -> bool {
        !self.keep_approx && self.detail_bits == 0
    }
}

/// Dense T by P matrix whose columns are voxel time series.
///
/// Stored column major so one voxel's series is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelMatrix {
    data: Vec<f64>,
    t: usize,
    p: usize,
}

impl VoxelMatrix {
    /// Takes column-major data of length `t * p`; every entry must be
    /// finite and the shape at least 4 by 1.
    pub fn new(data: Vec<f64>, t: usize, p: usize) -> Result<Self> {
        if t < 4 {
            return Err(Error::SignalTooShort { len: t, min: 4 });
        }
        if p < 1 {
            return Err(Error::BadParam {
                name: "voxel count",
                reason: "must be at least 1",
            });
        }
        let expected = t.checked_mul(p).ok_or(Error::MatrixSizeMismatch {
            expected: usize::MAX,
            actual: data.len(),
        })?;
        if data.len() != expected {
            return Err(Error::MatrixSizeMismatch {
                expected,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "voxel matrix entries",
            });
        }
        Ok(VoxelMatrix { data, t, p })
    }

    /// Stacks equal-length columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let p = columns.len();
        if p == 0 {
            return Err(Error::BadParam {
                name: "voxel count",
                reason: "must be at least 1",
            });
        }
        let t = columns[0].len();
        let mut data = Vec::with_capacity(t * p);
        for col in columns {
            if col.len() != t {
                return Err(Error::DimensionMismatch {
                    what: "voxel column length",
                    left: t,
                    right: col.len(),
                });
            }
            data.extend_from_slice(col);
        }
        Self::new(data, t, p)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Column-major backing storage.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Time series of voxel `i`. Panics if `i >= p`; indices come from
    /// internal loops, not user input.
    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.t..(i + 1) * self.t]
    }
}

/// Configuration a matrix was compiled from, kept attached so downstream
/// stages can verify they run the same pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    filter: String,
    mask: ScaleMask,
    refilter: Refilter,
    len: usize,
}

impl Provenance {
    pub fn new(filter: String, mask: ScaleMask, refilter: Refilter, len: usize) -> Self {
        Provenance {
            filter,
            mask,
            refilter,
            len,
        }
    }

    pub fn filter(&self) -> &str {
        &self.filter
    }

    pub fn mask(&self) -> ScaleMask {
        self.mask
    }

    pub fn refilter(&self) -> Refilter {
        self.refilter
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The compiled extraction pipeline: a dense T by T matrix plus the
/// configuration it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionOperator {
    matrix: Vec<f64>,
    provenance: Provenance,
}

impl ExtractionOperator {
    /// Assembles an operator from a row-major matrix and its provenance,
    /// e.g. when loading a cached operator from disk.
    pub fn from_parts(matrix: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let t = provenance.len();
        let expected = t * t;
        if matrix.len() != expected {
            return Err(Error::MatrixSizeMismatch {
                expected,
                actual: matrix.len(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "operator matrix entries",
            });
        }
        Ok(ExtractionOperator { matrix, provenance })
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major T by T entries.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Multiplies one signal by the operator.
    pub fn apply_signal(&self, v: &[f64]) -> Result<Vec<f64>> {
        let t = self.len();
        if v.len() != t {
            return Err(Error::DimensionMismatch {
                what: "operator input length",
                left: t,
                right: v.len(),
            });
        }
        let mut out = Vec::with_capacity(t);
        for row in self.matrix.chunks_exact(t) {
            out.push(row.iter().zip(v).map(|(m, x)| m * x).sum());
        }
        Ok(out)
    }

    /// Largest entry of M*M - M in absolute value. Zero (to rounding) when
    /// the operator is a true projection; with refiltering on it need not
    /// be, so callers report this number rather than asserting on it.
    pub fn projection_defect(&self) -> f64 {
        let t = self.len();
        let m = &self.matrix;
        let mut sq = vec![0.0f64; t * t];
        for r in 0..t {
            for k in 0..t {
                let a = m[r * t + k];
                if a == 0.0 {
                    continue;
                }
                let row_k = &m[k * t..(k + 1) * t];
                let acc = &mut sq[r * t..(r + 1) * t];
                for (s, &b) in acc.iter_mut().zip(row_k) {
                    *s += a * b;
                }
            }
        }
        sq.iter()
            .zip(m)
            .map(|(s, v)| (s - v).abs())
            .fold(0.0, f64::max)
    }
}

/// Zeroes every band the mask does not keep. The mask depth must match
/// the pyramid depth.
pub fn apply_mask(pyramid: &WaveletPyramid, mask: ScaleMask) -> Result<WaveletPyramid> {
    if mask.depth() != pyramid.depth() {
        return Err(Error::DimensionMismatch {
            what: "mask depth versus pyramid depth",
            left: mask.depth(),
            right: pyramid.depth(),
        });
    }
    let mut out = pyramid.clone();
    if !mask.keeps_approx() {
        out.approx.iter_mut().for_each(|v| *v = 0.0);
    }
    for level in 1..=out.depth() {
        if !mask.keeps_detail(level) {
            out.details[level - 1].iter_mut().for_each(|v| *v = 0.0);
        }
    }
    Ok(out)
}

/// The reference pipeline: decompose, zero the unkept scales, reconstruct.
pub fn extract_iterative(
    v: &[f64],
    filters: &FilterPair,
    mask: ScaleMask,
    refilter: Refilter,
) -> Result<Vec<f64>> {
    let pyramid = decompose(v, filters, mask.depth(), refilter)?;
    let masked = apply_mask(&pyramid, mask)?;
    reconstruct(&masked, filters, refilter)
}

/// Compiles the pipeline for signals of length `len` into a matrix by
/// probing with the standard basis vectors: column c of the result is the
/// pipeline output for the c-th basis vector.
pub fn build_operator(
    filters: &FilterPair,
    mask: ScaleMask,
    refilter: Refilter,
    len: usize,
) -> Result<ExtractionOperator> {
    let mut matrix = vec![0.0f64; len * len];
    let mut probe = vec![0.0f64; len];
    for c in 0..len {
        probe[c] = 1.0;
        let out = extract_iterative(&probe, filters, mask, refilter)?;
        probe[c] = 0.0;
        for (r, &v) in out.iter().enumerate() {
            matrix[r * len + c] = v;
        }
    }
    ExtractionOperator::from_parts(
        matrix,
        Provenance::new(String::from(filters.name()), mask, refilter, len),
    )
}

/// Extracts every column of `voxels` with one matrix product per column.
pub fn apply_operator(op: &ExtractionOperator, voxels: &VoxelMatrix) -> Result<VoxelMatrix> {
    if op.len() != voxels.t() {
        return Err(Error::DimensionMismatch {
            what: "operator size versus time points",
            left: op.len(),
            right: voxels.t(),
        });
    }
    let mut data = Vec::with_capacity(voxels.t() * voxels.p());
    for i in 0..voxels.p() {
        data.extend_from_slice(&op.apply_signal(voxels.column(i))?);
    }
    VoxelMatrix::new(data, voxels.t(), voxels.p())
}
