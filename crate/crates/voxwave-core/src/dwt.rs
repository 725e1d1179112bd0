//! Periodic orthogonal discrete wavelet transform.
//!
//! Decomposition filters each level with the analysis pair and keeps the
//! even-indexed samples; reconstruction upsamples by zero insertion, filters
//! with the synthesis pair and sums the two branches. All filtering is
//! circular, so every stage is an exact linear map on R^N and decomposing
//! then reconstructing is an exact identity (refiltering off).
//!
//! With refiltering on, a spectral projection is inserted after the analysis
//! filters and before the synthesis filters: the low-pass branch keeps only
//! the outer quarters of the DFT spectrum, the high-pass branch only the
//! middle half. That removes the frequency content that down/upsampling by 2
//! would otherwise alias, at the cost of exact invertibility.
//!
//! Conventions fixed by this module:
//! - circular convolution `y[n] = sum_k h[k] x[(n-k) mod N]`;
//! - downsampling keeps even indices;
//! - detail level 1 is the finest band, level `depth` the coarsest;
//! - reconstruction advances each level's output circularly by
//!   `filter len - 1` to cancel the causal time-reversal delay.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filters::FilterPair;
use crate::refilter::{refilter_highpass, refilter_lowpass};

/// Whether the spectral re-filtering stages are applied around each
/// filtering step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refilter {
    Off,
    On,
}

impl Refilter {
    pub fn is_on(self) -> bool {
        matches!(self, Refilter::On)
    }
}

/// Multi-level wavelet coefficient set for one signal.
///
/// Holds the approximation band of the deepest level plus one detail band
/// per level, finest first in `details`. The canonical flattened ordering
/// (see [`WaveletPyramid::coeff_vector`]) lists the approximation band
/// first, then details from coarsest down to finest.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub(crate) approx: Vec<f64>,
    pub(crate) details: Vec<Vec<f64>>,
    pub(crate) original_len: usize,
}

impl WaveletPyramid {
    /// Builds a pyramid from raw bands, validating the length law
    /// (detail level j has `original_len / 2^j` samples, the approximation
    /// matches the deepest detail band).
    pub fn new(approx: Vec<f64>, details: Vec<Vec<f64>>, original_len: usize) -> Result<Self> {
        let depth = details.len();
        if depth == 0 || depth >= usize::BITS as usize {
            return Err(Error::BadDepth {
                depth,
                len: original_len,
            });
        }
        if !original_len.is_multiple_of(1 << depth) {
            return Err(Error::NotDivisible {
                len: original_len,
                divisor: 1 << depth,
                what: "the coefficient length law",
            });
        }
        for (i, d) in details.iter().enumerate() {
            let want = original_len >> (i + 1);
            if d.len() != want {
                return Err(Error::PyramidInconsistent {
                    what: "detail band",
                    expected: want,
                    actual: d.len(),
                });
            }
        }
        let want = original_len >> depth;
        if approx.len() != want {
            return Err(Error::PyramidInconsistent {
                what: "approximation band",
                expected: want,
                actual: approx.len(),
            });
        }
        Ok(WaveletPyramid {
            approx,
            details,
            original_len,
        })
    }

    pub fn depth(&self) -> usize {
        self.details.len()
    }

    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    /// Detail band for `level` in `1..=depth`; level 1 is the finest.
    pub fn detail(&self, level: usize) -> Result<&[f64]> {
        if level == 0 || level > self.depth() {
            return Err(Error::LevelOutOfRange {
                level,
                depth: self.depth(),
            });
        }
        Ok(&self.details[level - 1])
    }

    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    /// All coefficients as one vector: approximation band first, then
    /// detail bands from the coarsest level down to the finest.
    pub fn coeff_vector(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.original_len);
        out.extend_from_slice(&self.approx);
        for d in self.details.iter().rev() {
            out.extend_from_slice(d);
        }
        out
    }

    /// Sum of squared coefficients over all bands.
    pub fn energy(&self) -> f64 {
        let e: f64 = self.approx.iter().map(|v| v * v).sum();
        e + self
            .details
            .iter()
            .map(|d| d.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
    }
}

/// Circular convolution `y[n] = sum_k h[k] x[(n-k) mod N]`.
pub fn circular_convolve(x: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    if h.is_empty() {
        return Err(Error::EmptyFilter);
    }
    let n = x.len();
    if h.len() > n {
        return Err(Error::FilterLongerThanSignal {
            filter: h.len(),
            signal: n,
        });
    }
    let mut y = vec![0.0; n];
    for (k, &hk) in h.iter().enumerate() {
        if hk == 0.0 {
            continue;
        }
        // x index runs (n-k) mod n, (n-k+1) mod n, ...
        let (tail, head) = x.split_at(n - k);
        for (yi, &xv) in y.iter_mut().zip(head.iter().chain(tail)) {
            *yi += hk * xv;
        }
    }
    Ok(y)
}

/// Keeps the even-indexed samples.
pub fn downsample2(x: &[f64]) -> Result<Vec<f64>> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::OddLength { len: x.len() });
    }
    Ok(x.iter().step_by(2).copied().collect())
}

/// Inserts a zero after every sample, doubling the length.
pub fn upsample2(x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len() * 2];
    for (i, &v) in x.iter().enumerate() {
        y[2 * i] = v;
    }
    y
}

fn advance(mut x: Vec<f64>, by: usize) -> Vec<f64> {
    let n = x.len();
    x.rotate_left(by % n);
    x
}

fn check_signal(v: &[f64]) -> Result<()> {
    if v.len() < 4 {
        return Err(Error::SignalTooShort {
            len: v.len(),
            min: 4,
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "signal samples",
        });
    }
    Ok(())
}

fn check_divisibility(len: usize, depth: usize, refilter: Refilter) -> Result<()> {
    if depth == 0 || depth >= usize::BITS as usize {
        return Err(Error::BadDepth { depth, len });
    }
    match refilter {
        // Each of the `depth` halvings must land on an even length.
        Refilter::Off => {
            if !len.is_multiple_of(1 << depth) {
                return Err(Error::NotDivisible {
                    len,
                    divisor: 1 << depth,
                    what: "the requested decomposition depth",
                });
            }
        }
        // Every refiltered intermediate additionally needs a length
        // divisible by 4 for the quarter-spectrum split.
        Refilter::On => {
            if !len.is_multiple_of(1 << (depth + 1)) {
                return Err(Error::NotDivisible {
                    len,
                    divisor: 1 << (depth + 1),
                    what: "the requested depth with re-filtering",
                });
            }
        }
    }
    Ok(())
}

/// Multi-level analysis: split into approximation and detail bands down to
/// `depth` levels. With `Refilter::On` the anti-aliasing projections are
/// applied after each analysis filter, before downsampling.
pub fn decompose(
    v: &[f64],
    filters: &FilterPair,
    depth: usize,
    refilter: Refilter,
) -> Result<WaveletPyramid> {
    check_signal(v)?;
    check_divisibility(v.len(), depth, refilter)?;

    let mut current = v.to_vec();
    let mut details = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut low = circular_convolve(&current, filters.lowpass_dec())?;
        let mut high = circular_convolve(&current, filters.highpass_dec())?;
        if refilter.is_on() {
            low = refilter_lowpass(&low)?;
            high = refilter_highpass(&high)?;
        }
        details.push(downsample2(&high)?);
        current = downsample2(&low)?;
    }
    WaveletPyramid::new(current, details, v.len())
}

/// Multi-level synthesis, the inverse of [`decompose`] when refiltering is
/// off. With `Refilter::On` the projections are applied after upsampling,
/// before the synthesis filters, and the result is generally not the
/// original signal: the energy the projections remove stays removed.
pub fn reconstruct(
    pyramid: &WaveletPyramid,
    filters: &FilterPair,
    refilter: Refilter,
) -> Result<Vec<f64>> {
    check_divisibility(pyramid.original_len, pyramid.depth(), refilter)?;

    let delay = filters.len() - 1;
    let mut current = pyramid.approx.clone();
    for level in (1..=pyramid.depth()).rev() {
        let detail = pyramid.detail(level)?;
        if detail.len() != current.len() {
            return Err(Error::PyramidInconsistent {
                what: "detail band",
                expected: current.len(),
                actual: detail.len(),
            });
        }
        let mut low = upsample2(&current);
        let mut high = upsample2(detail);
        if refilter.is_on() {
            low = refilter_lowpass(&low)?;
            high = refilter_highpass(&high)?;
        }
        let low = circular_convolve(&low, filters.lowpass_rec())?;
        let high = circular_convolve(&high, filters.highpass_rec())?;
        let sum: Vec<f64> = low.iter().zip(&high).map(|(a, b)| a + b).collect();
        current = advance(sum, delay);
    }
    Ok(current)
}
