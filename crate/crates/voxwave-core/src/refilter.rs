//! Ideal half-band spectral projections used for anti-aliasing.
//!
//! Both projections work on the unnormalized DFT of a length-N real signal
//! (N divisible by 4). The low-pass projection keeps the outer quarters of
//! the spectrum, bins `k <= N/4` and `k >= 3N/4`, and zeroes the middle
//! half. The high-pass projection keeps exactly the complement,
//! `N/4 < k < 3N/4`. The two boundary bins N/4 and 3N/4 belong to the
//! low-pass side, so the projections partition the spectrum: their outputs
//! always sum back to the input, each is idempotent, and their composition
//! is zero.
//!
//! Applied after an analysis filter (or to a zero-padded upsampled signal
//! before a synthesis filter), the low-pass projection removes everything
//! that downsampling by 2 would fold back into the kept band, and the
//! high-pass projection does the same for the detail branch.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fft_real, ifft};

/// Which half of the spectrum a projection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    /// Keep bins `k <= N/4` and `k >= 3N/4`.
    Lowpass,
    /// Keep bins `N/4 < k < 3N/4`.
    Highpass,
}

/// A fixed-length ideal projection in the DFT domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralProjection {
    kind: ProjectionKind,
    len: usize,
}

impl SpectralProjection {
    /// The signal length must be divisible by 4 so the quarter-spectrum
    /// boundaries land on whole bins.
    pub fn new(kind: ProjectionKind, len: usize) -> Result<Self> {
        if len == 0 || !len.is_multiple_of(4) {
            return Err(Error::NotDivisible {
                len,
                divisor: 4,
                what: "the quarter-spectrum split",
            });
        }
        Ok(SpectralProjection { kind, len })
    }

    pub fn kind(&self) -> ProjectionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether DFT bin `k` survives this projection.
    pub fn retains_bin(&self, k: usize) -> bool {
        let k = k % self.len;
        let q = self.len / 4;
        let inner = k > q && k < 3 * q;
        match self.kind {
            ProjectionKind::Lowpass => !inner,
            ProjectionKind::Highpass => inner,
        }
    }

    /// Projects `x`, discarding the (numerically tiny) imaginary residue.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.apply_with_residual(x)?.0)
    }

    /// Projects `x` and also reports the largest imaginary component left
    /// after the inverse transform. The kept bin set is conjugate
    /// symmetric, so on real input the residue is pure rounding noise;
    /// exposing it lets callers assert that.
    pub fn apply_with_residual(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        if x.len() != self.len {
            return Err(Error::DimensionMismatch {
                what: "projection input",
                left: self.len,
                right: x.len(),
            });
        }
        let mut spec = fft_real(x);
        for (k, bin) in spec.iter_mut().enumerate() {
            if !self.retains_bin(k) {
                *bin = Complex64::new(0.0, 0.0);
            }
        }
        ifft(&mut spec);
        let mut residual = 0.0f64;
        let out = spec
            .iter()
            .map(|c| {
                let im = c.im.abs();
                if im > residual {
                    residual = im;
                }
                c.re
            })
            .collect();
        Ok((out, residual))
    }
}

/// Keeps the outer quarters of the spectrum of `x`.
pub fn refilter_lowpass(x: &[f64]) -> Result<Vec<f64>> {
    SpectralProjection::new(ProjectionKind::Lowpass, x.len())?.apply(x)
}

/// Keeps the middle half of the spectrum of `x`.
pub fn refilter_highpass(x: &[f64]) -> Result<Vec<f64>> {
    SpectralProjection::new(ProjectionKind::Highpass, x.len())?.apply(x)
}

/// As [`refilter_lowpass`], also reporting the imaginary residue.
pub fn refilter_lowpass_with_residual(x: &[f64]) -> Result<(Vec<f64>, f64)> {
    SpectralProjection::new(ProjectionKind::Lowpass, x.len())?.apply_with_residual(x)
}

/// As [`refilter_highpass`], also reporting the imaginary residue.
pub fn refilter_highpass_with_residual(x: &[f64]) -> Result<(Vec<f64>, f64)> {
    SpectralProjection::new(ProjectionKind::Highpass, x.len())?.apply_with_residual(x)
}
