//! Orthogonal wavelet filter banks.
//!
//! A [`FilterPair`] holds the four coefficient sequences of an orthonormal
//! two-channel filter bank: low-/high-pass decomposition filters and their
//! reconstruction counterparts. Built-in pairs are Haar (2 taps) and
//! Daubechies-4 (4 taps); custom pairs are validated against the filter-bank
//! invariants on construction.

use alloc::string::String;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dwt::{decompose, reconstruct, Refilter};
use crate::error::{Error, Result};

const ORTHONORMALITY_TOL: f64 = 1e-12;
const QMF_TOL: f64 = 1e-12;
const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Orthonormal decomposition/reconstruction filter coefficients.
///
/// Immutable after construction. The reconstruction convention of this crate
/// is: convolve with the reconstruction filters, then advance the result
/// circularly by `len() - 1` samples to cancel the delay of the causal
/// time-reversal. Under that convention the reconstruction filters of an
/// orthonormal bank are the reversed decomposition filters, which is what
/// [`FilterPair::from_lowpass`] produces.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    name: String,
    lowpass_dec: Vec<f64>,
    highpass_dec: Vec<f64>,
    lowpass_rec: Vec<f64>,
    highpass_rec: Vec<f64>,
}

impl FilterPair {
    /// Validates all four sequences and the perfect-reconstruction identity.
    pub fn new(
        name: &str,
        lowpass_dec: Vec<f64>,
        highpass_dec: Vec<f64>,
        lowpass_rec: Vec<f64>,
        highpass_rec: Vec<f64>,
    ) -> Result<Self> {
        let taps = lowpass_dec.len();
        if taps < 2 {
            return Err(Error::BadFilter {
                reason: "filters need at least two taps",
            });
        }
        if !taps.is_multiple_of(2) {
            return Err(Error::BadFilter {
                reason: "filter length must be even",
            });
        }
        for seq in [&highpass_dec, &lowpass_rec, &highpass_rec] {
            if seq.len() != taps {
                return Err(Error::BadFilter {
                    reason: "all four filters must share one length",
                });
            }
        }
        let all = lowpass_dec
            .iter()
            .chain(&highpass_dec)
            .chain(&lowpass_rec)
            .chain(&highpass_rec);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "filter coefficients",
            });
        }

        let sumsq: f64 = lowpass_dec.iter().map(|c| c * c).sum();
        if libm::fabs(sumsq - 1.0) > ORTHONORMALITY_TOL {
            return Err(Error::BadFilter {
                reason: "low-pass decomposition filter is not orthonormal",
            });
        }
        for k in 0..taps {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let want = sign * lowpass_dec[taps - 1 - k];
            if libm::fabs(highpass_dec[k] - want) > QMF_TOL {
                return Err(Error::BadFilter {
                    reason: "high-pass filter violates the quadrature-mirror relation",
                });
            }
        }

        let pair = FilterPair {
            name: String::from(name),
            lowpass_dec,
            highpass_dec,
            lowpass_rec,
            highpass_rec,
        };
        pair.check_reconstruction()?;
        Ok(pair)
    }

    /// Derives the high-pass and reconstruction filters from a low-pass
    /// decomposition filter: quadrature mirror for the high-pass, reversal
    /// for the reconstruction side.
    pub fn from_lowpass(name: &str, lowpass_dec: Vec<f64>) -> Result<Self> {
        let taps = lowpass_dec.len();
        let highpass_dec: Vec<f64> = (0..taps)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass_dec[taps - 1 - k]
            })
            .collect();
        let lowpass_rec: Vec<f64> = lowpass_dec.iter().rev().copied().collect();
        let highpass_rec: Vec<f64> = highpass_dec.iter().rev().copied().collect();
        Self::new(name, lowpass_dec, highpass_dec, lowpass_rec, highpass_rec)
    }

    /// Haar pair, taps `[1, 1] / sqrt(2)`.
    pub fn haar() -> Self {
        let c = core::f64::consts::FRAC_1_SQRT_2;
        Self::from_lowpass("haar", alloc::vec![c, c]).expect("haar filter is orthonormal")
    }

    /// Daubechies-4 pair (4 orthonormal taps).
    pub fn daubechies4() -> Self {
        let s3 = libm::sqrt(3.0);
        let norm = 4.0 * core::f64::consts::SQRT_2;
        let low = alloc::vec![
            (1.0 + s3) / norm,
            (3.0 + s3) / norm,
            (3.0 - s3) / norm,
            (1.0 - s3) / norm,
        ];
        Self::from_lowpass("d4", low).expect("daubechies-4 filter is orthonormal")
    }

    /// Looks up a built-in pair by name ("haar" or "d4").
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "haar" => Some(Self::haar()),
            "d4" => Some(Self::daubechies4()),
            _ => None,
        }
    }

    // Decompose-then-reconstruct a fixed pseudo-random probe and require
    // identity. This is what "reconstruction filters match" means here; any
    // phase or sign inconsistency fails loudly.
    fn check_reconstruction(&self) -> Result<()> {
        let probe_len = (4 * self.len()).next_power_of_two().max(16);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f117);
        let probe: Vec<f64> = (0..probe_len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pyramid = decompose(&probe, self, 1, Refilter::Off)?;
        let back = reconstruct(&pyramid, self, Refilter::Off)?;
        let worst = probe
            .iter()
            .zip(&back)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max);
        if worst > RECONSTRUCTION_TOL {
            return Err(Error::BadFilter {
                reason: "reconstruction filters do not invert the decomposition",
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Tap count, shared by all four filters.
    pub fn len(&self) -> usize {
        self.lowpass_dec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass_dec.is_empty()
    }

    pub fn lowpass_dec(&self) -> &[f64] {
        &self.lowpass_dec
    }

    pub fn highpass_dec(&self) -> &[f64] {
        &self.highpass_dec
    }

    pub fn lowpass_rec(&self) -> &[f64] {
        &self.lowpass_rec
    }

    pub fn highpass_rec(&self) -> &[f64] {
        &self.highpass_rec
    }
}
