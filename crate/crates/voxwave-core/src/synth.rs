//! Synthetic block-design datasets with known ground truth.
//!
//! The reference response is an on/off stimulus convolved (circularly,
//! matching the transform's periodic convention) with a canonical
//! double-gamma hemodynamic kernel, then mean-removed. Active voxels carry
//! that response at a chosen amplitude; every voxel additionally gets a
//! polynomial drift in normalized time and white Gaussian noise.
//!
//! Generation is a pure function of the parameter tuple. The seed feeds a
//! counter-based generator: stream 0 picks which voxels are active,
//! stream 1 + i drives voxel i's noise, so any generation order (or
//! parallel schedule) produces the same dataset.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dwt::circular_convolve;
use crate::error::{Error, Result};
use crate::operator::VoxelMatrix;

/// On/off stimulus timing: `block_on` time points of stimulation followed
/// by `block_off` of rest, repeated `n_cycles` times, sampled every `dt`
/// seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDesign {
    dt: f64,
    block_on: usize,
    block_off: usize,
    n_cycles: usize,
}

impl BlockDesign {
    pub fn new(dt: f64, block_on: usize, block_off: usize, n_cycles: usize) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::BadSampleInterval { dt });
        }
        if block_on < 1 {
            return Err(Error::BadParam {
                name: "block_on",
                reason: "must be at least 1 time point",
            });
        }
        if block_off < 1 {
            return Err(Error::BadParam {
                name: "block_off",
                reason: "must be at least 1 time point",
            });
        }
        if n_cycles < 1 {
            return Err(Error::BadParam {
                name: "n_cycles",
                reason: "must be at least 1",
            });
        }
        Ok(BlockDesign {
            dt,
            block_on,
            block_off,
            n_cycles,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn block_on(&self) -> usize {
        self.block_on
    }

    pub fn block_off(&self) -> usize {
        self.block_off
    }

    pub fn n_cycles(&self) -> usize {
        self.n_cycles
    }

    /// Total number of time points.
    pub fn len(&self) -> usize {
        self.n_cycles * (self.block_on + self.block_off)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The stimulus indicator: 1 during on-blocks, 0 during off-blocks.
pub fn boxcar(design: &BlockDesign) -> Vec<f64> {
    let period = design.block_on + design.block_off;
    (0..design.len())
        .map(|i| {
            if i % period < design.block_on {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Canonical double-gamma hemodynamic kernel sampled every `dt` seconds:
/// `g(t) = t^5 e^-t / 120 - (1/6) t^15 e^-t / 1307674368000`
/// (shape 6 and 16, unit time constant), truncated at 32 seconds and
/// scaled so the peak equals 1. Peaks near 5 s with a shallow negative
/// undershoot from roughly 10 s on.
pub fn hrf_kernel(dt: f64) -> Result<Vec<f64>> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::BadSampleInterval { dt });
    }
    const CUTOFF: f64 = 32.0;
    const GAMMA_6: f64 = 120.0;
    const GAMMA_16: f64 = 1_307_674_368_000.0;
    let n = libm::floor(CUTOFF / dt) as usize + 1;
    let mut kernel = Vec::with_capacity(n);
    let mut peak = 0.0f64;
    for i in 0..n {
        let t = i as f64 * dt;
        let e = libm::exp(-t);
        let g = libm::pow(t, 5.0) * e / GAMMA_6 - libm::pow(t, 15.0) * e / (6.0 * GAMMA_16);
        peak = peak.max(g);
        kernel.push(g);
    }
    for v in &mut kernel {
        *v /= peak;
    }
    Ok(kernel)
}

/// Everything `generate` needs besides the block timing.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    /// Number of voxels (columns).
    pub voxels: usize,
    /// Fraction of voxels carrying the response, in [0, 1].
    pub frac_active: f64,
    /// Response scale applied to active voxels.
    pub amplitude: f64,
    /// Standard deviation of the white noise added to every voxel.
    pub noise_sigma: f64,
    /// Drift polynomial coefficients in normalized time t/T, constant
    /// term first. Empty means no drift.
    pub drift: Vec<f64>,
    /// Seed for all randomness.
    pub seed: u64,
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        if self.voxels < 1 {
            return Err(Error::BadParam {
                name: "voxels",
                reason: "must be at least 1",
            });
        }
        if !self.frac_active.is_finite() || !(0.0..=1.0).contains(&self.frac_active) {
            return Err(Error::BadParam {
                name: "frac_active",
                reason: "must lie in [0, 1]",
            });
        }
        if !self.amplitude.is_finite() {
            return Err(Error::BadParam {
                name: "amplitude",
                reason: "must be finite",
            });
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::BadParam {
                name: "noise_sigma",
                reason: "must be finite and nonnegative",
            });
        }
        if self.drift.iter().any(|c| !c.is_finite()) {
            return Err(Error::BadParam {
                name: "drift",
                reason: "coefficients must be finite",
            });
        }
        Ok(())
    }
}

/// A generated dataset: the voxel matrix, the clean reference response,
/// and which voxels truly carry it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    voxels: VoxelMatrix,
    reference: Vec<f64>,
    truth: Vec<bool>,
    design: BlockDesign,
    params: SynthParams,
}

impl SyntheticDataset {
    pub fn voxels(&self) -> &VoxelMatrix {
        &self.voxels
    }

    /// The clean, mean-removed response series.
    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn truth(&self) -> &[bool] {
        &self.truth
    }

    pub fn design(&self) -> &BlockDesign {
        &self.design
    }

    pub fn params(&self) -> &SynthParams {
        &self.params
    }

    pub fn active_count(&self) -> usize {
        self.truth.iter().filter(|&&b| b).count()
    }
}

/// Picks `count` distinct indices from `0..n` by a partial shuffle driven
/// by `rng`.
fn pick_active(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let mut truth = vec![false; n];
    for &idx in &indices[..count] {
        truth[idx] = true;
    }
    truth
}

fn drift_at(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Builds the dataset. Active voxels are `amplitude * reference + drift +
/// noise`, inactive ones `drift + noise`; exactly `round(frac_active *
/// voxels)` are active.
pub fn generate(design: &BlockDesign, params: &SynthParams) -> Result<SyntheticDataset> {
    params.validate()?;
    let t = design.len();
    if t < 4 {
        return Err(Error::SignalTooShort { len: t, min: 4 });
    }

    let stimulus = boxcar(design);
    let kernel = hrf_kernel(design.dt())?;
    let mut reference = circular_convolve(&stimulus, &kernel)?;
    let mean = reference.iter().sum::<f64>() / t as f64;
    for v in &mut reference {
        *v -= mean;
    }

    let p = params.voxels;
    let n_active = libm::round(params.frac_active * p as f64) as usize;
    let mut pick_rng = ChaCha8Rng::seed_from_u64(params.seed);
    pick_rng.set_stream(0);
    let truth = pick_active(p, n_active, &mut pick_rng);

    // Noise sigma 0 still draws from the stream so datasets differing
    // only in sigma share their active sets and drift exactly.
    let noise_dist = Normal::new(0.0, params.noise_sigma).map_err(|_| Error::BadParam {
        name: "noise_sigma",
        reason: "not a valid normal deviation",
    })?;
    let drift: Vec<f64> = (0..t)
        .map(|i| drift_at(&params.drift, i as f64 / t as f64))
        .collect();

    let mut data = Vec::with_capacity(t * p);
    for (voxel, &active) in truth.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(1 + voxel as u64);
        let signal = if active { params.amplitude } else { 0.0 };
        for i in 0..t {
            let noise = noise_dist.sample(&mut rng);
            data.push(signal * reference[i] + drift[i] + noise);
        }
    }

    Ok(SyntheticDataset {
        voxels: VoxelMatrix::new(data, t, p)?,
        reference,
        truth,
        design: *design,
        params: params.clone(),
    })
}
