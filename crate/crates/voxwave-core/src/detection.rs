//! Correlation-based activation scoring, spectra and scale ranking.
//!
//! Each voxel's extracted series is correlated against the extracted
//! reference; the correlation is mapped through the variance-stabilizing
//! transform `C = sqrt(A - 3) / 2 * ln((1 + r) / (1 - r))` with A the raw
//! time-point count, and voxels with C at or above the threshold are
//! flagged active. Under independence C is approximately standard normal,
//! so the default threshold 3.09 targets a one-sided false-positive rate
//! near 0.001.

use alloc::vec::Vec;

use crate::dwt::Refilter;
use crate::error::{Error, Result};
use crate::fft::fft_real;
use crate::filters::FilterPair;
use crate::operator::{extract_iterative, Provenance, ScaleMask, VoxelMatrix};

/// One-sided p of about 0.001 under the standard-normal null.
pub const DEFAULT_THRESHOLD: f64 = 3.09;

/// Correlations this close to +-1 are clamped before the log transform,
/// which diverges at the endpoints.
const CLAMP: f64 = 1.0 - 1e-7;

/// Pearson correlation plus a flag marking zero-variance input, which
/// yields r = 0 by convention instead of NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub degenerate: bool,
}

/// Standard Pearson correlation of two equal-length series.
pub fn pearson_corr(u: &[f64], v: &[f64]) -> Result<Correlation> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            what: "correlation input lengths",
            left: u.len(),
            right: v.len(),
        });
    }
    if u.len() < 3 {
        return Err(Error::BadSampleCount {
            count: u.len(),
            min: 3,
        });
    }
    if u.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "correlation inputs",
        });
    }
    let n = u.len() as f64;
    let mu: f64 = u.iter().sum::<f64>() / n;
    let mv: f64 = v.iter().sum::<f64>() / n;
    let mut suu = 0.0;
    let mut svv = 0.0;
    let mut suv = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        let da = a - mu;
        let db = b - mv;
        suu += da * da;
        svv += db * db;
        suv += da * db;
    }
    if suu == 0.0 || svv == 0.0 {
        return Ok(Correlation {
            r: 0.0,
            degenerate: true,
        });
    }
    let r = suv / libm::sqrt(suu * svv);
    Ok(Correlation {
        r: r.clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// Variance-stabilized correlation statistic
/// `C = sqrt(A - 3) / 2 * ln((1 + r) / (1 - r))`, with r clamped away from
/// the endpoints so C stays finite.
pub fn fisher_c(r: f64, a: usize) -> Result<f64> {
    if a < 4 {
        return Err(Error::BadSampleCount { count: a, min: 4 });
    }
    if r.is_nan() {
        return Err(Error::NonFinite {
            what: "correlation value",
        });
    }
    let r = r.clamp(-CLAMP, CLAMP);
    Ok(libm::sqrt((a - 3) as f64) / 2.0 * libm::log((1.0 + r) / (1.0 - r)))
}

/// Per-voxel detection outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelStat {
    pub r: f64,
    pub c: f64,
    pub active: bool,
    pub degenerate: bool,
}

/// Detection results for a whole voxel matrix, in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationMap {
    stats: Vec<VoxelStat>,
    threshold: f64,
    sample_count: usize,
}

impl ActivationMap {
    pub fn stats(&self) -> &[VoxelStat] {
        &self.stats
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Time-point count that entered the statistic.
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn active_count(&self) -> usize {
        self.stats.iter().filter(|s| s.active).count()
    }

    pub fn active_indices(&self) -> Vec<usize> {
        self.stats
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.active.then_some(i))
            .collect()
    }
}

/// Correlates every voxel column against the reference series, transforms,
/// and thresholds: a voxel is active when C is at or above `threshold`.
/// Infinite thresholds are legal (everything or nothing active); NaN is
/// not a threshold.
pub fn detect(voxels: &VoxelMatrix, reference: &[f64], threshold: f64) -> Result<ActivationMap> {
    if threshold.is_nan() {
        return Err(Error::BadParam {
            name: "threshold",
            reason: "must not be NaN",
        });
    }
    if reference.len() != voxels.t() {
        return Err(Error::DimensionMismatch {
            what: "reference length versus time points",
            left: reference.len(),
            right: voxels.t(),
        });
    }
    let a = voxels.t();
    let mut stats = Vec::with_capacity(voxels.p());
    for i in 0..voxels.p() {
        let corr = pearson_corr(reference, voxels.column(i))?;
        let c = fisher_c(corr.r, a)?;
        stats.push(VoxelStat {
            r: corr.r,
            c,
            active: c >= threshold,
            degenerate: corr.degenerate,
        });
    }
    Ok(ActivationMap {
        stats,
        threshold,
        sample_count: a,
    })
}

/// One-sided magnitude spectrum with its frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    magnitudes: Vec<f64>,
    signal_len: usize,
    dt: f64,
}

impl Spectrum {
    /// Bin magnitudes for k in 0..=N/2.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Physical frequency of bin k, in cycles per unit of `dt`.
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 / (self.signal_len as f64 * self.dt)
    }
}

/// One-sided magnitude spectrum of `v` sampled every `dt` time units.
pub fn spectrum(v: &[f64], dt: f64) -> Result<Spectrum> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::BadSampleInterval { dt });
    }
    if v.len() < 4 {
        return Err(Error::SignalTooShort {
            len: v.len(),
            min: 4,
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "spectrum input",
        });
    }
    let spec = fft_real(v);
    let magnitudes = spec[..v.len() / 2 + 1].iter().map(|c| c.norm()).collect();
    Ok(Spectrum {
        magnitudes,
        signal_len: v.len(),
        dt,
    })
}

/// Fraction of one-sided spectral energy falling on bins where `in_band`
/// is false. Interior bins count twice (they stand for a conjugate pair);
/// DC and Nyquist count once.
pub fn out_of_band_fraction<F: Fn(usize) -> bool>(v: &[f64], in_band: F) -> Result<f64> {
    if v.len() < 4 {
        return Err(Error::SignalTooShort {
            len: v.len(),
            min: 4,
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "band energy input",
        });
    }
    let n = v.len();
    let spec = fft_real(v);
    let mut total = 0.0;
    let mut outside = 0.0;
    for (k, bin) in spec.iter().enumerate().take(n / 2 + 1) {
        let weight = if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            1.0
        } else {
            2.0
        };
        let e = weight * bin.norm_sqr();
        total += e;
        if !in_band(k) {
            outside += e;
        }
    }
    if total == 0.0 {
        return Err(Error::BadParam {
            name: "signal",
            reason: "has no spectral energy",
        });
    }
    Ok(outside / total)
}

/// A candidate band of the decomposition: one detail level or the deepest
/// approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// Detail level j, 1 = finest.
    Detail(usize),
    /// Approximation band of the deepest level.
    Approx,
}

/// Score sheet entry for one candidate band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleScore {
    pub band: Band,
    /// l2 norm of the single-band reconstruction.
    pub norm: f64,
    /// Correlation of that reconstruction with the input (0 when the
    /// reconstruction has no variance).
    pub corr: f64,
    /// norm * |corr|; the ranking key.
    pub score: f64,
    /// Whether this band made the requested top-k cut.
    pub selected: bool,
}

/// Ranks the bands of a depth-`depth` decomposition by how much of the
/// input each one carries. Every candidate band is reconstructed alone,
/// scored by `norm * |corr with the input|`, and the list is returned in
/// descending score order with the top `k` flagged.
pub fn select_feature_scales(
    u: &[f64],
    filters: &FilterPair,
    depth: usize,
    refilter: Refilter,
    k: usize,
) -> Result<Vec<ScaleScore>> {
    let available = depth + 1;
    if k > available {
        return Err(Error::TooManyScales {
            requested: k,
            available,
        });
    }
    let mut candidates = Vec::with_capacity(available);
    for level in 1..=depth {
        candidates.push((Band::Detail(level), ScaleMask::new(depth, false, &[level])?));
    }
    candidates.push((Band::Approx, ScaleMask::new(depth, true, &[])?));

    let mut scores = Vec::with_capacity(available);
    for (band, mask) in candidates {
        let u_s = extract_iterative(u, filters, mask, refilter)?;
        let norm = libm::sqrt(u_s.iter().map(|x| x * x).sum::<f64>());
        let corr = pearson_corr(&u_s, u)?;
        let r = if corr.degenerate { 0.0 } else { corr.r };
        scores.push(ScaleScore {
            band,
            norm,
            corr: r,
            score: norm * r.abs(),
            selected: false,
        });
    }
    // Stable sort: ties keep candidate order (details fine to coarse,
    // then approximation), so the ranking is deterministic.
    scores.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
    for entry in scores.iter_mut().take(k) {
        entry.selected = true;
    }
    Ok(scores)
}

/// A task reference series together with its extracted version and the
/// pipeline configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSignal {
    raw: Vec<f64>,
    extracted: Vec<f64>,
    provenance: Provenance,
}

impl ReferenceSignal {
    pub fn new(raw: Vec<f64>, extracted: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if raw.len() != provenance.len() {
            return Err(Error::DimensionMismatch {
                what: "reference length versus provenance",
                left: raw.len(),
                right: provenance.len(),
            });
        }
        if extracted.len() != raw.len() {
            return Err(Error::DimensionMismatch {
                what: "extracted reference length",
                left: raw.len(),
                right: extracted.len(),
            });
        }
        Ok(ReferenceSignal {
            raw,
            extracted,
            provenance,
        })
    }

    /// Runs the raw series through the iterative pipeline described by
    /// `provenance`'s configuration.
    pub fn extract(
        raw: Vec<f64>,
        filters: &FilterPair,
        mask: ScaleMask,
        refilter: Refilter,
    ) -> Result<Self> {
        let extracted = extract_iterative(&raw, filters, mask, refilter)?;
        let provenance = Provenance::new(
            alloc::string::String::from(filters.name()),
            mask,
            refilter,
            raw.len(),
        );
        Self::new(raw, extracted, provenance)
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn extracted(&self) -> &[f64] {
        &self.extracted
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}
