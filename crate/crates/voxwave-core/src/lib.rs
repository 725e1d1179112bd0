//! Wavelet-domain feature extraction for voxel time series.
//!
//! The crate decomposes periodic signals with an orthogonal filter bank,
//! optionally inserts ideal spectral projections around each filtering
//! stage to suppress sampling aliases, reconstructs from a selected subset
//! of scales, and scores voxels against the extracted reference by a
//! variance-stabilized correlation statistic. A small synthetic-data
//! generator produces block-design datasets with known ground truth for
//! calibration and benchmarks.
//!
//! Everything here is `no_std` (with `alloc`); file formats, the command
//! line tool and wall-clock benchmarks live in the companion crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod fft;

pub mod detection;
pub mod dwt;
pub mod filters;
pub mod operator;
pub mod refilter;
pub mod synth;

pub use detection::{
    detect, fisher_c, out_of_band_fraction, pearson_corr, select_feature_scales, spectrum,
    ActivationMap, Band, Correlation, ReferenceSignal, ScaleScore, Spectrum, VoxelStat,
    DEFAULT_THRESHOLD,
};
pub use dwt::{
    circular_convolve, decompose, downsample2, reconstruct, upsample2, Refilter, WaveletPyramid,
};
pub use error::{Error, Result};
pub use filters::FilterPair;
pub use operator::{
    apply_mask, apply_operator, build_operator, extract_iterative, ExtractionOperator, Provenance,
    ScaleMask, VoxelMatrix,
};
pub use refilter::{
    refilter_highpass, refilter_highpass_with_residual, refilter_lowpass,
    refilter_lowpass_with_residual, ProjectionKind, SpectralProjection,
};
pub use synth::{boxcar, generate, hrf_kernel, BlockDesign, SynthParams, SyntheticDataset};
