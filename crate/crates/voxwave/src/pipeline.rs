//! Shared command plumbing: resolving a config into filter objects,
//! building or loading the operator, and running extraction in either
//! mode.

use std::path::Path;

use voxwave_core::{
    apply_operator, build_operator, extract_iterative, ExtractionOperator, FilterPair, Refilter,
    ScaleMask, VoxelMatrix,
};

use crate::config::{keep_string, PipelineConfig};
use crate::error::{CliError, Result};
use crate::formats;

/// Extraction path selector; matrix is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Iterative,
    Matrix,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "iterative" => Ok(Mode::Iterative),
            "matrix" => Ok(Mode::Matrix),
            other => Err(CliError::Usage {
                detail: format!("--mode must be iterative or matrix, got {:?}", other),
            }),
        }
    }
}

/// A config resolved into working objects.
pub struct Resolved {
    pub filters: FilterPair,
    pub mask: ScaleMask,
    pub refilter: Refilter,
}

pub fn resolve(cfg: &PipelineConfig) -> Result<Resolved> {
    Ok(Resolved {
        filters: cfg.filters()?,
        mask: cfg.mask()?,
        refilter: cfg.refilter_mode(),
    })
}

/// Builds the operator from the config, or loads a cached one. A loaded
/// operator's provenance replaces the config's pipeline fields (the file
/// records exactly what it computes), so `cfg` is rewritten to match and
/// the output hash stays truthful.
pub fn obtain_operator(
    cfg: &mut PipelineConfig,
    t: usize,
    operator_in: Option<&Path>,
) -> Result<ExtractionOperator> {
    if let Some(path) = operator_in {
        let op = formats::read_operator(path)?;
        if op.len() != t {
            return Err(CliError::Format {
                path: path.to_path_buf(),
                detail: format!(
                    "operator is {}x{0} but the data has {} time points",
                    op.len(),
                    t
                ),
            });
        }
        let prov = op.provenance();
        cfg.wavelet = prov.filter().to_string();
        cfg.depth = prov.mask().depth();
        cfg.refilter = prov.refilter().is_on();
        cfg.keep = keep_string(prov.mask());
        return Ok(op);
    }
    let r = resolve(cfg)?;
    Ok(build_operator(&r.filters, r.mask, r.refilter, t)?)
}

/// Extracts every column, by matrix product or by running the iterative
/// pipeline per column.
pub fn extract_all(
    op: &ExtractionOperator,
    voxels: &VoxelMatrix,
    mode: Mode,
) -> Result<VoxelMatrix> {
    match mode {
        Mode::Matrix => Ok(apply_operator(op, voxels)?),
        Mode::Iterative => {
            let prov = op.provenance();
            let filters = FilterPair::by_name(prov.filter()).ok_or_else(|| CliError::Config {
                detail: format!("operator names unknown wavelet {:?}", prov.filter()),
            })?;
            let mut columns = Vec::with_capacity(voxels.p());
            for i in 0..voxels.p() {
                columns.push(extract_iterative(
                    voxels.column(i),
                    &filters,
                    prov.mask(),
                    prov.refilter(),
                )?);
            }
            Ok(VoxelMatrix::from_columns(&columns)?)
        }
    }
}
