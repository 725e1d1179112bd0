//! File formats: the binary voxel-matrix and operator containers plus the
//! CSV side formats.
//!
//! Voxel matrices travel as "FVX1": magic, little-endian u32 time points,
//! u32 voxel count, then the samples as little-endian f64, column major
//! (one voxel's series contiguous). CSV input is also accepted: first row
//! is a header, each later row is one time point, each column one voxel.
//!
//! Operators travel as "NEOP": magic, u32 size, one flags byte (bit 0
//! refilter, bit 1 approximation kept), u8 depth, u32 detail bitset, the
//! filter name (u8 length prefix), then the matrix as little-endian f64,
//! row major.
//!
//! Every CSV this crate writes starts with exactly one header line,
//! `# <columns> cfg=<hash>`, naming the columns and the configuration
//! hash that produced the file.

use std::fs;
use std::io::Write;
use std::path::Path;

use voxwave_core::{
    ActivationMap, Band, ExtractionOperator, Provenance, Refilter, ScaleMask, ScaleScore, Spectrum,
    VoxelMatrix,
};

use crate::error::{CliError, Result};

const VOXEL_MAGIC: &[u8; 4] = b"FVX1";
const OPERATOR_MAGIC: &[u8; 4] = b"NEOP";

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, detail: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

fn read_u32(buf: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(buf[at..at + 4].try_into().unwrap())
}

fn read_f64s(buf: &[u8], at: usize, count: usize) -> Vec<f64> {
    buf[at..at + 8 * count]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

pub fn write_voxels(path: &Path, vm: &VoxelMatrix) -> Result<()> {
    let mut buf = Vec::with_capacity(12 + 8 * vm.data().len());
    buf.extend_from_slice(VOXEL_MAGIC);
    buf.extend_from_slice(&(vm.t() as u32).to_le_bytes());
    buf.extend_from_slice(&(vm.p() as u32).to_le_bytes());
    for v in vm.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| io_err(path, e))
}

/// Loads a voxel matrix, accepting either the binary container or CSV.
pub fn read_voxels(path: &Path) -> Result<VoxelMatrix> {
    let buf = fs::read(path).map_err(|e| io_err(path, e))?;
    if buf.starts_with(VOXEL_MAGIC) {
        read_voxels_binary(path, &buf)
    } else {
        read_voxels_csv(path, &buf)
    }
}

fn read_voxels_binary(path: &Path, buf: &[u8]) -> Result<VoxelMatrix> {
    if buf.len() < 12 {
        return Err(format_err(path, "truncated voxel file header"));
    }
    let t = read_u32(buf, 4) as usize;
    let p = read_u32(buf, 8) as usize;
    let count = t
        .checked_mul(p)
        .ok_or_else(|| format_err(path, "voxel dimensions overflow"))?;
    let want = 12 + 8 * count;
    if buf.len() != want {
        return Err(format_err(
            path,
            format!(
                "expected {} bytes for {}x{} samples, found {}",
                want,
                t,
                p,
                buf.len()
            ),
        ));
    }
    let data = read_f64s(buf, 12, count);
    VoxelMatrix::new(data, t, p).map_err(|e| format_err(path, e.to_string()))
}

fn read_voxels_csv(path: &Path, buf: &[u8]) -> Result<VoxelMatrix> {
    let text = std::str::from_utf8(buf).map_err(|_| format_err(path, "not UTF-8 text"))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    // First line is the header row; everything after is one time point
    // per line.
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                format_err(path, format!("line {}: bad number {:?}", lineno + 1, field))
            })?;
            row.push(v);
        }
        if width == 0 {
            width = row.len();
        } else if row.len() != width {
            return Err(format_err(
                path,
                format!(
                    "line {}: expected {} columns, found {}",
                    lineno + 1,
                    width,
                    row.len()
                ),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() || width == 0 {
        return Err(format_err(path, "no data rows"));
    }
    let t = rows.len();
    let mut data = Vec::with_capacity(t * width);
    for voxel in 0..width {
        for row in &rows {
            data.push(row[voxel]);
        }
    }
    VoxelMatrix::new(data, t, width).map_err(|e| format_err(path, e.to_string()))
}

pub fn write_operator(path: &Path, op: &ExtractionOperator) -> Result<()> {
    let prov = op.provenance();
    let name = prov.filter().as_bytes();
    if name.len() > u8::MAX as usize {
        return Err(format_err(path, "filter name too long to serialize"));
    }
    let mask = prov.mask();
    let mut flags = 0u8;
    if prov.refilter().is_on() {
        flags |= 1;
    }
    if mask.keeps_approx() {
        flags |= 2;
    }
    let mut buf = Vec::with_capacity(15 + name.len() + 8 * op.matrix().len());
    buf.extend_from_slice(OPERATOR_MAGIC);
    buf.extend_from_slice(&(prov.len() as u32).to_le_bytes());
    buf.push(flags);
    buf.push(mask.depth() as u8);
    buf.extend_from_slice(&mask.detail_bits().to_le_bytes());
    buf.push(name.len() as u8);
    buf.extend_from_slice(name);
    for v in op.matrix() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| io_err(path, e))
}

pub fn read_operator(path: &Path) -> Result<ExtractionOperator> {
    let buf = fs::read(path).map_err(|e| io_err(path, e))?;
    if !buf.starts_with(OPERATOR_MAGIC) {
        return Err(format_err(path, "not an operator file"));
    }
    if buf.len() < 15 {
        return Err(format_err(path, "truncated operator header"));
    }
    let t = read_u32(buf.as_slice(), 4) as usize;
    let flags = buf[8];
    let depth = buf[9] as usize;
    let detail_bits = read_u32(buf.as_slice(), 10);
    let name_len = buf[14] as usize;
    let matrix_at = 15 + name_len;
    let want = matrix_at + 8 * t * t;
    if buf.len() != want {
        return Err(format_err(
            path,
            format!("expected {} bytes, found {}", want, buf.len()),
        ));
    }
    let name = std::str::from_utf8(&buf[15..matrix_at])
        .map_err(|_| format_err(path, "filter name is not UTF-8"))?
        .to_string();
    let mask = ScaleMask::from_bits(depth, flags & 2 != 0, detail_bits)
        .map_err(|e| format_err(path, e.to_string()))?;
    let refilter = if flags & 1 != 0 {
        Refilter::On
    } else {
        Refilter::Off
    };
    let matrix = read_f64s(&buf, matrix_at, t * t);
    ExtractionOperator::from_parts(matrix, Provenance::new(name, mask, refilter, t))
        .map_err(|e| format_err(path, e.to_string()))
}

/// Renders a band the way the keep flag spells it: d1, d2, ... or approx.
pub fn band_name(band: Band) -> String {
    match band {
        Band::Detail(j) => format!("d{}", j),
        Band::Approx => "approx".to_string(),
    }
}

fn write_lines(path: &Path, header: &str, cfg_hash: &str, rows: Vec<String>) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# {} cfg={}\n", header, cfg_hash));
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}

pub fn write_reference_csv(path: &Path, raw: &[f64], cfg_hash: &str) -> Result<()> {
    let rows = raw
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{},{}", i, v))
        .collect();
    write_lines(path, "t,reference", cfg_hash, rows)
}

pub fn write_truth_csv(path: &Path, truth: &[bool], cfg_hash: &str) -> Result<()> {
    let rows = truth
        .iter()
        .enumerate()
        .map(|(i, &b)| format!("{},{}", i, b as u8))
        .collect();
    write_lines(path, "voxel,active", cfg_hash, rows)
}

pub fn write_activation_csv(path: &Path, map: &ActivationMap, cfg_hash: &str) -> Result<()> {
    let rows = map
        .stats()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            format!(
                "{},{},{},{},{}",
                i, s.r, s.c, s.active as u8, s.degenerate as u8
            )
        })
        .collect();
    write_lines(path, "voxel,r,c,active,degenerate", cfg_hash, rows)
}

pub fn write_spectrum_csv(path: &Path, spec: &Spectrum, cfg_hash: &str) -> Result<()> {
    let rows = spec
        .magnitudes()
        .iter()
        .enumerate()
        .map(|(k, m)| format!("{},{},{}", k, spec.frequency(k), m))
        .collect();
    write_lines(path, "bin,frequency,magnitude", cfg_hash, rows)
}

pub fn write_scales_csv(path: &Path, scores: &[ScaleScore], cfg_hash: &str) -> Result<()> {
    let rows = scores
        .iter()
        .enumerate()
        .map(|(rank, s)| {
            format!(
                "{},{},{},{},{},{}",
                rank + 1,
                band_name(s.band),
                s.norm,
                s.corr,
                s.score,
                s.selected as u8
            )
        })
        .collect();
    write_lines(path, "rank,band,norm,corr,score,selected", cfg_hash, rows)
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Reads a single-series CSV (as written by `write_reference_csv`): takes
/// the second column of every data row.
pub fn read_reference_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for line in data_lines(&text) {
        let field = line
            .split(',')
            .nth(1)
            .ok_or_else(|| format_err(path, format!("missing value column in {:?}", line)))?;
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| format_err(path, format!("bad number {:?}", field)))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(format_err(path, "no data rows"));
    }
    Ok(out)
}

/// Reads the per-voxel flag column of a truth or activation CSV; the flag
/// sits in column 1 for truth files and column 3 for activation files.
pub fn read_flag_csv(path: &Path, column: usize) -> Result<Vec<bool>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for line in data_lines(&text) {
        let field = line
            .split(',')
            .nth(column)
            .ok_or_else(|| format_err(path, format!("missing column {} in {:?}", column, line)))?;
        match field.trim() {
            "0" => out.push(false),
            "1" => out.push(true),
            other => return Err(format_err(path, format!("bad flag {:?}", other))),
        }
    }
    Ok(out)
}
