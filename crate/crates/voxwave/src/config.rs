//! Pipeline configuration: resolution order, key = value files, the keep
//! flag grammar, and the configuration hash embedded in output headers.
//!
//! Settings resolve lowest to highest: built-in defaults, then the
//! `--config` file, then explicit flags. The keep grammar is `all`,
//! `none`, or a comma list of `approx` and `d<level>` tokens. The hash
//! covers the semantic fields only (not file paths), so the same pipeline
//! run on differently named files stamps the same hash.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use voxwave_core::{FilterPair, Refilter, ScaleMask};

use crate::error::{CliError, Result};

pub const DEFAULT_WAVELET: &str = "d4";
pub const DEFAULT_DEPTH: usize = 3;
pub const DEFAULT_KEEP: &str = "all";

/// Everything that defines an extraction/detection pipeline, plus the
/// file endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub wavelet: String,
    pub depth: usize,
    pub refilter: bool,
    pub keep: String,
    pub threshold: f64,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            wavelet: DEFAULT_WAVELET.to_string(),
            depth: DEFAULT_DEPTH,
            refilter: false,
            keep: DEFAULT_KEEP.to_string(),
            threshold: voxwave_core::DEFAULT_THRESHOLD,
            seed: 0,
            input: None,
            output: None,
        }
    }
}

impl PipelineConfig {
    /// Overlays `path`'s key = value pairs onto `self`. Unknown keys and
    /// unparsable values are errors; later lines win over earlier ones.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Config {
                detail: format!(
                    "{} line {}: expected key = value",
                    path.display(),
                    lineno + 1
                ),
            })?;
            self.apply_kv(key.trim(), value.trim())
                .map_err(|e| CliError::Config {
                    detail: format!("{} line {}: {}", path.display(), lineno + 1, e),
                })?;
        }
        Ok(())
    }

    fn apply_kv(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "wavelet" => {
                FilterPair::by_name(value).ok_or_else(|| format!("unknown wavelet {:?}", value))?;
                self.wavelet = value.to_string();
            }
            "depth" => {
                self.depth = value
                    .parse()
                    .ok()
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| format!("bad depth {:?}", value))?;
            }
            "refilter" => {
                self.refilter = match value {
                    "on" => true,
                    "off" => false,
                    _ => return Err(format!("refilter must be on or off, got {:?}", value)),
                };
            }
            "keep" => {
                parse_keep(value, usize::MAX).map_err(|e| e.to_string())?;
                self.keep = value.to_string();
            }
            "threshold" => {
                let t: f64 = value
                    .parse()
                    .map_err(|_| format!("bad threshold {:?}", value))?;
                if t.is_nan() {
                    return Err("threshold must not be NaN".to_string());
                }
                self.threshold = t;
            }
            "seed" => {
                self.seed = value.parse().map_err(|_| format!("bad seed {:?}", value))?;
            }
            "input" => self.input = Some(PathBuf::from(value)),
            "output" => self.output = Some(PathBuf::from(value)),
            other => return Err(format!("unknown key {:?}", other)),
        }
        Ok(())
    }

    /// Serializes back to the key = value form `apply_file` reads.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "wavelet = {}", self.wavelet);
        let _ = writeln!(out, "depth = {}", self.depth);
        let _ = writeln!(
            out,
            "refilter = {}",
            if self.refilter { "on" } else { "off" }
        );
        let _ = writeln!(out, "keep = {}", self.keep);
        let _ = writeln!(out, "threshold = {}", self.threshold);
        let _ = writeln!(out, "seed = {}", self.seed);
        if let Some(p) = &self.input {
            let _ = writeln!(out, "input = {}", p.display());
        }
        if let Some(p) = &self.output {
            let _ = writeln!(out, "output = {}", p.display());
        }
        out
    }

    pub fn filters(&self) -> Result<FilterPair> {
        FilterPair::by_name(&self.wavelet).ok_or_else(|| CliError::Config {
            detail: format!("unknown wavelet {:?}", self.wavelet),
        })
    }

    pub fn mask(&self) -> Result<ScaleMask> {
        parse_keep(&self.keep, self.depth)
    }

    pub fn refilter_mode(&self) -> Refilter {
        if self.refilter {
            Refilter::On
        } else {
            Refilter::Off
        }
    }

    /// Hash of the semantic fields, canonicalized through the mask so
    /// equivalent keep spellings agree.
    pub fn hash(&self) -> Result<String> {
        let keep = keep_string(self.mask()?);
        Ok(hash_kv(&[
            ("wavelet", self.wavelet.clone()),
            ("depth", self.depth.to_string()),
            (
                "refilter",
                if self.refilter { "on" } else { "off" }.to_string(),
            ),
            ("keep", keep),
            ("threshold", self.threshold.to_string()),
            ("seed", self.seed.to_string()),
        ]))
    }
}

/// Parses the keep grammar. `depth` bounds the `d<level>` tokens; pass
/// `usize::MAX` to validate syntax only.
pub fn parse_keep(s: &str, depth: usize) -> Result<ScaleMask> {
    let effective_depth = depth.min(ScaleMask::MAX_DEPTH);
    let trimmed = s.trim();
    if trimmed == "all" {
        return Ok(ScaleMask::all(effective_depth)?);
    }
    if trimmed == "none" {
        return Ok(ScaleMask::none(effective_depth)?);
    }
    let mut keep_approx = false;
    let mut levels = Vec::new();
    for token in trimmed.split(',') {
        let token = token.trim();
        if token == "approx" {
            keep_approx = true;
        } else if let Some(num) = token.strip_prefix('d') {
            let level: usize = num.parse().map_err(|_| CliError::Config {
                detail: format!("bad keep token {:?}", token),
            })?;
            if level == 0 || level > effective_depth {
                return Err(CliError::Config {
                    detail: format!("keep level d{level} is outside 1..=d{effective_depth}"),
                });
            }
            levels.push(level);
        } else {
            return Err(CliError::Config {
                detail: format!(
                    "bad keep token {:?} (want all, none, approx or d<level>)",
                    token
                ),
            });
        }
    }
    Ok(ScaleMask::new(effective_depth, keep_approx, &levels)?)
}

/// Canonical keep string for a mask: `all`, `none`, or a sorted token
/// list with `approx` first.
pub fn keep_string(mask: ScaleMask) -> String {
    if mask.keeps_everything() {
        return "all".to_string();
    }
    if mask.keeps_nothing() {
        return "none".to_string();
    }
    let mut tokens = Vec::new();
    if mask.keeps_approx() {
        tokens.push("approx".to_string());
    }
    for level in 1..=mask.depth() {
        if mask.keeps_detail(level) {
            tokens.push(format!("d{}", level));
        }
    }
    tokens.join(",")
}

/// 16-hex-character digest of ordered key=value pairs; the stamp written
/// into every CSV header.
pub fn hash_kv(pairs: &[(&str, String)]) -> String {
    let mut h = Sha256::new();
    for (k, v) in pairs {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    let digest = h.finalize();
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        let _ = write!(hex, "{:02x}", byte);
    }
    hex
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_sane() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.wavelet, "d4");
        assert_eq!(cfg.depth, 3);
        assert!(!cfg.refilter);
        assert!(cfg.mask().unwrap().keeps_everything());
    }

    #[test]
    fn keep_grammar() {
        let m = parse_keep("approx,d1,d3", 3).unwrap();
        assert!(m.keeps_approx());
        assert!(m.keeps_detail(1));
        assert!(!m.keeps_detail(2));
        assert!(m.keeps_detail(3));
        assert!(parse_keep("all", 2).unwrap().keeps_everything());
        assert!(parse_keep("none", 2).unwrap().keeps_nothing());
        assert!(parse_keep("d5", 3).is_err());
        assert!(parse_keep("bogus", 3).is_err());
        assert!(parse_keep("d0", 3).is_err());
    }

    #[test]
    fn keep_string_is_canonical() {
        assert_eq!(
            keep_string(parse_keep("d3,approx,d1", 3).unwrap()),
            "approx,d1,d3"
        );
        assert_eq!(
            keep_string(parse_keep("d1,d2,d3,approx", 3).unwrap()),
            "all"
        );
        assert_eq!(keep_string(ScaleMask::none(4).unwrap()), "none");
    }

    #[test]
    fn kv_file_round_trip() {
        let cfg = PipelineConfig {
            wavelet: "haar".to_string(),
            depth: 2,
            refilter: true,
            keep: "approx,d2".to_string(),
            threshold: 2.5,
            seed: 99,
            ..PipelineConfig::default()
        };
        let dir = std::env::temp_dir().join("voxwave-config-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.txt");
        fs::write(&path, cfg.to_kv_string()).unwrap();
        let mut back = PipelineConfig::default();
        back.apply_file(&path).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn kv_file_rejects_unknown_keys() {
        let dir = std::env::temp_dir().join("voxwave-config-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.txt");
        fs::write(&path, "wavelength = banana\n").unwrap();
        let mut cfg = PipelineConfig::default();
        assert!(matches!(
            cfg.apply_file(&path).unwrap_err(),
            CliError::Config { .. }
        ));
    }

    #[test]
    fn hash_tracks_semantics_not_paths() {
        let mut a = PipelineConfig::default();
        let mut b = PipelineConfig::default();
        a.input = Some(PathBuf::from("x.fvx"));
        b.input = Some(PathBuf::from("y.fvx"));
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 1;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        // Equivalent keep spellings hash alike.
        a.keep = "approx,d1,d2,d3".to_string();
        let c = PipelineConfig::default();
        assert_eq!(a.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn hash_is_stable_hex() {
        let h = hash_kv(&[("k", "v".to_string())]);
        assert_eq!(h.len(), 16);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
        assert_eq!(h, hash_kv(&[("k", "v".to_string())]));
    }
}
