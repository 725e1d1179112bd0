//! Flag surface and command implementations.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use voxwave_core::{detect, select_feature_scales, spectrum, BlockDesign, SynthParams};

use crate::bench::run_bench;
use crate::config::{hash_kv, PipelineConfig};
use crate::error::{CliError, Result};
use crate::formats;
use crate::pipeline::{self, Mode};

#[derive(Parser)]
#[command(
    name = "voxwave",
    version,
    about = "Wavelet-domain feature extraction and activation detection for voxel time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic block-design dataset with known truth
    Synth(SynthArgs),
    /// Extract the kept scales from every voxel time series
    Extract(ExtractArgs),
    /// Correlate extracted voxels against the extracted reference and threshold
    Detect(DetectArgs),
    /// One-sided magnitude spectrum of one series
    Spectrum(SpectrumArgs),
    /// Rank decomposition bands by their share of a reference series
    Scales(ScalesArgs),
    /// Time iterative versus compiled-matrix extraction
    Bench(BenchArgs),
}

/// Pipeline flags shared by the commands that run the transform. Unset
/// flags fall back to the --config file, then to built-in defaults.
#[derive(Args, Clone)]
pub struct PipelineFlags {
    /// Key = value config file applied before explicit flags
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Wavelet family
    #[arg(long, value_parser = ["haar", "d4"])]
    pub wavelet: Option<String>,

    /// Decomposition depth (number of levels)
    #[arg(long)]
    pub depth: Option<usize>,

    /// Spectral re-filtering around each stage
    #[arg(long, value_parser = ["on", "off"])]
    pub refilter: Option<String>,

    /// Scales to keep: all, none, or comma list of approx and d<level>
    #[arg(long)]
    pub keep: Option<String>,
}

impl PipelineFlags {
    /// defaults <- config file <- explicit flags.
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(w) = &self.wavelet {
            cfg.wavelet = w.clone();
        }
        if let Some(d) = self.depth {
            if d < 1 {
                return Err(CliError::Usage {
                    detail: "--depth must be at least 1".to_string(),
                });
            }
            cfg.depth = d;
        }
        if let Some(r) = &self.refilter {
            cfg.refilter = r == "on";
        }
        if let Some(k) = &self.keep {
            cfg.keep = k.clone();
        }
        cfg.mask()?;
        Ok(cfg)
    }
}

#[derive(Args)]
pub struct SynthArgs {
    /// Time points per voxel
    #[arg(long = "T", value_name = "T")]
    pub t: u32,

    /// Voxel count
    #[arg(long = "P", value_name = "P", value_parser = clap::value_parser!(u32).range(1..))]
    pub p: u32,

    /// Fraction of voxels carrying the response
    #[arg(long, default_value_t = 0.0)]
    pub frac_active: f64,

    /// Response amplitude in active voxels
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,

    /// White-noise standard deviation
    #[arg(long, default_value_t = 1.0)]
    pub noise_sigma: f64,

    /// Drift polynomial coefficients in t/T, comma separated, constant
    /// first; defaults to a linear drift with slope 0.5 * noise_sigma
    #[arg(long, allow_hyphen_values = true)]
    pub drift: Option<String>,

    /// Seed for all randomness
    #[arg(long)]
    pub seed: u64,

    /// Sampling interval in seconds
    #[arg(long, default_value_t = 2.0)]
    pub dt: f64,

    /// On-block length in time points
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub block_on: u32,

    /// Off-block length in time points
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub block_off: u32,

    /// Output prefix: writes <out>.fvx, <out>_reference.csv, <out>_truth.csv
    #[arg(long, default_value = "synth")]
    pub out: String,
}

#[derive(Args)]
pub struct ExtractArgs {
    /// Voxel matrix, binary or CSV
    #[arg(long)]
    pub input: PathBuf,

    /// Extracted voxel matrix (binary)
    #[arg(long)]
    pub output: PathBuf,

    #[command(flatten)]
    pub pipeline: PipelineFlags,

    /// Extraction path
    #[arg(long, default_value = "matrix", value_parser = ["iterative", "matrix"])]
    pub mode: String,

    /// Write the compiled operator here for reuse
    #[arg(long)]
    pub operator_out: Option<PathBuf>,

    /// Reuse a compiled operator instead of building one; its recorded
    /// configuration overrides the pipeline flags
    #[arg(long)]
    pub operator_in: Option<PathBuf>,
}

#[derive(Args)]
pub struct DetectArgs {
    /// Voxel matrix, binary or CSV
    #[arg(long)]
    pub input: PathBuf,

    /// Reference series CSV (t,value rows)
    #[arg(long)]
    pub reference: PathBuf,

    /// Activation CSV
    #[arg(long)]
    pub output: PathBuf,

    #[command(flatten)]
    pub pipeline: PipelineFlags,

    /// Activation threshold on the C statistic; -inf and inf are legal
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,

    /// Extraction path
    #[arg(long, default_value = "matrix", value_parser = ["iterative", "matrix"])]
    pub mode: String,

    /// Reuse a compiled operator; overrides pipeline flags
    #[arg(long)]
    pub operator_in: Option<PathBuf>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Voxel matrix or single-series CSV
    #[arg(long)]
    pub input: PathBuf,

    /// Spectrum CSV
    #[arg(long)]
    pub output: PathBuf,

    /// Which voxel column to use when the input is a matrix
    #[arg(long, default_value_t = 0)]
    pub column: usize,

    /// Sampling interval in seconds
    #[arg(long, default_value_t = 2.0)]
    pub dt: f64,
}

#[derive(Args)]
pub struct ScalesArgs {
    /// Reference series CSV (or voxel matrix with --column)
    #[arg(long)]
    pub input: PathBuf,

    /// Ranked scales CSV
    #[arg(long)]
    pub output: PathBuf,

    /// Which voxel column to use when the input is a matrix
    #[arg(long, default_value_t = 0)]
    pub column: usize,

    #[command(flatten)]
    pub pipeline: PipelineFlags,

    /// How many top scales to flag as characteristic
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Time points
    #[arg(long = "T", value_name = "T", default_value_t = 128)]
    pub t: u32,

    /// Voxel counts, comma separated
    #[arg(long = "P", value_name = "P", default_value = "1000")]
    pub p: String,

    #[command(flatten)]
    pub pipeline: PipelineFlags,

    /// Repetitions; reported times are minima over them
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub reps: u32,

    /// Seed for the benchmark data
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Also write the table here (it always goes to stdout)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => cmd_synth(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Scales(a) => cmd_scales(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn parse_f64_list(s: &str, flag: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse().map_err(|_| CliError::Usage {
                detail: format!("{}: bad number {:?}", flag, tok),
            })
        })
        .collect()
}

fn parse_usize_list(s: &str, flag: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .ok()
                .filter(|&v: &usize| v >= 1)
                .ok_or_else(|| CliError::Usage {
                    detail: format!("{}: bad count {:?}", flag, tok),
                })
        })
        .collect()
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.frac_active) {
        return Err(CliError::Usage {
            detail: "--frac-active must lie in [0, 1]".to_string(),
        });
    }
    if !args.noise_sigma.is_finite() || args.noise_sigma < 0.0 {
        return Err(CliError::Usage {
            detail: "--noise-sigma must be finite and nonnegative".to_string(),
        });
    }
    if !args.dt.is_finite() || args.dt <= 0.0 {
        return Err(CliError::Usage {
            detail: "--dt must be positive".to_string(),
        });
    }
    let period = (args.block_on + args.block_off) as usize;
    let t = args.t as usize;
    if t == 0 || !t.is_multiple_of(period) {
        return Err(CliError::Usage {
            detail: format!(
                "--T must be a positive multiple of --block-on + --block-off ({})",
                period
            ),
        });
    }
    let design = BlockDesign::new(
        args.dt,
        args.block_on as usize,
        args.block_off as usize,
        t / period,
    )?;
    let drift = match &args.drift {
        Some(s) => parse_f64_list(s, "--drift")?,
        None => vec![0.0, 0.5 * args.noise_sigma],
    };
    let params = SynthParams {
        voxels: args.p as usize,
        frac_active: args.frac_active,
        amplitude: args.amplitude,
        noise_sigma: args.noise_sigma,
        drift: drift.clone(),
        seed: args.seed,
    };
    let ds = voxwave_core::synth::generate(&design, &params)?;

    let drift_str = drift
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let hash = hash_kv(&[
        ("command", "synth".to_string()),
        ("T", t.to_string()),
        ("P", args.p.to_string()),
        ("dt", args.dt.to_string()),
        ("block_on", args.block_on.to_string()),
        ("block_off", args.block_off.to_string()),
        ("frac_active", args.frac_active.to_string()),
        ("amplitude", args.amplitude.to_string()),
        ("noise_sigma", args.noise_sigma.to_string()),
        ("drift", drift_str),
        ("seed", args.seed.to_string()),
    ]);

    let voxel_path = PathBuf::from(format!("{}.fvx", args.out));
    let reference_path = PathBuf::from(format!("{}_reference.csv", args.out));
    let truth_path = PathBuf::from(format!("{}_truth.csv", args.out));
    formats::write_voxels(&voxel_path, ds.voxels())?;
    formats::write_reference_csv(&reference_path, ds.reference(), &hash)?;
    formats::write_truth_csv(&truth_path, ds.truth(), &hash)?;
    println!(
        "wrote {} ({} x {}), {} and {} ({} active)",
        voxel_path.display(),
        ds.voxels().t(),
        ds.voxels().p(),
        reference_path.display(),
        truth_path.display(),
        ds.active_count()
    );
    Ok(())
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let mut cfg = args.pipeline.resolve()?;
    let mode = Mode::parse(&args.mode)?;
    let voxels = formats::read_voxels(&args.input)?;
    let op = pipeline::obtain_operator(&mut cfg, voxels.t(), args.operator_in.as_deref())?;
    let extracted = pipeline::extract_all(&op, &voxels, mode)?;
    formats::write_voxels(&args.output, &extracted)?;
    if let Some(path) = &args.operator_out {
        formats::write_operator(path, &op)?;
    }
    println!(
        "extracted {} voxels x {} time points ({} keep={} refilter={}) -> {}",
        extracted.p(),
        extracted.t(),
        cfg.wavelet,
        cfg.keep,
        if cfg.refilter { "on" } else { "off" },
        args.output.display()
    );
    Ok(())
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let mut cfg = args.pipeline.resolve()?;
    if let Some(t) = args.threshold {
        cfg.threshold = t;
    }
    let mode = Mode::parse(&args.mode)?;
    let voxels = formats::read_voxels(&args.input)?;
    let reference = formats::read_reference_csv(&args.reference)?;
    let op = pipeline::obtain_operator(&mut cfg, voxels.t(), args.operator_in.as_deref())?;
    let extracted = pipeline::extract_all(&op, &voxels, mode)?;
    let reference_extracted = match mode {
        Mode::Matrix => op.apply_signal(&reference).map_err(CliError::Pipeline)?,
        Mode::Iterative => {
            let r = pipeline::resolve(&cfg)?;
            voxwave_core::extract_iterative(&reference, &r.filters, r.mask, r.refilter)?
        }
    };
    let map = detect(&extracted, &reference_extracted, cfg.threshold)?;
    formats::write_activation_csv(&args.output, &map, &cfg.hash()?)?;
    println!(
        "{} of {} voxels active at threshold {} -> {}",
        map.active_count(),
        map.stats().len(),
        map.threshold(),
        args.output.display()
    );
    Ok(())
}

/// Loads one series: a voxel-matrix column, or the value column of a
/// single-series CSV (recognized by its `#` header line).
fn load_series(path: &Path, column: usize) -> Result<Vec<f64>> {
    let head = std::fs::read(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    if !head.starts_with(b"FVX1") && head.starts_with(b"#") {
        if column != 0 {
            return Err(CliError::Usage {
                detail: "--column only applies to voxel-matrix input".to_string(),
            });
        }
        return formats::read_reference_csv(path);
    }
    let voxels = formats::read_voxels(path)?;
    if column >= voxels.p() {
        return Err(CliError::Usage {
            detail: format!(
                "--column {} out of range, input has {} voxels",
                column,
                voxels.p()
            ),
        });
    }
    Ok(voxels.column(column).to_vec())
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    if !args.dt.is_finite() || args.dt <= 0.0 {
        return Err(CliError::Usage {
            detail: "--dt must be positive".to_string(),
        });
    }
    let series = load_series(&args.input, args.column)?;
    let spec = spectrum(&series, args.dt)?;
    let hash = hash_kv(&[
        ("command", "spectrum".to_string()),
        ("dt", args.dt.to_string()),
        ("column", args.column.to_string()),
    ]);
    formats::write_spectrum_csv(&args.output, &spec, &hash)?;
    let peak =
        spec.magnitudes()
            .iter()
            .enumerate()
            .skip(1)
            .fold(
                (0usize, 0.0f64),
                |best, (k, &m)| if m > best.1 { (k, m) } else { best },
            );
    println!(
        "{} bins -> {} (peak bin {} at {} Hz)",
        spec.len(),
        args.output.display(),
        peak.0,
        spec.frequency(peak.0)
    );
    Ok(())
}

fn cmd_scales(args: ScalesArgs) -> Result<()> {
    let cfg = args.pipeline.resolve()?;
    let series = load_series(&args.input, args.column)?;
    let r = pipeline::resolve(&cfg)?;
    let scores = select_feature_scales(&series, &r.filters, cfg.depth, r.refilter, args.k)?;
    formats::write_scales_csv(&args.output, &scores, &cfg.hash()?)?;
    let chosen: Vec<String> = scores
        .iter()
        .filter(|s| s.selected)
        .map(|s| formats::band_name(s.band))
        .collect();
    println!(
        "characteristic scales: {} -> {}",
        chosen.join(","),
        args.output.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let cfg = args.pipeline.resolve()?;
    let r = pipeline::resolve(&cfg)?;
    let p_values = parse_usize_list(&args.p, "--P")?;
    let report = run_bench(
        &r.filters,
        r.mask,
        r.refilter,
        args.t as usize,
        &p_values,
        args.reps as usize,
        args.seed,
    )?;
    let text = report.render(&cfg.hash()?);
    print!("{}", text);
    if let Some(path) = &args.output {
        std::fs::write(path, &text).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(())
}
