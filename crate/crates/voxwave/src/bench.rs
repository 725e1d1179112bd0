//! Wall-clock comparison of the two extraction paths.
//!
//! For each voxel count the harness times (a) the iterative pipeline run
//! per column and (b) building the operator once plus applying it to the
//! whole matrix. Reported times are minima over the repetitions; the two
//! outputs' largest elementwise difference rides along so the speed
//! numbers can never hide a correctness regression.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voxwave_core::{
    apply_operator, build_operator, extract_iterative, FilterPair, Refilter, ScaleMask, VoxelMatrix,
};

use crate::error::Result;

pub struct BenchRow {
    pub mode: &'static str,
    pub t: usize,
    pub p: usize,
    pub wall_ms: f64,
    /// Iterative wall time over total matrix wall time; only on the
    /// matrix-total row.
    pub speedup: Option<f64>,
    /// Largest elementwise difference between the two paths' outputs;
    /// only on the matrix-total row.
    pub max_discrepancy: Option<f64>,
}

pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Largest discrepancy across all configurations in the report.
    pub fn worst_discrepancy(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.max_discrepancy)
            .fold(0.0, f64::max)
    }

    /// CSV rendering, one header line carrying the config hash.
    pub fn render(&self, cfg_hash: &str) -> String {
        let mut out = format!(
            "# mode,T,P,wall_ms,speedup,max_discrepancy cfg={}\n",
            cfg_hash
        );
        for r in &self.rows {
            let speedup = r.speedup.map(|v| format!("{:.2}", v)).unwrap_or_default();
            let disc = r
                .max_discrepancy
                .map(|v| format!("{:e}", v))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:.3},{},{}\n",
                r.mode, r.t, r.p, r.wall_ms, speedup, disc
            ));
        }
        out
    }
}

fn ms(from: Instant) -> f64 {
    from.elapsed().as_secs_f64() * 1e3
}

/// Times both extraction paths on seeded Gaussian data.
pub fn run_bench(
    filters: &FilterPair,
    mask: ScaleMask,
    refilter: Refilter,
    t: usize,
    p_values: &[usize],
    reps: usize,
    seed: u64,
) -> Result<BenchReport> {
    let reps = reps.max(1);
    let mut rows = Vec::new();
    for &p in p_values {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..t * p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let voxels = VoxelMatrix::new(data, t, p)?;

        let mut iter_ms = f64::MAX;
        let mut build_ms = f64::MAX;
        let mut apply_ms = f64::MAX;
        let mut iter_out = None;
        let mut matrix_out = None;
        for _ in 0..reps {
            let start = Instant::now();
            let mut columns = Vec::with_capacity(p);
            for i in 0..p {
                columns.push(extract_iterative(
                    voxels.column(i),
                    filters,
                    mask,
                    refilter,
                )?);
            }
            iter_ms = iter_ms.min(ms(start));
            iter_out = Some(columns);

            let start = Instant::now();
            let op = build_operator(filters, mask, refilter, t)?;
            build_ms = build_ms.min(ms(start));

            let start = Instant::now();
            let extracted = apply_operator(&op, &voxels)?;
            apply_ms = apply_ms.min(ms(start));
            matrix_out = Some(extracted);
        }

        let iter_out = iter_out.unwrap();
        let matrix_out = matrix_out.unwrap();
        let mut discrepancy = 0.0f64;
        for (i, col) in iter_out.iter().enumerate() {
            for (a, b) in col.iter().zip(matrix_out.column(i)) {
                discrepancy = discrepancy.max((a - b).abs());
            }
        }

        let total_ms = build_ms + apply_ms;
        rows.push(BenchRow {
            mode: "iterative",
            t,
            p,
            wall_ms: iter_ms,
            speedup: None,
            max_discrepancy: None,
        });
        rows.push(BenchRow {
            mode: "matrix-build",
            t,
            p,
            wall_ms: build_ms,
            speedup: None,
            max_discrepancy: None,
        });
        rows.push(BenchRow {
            mode: "matrix-apply",
            t,
            p,
            wall_ms: apply_ms,
            speedup: None,
            max_discrepancy: None,
        });
        rows.push(BenchRow {
            mode: "matrix-total",
            t,
            p,
            wall_ms: total_ms,
            speedup: Some(iter_ms / total_ms),
            max_discrepancy: Some(discrepancy),
        });
    }
    Ok(BenchReport { rows })
}
