// End-to-end checks of the binary: exit codes, artifact round trips,
// and agreement between the two extraction modes.

use std::path::Path;
use std::process::{Command, Output};

fn voxwave(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voxwave"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn voxwave")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Generates a small dataset; T = 64, P = 16.
fn synth_small(dir: &Path, seed: &str, out: &str) {
    let run = voxwave(
        dir,
        &[
            "synth",
            "--T",
            "64",
            "--P",
            "16",
            "--frac-active",
            "0.25",
            "--noise-sigma",
            "0.5",
            "--seed",
            seed,
            "--out",
            out,
        ],
    );
    assert_eq!(exit_code(&run), 0, "synth failed: {}", stderr(&run));
}

fn read_fvx(path: &Path) -> (usize, usize, Vec<f64>) {
    let raw = std::fs::read(path).unwrap();
    assert_eq!(&raw[..4], b"FVX1");
    let t = u32::from_le_bytes(raw[4..8].try_into().unwrap()) as usize;
    let p = u32::from_le_bytes(raw[8..12].try_into().unwrap()) as usize;
    let data: Vec<f64> = raw[12..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    assert_eq!(data.len(), t * p);
    (t, p, data)
}

#[test]
fn no_arguments_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = voxwave(dir.path(), &[]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = voxwave(dir.path(), &["--help"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = voxwave(
        dir.path(),
        &["synth", "--T", "64", "--P", "8", "--out", "ds"],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--seed"), "stderr: {}", stderr(&out));
}

#[test]
fn zero_voxels_is_a_usage_error_naming_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = voxwave(
        dir.path(),
        &[
            "synth", "--T", "64", "--P", "0", "--seed", "1", "--out", "ds",
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--P"), "stderr: {}", stderr(&out));
}

#[test]
fn active_fraction_above_one_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = voxwave(
        dir.path(),
        &[
            "synth",
            "--T",
            "64",
            "--P",
            "8",
            "--frac-active",
            "1.5",
            "--seed",
            "1",
            "--out",
            "ds",
        ],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn length_not_matching_the_block_period_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    // Default blocks are 8 on, 8 off: 100 is not a multiple of 16.
    let out = voxwave(
        dir.path(),
        &[
            "synth", "--T", "100", "--P", "8", "--seed", "1", "--out", "ds",
        ],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_input_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = voxwave(
        dir.path(),
        &["extract", "--input", "absent.fvx", "--output", "ex.fvx"],
    );
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn corrupt_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.fvx"), b"v0\nnot-a-number\n").unwrap();
    let out = voxwave(
        dir.path(),
        &["extract", "--input", "bad.fvx", "--output", "ex.fvx"],
    );
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn indivisible_signal_length_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    // 100 time points cannot be halved three times.
    let mut csv = String::from("v0\n");
    for i in 0..100 {
        csv.push_str(&format!("{}.5\n", i));
    }
    std::fs::write(dir.path().join("odd.csv"), csv).unwrap();
    let out = voxwave(
        dir.path(),
        &[
            "extract",
            "--input",
            "odd.csv",
            "--output",
            "ex.fvx",
            "--depth",
            "3",
            "--refilter",
            "off",
        ],
    );
    assert_eq!(exit_code(&out), 4, "stderr: {}", stderr(&out));
}

#[test]
fn unknown_config_key_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "1", "ds");
    std::fs::write(dir.path().join("bad.conf"), "wavelet = d4\nbogus = 1\n").unwrap();
    let out = voxwave(
        dir.path(),
        &[
            "extract", "--config", "bad.conf", "--input", "ds.fvx", "--output", "ex.fvx",
        ],
    );
    assert_eq!(exit_code(&out), 3, "stderr: {}", stderr(&out));
}

#[test]
fn unknown_keep_level_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "1", "ds");
    let out = voxwave(
        dir.path(),
        &[
            "extract", "--input", "ds.fvx", "--output", "ex.fvx", "--depth", "3", "--keep", "d9",
        ],
    );
    assert_eq!(exit_code(&out), 3, "stderr: {}", stderr(&out));
}

#[test]
fn too_many_requested_scales_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "1", "ds");
    let out = voxwave(
        dir.path(),
        &[
            "scales",
            "--input",
            "ds_reference.csv",
            "--output",
            "sc.csv",
            "--depth",
            "3",
            "--k",
            "7",
        ],
    );
    assert_eq!(exit_code(&out), 4, "stderr: {}", stderr(&out));
}

#[test]
fn infinite_negative_threshold_marks_every_voxel_active() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "2", "ds");
    let out = voxwave(
        dir.path(),
        &[
            "detect",
            "--input",
            "ds.fvx",
            "--reference",
            "ds_reference.csv",
            "--output",
            "act.csv",
            "--threshold=-inf",
        ],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("act.csv")).unwrap();
    let mut rows = 0usize;
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3], "1", "row not active: {line}");
        rows += 1;
    }
    assert_eq!(rows, 16);
}

#[test]
fn extraction_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "3", "ds");
    for (mode, name) in [("matrix", "a.fvx"), ("iterative", "b.fvx")] {
        let out = voxwave(
            dir.path(),
            &[
                "extract",
                "--input",
                "ds.fvx",
                "--output",
                name,
                "--refilter",
                "on",
                "--keep",
                "approx,d3",
                "--mode",
                mode,
            ],
        );
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    }
    let (t, p, a) = read_fvx(&dir.path().join("a.fvx"));
    let (t2, p2, b) = read_fvx(&dir.path().join("b.fvx"));
    assert_eq!((t, p), (t2, p2));
    let worst = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-8, "modes differ by {worst:e}");
}

#[test]
fn cached_operator_reproduces_the_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "4", "ds");
    let first = voxwave(
        dir.path(),
        &[
            "extract",
            "--input",
            "ds.fvx",
            "--output",
            "direct.fvx",
            "--wavelet",
            "d4",
            "--refilter",
            "on",
            "--keep",
            "d1,d2",
            "--operator-out",
            "op.neop",
        ],
    );
    assert_eq!(exit_code(&first), 0, "stderr: {}", stderr(&first));
    // Conflicting flags are overridden by the loaded operator's own
    // provenance, so the outputs must match exactly.
    let second = voxwave(
        dir.path(),
        &[
            "extract",
            "--input",
            "ds.fvx",
            "--output",
            "cached.fvx",
            "--wavelet",
            "haar",
            "--refilter",
            "off",
            "--operator-in",
            "op.neop",
        ],
    );
    assert_eq!(exit_code(&second), 0, "stderr: {}", stderr(&second));
    let a = std::fs::read(dir.path().join("direct.fvx")).unwrap();
    let b = std::fs::read(dir.path().join("cached.fvx")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn operator_sized_for_another_series_length_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "5", "ds64");
    let long = voxwave(
        dir.path(),
        &[
            "synth", "--T", "128", "--P", "4", "--seed", "5", "--out", "ds128",
        ],
    );
    assert_eq!(exit_code(&long), 0, "stderr: {}", stderr(&long));
    let build = voxwave(
        dir.path(),
        &[
            "extract",
            "--input",
            "ds128.fvx",
            "--output",
            "ex128.fvx",
            "--operator-out",
            "op128.neop",
        ],
    );
    assert_eq!(exit_code(&build), 0, "stderr: {}", stderr(&build));
    let mismatched = voxwave(
        dir.path(),
        &[
            "extract",
            "--input",
            "ds64.fvx",
            "--output",
            "ex64.fvx",
            "--operator-in",
            "op128.neop",
        ],
    );
    assert_eq!(exit_code(&mismatched), 3, "stderr: {}", stderr(&mismatched));
}

#[test]
fn config_file_flags_and_defaults_layer_correctly() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path(), "6", "ds");
    std::fs::write(dir.path().join("pipe.conf"), "wavelet = haar\ndepth = 2\n").unwrap();
    // Flag beats file: depth 1 wins; file beats default: haar wins.
    let out = voxwave(
        dir.path(),
        &[
            "extract",
            "--config",
            "pipe.conf",
            "--input",
            "ds.fvx",
            "--output",
            "ex.fvx",
            "--depth",
            "1",
            "--operator-out",
            "op.neop",
        ],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let op = std::fs::read(dir.path().join("op.neop")).unwrap();
    assert_eq!(&op[..4], b"NEOP");
    let depth = op[9];
    assert_eq!(depth, 1);
    let name_len = op[14] as usize;
    let name = std::str::from_utf8(&op[15..15 + name_len]).unwrap();
    assert_eq!(name, "haar");
}
