use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kernelsel::runner::{self, SurfacePoint};
use kernelsel::Config;
use kernelsel_core::{model_collection, Fit, Selection};

fn kernelsel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernelsel"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run kernelsel")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.ini");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn unknown_process_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[bad]\nprocess = garch\n");
    let out = kernelsel(dir.path(), &["--config", &cfg, "table"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("process"));
}

#[test]
fn bad_arguments_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = kernelsel(dir.path(), &["table", "--threads", "many"]);
    assert_eq!(out.status.code(), Some(1));
    let cfg = write_config(dir.path(), "[a]\nprocess = ar1\nn = 1000, 50\n");
    let out = kernelsel(dir.path(), &["--config", &cfg, "table"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`n`"));
}

#[test]
fn missing_config_file_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = kernelsel(dir.path(), &["--config", "does-not-exist.ini", "table"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_replicate_table_has_one_row_without_standard_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[one]\nprocess = ar1\nfamilies = histogram\nn = 100\nreplicates = 1\nseed = 4\n",
    );
    let out = kernelsel(dir.path(), &["--config", &cfg, "--out", "res", "table"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_rows(&dir.path().join("res/risk_table.csv"));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(&row[..5], ["ar1", "histogram", "histogram", "100", "1"]);
    assert!(row[6].parse::<f64>().unwrap() > 0.0);
    assert_eq!(row[7], "");
    assert_eq!(row[9], "");
    assert_eq!(row[11], "");
    let meta = fs::read_to_string(dir.path().join("res/risk_table.meta")).unwrap();
    assert!(meta.contains("config_sha256 = "));
    assert!(meta.contains("seeds = one:4"));
}

#[test]
fn table_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[a]\nprocess = radial_ou\nn = 50, 100\nreplicates = 6\n\n[b]\nprocess = arch\nburn_in = 200\nn = 60\nreplicates = 5\n",
    );
    let mut tables = Vec::new();
    for (out_dir, threads) in [("r1", "1"), ("r2", "3")] {
        let out = kernelsel(
            dir.path(),
            &[
                "--config",
                &cfg,
                "--out",
                out_dir,
                "--threads",
                threads,
                "table",
            ],
        );
        assert_eq!(out.status.code(), Some(0));
        tables.push(fs::read(dir.path().join(out_dir).join("risk_table.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    assert_eq!(read_rows(&dir.path().join("r1/risk_table.csv")).len(), 6);

    let out = kernelsel(
        dir.path(),
        &["--config", &cfg, "--out", "r3", "--seed", "5", "table"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(
        fs::read(dir.path().join("r3/risk_table.csv")).unwrap(),
        tables[0]
    );
}

#[test]
fn surface_export_covers_the_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[ar1]\nprocess = ar1\nsurface_points = 61\nout = figs\n",
    );
    let out = kernelsel(dir.path(), &["--config", &cfg, "surface", "--n", "500"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_rows(&dir.path().join("figs/surface_ar1_histogram_n500.csv"));
    assert_eq!(rows.len(), 61 * 61);
    let centre = rows
        .iter()
        .find(|r| r[0].parse::<f64>().unwrap() == 6.0 && r[1].parse::<f64>().unwrap() == 6.0)
        .expect("lattice contains (6, 6)");
    let peak: f64 = centre[2].parse().unwrap();
    assert!((peak - 0.39894).abs() < 1e-5);
}

#[test]
fn histogram_surface_is_constant_on_rectangles() {
    let dir = tempfile::tempdir().unwrap();
    let out = kernelsel(
        dir.path(),
        &[
            "--out",
            "figs",
            "surface",
            "--experiment",
            "sqrt_cir",
            "--family",
            "histogram",
            "--n",
            "1000",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_rows(&dir.path().join("figs/surface_sqrt_cir_histogram_n1000.csv"));
    assert_eq!(rows.len(), 60 * 60);
    let hat: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    let runs = |values: Vec<f64>| 1 + values.windows(2).filter(|w| w[0] != w[1]).count();
    for i in 0..60 {
        // at most 8 cells per axis for n = 1000, so at most 8 runs per line
        assert!(runs((0..60).map(|j| hat[i * 60 + j]).collect()) <= 8);
        assert!(runs((0..60).map(|j| hat[j * 60 + i]).collect()) <= 8);
    }
    assert!(hat.iter().any(|&v| v != 0.0));
}

#[test]
fn zero_fit_surface_has_zero_estimate() {
    let config = Config::defaults();
    let cfg = &config.experiments[0];
    let model = model_collection(
        cfg.families[0].0,
        cfg.families[0].1,
        100,
        &cfg.domain,
        false,
    )
    .unwrap()[3]
        .clone();
    let selection = Selection {
        fit: Fit::zero(model, 100),
        index: 0,
        diagnostics: Vec::new(),
        pilot: None,
    };
    let rows: Vec<SurfacePoint> = runner::surface(cfg, &selection, 20).unwrap();
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| r.pi_hat == 0.0));
    assert!(rows.iter().any(|r| r.pi_true > 0.0));
}

#[test]
fn sections_are_reproducible_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--out",
        "s1",
        "sections",
        "--family",
        "trigonometric",
        "--x0",
        "4.6",
        "--y0",
        "5",
    ];
    let out = kernelsel(dir.path(), &args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let x_file = dir
        .path()
        .join("s1/section_ar1_trigonometric_n1000_x4.6.csv");
    let y_file = dir.path().join("s1/section_ar1_trigonometric_n1000_y5.csv");
    let first = (fs::read(&x_file).unwrap(), fs::read(&y_file).unwrap());
    assert_eq!(read_rows(&x_file).len(), 200);
    assert_eq!(read_rows(&y_file).len(), 200);
    let out = kernelsel(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        first,
        (fs::read(&x_file).unwrap(), fs::read(&y_file).unwrap())
    );

    let out = kernelsel(dir.path(), &["sections", "--x0", "9.5", "--y0", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x0"));
}

#[test]
fn sections_vanish_beyond_the_domain_edge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[ar1]\nprocess = ar1\nsection_margin = 1\nsection_points = 101\nout = s\n",
    );
    let out = kernelsel(
        dir.path(),
        &[
            "--config", &cfg, "sections", "--n", "400", "--x0", "4", "--y0", "8",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for file in [
        "s/section_ar1_histogram_n400_x4.csv",
        "s/section_ar1_histogram_n400_y8.csv",
    ] {
        for row in read_rows(&dir.path().join(file)) {
            let c: f64 = row[0].parse().unwrap();
            if !(4.0..=8.0).contains(&c) {
                assert_eq!(row[2].parse::<f64>().unwrap(), 0.0, "{file} at {c}");
            }
        }
    }
}

#[test]
fn select_trace_lists_every_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let out = kernelsel(
        dir.path(),
        &[
            "--out",
            "t",
            "--seed",
            "3",
            "select-trace",
            "--experiment",
            "arch",
            "--n",
            "250",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_rows(&dir.path().join("t/select_trace_arch_histogram_n250.csv"));
    // histogram ladder up to ⌊250^{1/3}⌋ = 6: {1, 2, 4} per axis
    assert_eq!(rows.len(), 9);
    assert_eq!(rows.iter().filter(|r| r[6] == "1").count(), 1);
    for r in &rows {
        let penalty: f64 = r[5].parse().unwrap();
        let (d1, d2): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!((penalty - 0.5 * d1 * d2 / 250.0).abs() < 1e-15);
    }
}
