//! Experiment runner for penalized transition-density estimation: config
//! files, parallel risk tables and plot-ready CSV exports.

pub mod config;
pub mod output;
pub mod runner;

use std::path::{Path, PathBuf};

use kernelsel_core::{BasisFamily, RiskReport};

pub use config::{Config, ConfigError, ExperimentConfig};

/// Failure of a CLI command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] kernelsel_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// 1 for configuration problems, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Core(kernelsel_core::Error::Config(_))
            | RunError::Core(kernelsel_core::Error::Dimension { .. }) => 1,
            _ => 2,
        }
    }
}

/// Files written by [`run_table`].
#[derive(Debug, Clone)]
pub struct TableOutput {
    pub csv: PathBuf,
    pub selected: PathBuf,
    pub metadata: PathBuf,
    pub reports: Vec<RiskReport>,
}

/// Runs every experiment of `config` and writes `risk_table.csv`, the
/// selected-dimension counts and a metadata sidecar into `out_dir`.
pub fn run_table(config: &Config, out_dir: &Path) -> Result<TableOutput, RunError> {
    let mut reports = Vec::new();
    for exp in &config.experiments {
        reports.extend(runner::run_experiment(exp)?);
    }
    let csv = out_dir.join("risk_table.csv");
    let selected = out_dir.join("selected_dims.csv");
    let metadata = out_dir.join("risk_table.meta");
    output::write_table(&csv, &reports)?;
    output::write_selected_dims(&selected, &reports)?;
    let seeds: Vec<String> = config
        .experiments
        .iter()
        .map(|e| format!("{}:{}", e.name, e.seed))
        .collect();
    output::write_metadata(
        &metadata,
        &[
            ("config_sha256", output::sha256_hex(&config.serialize())),
            ("seeds", seeds.join(", ")),
            ("rows", reports.len().to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
        ],
    )?;
    Ok(TableOutput {
        csv,
        selected,
        metadata,
        reports,
    })
}

fn family_tag(family: (BasisFamily, BasisFamily)) -> String {
    let clean = |f: BasisFamily| f.to_string().replace(':', "");
    if family.0 == family.1 {
        clean(family.0)
    } else {
        format!("{}-{}", clean(family.0), clean(family.1))
    }
}

/// Writes `surface_<experiment>_<family>_n<n>.csv` for one fit.
pub fn export_surface(
    cfg: &ExperimentConfig,
    family: (BasisFamily, BasisFamily),
    n: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<PathBuf, RunError> {
    let selection = runner::single_fit(cfg, family, n, seed)?;
    let rows = runner::surface(cfg, &selection, cfg.surface_points)?;
    let path = out_dir.join(format!(
        "surface_{}_{}_n{n}.csv",
        cfg.name,
        family_tag(family)
    ));
    output::write_surface(&path, &rows)?;
    Ok(path)
}

/// Writes the sections at `x = x0` and `y = y0` for one fit.
pub fn export_sections(
    cfg: &ExperimentConfig,
    family: (BasisFamily, BasisFamily),
    n: usize,
    seed: u64,
    x0: f64,
    y0: f64,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), RunError> {
    let selection = runner::single_fit(cfg, family, n, seed)?;
    let (along_y, along_x) = runner::sections(cfg, &selection, x0, y0)?;
    let stem = format!("section_{}_{}_n{n}", cfg.name, family_tag(family));
    let px = out_dir.join(format!("{stem}_x{x0}.csv"));
    let py = out_dir.join(format!("{stem}_y{y0}.csv"));
    output::write_section(&px, &along_y)?;
    output::write_section(&py, &along_x)?;
    Ok((px, py))
}

/// Writes the per-model selection diagnostics of one fit.
pub fn export_select_trace(
    cfg: &ExperimentConfig,
    family: (BasisFamily, BasisFamily),
    n: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<PathBuf, RunError> {
    let selection = runner::single_fit(cfg, family, n, seed)?;
    let path = out_dir.join(format!(
        "select_trace_{}_{}_n{n}.csv",
        cfg.name,
        family_tag(family)
    ));
    output::write_diagnostics(&path, runner::select_trace(&selection))?;
    Ok(path)
}
