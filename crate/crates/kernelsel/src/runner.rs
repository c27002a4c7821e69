//! Experiment execution: parallel Monte-Carlo tables and single-fit exports.

use rayon::prelude::*;

use kernelsel_core::estimator::linspace;
use kernelsel_core::risk::summarize;
use kernelsel_core::{
    evaluate, model_collection, run_replicate, select_model, simulate, split_seed,
    transition_density, BasisFamily, ChainSpec, Interval, ModelDiagnostic, RiskOptions, RiskReport,
    Selection,
};

use crate::config::{ConfigError, ExperimentConfig};
use crate::RunError;

pub fn risk_options(cfg: &ExperimentConfig) -> RiskOptions {
    RiskOptions {
        domain: cfg.domain,
        penalty: cfg.penalty,
        isotropic: cfg.isotropic,
        quad_points: cfg.quad_points,
    }
}

/// Monte-Carlo risk with replicates spread over the current rayon pool.
/// Results are gathered in replicate order, so the report does not depend
/// on the number of threads.
pub fn mc_risk_parallel(
    spec: &ChainSpec,
    family_x: BasisFamily,
    family_y: BasisFamily,
    n: usize,
    replicates: usize,
    opts: &RiskOptions,
    master_seed: u64,
) -> Result<RiskReport, RunError> {
    let results = (0..replicates as u64)
        .into_par_iter()
        .map(|k| {
            run_replicate(
                spec,
                family_x,
                family_y,
                n,
                opts,
                split_seed(master_seed, k),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(spec, family_x, family_y, n, opts, &results)?)
}

/// Every `(family pair, n)` cell of an experiment, families outermost.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RiskReport>, RunError> {
    let opts = risk_options(cfg);
    let mut reports = Vec::new();
    for &(fx, fy) in &cfg.families {
        for &n in &cfg.n {
            reports.push(mc_risk_parallel(
                &cfg.process,
                fx,
                fy,
                n,
                cfg.replicates,
                &opts,
                cfg.seed,
            )?);
        }
    }
    Ok(reports)
}

/// Simulates one path with `seed` and runs penalized selection on it.
pub fn single_fit(
    cfg: &ExperimentConfig,
    family: (BasisFamily, BasisFamily),
    n: usize,
    seed: u64,
) -> Result<Selection, RunError> {
    let path = simulate(&cfg.process, n, seed)?;
    let models = model_collection(family.0, family.1, n, &cfg.domain, cfg.isotropic)?;
    Ok(select_model(&models, &path, &cfg.penalty)?)
}

/// Row of a surface export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub pi_true: f64,
    pub pi_hat: f64,
}

/// True and estimated kernel on a `points × points` lattice over the domain.
pub fn surface(
    cfg: &ExperimentConfig,
    selection: &Selection,
    points: usize,
) -> Result<Vec<SurfacePoint>, RunError> {
    let xs = linspace(cfg.domain.x, points);
    let ys = linspace(cfg.domain.y, points);
    let mut rows = Vec::with_capacity(points * points);
    for &x in &xs {
        for &y in &ys {
            rows.push(SurfacePoint {
                x,
                y,
                pi_true: transition_density(&cfg.process, x, y)?,
                pi_hat: evaluate(&selection.fit, x, y),
            });
        }
    }
    Ok(rows)
}

/// Row of a section export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint {
    pub coordinate: f64,
    pub pi_true: f64,
    pub pi_hat: f64,
}

fn widened(interval: Interval, margin: f64) -> Interval {
    Interval {
        lo: interval.lo - margin,
        hi: interval.hi + margin,
    }
}

/// Sections `y ↦ π(x0, y)` and `x ↦ π(x, y0)`, true and estimated.
pub fn sections(
    cfg: &ExperimentConfig,
    selection: &Selection,
    x0: f64,
    y0: f64,
) -> Result<(Vec<SectionPoint>, Vec<SectionPoint>), RunError> {
    if !cfg.domain.x.contains(x0) {
        return Err(ConfigError::new("x0", format!("{x0} is outside the x domain")).into());
    }
    if !cfg.domain.y.contains(y0) {
        return Err(ConfigError::new("y0", format!("{y0} is outside the y domain")).into());
    }
    let fit = &selection.fit;
    let mut along_y = Vec::with_capacity(cfg.section_points);
    for y in linspace(
        widened(cfg.domain.y, cfg.section_margin),
        cfg.section_points,
    ) {
        along_y.push(SectionPoint {
            coordinate: y,
            pi_true: transition_density(&cfg.process, x0, y)?,
            pi_hat: evaluate(fit, x0, y),
        });
    }
    let mut along_x = Vec::with_capacity(cfg.section_points);
    for x in linspace(
        widened(cfg.domain.x, cfg.section_margin),
        cfg.section_points,
    ) {
        let pi_true = match cfg.process {
            // the radial kernel is undefined for x ≤ 0
            ChainSpec::RadialOu { .. } if x <= 0.0 => 0.0,
            _ => transition_density(&cfg.process, x, y0)?,
        };
        along_x.push(SectionPoint {
            coordinate: x,
            pi_true,
            pi_hat: evaluate(fit, x, y0),
        });
    }
    Ok((along_y, along_x))
}

/// Per-model diagnostics of one selection.
pub fn select_trace(selection: &Selection) -> &[ModelDiagnostic] {
    &selection.diagnostics
}
