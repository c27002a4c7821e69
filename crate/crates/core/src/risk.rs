//! Risk of the selected estimator against the known transition density, and
//! Monte-Carlo averaging over independent replicates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bases::{BasisFamily, Interval};
use crate::chains::{
    simulate, split_seed, stationary_density, transition_density, ChainSpec, Path,
};
use crate::error::{Error, Result};
use crate::estimator::{
    design, model_collection, select_model, truncate, Fit, Model, PenaltyConfig, Rect,
};
use crate::quadrature::QuadratureGrid;

/// Default number of Gauss–Legendre nodes per axis.
pub const DEFAULT_QUAD_POINTS: usize = 128;

fn check_span(grid: &QuadratureGrid, interval: Interval, axis: &str) -> Result<()> {
    let g = grid.interval();
    let tol = 1e-12 * interval.len().max(1.0);
    if (g.lo - interval.lo).abs() > tol || (g.hi - interval.hi).abs() > tol {
        return Err(Error::Input(format!(
            "{axis} grid spans [{}, {}] but the fit lives on [{}, {}]",
            g.lo, g.hi, interval.lo, interval.hi
        )));
    }
    Ok(())
}

/// Tabulates `π̃(x, ·)` on the nodes of `grid_y` for successive `x`.
struct SectionEvaluator<'a> {
    fit: &'a Fit,
    psi: Vec<f64>,
    scratch: Vec<f64>,
    coef: Vec<f64>,
}

impl<'a> SectionEvaluator<'a> {
    fn new(fit: &'a Fit, grid_y: &QuadratureGrid) -> Self {
        let model = fit.model();
        Self {
            fit,
            psi: design(model.basis_y(), grid_y.nodes()),
            scratch: vec![0.0; model.d1()],
            coef: vec![0.0; model.d2()],
        }
    }

    /// Writes `π̃(x, y_g)` into `out`.
    fn section(&mut self, x: f64, out: &mut [f64]) {
        self.fit
            .section_coefficients(x, &mut self.scratch, &mut self.coef);
        let d2 = self.coef.len();
        for (o, row) in out.iter_mut().zip(self.psi.chunks_exact(d2)) {
            *o = self.coef.iter().zip(row).map(|(a, b)| a * b).sum();
        }
    }
}

/// `(1/n) Σᵢ ∫_{A₂} (π(Xᵢ, y) − π̃(Xᵢ, y))² dy` over every observed state.
///
/// The truth is restricted to `A₂` in `y` only: states outside `A₁` still
/// contribute `∫_{A₂} π²(Xᵢ, y) dy`, since `π̃` vanishes there.
pub fn empirical_risk(
    fit: &Fit,
    truth: &ChainSpec,
    path: &Path,
    grid_y: &QuadratureGrid,
) -> Result<f64> {
    let domain = fit.model().domain();
    check_span(grid_y, domain.y, "y")?;
    let mut eval = SectionEvaluator::new(fit, grid_y);
    let mut est = vec![0.0; grid_y.len()];
    let mut total = 0.0;
    for &x in path.states() {
        eval.section(x, &mut est);
        let mut acc = 0.0;
        for ((&y, &w), &e) in grid_y.nodes().iter().zip(grid_y.weights()).zip(&est) {
            let d = transition_density(truth, x, y)? - e;
            acc += w * d * d;
        }
        total += acc;
    }
    Ok(total / path.n() as f64)
}

fn weighted_l2(
    fit: &Fit,
    truth: &ChainSpec,
    grid_x: &QuadratureGrid,
    grid_y: &QuadratureGrid,
    weight: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let domain = fit.model().domain();
    check_span(grid_x, domain.x, "x")?;
    check_span(grid_y, domain.y, "y")?;
    let mut eval = SectionEvaluator::new(fit, grid_y);
    let mut est = vec![0.0; grid_y.len()];
    let mut total = 0.0;
    for (&x, &wx) in grid_x.nodes().iter().zip(grid_x.weights()) {
        let fx = weight(x)?;
        if fx == 0.0 {
            continue;
        }
        eval.section(x, &mut est);
        let mut acc = 0.0;
        for ((&y, &wy), &e) in grid_y.nodes().iter().zip(grid_y.weights()).zip(&est) {
            let d = transition_density(truth, x, y)? - e;
            acc += wy * d * d;
        }
        total += wx * fx * acc;
    }
    Ok(total)
}

/// `∫∫_A (π − π̃)²`.
pub fn l2_risk(
    fit: &Fit,
    truth: &ChainSpec,
    grid_x: &QuadratureGrid,
    grid_y: &QuadratureGrid,
) -> Result<f64> {
    weighted_l2(fit, truth, grid_x, grid_y, |_| Ok(1.0))
}

/// `∫∫_A (π − π̃)²(x, y) f(x) dx dy` with the stationary density `f`.
pub fn f_risk(
    fit: &Fit,
    truth: &ChainSpec,
    grid_x: &QuadratureGrid,
    grid_y: &QuadratureGrid,
) -> Result<f64> {
    if !truth.has_stationary_density() {
        return Err(Error::Unsupported(format!(
            "f-weighted risk needs a closed-form stationary density ({})",
            truth.name()
        )));
    }
    weighted_l2(fit, truth, grid_x, grid_y, |x| stationary_density(truth, x))
}

/// Settings shared by every replicate of a risk experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskOptions {
    pub domain: Rect,
    pub penalty: PenaltyConfig,
    pub isotropic: bool,
    /// Gauss–Legendre nodes per axis, split evenly over panels aligned with
    /// the cell edges of the piecewise families.
    pub quad_points: usize,
}

impl RiskOptions {
    pub fn for_process(spec: &ChainSpec) -> Self {
        Self {
            domain: spec.default_domain(),
            penalty: PenaltyConfig::default(),
            isotropic: false,
            quad_points: DEFAULT_QUAD_POINTS,
        }
    }
}

/// Risk grid for one axis: panels on the finest cell partition in the
/// collection, so piecewise fits are smooth on every panel.
fn axis_grid(
    interval: Interval,
    models: &[Model],
    x_axis: bool,
    points: usize,
) -> Result<QuadratureGrid> {
    let panels = models
        .iter()
        .filter_map(|m| {
            let b = if x_axis { m.basis_x() } else { m.basis_y() };
            b.family().cells(b.dim())
        })
        .max()
        .unwrap_or(1)
        .max(1);
    let per_panel = points.div_ceil(panels).max(2);
    QuadratureGrid::composite((interval.lo, interval.hi), panels, per_panel)
}

/// Risks of one simulated replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRisk {
    pub seed: u64,
    pub d1: usize,
    pub d2: usize,
    /// Empirical risk of the selected (untruncated) estimator.
    pub empirical: f64,
    /// `L²` risk of the truncated estimator.
    pub l2: f64,
    /// `L²(f)` risk of the truncated estimator, when `f` is known.
    pub f_weighted: Option<f64>,
    pub truncated: bool,
}

/// Simulate, select, truncate and score one replicate.
pub fn run_replicate(
    spec: &ChainSpec,
    family_x: BasisFamily,
    family_y: BasisFamily,
    n: usize,
    opts: &RiskOptions,
    seed: u64,
) -> Result<ReplicateRisk> {
    let path = simulate(spec, n, seed)?;
    let models = model_collection(family_x, family_y, n, &opts.domain, opts.isotropic)?;
    let selection = select_model(&models, &path, &opts.penalty)?;
    let grid_x = axis_grid(opts.domain.x, &models, true, opts.quad_points)?;
    let grid_y = axis_grid(opts.domain.y, &models, false, opts.quad_points)?;

    let fit = &selection.fit;
    let empirical = empirical_risk(fit, spec, &path, &grid_y)?;
    let truncated_fit = truncate(fit);
    let l2 = l2_risk(&truncated_fit, spec, &grid_x, &grid_y)?;
    let f_weighted = if spec.has_stationary_density() {
        Some(f_risk(&truncated_fit, spec, &grid_x, &grid_y)?)
    } else {
        None
    };
    Ok(ReplicateRisk {
        seed,
        d1: fit.model().d1(),
        d2: fit.model().d2(),
        empirical,
        l2,
        f_weighted,
        truncated: truncated_fit.coefficients().is_zero() && !fit.coefficients().is_zero(),
    })
}

/// Averaged risks for one `(process, families, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub process: &'static str,
    pub family_x: BasisFamily,
    pub family_y: BasisFamily,
    pub n: usize,
    pub replicates: usize,
    pub pen_const: f64,
    pub mean_empirical: f64,
    pub mean_l2: f64,
    pub mean_f: Option<f64>,
    /// Standard errors (sample sd / √N); absent when `N < 2`.
    pub se_empirical: Option<f64>,
    pub se_l2: Option<f64>,
    pub se_f: Option<f64>,
    /// Count of replicates selecting each `(D₁, D₂)`.
    pub selected: BTreeMap<(usize, usize), usize>,
}

/// Mean and standard error, summed in slice order.
fn mean_se(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some(libm::sqrt(var / n)))
}

/// Reduces replicate results (in replicate order) to a report.
pub fn summarize(
    spec: &ChainSpec,
    family_x: BasisFamily,
    family_y: BasisFamily,
    n: usize,
    opts: &RiskOptions,
    replicates: &[ReplicateRisk],
) -> Result<RiskReport> {
    if replicates.is_empty() {
        return Err(Error::Input("no replicates to summarize".into()));
    }
    let emp: Vec<f64> = replicates.iter().map(|r| r.empirical).collect();
    let l2: Vec<f64> = replicates.iter().map(|r| r.l2).collect();
    let f: Option<Vec<f64>> = replicates.iter().map(|r| r.f_weighted).collect();
    let (mean_empirical, se_empirical) = mean_se(&emp);
    let (mean_l2, se_l2) = mean_se(&l2);
    let (mean_f, se_f) = match f {
        Some(v) => {
            let (m, s) = mean_se(&v);
            (Some(m), s)
        }
        None => (None, None),
    };
    let mut selected = BTreeMap::new();
    for r in replicates {
        *selected.entry((r.d1, r.d2)).or_insert(0) += 1;
    }
    Ok(RiskReport {
        process: spec.name(),
        family_x,
        family_y,
        n,
        replicates: replicates.len(),
        pen_const: opts.penalty.constant,
        mean_empirical,
        mean_l2,
        mean_f,
        se_empirical,
        se_l2,
        se_f,
        selected,
    })
}

/// Runs `replicates` independent replicates with seeds split from
/// `master_seed` and averages their risks.
pub fn mc_risk(
    spec: &ChainSpec,
    family_x: BasisFamily,
    family_y: BasisFamily,
    n: usize,
    replicates: usize,
    opts: &RiskOptions,
    master_seed: u64,
) -> Result<RiskReport> {
    if replicates == 0 {
        return Err(Error::Input("at least one replicate is required".into()));
    }
    let results = (0..replicates as u64)
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
        .collect::<Result<Vec<_>>>()?;
    summarize(spec, family_x, family_y, n, opts, &results)
}

/// Least-squares slope of `ln(risk)` against `ln(n)`.
pub fn rate_slope(points: &[(usize, f64)]) -> Result<f64> {
    if let Some((n, r)) = points.iter().find(|(_, r)| !(*r > 0.0)) {
        return Err(Error::Input(format!("nonpositive risk {r} at n = {n}")));
    }
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 || distinct[0] == 0 {
        return Err(Error::Input(
            "rate slope needs at least 3 distinct positive sample sizes".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| libm::log(p.0 as f64)).collect();
    let ys: Vec<f64> = points.iter().map(|p| libm::log(p.1)).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
