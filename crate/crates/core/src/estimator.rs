//! Least-squares projection estimators of `π` on tensor-product models and
//! penalized selection among them.
//!
//! For a model `S_m = F ⊗ H` with orthonormal bases `φ_j` (on `A₁`) and `ψ_k`
//! (on `A₂`), the contrast
//!
//! ```text
//! γₙ(t) = (1/n) Σᵢ [ ∫ t²(Xᵢ, y) dy − 2 t(Xᵢ, Xᵢ₊₁) ]
//! ```
//!
//! is minimized by any coefficient matrix solving `G A = Z` with
//! `G = (1/n) Σ φ(Xᵢ)φ(Xᵢ)ᵀ` and `Z = (1/n) Σ φ(Xᵢ)ψ(Xᵢ₊₁)ᵀ`. We take the
//! minimum-Frobenius-norm solution. The minimum value is
//! `Tr(AᵀGA − 2ZᵀA)`, and the selected model minimizes it plus a penalty
//! proportional to `D₁D₂/n`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bases::{Basis, BasisFamily, Interval};
use crate::chains::Path;
use crate::error::{Error, Result};
use crate::linalg::{default_cutoff, pinv_solve_psd, Matrix};

/// The estimation rectangle `A = A₁ × A₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        Ok(Self {
            x: Interval::new(x.0, x.1)?,
            y: Interval::new(y.0, y.1)?,
        })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }
}

/// A tensor-product model `F_{m1} ⊗ H_{m2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    basis_x: Basis,
    basis_y: Basis,
}

impl Model {
    pub fn new(basis_x: Basis, basis_y: Basis) -> Self {
        Self { basis_x, basis_y }
    }

    /// Builds both bases on `domain`.
    pub fn on(
        domain: &Rect,
        family_x: BasisFamily,
        d1: usize,
        family_y: BasisFamily,
        d2: usize,
    ) -> Result<Self> {
        Ok(Self::new(
            Basis::new(family_x, d1, domain.x)?,
            Basis::new(family_y, d2, domain.y)?,
        ))
    }

    pub fn basis_x(&self) -> &Basis {
        &self.basis_x
    }

    pub fn basis_y(&self) -> &Basis {
        &self.basis_y
    }

    pub fn d1(&self) -> usize {
        self.basis_x.dim()
    }

    pub fn d2(&self) -> usize {
        self.basis_y.dim()
    }

    /// `D₁ · D₂`.
    pub fn complexity(&self) -> usize {
        self.d1() * self.d2()
    }

    pub fn domain(&self) -> Rect {
        Rect {
            x: self.basis_x.interval(),
            y: self.basis_y.interval(),
        }
    }
}

/// A fitted function `Σ a_jk φ_j(x) ψ_k(y)` on a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    model: Model,
    coefficients: Matrix,
    contrast: f64,
    n: usize,
}

impl Fit {
    /// Wraps explicit coefficients; the stored contrast is set to `contrast`.
    pub fn from_parts(model: Model, coefficients: Matrix, contrast: f64, n: usize) -> Result<Self> {
        if coefficients.rows() != model.d1() || coefficients.cols() != model.d2() {
            return Err(Error::Input(format!(
                "coefficients are {}x{}, model is {}x{}",
                coefficients.rows(),
                coefficients.cols(),
                model.d1(),
                model.d2()
            )));
        }
        Ok(Self {
            model,
            coefficients,
            contrast,
            n,
        })
    }

    /// The zero function on `model`.
    pub fn zero(model: Model, n: usize) -> Self {
        let coefficients = Matrix::zeros(model.d1(), model.d2());
        Self {
            model,
            coefficients,
            contrast: 0.0,
            n,
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn coefficients(&self) -> &Matrix {
        &self.coefficients
    }

    /// `γₙ` of the fitted function on the data it was fitted to.
    pub fn contrast(&self) -> f64 {
        self.contrast
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `L²(A)` norm, equal to the Frobenius norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.frobenius_norm()
    }

    /// Writes `c_k(x) = Σ_j a_jk φ_j(x)` into `out` (length `D₂`);
    /// `scratch` must have length `D₁`.
    pub fn section_coefficients(&self, x: f64, scratch: &mut [f64], out: &mut [f64]) {
        self.model.basis_x.eval_into(x, scratch);
        row_combination(&self.coefficients, scratch, out);
    }
}

/// `out_k = Σ_j w_j A_jk`.
fn row_combination(a: &Matrix, weights: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (j, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(a.row(j)) {
            *o += w * v;
        }
    }
}

/// Basis values at each point, stored row-major as `points × dim`.
pub(crate) fn design(basis: &Basis, points: &[f64]) -> Vec<f64> {
    let d = basis.dim();
    let mut out = vec![0.0; points.len() * d];
    for (row, &x) in out.chunks_exact_mut(d).zip(points) {
        basis.eval_into(x, row);
    }
    out
}

/// `(1/n) Σᵢ u(pᵢ) v(qᵢ)ᵀ` from two design tables with `n` rows each.
fn moment(u: &[f64], du: usize, v: &[f64], dv: usize, n: usize) -> Matrix {
    let mut m = Matrix::zeros(du, dv);
    for (ru, rv) in u.chunks_exact(du).zip(v.chunks_exact(dv)) {
        for (j, &a) in ru.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (k, &b) in rv.iter().enumerate() {
                m[(j, k)] += a * b;
            }
        }
    }
    m.scale(1.0 / n as f64);
    m
}

/// `G = (1/n) Σᵢ φ(Xᵢ) φ(Xᵢ)ᵀ`.
pub fn gram_matrix(basis_x: &Basis, xs: &[f64]) -> Result<Matrix> {
    if xs.is_empty() {
        return Err(Error::Input("Gram matrix of an empty sample".into()));
    }
    let d = basis_x.dim();
    let phi = design(basis_x, xs);
    Ok(moment(&phi, d, &phi, d, xs.len()))
}

/// `Z = (1/n) Σᵢ φ(Xᵢ) ψ(Xᵢ₊₁)ᵀ`.
pub fn cross_matrix(basis_x: &Basis, basis_y: &Basis, path: &Path) -> Matrix {
    let values = path.values();
    let n = path.n();
    let phi = design(basis_x, &values[..n]);
    let psi = design(basis_y, &values[1..]);
    moment(&phi, basis_x.dim(), &psi, basis_y.dim(), n)
}

/// `Tr(AᵀGA − 2ZᵀA)`.
pub fn contrast_trace(coefficients: &Matrix, gram: &Matrix, cross: &Matrix) -> f64 {
    let ga = gram.matmul(coefficients);
    coefficients.frobenius_dot(&ga) - 2.0 * cross.frobenius_dot(coefficients)
}

fn fit_from_moments(model: &Model, gram: &Matrix, cross: &Matrix, n: usize) -> Fit {
    let coefficients = pinv_solve_psd(gram, cross, default_cutoff());
    let contrast = contrast_trace(&coefficients, gram, cross);
    Fit {
        model: model.clone(),
        coefficients,
        contrast,
        n,
    }
}

/// Minimum-norm least-squares fit of `model` to `path`.
pub fn fit_model(model: &Model, path: &Path) -> Result<Fit> {
    let n = path.n();
    let values = path.values();
    let phi = design(&model.basis_x, &values[..n]);
    let psi = design(&model.basis_y, &values[1..]);
    let gram = moment(&phi, model.d1(), &phi, model.d1(), n);
    let cross = moment(&phi, model.d1(), &psi, model.d2(), n);
    Ok(fit_from_moments(model, &gram, &cross, n))
}

/// `γₙ(t)` evaluated from its definition, with `∫t²(Xᵢ,y)dy = Σ_k c_k(Xᵢ)²`.
pub fn contrast_direct(coefficients: &Matrix, model: &Model, path: &Path) -> Result<f64> {
    if coefficients.rows() != model.d1() || coefficients.cols() != model.d2() {
        return Err(Error::Input(format!(
            "coefficients are {}x{}, model is {}x{}",
            coefficients.rows(),
            coefficients.cols(),
            model.d1(),
            model.d2()
        )));
    }
    let mut phi = vec![0.0; model.d1()];
    let mut psi = vec![0.0; model.d2()];
    let mut c = vec![0.0; model.d2()];
    let mut total = 0.0;
    for (x, y) in path.transitions() {
        model.basis_x.eval_into(x, &mut phi);
        row_combination(coefficients, &phi, &mut c);
        model.basis_y.eval_into(y, &mut psi);
        let sq: f64 = c.iter().map(|v| v * v).sum();
        let at_next: f64 = c.iter().zip(&psi).map(|(a, b)| a * b).sum();
        total += sq - 2.0 * at_next;
    }
    Ok(total / path.n() as f64)
}

/// How the penalty `pen(m) = constant · scale · D₁D₂/n` obtains its scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyMode {
    /// Scale is a known bound on `‖π 1_A‖∞`.
    Fixed { sup_norm_bound: f64 },
    /// Scale 1: `pen(m) = constant · D₁D₂/n`.
    Simulation,
    /// Scale is the sup-norm of a trigonometric pilot fit. `pilot_dim`
    /// overrides the automatic pilot dimension.
    Random {
        pilot_dim: Option<usize>,
        grid_points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub constant: f64,
    pub mode: PenaltyMode,
}

/// Constant usable with `PenaltyMode::Fixed` for theory-faithful runs.
pub const THEORY_CONSTANT: f64 = 45.0;
/// Constant of the random penalty under the theoretical norms.
pub const THEORY_RANDOM_CONSTANT: f64 = 90.0;
pub const DEFAULT_PILOT_GRID: usize = 101;

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self::simulation(0.5)
    }
}

impl PenaltyConfig {
    pub fn simulation(constant: f64) -> Self {
        Self {
            constant,
            mode: PenaltyMode::Simulation,
        }
    }

    pub fn fixed(constant: f64, sup_norm_bound: f64) -> Self {
        Self {
            constant,
            mode: PenaltyMode::Fixed { sup_norm_bound },
        }
    }

    pub fn random(constant: f64) -> Self {
        Self {
            constant,
            mode: PenaltyMode::Random {
                pilot_dim: None,
                grid_points: DEFAULT_PILOT_GRID,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.constant > 0.0 && self.constant.is_finite()) {
            return Err(Error::Config(format!(
                "penalty constant must be positive, got {}",
                self.constant
            )));
        }
        match self.mode {
            PenaltyMode::Fixed { sup_norm_bound } if !(sup_norm_bound > 0.0) => Err(Error::Config(
                format!("sup-norm bound must be positive, got {sup_norm_bound}"),
            )),
            PenaltyMode::Random {
                pilot_dim: Some(0), ..
            } => Err(Error::Config("pilot dimension must be positive".into())),
            PenaltyMode::Random { grid_points, .. } if grid_points < 2 => Err(Error::Config(
                "pilot sup-norm grid needs at least 2 points".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Replaces a random penalty by the fixed penalty whose bound is the pilot
    /// sup-norm estimated from `path` on `domain`.
    pub fn resolve(&self, path: &Path, domain: &Rect) -> Result<(Self, Option<PilotEstimate>)> {
        match self.mode {
            PenaltyMode::Random {
                pilot_dim,
                grid_points,
            } => {
                let pilot = pilot_with_dim(path, domain, grid_points, pilot_dim)?;
                Ok((Self::fixed(self.constant, pilot.sup_norm), Some(pilot)))
            }
            _ => Ok((*self, None)),
        }
    }
}

/// `pen(m)` for sample size `n`. Random penalties must be resolved first.
pub fn penalty(model: &Model, n: usize, cfg: &PenaltyConfig) -> Result<f64> {
    let scale = match cfg.mode {
        PenaltyMode::Simulation => 1.0,
        PenaltyMode::Fixed { sup_norm_bound } => sup_norm_bound,
        PenaltyMode::Random { .. } => {
            return Err(Error::Config(
                "a random penalty has to be resolved against data first".into(),
            ))
        }
    };
    Ok(cfg.constant * scale * model.complexity() as f64 / n.max(1) as f64)
}

/// Largest integer `k` with `k^p ≤ n`.
pub(crate) fn integer_root(n: usize, p: u32) -> usize {
    let mut k = libm::floor(libm::pow(n as f64, 1.0 / p as f64)) as usize;
    while k > 0 && (k as u128).pow(p) > n as u128 {
        k -= 1;
    }
    while ((k + 1) as u128).pow(p) <= n as u128 {
        k += 1;
    }
    k
}

/// All admissible models for sample size `n`.
///
/// Anisotropic: every `(D₁, D₂)` on the family ladders with both
/// `D ≤ ⌊n^{1/3}⌋`. Isotropic: `D₁ = D₂ = D` with `D² ≤ n`, `D` on both
/// ladders. Models are ordered by `D₁`, then `D₂`.
pub fn model_collection(
    family_x: BasisFamily,
    family_y: BasisFamily,
    n: usize,
    domain: &Rect,
    isotropic: bool,
) -> Result<Vec<Model>> {
    let mut models = Vec::new();
    if isotropic {
        let bound = integer_root(n, 2);
        let ys = family_y.ladder(bound);
        for d in family_x.ladder(bound) {
            if ys.contains(&d) {
                models.push(Model::on(domain, family_x, d, family_y, d)?);
            }
        }
    } else {
        let bound = integer_root(n, 3);
        let ys = family_y.ladder(bound);
        for d1 in family_x.ladder(bound) {
            for &d2 in &ys {
                models.push(Model::on(domain, family_x, d1, family_y, d2)?);
            }
        }
    }
    if models.is_empty() {
        return Err(Error::Config(format!(
            "no admissible {family_x} x {family_y} model for n = {n}"
        )));
    }
    Ok(models)
}

/// One candidate's contribution to the selection criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDiagnostic {
    pub family_x: BasisFamily,
    pub family_y: BasisFamily,
    pub d1: usize,
    pub d2: usize,
    pub contrast: f64,
    pub penalty: f64,
    pub selected: bool,
}

/// Outcome of penalized model selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub fit: Fit,
    /// Index of the selected model in the collection.
    pub index: usize,
    pub diagnostics: Vec<ModelDiagnostic>,
    /// Pilot estimate used by a random penalty.
    pub pilot: Option<PilotEstimate>,
}

impl Selection {
    pub fn model(&self) -> &Model {
        self.fit.model()
    }
}

/// Design tables are shared between models using the same basis.
struct DesignCache<'a> {
    points: &'a [f64],
    entries: Vec<(Basis, Vec<f64>)>,
}

impl<'a> DesignCache<'a> {
    fn new(points: &'a [f64]) -> Self {
        Self {
            points,
            entries: Vec::new(),
        }
    }

    fn get(&mut self, basis: &Basis) -> usize {
        if let Some(i) = self.entries.iter().position(|(b, _)| b == basis) {
            return i;
        }
        self.entries
            .push((basis.clone(), design(basis, self.points)));
        self.entries.len() - 1
    }
}

/// Fits every model and returns the minimizer of `γₙ(π̂_m) + pen(m)`.
/// Ties go to the smaller `D₁D₂`, then the smaller `D₁`.
pub fn select_model(collection: &[Model], path: &Path, cfg: &PenaltyConfig) -> Result<Selection> {
    let first = collection
        .first()
        .ok_or_else(|| Error::Input("empty model collection".into()))?;
    cfg.validate()?;
    let (cfg, pilot) = cfg.resolve(path, &first.domain())?;
    let n = path.n();
    let values = path.values();
    let mut xs = DesignCache::new(&values[..n]);
    let mut ys = DesignCache::new(&values[1..]);

    let mut best: Option<(f64, usize, usize, usize, Fit)> = None;
    let mut diagnostics = Vec::with_capacity(collection.len());
    for (index, model) in collection.iter().enumerate() {
        let ix = xs.get(model.basis_x());
        let iy = ys.get(model.basis_y());
        let phi = &xs.entries[ix].1;
        let psi = &ys.entries[iy].1;
        let gram = moment(phi, model.d1(), phi, model.d1(), n);
        let cross = moment(phi, model.d1(), psi, model.d2(), n);
        let fit = fit_from_moments(model, &gram, &cross, n);
        let pen = penalty(model, n, &cfg)?;
        let crit = fit.contrast + pen;
        diagnostics.push(ModelDiagnostic {
            family_x: model.basis_x().family(),
            family_y: model.basis_y().family(),
            d1: model.d1(),
            d2: model.d2(),
            contrast: fit.contrast,
            penalty: pen,
            selected: false,
        });
        let better = match &best {
            None => true,
            Some((c, cx, d1, _, _)) => {
                crit < *c || (crit == *c && (model.complexity(), model.d1()) < (*cx, *d1))
            }
        };
        if better {
            best = Some((crit, model.complexity(), model.d1(), index, fit));
        }
    }
    let (_, _, _, index, fit) = best.expect("nonempty collection");
    diagnostics[index].selected = true;
    Ok(Selection {
        fit,
        index,
        diagnostics,
        pilot,
    })
}

/// `π̂(x, y) = Σ a_jk φ_j(x) ψ_k(y)`; zero outside the model's rectangle.
pub fn evaluate(fit: &Fit, x: f64, y: f64) -> f64 {
    let model = fit.model();
    if !model.domain().contains(x, y) {
        return 0.0;
    }
    let mut phi = vec![0.0; model.d1()];
    let mut c = vec![0.0; model.d2()];
    fit.section_coefficients(x, &mut phi, &mut c);
    let mut psi = vec![0.0; model.d2()];
    model.basis_y().eval_into(y, &mut psi);
    c.iter().zip(&psi).map(|(a, b)| a * b).sum()
}

/// Truncation level `kₙ = n^{2/3}`.
pub fn truncation_level(n: usize) -> f64 {
    let r = libm::cbrt(n as f64);
    r * r
}

/// Returns the fit unchanged when `‖π̃‖ ≤ n^{2/3}`, the zero fit otherwise.
pub fn truncate(fit: &Fit) -> Fit {
    if fit.l2_norm() <= truncation_level(fit.n) {
        fit.clone()
    } else {
        Fit::zero(fit.model.clone(), fit.n)
    }
}

/// Sup-norm of the trigonometric pilot estimator used by the random penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotEstimate {
    pub sup_norm: f64,
    /// Pilot dimension per axis.
    pub dim: usize,
    /// Set when `dim` lies outside `[⌈ln n⌉, ⌊n^{1/6}⌋]`, which is always the
    /// case for `n` below roughly `10⁸`.
    pub range_violated: bool,
    /// Set when the pilot fit is identically zero on the grid.
    pub degenerate: bool,
}

/// Fits the isotropic trigonometric pilot and scans `|π̂|` on a
/// `grid_points × grid_points` lattice over `domain`.
pub fn pilot_sup_norm(path: &Path, domain: &Rect, grid_points: usize) -> Result<PilotEstimate> {
    pilot_with_dim(path, domain, grid_points, None)
}

fn pilot_with_dim(
    path: &Path,
    domain: &Rect,
    grid_points: usize,
    requested: Option<usize>,
) -> Result<PilotEstimate> {
    if grid_points < 2 {
        return Err(Error::Input("pilot grid needs at least 2 points".into()));
    }
    let n = path.n();
    let lo = libm::ceil(libm::log(n as f64)).max(1.0) as usize;
    let hi = integer_root(n, 6);
    let (dim, range_violated) = match requested {
        Some(d) => (d, !(lo <= d && d <= hi)),
        None if lo <= hi => (lo, false),
        None => (hi.max(1), true),
    };
    let model = Model::on(
        domain,
        BasisFamily::Trigonometric,
        dim,
        BasisFamily::Trigonometric,
        dim,
    )?;
    let fit = fit_model(&model, path)?;

    let xs = linspace(domain.x, grid_points);
    let ys = linspace(domain.y, grid_points);
    let psi = design(model.basis_y(), &ys);
    let mut scratch = vec![0.0; dim];
    let mut c = vec![0.0; dim];
    let mut sup = 0.0_f64;
    for &x in &xs {
        fit.section_coefficients(x, &mut scratch, &mut c);
        for row in psi.chunks_exact(dim) {
            let v: f64 = c.iter().zip(row).map(|(a, b)| a * b).sum();
            sup = sup.max(v.abs());
        }
    }
    Ok(PilotEstimate {
        sup_norm: sup,
        dim,
        range_violated,
        degenerate: sup == 0.0,
    })
}

/// `points` equally spaced values covering `interval`, endpoints included.
pub fn linspace(interval: Interval, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![interval.lo];
    }
    let step = interval.len() / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                interval.hi
            } else {
                interval.lo + step * i as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::make_basis;
    use core::f64::consts::SQRT_2;

    fn unit_square() -> Rect {
        Rect::new((0.0, 1.0), (0.0, 1.0)).unwrap()
    }

    fn hist2x2() -> Model {
        Model::on(
            &unit_square(),
            BasisFamily::Histogram,
            2,
            BasisFamily::Histogram,
            2,
        )
        .unwrap()
    }

    #[test]
    fn gram_examples() {
        let b = make_basis(BasisFamily::Histogram, 2, (0.0, 1.0)).unwrap();
        let g = gram_matrix(&b, &[0.25, 0.75]).unwrap();
        assert!(g.max_abs_diff(&Matrix::identity(2)) < 1e-15);
        let g = gram_matrix(&b, &[-1.0, 2.0, 5.0]).unwrap();
        assert!(g.is_zero());
        let t = make_basis(BasisFamily::Trigonometric, 1, (0.0, 1.0)).unwrap();
        let g = gram_matrix(&t, &[0.3, 0.9]).unwrap();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-15);
        assert!(gram_matrix(&t, &[]).is_err());
    }

    #[test]
    fn cross_examples() {
        let m = hist2x2();
        let path = Path::new(vec![0.25, 0.75], 0).unwrap();
        let z = cross_matrix(m.basis_x(), m.basis_y(), &path);
        let want = Matrix::from_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!(z.max_abs_diff(&want) < 1e-15);
        let path = Path::new(vec![0.25, 3.0, 0.5, -2.0], 0).unwrap();
        assert!(cross_matrix(m.basis_x(), m.basis_y(), &path).is_zero());
        let t = make_basis(BasisFamily::Trigonometric, 1, (0.0, 1.0)).unwrap();
        let path = Path::new(vec![0.1, 0.4, 0.9], 0).unwrap();
        assert!((cross_matrix(&t, &t, &path)[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_transition_fit() {
        let m = hist2x2();
        let path = Path::new(vec![0.25, 0.75], 0).unwrap();
        let fit = fit_model(&m, &path).unwrap();
        // G = diag(2, 0), Z = [[0, 2], [0, 0]] → minimum-norm A = [[0, 1], [0, 0]]
        let want = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(fit.coefficients().max_abs_diff(&want) < 1e-14);
        // π̂(X₁, ·) = Σ_k ψ_k(X₂) ψ_k(·) restricted to the data: √2·√2 at X₂
        assert!((evaluate(&fit, 0.25, 0.75) - SQRT_2 * SQRT_2).abs() < 1e-14);
        assert!((fit.contrast() - (-2.0)).abs() < 1e-14);
    }

    #[test]
    fn empty_cell_row_is_zero() {
        let domain = unit_square();
        let m = Model::on(
            &domain,
            BasisFamily::Histogram,
            4,
            BasisFamily::Histogram,
            2,
        )
        .unwrap();
        // nothing falls in [0.5, 0.75)
        let path = Path::new(vec![0.1, 0.3, 0.8, 0.2, 0.9, 0.4], 0).unwrap();
        let fit = fit_model(&m, &path).unwrap();
        assert_eq!(fit.coefficients().row(2), &[0.0, 0.0]);
    }

    #[test]
    fn contrast_direct_examples() {
        let m = hist2x2();
        let path = Path::new(vec![0.25, 0.75], 0).unwrap();
        let zero = Matrix::zeros(2, 2);
        assert_eq!(contrast_direct(&zero, &m, &path).unwrap(), 0.0);
        let mut t = Matrix::zeros(2, 2);
        t[(0, 1)] = 1.0;
        assert!((contrast_direct(&t, &m, &path).unwrap() + 2.0).abs() < 1e-14);
        assert!(contrast_direct(&Matrix::zeros(3, 2), &m, &path).is_err());
    }

    #[test]
    fn penalty_examples() {
        let domain = unit_square();
        let m = Model::on(
            &domain,
            BasisFamily::Histogram,
            4,
            BasisFamily::Histogram,
            2,
        )
        .unwrap();
        let p = penalty(&m, 100, &PenaltyConfig::simulation(0.5)).unwrap();
        assert!((p - 0.04).abs() < 1e-15);
        let fixed = penalty(&m, 100, &PenaltyConfig::fixed(THEORY_CONSTANT, 0.4)).unwrap();
        assert!((fixed - 45.0 * 0.4 * 8.0 / 100.0).abs() < 1e-14);
        let one = Model::on(
            &domain,
            BasisFamily::Histogram,
            1,
            BasisFamily::Histogram,
            1,
        )
        .unwrap();
        let mut last = f64::INFINITY;
        for n in [1, 10, 100, 1000, 100_000] {
            let p = penalty(&one, n, &PenaltyConfig::default()).unwrap();
            assert!(p < last && p > 0.0);
            last = p;
        }
        assert!(penalty(&one, 10, &PenaltyConfig::random(0.5)).is_err());
    }

    #[test]
    fn integer_roots() {
        assert_eq!(integer_root(1000, 3), 10);
        assert_eq!(integer_root(999, 3), 9);
        assert_eq!(integer_root(64, 3), 4);
        assert_eq!(integer_root(64, 2), 8);
        assert_eq!(integer_root(64, 6), 2);
        assert_eq!(integer_root(1, 3), 1);
        assert_eq!(integer_root(0, 3), 0);
    }

    #[test]
    fn collections() {
        let domain = Rect::new((4.0, 8.0), (4.0, 8.0)).unwrap();
        let h = BasisFamily::Histogram;
        let t = BasisFamily::Trigonometric;
        let c = model_collection(h, h, 1000, &domain, false).unwrap();
        assert_eq!(c.len(), 16);
        assert!(c
            .iter()
            .all(|m| [1, 2, 4, 8].contains(&m.d1()) && [1, 2, 4, 8].contains(&m.d2())));
        let c = model_collection(t, t, 64, &domain, false).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(c.iter().map(|m| m.d1()).max(), Some(4));
        let c = model_collection(h, h, 64, &domain, true).unwrap();
        assert_eq!(
            c.iter().map(|m| m.d1()).collect::<Vec<_>>(),
            vec![1, 2, 4, 8]
        );
        assert!(c.iter().all(|m| m.d1() == m.d2()));
        let p3 = BasisFamily::PiecewisePolynomial(3);
        assert!(matches!(
            model_collection(p3, p3, 27, &domain, false),
            Err(Error::Config(_))
        ));
        let mixed = model_collection(h, t, 64, &domain, false).unwrap();
        assert_eq!(mixed.len(), 3 * 4);
    }

    #[test]
    fn singleton_and_huge_penalty() {
        let domain = unit_square();
        let path = Path::new(vec![0.1, 0.7, 0.3, 0.6, 0.2, 0.9, 0.5, 0.45, 0.8], 0).unwrap();
        let single = vec![hist2x2()];
        let s = select_model(&single, &path, &PenaltyConfig::default()).unwrap();
        assert_eq!(s.index, 0);
        assert!(s.diagnostics[0].selected);
        let c = model_collection(
            BasisFamily::Trigonometric,
            BasisFamily::Trigonometric,
            8,
            &domain,
            false,
        )
        .unwrap();
        let s = select_model(&c, &path, &PenaltyConfig::simulation(1e6)).unwrap();
        assert_eq!((s.model().d1(), s.model().d2()), (1, 1));
        assert_eq!(s.diagnostics.len(), c.len());
        assert_eq!(s.diagnostics.iter().filter(|d| d.selected).count(), 1);
        assert!(select_model(&[], &path, &PenaltyConfig::default()).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let m = hist2x2();
        let zero = Fit::zero(m.clone(), 10);
        assert_eq!(evaluate(&zero, 0.3, 0.6), 0.0);
        let mut a = Matrix::zeros(2, 2);
        a[(0, 0)] = 1.0;
        let fit = Fit::from_parts(m, a, 0.0, 10).unwrap();
        assert!((evaluate(&fit, 0.25, 0.25) - 2.0).abs() < 1e-14);
        assert_eq!(evaluate(&fit, -0.1, 0.25), 0.0);
        assert_eq!(evaluate(&fit, 0.25, 1.1), 0.0);
    }

    fn fit_with_norm(n: usize, norm: f64) -> Fit {
        let mut a = Matrix::zeros(2, 2);
        a[(1, 0)] = norm;
        Fit::from_parts(hist2x2(), a, 0.0, n).unwrap()
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(
            truncate(&fit_with_norm(1000, 5.0)),
            fit_with_norm(1000, 5.0)
        );
        assert!(truncate(&fit_with_norm(8, 5.0)).coefficients().is_zero());
        let z = Fit::zero(hist2x2(), 8);
        assert_eq!(truncate(&z), z);
        assert_eq!(truncation_level(1000), 100.0);
        assert_eq!(truncation_level(8), 4.0);
    }

    #[test]
    fn truncation_flips_exactly_at_level() {
        for n in [8, 27, 50, 1000, 12345] {
            let k = truncation_level(n);
            assert!(!truncate(&fit_with_norm(n, k - 1e-9))
                .coefficients()
                .is_zero());
            assert!(!truncate(&fit_with_norm(n, k)).coefficients().is_zero());
            assert!(truncate(&fit_with_norm(n, k + 1e-9))
                .coefficients()
                .is_zero());
        }
    }

    #[test]
    fn pilot_dimension_rule() {
        let domain = unit_square();
        let path = Path::new((0..65).map(|i| (i as f64 * 0.37) % 1.0).collect(), 0).unwrap();
        let p = pilot_sup_norm(&path, &domain, 11).unwrap();
        // ⌈ln 64⌉ = 5 > ⌊64^{1/6}⌋ = 2
        assert_eq!(p.dim, 2);
        assert!(p.range_violated);
        assert!(p.sup_norm > 0.0 && !p.degenerate);
        assert_eq!(p, pilot_sup_norm(&path, &domain, 11).unwrap());
        let outside = Path::new(vec![5.0; 20], 0).unwrap();
        assert!(pilot_sup_norm(&outside, &domain, 11).unwrap().degenerate);
    }

    #[test]
    fn random_penalty_resolves_to_pilot() {
        let domain = unit_square();
        let path = Path::new((0..200).map(|i| (i as f64 * 0.618) % 1.0).collect(), 0).unwrap();
        let (cfg, pilot) = PenaltyConfig::random(0.5).resolve(&path, &domain).unwrap();
        let pilot = pilot.unwrap();
        assert_eq!(cfg, PenaltyConfig::fixed(0.5, pilot.sup_norm));
        let c = model_collection(
            BasisFamily::Histogram,
            BasisFamily::Histogram,
            200,
            &domain,
            false,
        )
        .unwrap();
        let s = select_model(&c, &path, &PenaltyConfig::random(0.5)).unwrap();
        assert_eq!(s.pilot, Some(pilot));
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(Interval::new(4.0, 8.0).unwrap(), 5);
        assert_eq!(v, vec![4.0, 5.0, 6.0, 7.0, 8.0]);
    }
}
