//! Reference Markov chains with exact transition and stationary densities.
//!
//! Gaussian innovations are drawn with the ziggurat sampler of `rand_distr`
//! from a ChaCha8 stream seeded by a 64-bit integer, so a given
//! `(spec, n, seed)` regenerates the same path within one build.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimator::Rect;

/// Golden-ratio increment used to split replicate seeds from a master seed.
pub const SEED_SPLIT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Default number of discarded steps before an ARCH path is emitted.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Seed of replicate `k`: `master ⊕ k·0x9E3779B97F4A7C15` (wrapping).
pub fn split_seed(master: u64, k: u64) -> u64 {
    master ^ k.wrapping_mul(SEED_SPLIT)
}

/// A simulatable chain with known transition density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainSpec {
    /// `X' = aX + b + σε`.
    Ar1 { a: f64, b: f64, sigma: f64 },
    /// Euclidean norm of three independent `ξ' = aξ + βε` components.
    RadialOu { a: f64, beta: f64 },
    /// `X' = sin X + (cos X + 3)ε`, started at 0 after `burn_in` steps.
    Arch { burn_in: usize },
    /// Independent uniform draws on `[lo, hi]`; the kernel is `1/(hi − lo)`.
    Uniform { lo: f64, hi: f64 },
}

impl ChainSpec {
    pub fn ar1_default() -> Self {
        ChainSpec::Ar1 {
            a: 0.5,
            b: 3.0,
            sigma: 1.0,
        }
    }

    pub fn radial_ou_default() -> Self {
        ChainSpec::RadialOu { a: 0.5, beta: 3.0 }
    }

    pub fn arch_default() -> Self {
        ChainSpec::Arch {
            burn_in: DEFAULT_BURN_IN,
        }
    }

    /// Configuration name of the process.
    pub fn name(&self) -> &'static str {
        match self {
            ChainSpec::Ar1 { .. } => "ar1",
            ChainSpec::RadialOu { .. } => "radial_ou",
            ChainSpec::Arch { .. } => "arch",
            ChainSpec::Uniform { .. } => "uniform",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChainSpec::Ar1 { a, b, sigma } => {
                if !(a.abs() < 1.0 && b.is_finite() && sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::Domain(format!(
                        "AR(1) needs |a| < 1 and sigma > 0 (a={a}, b={b}, sigma={sigma})"
                    )));
                }
            }
            ChainSpec::RadialOu { a, beta } => {
                if !(a.abs() < 1.0 && beta > 0.0 && beta.is_finite()) {
                    return Err(Error::Domain(format!(
                        "radial OU needs |a| < 1 and beta > 0 (a={a}, beta={beta})"
                    )));
                }
            }
            ChainSpec::Arch { .. } => {}
            ChainSpec::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::Domain(format!(
                        "uniform chain needs finite lo < hi (lo={lo}, hi={hi})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Estimation rectangle used by default for this process.
    pub fn default_domain(&self) -> Rect {
        let (lo, hi) = match self {
            ChainSpec::Ar1 { .. } => (4.0, 8.0),
            ChainSpec::RadialOu { .. } => (2.0, 10.0),
            ChainSpec::Arch { .. } => (-6.0, 6.0),
            ChainSpec::Uniform { lo, hi } => (*lo, *hi),
        };
        Rect::new((lo, hi), (lo, hi)).expect("validated domain")
    }

    pub fn has_stationary_density(&self) -> bool {
        !matches!(self, ChainSpec::Arch { .. })
    }
}

/// Observations `X₁ … X_{n+1}` and the seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    values: Vec<f64>,
    seed: u64,
}

impl Path {
    /// Wraps observed values; at least two are required.
    pub fn new(values: Vec<f64>, seed: u64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Input(format!(
                "a path needs at least 2 observations, got {}",
                values.len()
            )));
        }
        Ok(Self { values, seed })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of transitions `n` (one less than the number of values).
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// `(Xᵢ, Xᵢ₊₁)` for `i = 1..=n`.
    pub fn transitions(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.windows(2).map(|w| (w[0], w[1]))
    }

    /// `X₁ … X_n`.
    pub fn states(&self) -> &[f64] {
        &self.values[..self.values.len() - 1]
    }
}

/// Simulates `n + 1` stationary observations.
pub fn simulate(spec: &ChainSpec, n: usize, seed: u64) -> Result<Path> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || -> f64 { rng.sample(StandardNormal) };
    let mut values = Vec::with_capacity(n + 1);
    match *spec {
        ChainSpec::Ar1 { a, b, sigma } => {
            let mean = b / (1.0 - a);
            let sd = sigma / libm::sqrt(1.0 - a * a);
            let mut x = mean + sd * gauss();
            values.push(x);
            for _ in 0..n {
                x = a * x + b + sigma * gauss();
                values.push(x);
            }
        }
        ChainSpec::RadialOu { a, beta } => {
            let rho = beta / libm::sqrt(1.0 - a * a);
            let mut xi = [rho * gauss(), rho * gauss(), rho * gauss()];
            values.push(norm3(&xi));
            for _ in 0..n {
                for c in xi.iter_mut() {
                    *c = a * *c + beta * gauss();
                }
                values.push(norm3(&xi));
            }
        }
        ChainSpec::Arch { burn_in } => {
            let mut x = 0.0;
            for _ in 0..burn_in {
                x = arch_step(x, gauss());
            }
            values.push(x);
            for _ in 0..n {
                x = arch_step(x, gauss());
                values.push(x);
            }
        }
        ChainSpec::Uniform { lo, hi } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..=n {
                values.push(lo + (hi - lo) * rng.random::<f64>());
            }
        }
    }
    Path::new(values, seed)
}

fn norm3(v: &[f64; 3]) -> f64 {
    libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

fn arch_step(x: f64, eps: f64) -> f64 {
    libm::sin(x) + (libm::cos(x) + 3.0) * eps
}

fn gaussian_pdf(z: f64, sd: f64) -> f64 {
    libm::exp(-0.5 * (z / sd) * (z / sd)) / (sd * libm::sqrt(2.0 * PI))
}

fn uniform_pdf(lo: f64, hi: f64, v: f64) -> f64 {
    if (lo..=hi).contains(&v) {
        1.0 / (hi - lo)
    } else {
        0.0
    }
}

/// Exact transition density `π(x, y)`.
pub fn transition_density(spec: &ChainSpec, x: f64, y: f64) -> Result<f64> {
    match *spec {
        ChainSpec::Ar1 { a, b, sigma } => Ok(gaussian_pdf(y - a * x - b, sigma)),
        ChainSpec::RadialOu { a, beta } => {
            if x <= 0.0 {
                return Err(Error::Domain(format!(
                    "radial OU transition density needs x > 0, got {x}"
                )));
            }
            Ok(radial_ou_kernel(a.abs(), beta, x, y))
        }
        ChainSpec::Arch { .. } => {
            let scale = libm::cos(x) + 3.0;
            Ok(gaussian_pdf(y - libm::sin(x), scale))
        }
        ChainSpec::Uniform { lo, hi } => Ok(uniform_pdf(lo, hi, y)),
    }
}

/// `1_{y>0} exp(-(y²+a²x²)/2β²) I_{1/2}(axy/β²) (y/β²) sqrt(y/(ax))`, with the
/// exponentials combined so nothing overflows for large arguments.
fn radial_ou_kernel(a: f64, beta: f64, x: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let b2 = beta * beta;
    if a == 0.0 {
        // limit z → 0 of the Bessel form: the chi law with 3 degrees of freedom
        return libm::exp(-y * y / (2.0 * b2)) * libm::sqrt(2.0 / PI) * y * y / (b2 * beta);
    }
    let z = a * x * y / b2;
    let d = y - a * x;
    // exp(-s)·sinh(z) = exp(z - s)·(1 - exp(-2z))/2 with z - s = -(y - ax)²/2β²
    let damped_sinh = libm::exp(-d * d / (2.0 * b2)) * (-libm::expm1(-2.0 * z)) * 0.5;
    libm::sqrt(2.0 / (PI * z)) * damped_sinh * (y / b2) * libm::sqrt(y / (a * x))
}

/// Closed-form stationary density `f(x)` (AR(1) and radial OU only).
pub fn stationary_density(spec: &ChainSpec, x: f64) -> Result<f64> {
    match *spec {
        ChainSpec::Ar1 { a, b, sigma } => {
            let mean = b / (1.0 - a);
            let sd = sigma / libm::sqrt(1.0 - a * a);
            Ok(gaussian_pdf(x - mean, sd))
        }
        ChainSpec::RadialOu { a, beta } => {
            if x <= 0.0 {
                return Ok(0.0);
            }
            let rho2 = beta * beta / (1.0 - a * a);
            let rho = libm::sqrt(rho2);
            Ok(
                libm::exp(-x * x / (2.0 * rho2)) * 2.0 * x * x
                    / (rho2 * rho * libm::sqrt(2.0 * PI)),
            )
        }
        ChainSpec::Uniform { lo, hi } => Ok(uniform_pdf(lo, hi, x)),
        ChainSpec::Arch { .. } => Err(Error::Unsupported(
            "the ARCH chain has no closed-form stationary density".into(),
        )),
    }
}

/// Modified Bessel function `I_{1/2}(z) = sqrt(2/(πz)) sinh z` for `z > 0`.
pub fn bessel_i_half(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("I_1/2 needs z > 0, got {z}")));
    }
    Ok(libm::sqrt(2.0 / (PI * z)) * libm::sinh(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureGrid;

    fn inv_sqrt_2pi() -> f64 {
        1.0 / libm::sqrt(2.0 * PI)
    }

    /// `Σ_k (z/2)^{2k+1/2} / (k! Γ(k+3/2))`, summed until the terms vanish.
    fn bessel_series(z: f64) -> f64 {
        // Γ(3/2) = √π/2
        let mut term = libm::sqrt(z / 2.0) / (libm::sqrt(PI) / 2.0);
        let mut sum = term;
        let q = z * z / 4.0;
        let mut k = 0.0;
        loop {
            // ratio of consecutive terms: (z/2)² / ((k+1)(k+3/2))
            term *= q / ((k + 1.0) * (k + 1.5));
            sum += term;
            k += 1.0;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn bessel_values() {
        assert!((bessel_i_half(1.0).unwrap() - 0.937674).abs() < 1e-6);
        assert!((bessel_i_half(1.0).unwrap() - bessel_series(1.0)).abs() < 1e-14);
        let two = bessel_i_half(2.0).unwrap();
        assert!((two - libm::sinh(2.0) / PI.sqrt()).abs() < 1e-14);
        assert!((two - 2.04623).abs() < 1e-5);
        let z = 1e-8;
        let lin = (2.0 / PI).sqrt() * z;
        let got = bessel_i_half(z).unwrap() * z.sqrt();
        assert!(((got - lin) / lin).abs() < 1e-6);
        assert!(matches!(bessel_i_half(0.0), Err(Error::Domain(_))));
        assert!(bessel_i_half(-1.0).is_err());
    }

    #[test]
    fn bessel_matches_series_across_range() {
        let mut z = 1e-6;
        while z <= 20.0 {
            let closed = bessel_i_half(z).unwrap();
            let series = bessel_series(z);
            assert!(((closed - series) / series).abs() < 1e-12, "z={z}");
            z *= 1.07;
        }
    }

    #[test]
    fn ar1_peak_and_stationary() {
        let s = ChainSpec::ar1_default();
        assert!((transition_density(&s, 6.0, 6.0).unwrap() - inv_sqrt_2pi()).abs() < 1e-15);
        let f6 = stationary_density(&s, 6.0).unwrap();
        assert!((f6 - 1.0 / (2.0 * PI * 4.0 / 3.0).sqrt()).abs() < 1e-15);
        assert!((f6 - 0.3455).abs() < 1e-4);
    }

    #[test]
    fn arch_at_origin() {
        let s = ChainSpec::arch_default();
        let p = transition_density(&s, 0.0, 0.0).unwrap();
        assert!((p - inv_sqrt_2pi() / 4.0).abs() < 1e-15);
        assert!((p - 0.09974).abs() < 1e-5);
        let q = transition_density(&s, 0.0, 2.5).unwrap();
        assert!((q - gaussian_pdf(2.5, 4.0)).abs() < 1e-16);
        assert!(matches!(
            stationary_density(&s, 0.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn radial_ou_edges() {
        let s = ChainSpec::radial_ou_default();
        assert_eq!(stationary_density(&s, 0.0).unwrap(), 0.0);
        assert_eq!(transition_density(&s, 4.0, 0.0).unwrap(), 0.0);
        assert_eq!(transition_density(&s, 4.0, -1.0).unwrap(), 0.0);
        assert!(matches!(
            transition_density(&s, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn radial_ou_kernel_matches_literal_formula() {
        let (a, beta) = (0.5, 3.0);
        let s = ChainSpec::RadialOu { a, beta };
        for &(x, y) in &[(4.0, 3.0), (2.0, 9.5), (7.5, 0.3)] {
            let z = a * x * y / (beta * beta);
            let literal = libm::exp(-(y * y + a * a * x * x) / (2.0 * beta * beta))
                * bessel_i_half(z).unwrap()
                * y
                / (beta * beta)
                * (y / (a * x)).sqrt();
            let got = transition_density(&s, x, y).unwrap();
            assert!(((got - literal) / literal).abs() < 1e-13, "({x},{y})");
        }
    }

    #[test]
    fn radial_ou_normalization() {
        let s = ChainSpec::radial_ou_default();
        let grid = QuadratureGrid::composite((0.0, 60.0), 60, 20).unwrap();
        let total = grid.integrate(|y| transition_density(&s, 4.0, y).unwrap());
        assert!((total - 1.0).abs() < 1e-6, "{total}");
        let f_total = grid.integrate(|x| stationary_density(&s, x).unwrap());
        assert!((f_total - 1.0).abs() < 1e-8, "{f_total}");
    }

    #[test]
    fn radial_ou_with_zero_memory_is_continuous() {
        let s0 = ChainSpec::RadialOu { a: 0.0, beta: 2.0 };
        let s1 = ChainSpec::RadialOu { a: 1e-9, beta: 2.0 };
        let p0 = transition_density(&s0, 3.0, 2.5).unwrap();
        let p1 = transition_density(&s1, 3.0, 2.5).unwrap();
        assert!((p0 - p1).abs() < 1e-8);
    }

    #[test]
    fn uniform_chain() {
        let spec = ChainSpec::Uniform { lo: 2.0, hi: 6.0 };
        assert_eq!(transition_density(&spec, 100.0, 3.0).unwrap(), 0.25);
        assert_eq!(transition_density(&spec, 3.0, 6.5).unwrap(), 0.0);
        assert_eq!(stationary_density(&spec, 2.0).unwrap(), 0.25);
        let path = simulate(&spec, 500, 3).unwrap();
        assert!(path.values().iter().all(|v| (2.0..6.0).contains(v)));
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            ChainSpec::Ar1 {
                a: 1.0,
                b: 0.0,
                sigma: 1.0,
            },
            ChainSpec::Ar1 {
                a: 0.5,
                b: 0.0,
                sigma: 0.0,
            },
            ChainSpec::RadialOu { a: -1.2, beta: 1.0 },
            ChainSpec::RadialOu { a: 0.5, beta: -3.0 },
            ChainSpec::Uniform { lo: 1.0, hi: 1.0 },
        ];
        for s in bad {
            assert!(matches!(simulate(&s, 10, 1), Err(Error::Domain(_))));
        }
        assert!(simulate(&ChainSpec::ar1_default(), 0, 1).is_err());
    }

    #[test]
    fn seeded_paths_repeat() {
        for s in [
            ChainSpec::ar1_default(),
            ChainSpec::radial_ou_default(),
            ChainSpec::arch_default(),
        ] {
            let p = simulate(&s, 10, 42).unwrap();
            let q = simulate(&s, 10, 42).unwrap();
            assert_eq!(p.values().len(), 11);
            assert_eq!(p, q);
            assert_ne!(p, simulate(&s, 10, 43).unwrap());
        }
    }

    #[test]
    fn seed_splitting_rule() {
        assert_eq!(split_seed(7, 0), 7);
        assert_eq!(split_seed(7, 1), 7 ^ 0x9E37_79B9_7F4A_7C15);
        assert_eq!(split_seed(0, 2), 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(2));
    }

    #[test]
    fn path_rejects_short_input() {
        assert!(Path::new(alloc::vec![1.0], 0).is_err());
        let p = Path::new(alloc::vec![1.0, 2.0, 3.0], 0).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.states(), &[1.0, 2.0]);
        assert_eq!(
            p.transitions().collect::<Vec<_>>(),
            alloc::vec![(1.0, 2.0), (2.0, 3.0)]
        );
    }
}
