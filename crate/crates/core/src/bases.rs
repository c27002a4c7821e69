//! Orthonormal basis families on bounded intervals.
//!
//! Every family is defined on `[0, 1]` and rescaled to `[lo, hi]` through
//! `φ(x) = (hi - lo)^{-1/2} φ₀((x - lo) / (hi - lo))`, so orthonormality in
//! `L²([lo, hi])` is preserved. All functions vanish outside the interval.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("degenerate interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Kind of orthonormal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisFamily {
    /// Indicators of `D = 2^k` regular cells.
    Histogram,
    /// Constant, then `sin`/`cos` pairs of increasing frequency.
    Trigonometric,
    /// Orthonormal Legendre polynomials of degree `0..=r` on `2^k` regular cells.
    PiecewisePolynomial(u32),
}

impl BasisFamily {
    pub fn is_admissible(&self, dim: usize) -> bool {
        match *self {
            BasisFamily::Histogram => dim.is_power_of_two(),
            BasisFamily::Trigonometric => dim >= 1,
            BasisFamily::PiecewisePolynomial(r) => {
                let block = r as usize + 1;
                dim >= block && dim.is_multiple_of(block) && (dim / block).is_power_of_two()
            }
        }
    }

    /// All admissible dimensions not exceeding `max_dim`, ascending.
    pub fn ladder(&self, max_dim: usize) -> Vec<usize> {
        match *self {
            BasisFamily::Trigonometric => (1..=max_dim).collect(),
            BasisFamily::Histogram => dyadic_ladder(1, max_dim),
            BasisFamily::PiecewisePolynomial(r) => dyadic_ladder(r as usize + 1, max_dim),
        }
    }

    /// Number of regular cells carrying a basis of dimension `dim`, or `None`
    /// for the (global) trigonometric family.
    pub fn cells(&self, dim: usize) -> Option<usize> {
        match *self {
            BasisFamily::Histogram => Some(dim),
            BasisFamily::Trigonometric => None,
            BasisFamily::PiecewisePolynomial(r) => Some(dim / (r as usize + 1)),
        }
    }
}

fn dyadic_ladder(block: usize, max_dim: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = block;
    while d <= max_dim {
        out.push(d);
        d *= 2;
    }
    out
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisFamily::Histogram => f.write_str("histogram"),
            BasisFamily::Trigonometric => f.write_str("trigonometric"),
            BasisFamily::PiecewisePolynomial(r) => write!(f, "poly:{r}"),
        }
    }
}

impl FromStr for BasisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "histogram" => Ok(BasisFamily::Histogram),
            "trigonometric" => Ok(BasisFamily::Trigonometric),
            "poly" => Ok(BasisFamily::PiecewisePolynomial(1)),
            _ => match s.strip_prefix("poly:") {
                Some(r) => r
                    .trim()
                    .parse::<u32>()
                    .map(BasisFamily::PiecewisePolynomial)
                    .map_err(|_| Error::Config(format!("bad polynomial degree in {s:?}"))),
                None => Err(Error::Config(format!("unknown basis family {s:?}"))),
            },
        }
    }
}

/// The M2 constant `φ₁` with `sup|u|² ≤ φ₁·D·∫u²` on the span of a basis.
///
/// For piecewise polynomials of degree `≤ r` the sharp constant is `r + 1`:
/// the reproducing kernel of one cell is `Σ_d (2d+1)/h = (r+1)²/h` at the
/// cell endpoints.
pub fn phi1_constant(family: BasisFamily) -> f64 {
    match family {
        BasisFamily::Histogram => 1.0,
        BasisFamily::Trigonometric => 2.0,
        BasisFamily::PiecewisePolynomial(r) => f64::from(r) + 1.0,
    }
}

/// An orthonormal family of `dim` functions on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    family: BasisFamily,
    dim: usize,
    interval: Interval,
}

/// Builds a basis, checking the dimension ladder and the interval.
pub fn make_basis(family: BasisFamily, dim: usize, interval: (f64, f64)) -> Result<Basis> {
    let interval = Interval::new(interval.0, interval.1)?;
    Basis::new(family, dim, interval)
}

/// Values `(φ_0(x), …, φ_{D-1}(x))`.
pub fn eval_basis(basis: &Basis, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; basis.dim];
    basis.eval_into(x, &mut out);
    out
}

impl Basis {
    pub fn new(family: BasisFamily, dim: usize, interval: Interval) -> Result<Self> {
        if !family.is_admissible(dim) {
            return Err(Error::Dimension {
                family: family.to_string(),
                dim,
            });
        }
        Ok(Self {
            family,
            dim,
            interval,
        })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Writes `φ_j(x)` into `out[j]`. `out` must have length `dim`.
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        out.fill(0.0);
        if !self.interval.contains(x) {
            return;
        }
        let len = self.interval.len();
        let u = (x - self.interval.lo) / len;
        match self.family {
            BasisFamily::Histogram => {
                let cell = cell_index(u, self.dim);
                out[cell] = libm::sqrt(self.dim as f64 / len);
            }
            BasisFamily::Trigonometric => {
                out[0] = 1.0 / libm::sqrt(len);
                let amp = SQRT_2 / libm::sqrt(len);
                let mut j = 1;
                let mut freq = 1.0;
                while j < self.dim {
                    let arg = 2.0 * PI * freq * u;
                    out[j] = amp * libm::sin(arg);
                    if j + 1 < self.dim {
                        out[j + 1] = amp * libm::cos(arg);
                    }
                    j += 2;
                    freq += 1.0;
                }
            }
            BasisFamily::PiecewisePolynomial(r) => {
                let block = r as usize + 1;
                let cells = self.dim / block;
                let cell = cell_index(u, cells);
                // local coordinate in [-1, 1]
                let t = 2.0 * (u * cells as f64 - cell as f64) - 1.0;
                let width = len / cells as f64;
                let slot = &mut out[cell * block..(cell + 1) * block];
                legendre_orthonormal(t, width, slot);
            }
        }
    }

    /// Expands `coefficients` in the basis at `x`.
    pub fn expand(&self, coefficients: &[f64], x: f64) -> f64 {
        let mut vals = vec![0.0; self.dim];
        self.eval_into(x, &mut vals);
        vals.iter().zip(coefficients).map(|(v, c)| v * c).sum()
    }

    /// Interior breakpoints of the piecewise structure (empty for trigonometric).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.family.cells(self.dim) {
            Some(cells) => (1..cells)
                .map(|c| self.interval.lo + self.interval.len() * c as f64 / cells as f64)
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Index of the half-open cell `[c/k, (c+1)/k)` containing `u ∈ [0, 1]`; the
/// last cell is closed at 1.
fn cell_index(u: f64, cells: usize) -> usize {
    let c = libm::floor(u * cells as f64);
    if c < 0.0 {
        0
    } else {
        (c as usize).min(cells - 1)
    }
}

/// `sqrt((2d+1)/width) · P_d(t)` for `d = 0..out.len()`.
fn legendre_orthonormal(t: f64, width: f64, out: &mut [f64]) {
    let mut p_prev = 1.0;
    let mut p = t;
    for (d, slot) in out.iter_mut().enumerate() {
        let value = match d {
            0 => 1.0,
            1 => t,
            _ => {
                let k = (d - 1) as f64;
                let next = ((2.0 * k + 1.0) * t * p - k * p_prev) / (k + 1.0);
                p_prev = p;
                p = next;
                next
            }
        };
        *slot = libm::sqrt((2.0 * d as f64 + 1.0) / width) * value;
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[D={}] on [{}, {}]",
            self.family, self.dim, self.interval.lo, self.interval.hi
        )
    }
}
