//! Gauss–Legendre quadrature on intervals, single-panel or composite.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::bases::Interval;
use crate::error::{Error, Result};

/// Nodes and positive weights integrating over `interval`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: Interval,
}

/// Gauss–Legendre rule with `points` nodes mapped to `interval`.
pub fn make_grid(interval: (f64, f64), points: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::composite(interval, 1, points)
}

impl QuadratureGrid {
    /// `panels` equal sub-intervals, each carrying a `points`-node rule.
    pub fn composite(interval: (f64, f64), panels: usize, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Input(format!(
                "quadrature needs at least 2 points, got {points}"
            )));
        }
        if panels == 0 {
            return Err(Error::Input("quadrature needs at least one panel".into()));
        }
        let interval = Interval::new(interval.0, interval.1)?;
        let (ref_nodes, ref_weights) = gauss_legendre(points);
        let width = interval.len() / panels as f64;
        let mut nodes = Vec::with_capacity(panels * points);
        let mut weights = Vec::with_capacity(panels * points);
        for p in 0..panels {
            let a = interval.lo + width * p as f64;
            let half = 0.5 * width;
            let mid = a + half;
            for (t, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(mid + half * t);
                weights.push(half * w);
            }
        }
        Ok(Self {
            nodes,
            weights,
            interval,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Nodes and weights on `[-1, 1]`, ascending, by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
