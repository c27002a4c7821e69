//! Penalized projection estimation of the transition density of a
//! stationary Markov chain.
//!
//! The crate is `no_std` (with `alloc`) and carries no IO. It provides
//! orthonormal bases on intervals ([`bases`]), exact simulators and
//! densities for the reference chains ([`chains`]), the least-squares
//! contrast with penalized model selection ([`estimator`]), Gauss–Legendre
//! quadrature ([`quadrature`]) and Monte-Carlo risk evaluation ([`risk`]).
//!
//! ```
//! use kernelsel_core::{
//!     evaluate, model_collection, select_model, simulate, BasisFamily, ChainSpec, PenaltyConfig,
//! };
//!
//! let spec = ChainSpec::ar1_default();
//! let path = simulate(&spec, 1000, 7)?;
//! let models = model_collection(
//!     BasisFamily::Histogram,
//!     BasisFamily::Histogram,
//!     path.n(),
//!     &spec.default_domain(),
//!     false,
//! )?;
//! let selection = select_model(&models, &path, &PenaltyConfig::simulation(0.5))?;
//! assert!(selection.model().d1() <= 8 && selection.model().d2() <= 8);
//! assert!(evaluate(&selection.fit, 6.0, 6.0) > 0.0);
//! # Ok::<(), kernelsel_core::Error>(())
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bases;
pub mod chains;
mod error;
pub mod estimator;
pub mod linalg;
pub mod quadrature;
pub mod risk;

pub use bases::{eval_basis, make_basis, phi1_constant, Basis, BasisFamily, Interval};
pub use chains::{
    bessel_i_half, simulate, split_seed, stationary_density, transition_density, ChainSpec, Path,
};
pub use error::{Error, Result};
pub use estimator::{
    contrast_direct, cross_matrix, evaluate, fit_model, gram_matrix, model_collection, penalty,
    pilot_sup_norm, select_model, truncate, Fit, Model, ModelDiagnostic, PenaltyConfig,
    PenaltyMode, PilotEstimate, Rect, Selection,
};
pub use linalg::Matrix;
pub use quadrature::{make_grid, QuadratureGrid};
pub use risk::{
    empirical_risk, f_risk, l2_risk, mc_risk, rate_slope, run_replicate, summarize, ReplicateRisk,
    RiskOptions, RiskReport,
};
