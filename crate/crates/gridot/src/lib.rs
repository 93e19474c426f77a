//! Estimation of the squared 2-Wasserstein distance W₂²(P,Q) between smooth
//! product distributions on (0,1)^d to ε-additive accuracy.
//!
//! The estimator samples n points from each distribution, sketches them onto
//! a regular L-per-axis cell-center grid, and solves the resulting grid
//! transport problem exactly through a (d+1)-partite integral min-cost flow
//! reduction. Smoothness of the densities controls the discretization error,
//! so the grid can stay coarse enough for exact solving to be cheap.
//!
//! Module map:
//!
//! - [`measures`] — the (α,C)-controlled product family: densities, exact
//!   CDFs, samplers, and the quantile-quadrature reference oracle.
//! - [`sketch`] — the cell-center grid, point and analytic pushforwards.
//! - [`flowgraph`] — the layered flow reduction with integer scaling.
//! - [`mcf`] — the exact min-cost flow solver with optimality certificates.
//! - [`oracle`] — independent small-instance transport references.
//! - [`harness`] — the end-to-end estimator, experiments, and persistence.

pub mod error;
pub mod flowgraph;
pub mod harness;
pub mod mcf;
pub mod measures;
pub mod oracle;
pub mod sketch;

pub use error::{Error, Result};
