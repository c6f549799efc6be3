//! Numerical verification of Li–Yau type gradient inequalities for the
//! Neumann heat semigroup on model manifolds.
//!
//! The crate is organized as
//! * [`geometry`]: model manifolds and curvature-dimension probes,
//! * [`heatflow`]: exact kernels and heat solvers with Harnack quantities,
//! * [`bounds`]: the inequality catalog, test clocks and their integrals,
//! * [`stochastic`]: reflected diffusions, local time and Monte-Carlo estimators,
//! * [`harness`]: declarative experiments and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod heatflow;
pub mod numeric;
pub mod quadrature;
pub mod stochastic;

pub use error::{Error, Result};
pub use geometry::{make_model_manifold, Drift, Family, ModelManifold};
