// Negated comparisons (`!(x > 0.0)`) are deliberate: they catch NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::type_complexity)]
#![allow(clippy::needless_range_loop)]

//! Exact fiducial and confidence distributions at desk scale.
//!
//! The crate builds data-dependent distributions on parameter spaces without a
//! prior: univariate fiducial distributions for the classic exponential-family
//! models (with right/left/arithmetic/geometric variants for discrete data),
//! a step-by-step conditional construction for multidimensional parameters,
//! closed forms for conditionally reducible exponential families (multinomial,
//! negative-multinomial, Poisson/normal), the generalized fiducial density
//! driven by the data-generating-equation Jacobian, and the decision-facing
//! diagnostics used to compare all of these with objective-Bayes posteriors:
//! confidence curves, equal-tail intervals, PIT/coverage simulation and
//! confidence risk.
//!
//! Everything is deterministic: stochastic routines take explicit seeds and
//! produce identical results sequentially and in parallel.

pub mod crnef;
pub mod dist;
pub mod error;
pub mod fiducial1d;
pub mod gfd;
pub mod inference;
pub mod models;
pub mod numerics;
pub mod stepwise;

pub use dist::Distribution1D;
pub use error::{Error, Result};
pub use fiducial1d::{Fiducial1D, FiducialVariant};
pub use models::ModelSpec;
pub use numerics::grid::Grid;
pub use numerics::rng::SplitMix64;
pub use stepwise::JointFiducial;
