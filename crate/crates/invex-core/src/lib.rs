//! Invex-regularized image reconstruction.
//!
//! This crate implements a family of invex sparsity penalties together with
//! their exact proximal operators, three proximal solvers (accelerated,
//! plain/folded, and plug-and-play), linear operators for deconvolution and
//! compressive sensing, a data-adaptive tight-frame denoiser, and the image
//! quality metrics used to evaluate reconstructions.
//!
//! Every invex penalty here has the property that the proximal subproblem
//! `lambda * g(w) + 0.5 * (w - u)^2` is convex for `lambda` in `(0, 1]`, so
//! the shrinkage rules in [`prox`] return global minimizers even though the
//! penalties themselves are non-convex.

pub mod checks;
pub mod denoise;
mod error;
pub mod linalg;
pub mod linops;
pub mod metrics;
pub mod prox;
pub mod regularizers;
pub mod rng;
pub mod solvers;
pub mod synth;

pub use error::CoreError;
pub use linops::LinearOperator;
pub use metrics::ImageBuffer;
pub use regularizers::{Interval, RegKind, Regularizer};
pub use solvers::{Denoiser, Problem, SolverConfig, SolverError, SolverTrace};
