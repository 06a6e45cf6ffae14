//! Sparse, structurally regularized estimation of conditional Gaussian
//! graphical models (cGGM) for multivariate regression.
//!
//! The model links predictors `X` (n×p) and responses `Y` (n×q) through the
//! blocks of the joint precision matrix: direct effects `Ω_xy` (p×q) and the
//! response precision `Ω_yy` (q×q). Regression coefficients are recovered as
//! `B = −Ω_xy Ω_yy⁻¹` and the residual covariance as `R = Ω_yy⁻¹`.
//!
//! The estimator minimizes
//!
//! ```text
//! J(Ω_xy, Ω_yy) = −(1/n) log L + (λ₂/2) tr(Ω_yx L Ω_xy Ω_yy⁻¹) + λ₁ ‖Ω_xy‖₁
//! ```
//!
//! by alternating an exact covariance update with a coordinate-descent
//! Elastic-Net update of the direct effects.

pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod optimizer;
pub mod selection;
pub mod simulate;
pub mod structure;

pub use error::{Error, Result};
pub use model::{
    center_scale, compute_suff_stats, neg_log_likelihood, objective, predict, to_regression,
    DataSet, PenaltyPair, SpringFit, SuffStats,
};
pub use optimizer::{
    fit, fit_path, kkt_residual, update_covariance, update_direct_effects, PathCell, PathResult,
    PenaltyGrid, SolverOptions,
};
pub use selection::{
    cross_validate, degrees_of_freedom, information_criterion, ActiveSet, Criterion, CvReport,
};
pub use structure::{GeneticMap, Provenance, StructureMatrix};
