//! Alternating minimization of the penalized cGGM criterion.
//!
//! Each outer iteration solves the covariance block exactly (a matrix
//! quadratic with a closed-form solution) and then the direct-effects block,
//! an Elastic-Net problem with Hessian `R ⊗ (S_xx + λ₂L)`, by coordinate
//! descent. The Kronecker matrices are never formed.

mod covariance;
mod direct;
mod fit;
pub(crate) mod path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use covariance::{covariance_update_detail, update_covariance, CovarianceUpdate, EigenUpdate};
pub use direct::{smooth_gradient, update_direct_effects};
pub use fit::{fit, fit_with_stats, kkt_residual, structured_gram};
pub use path::{fit_path, fit_path_with, PathCell, PathResult, PenaltyGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop when `(J_prev − J_new) / (|J_prev| + 1e-12)` falls below this.
    pub outer_tol: f64,
    /// A fit is declared converged only once its optimality residual
    /// (see [`kkt_residual`]) is also at most this. `f64::INFINITY` keeps
    /// the objective-decrease test alone.
    pub kkt_tol: f64,
    pub max_outer: usize,
    /// Coordinate descent stops when no coefficient moves more than this.
    pub inner_tol: f64,
    /// Cap on coordinate-descent sweeps per direct-effects update.
    pub max_inner: usize,
    /// After each outer iteration, rescale `(Ω_xy, Ω_yy)` by the exact
    /// minimizer along `c ↦ (cΩ_xy, cΩ_yy)`.
    pub rescale: bool,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            outer_tol: 1e-7,
            kkt_tol: 1e-6,
            max_outer: 200,
            inner_tol: 1e-9,
            max_inner: 10_000,
            rescale: true,
            verbose: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.outer_tol > 0.0) || !(self.inner_tol > 0.0) || !(self.kkt_tol > 0.0) {
            return Err(Error::InvalidInput(
                "solver tolerances must be positive".into(),
            ));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidInput(
                "solver iteration caps must be >= 1".into(),
            ));
        }
        Ok(())
    }
}
