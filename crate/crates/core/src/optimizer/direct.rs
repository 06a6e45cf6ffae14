//! Coordinate descent for the direct-effects subproblem
//!
//! ```text
//! min_Ω  tr(S_xy Ω_yx) + ½ tr(Ω_yx H Ω R) + λ₁ ‖Ω‖₁,   H = S_xx + λ₂L,
//! ```
//!
//! whose smooth gradient is `G = S_xy + H Ω R` and whose coordinate
//! curvature at `(j, k)` is `H_jj R_kk`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{PenaltyPair, SuffStats};
use crate::structure::StructureMatrix;

use super::SolverOptions;

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// `G = S_xy + H Ω_xy R`.
pub fn smooth_gradient(omega_xy: &Matrix, s_xy: &Matrix, h: &Matrix, r: &Matrix) -> Matrix {
    s_xy + h * omega_xy * r
}

struct Solver<'a> {
    h: &'a Matrix,
    r: &'a Matrix,
    s_xy: &'a Matrix,
    lambda1: f64,
    omega: Matrix,
    /// H·Ω, kept in sync with `omega`.
    h_omega: Matrix,
}

impl Solver<'_> {
    /// Minimizes exactly along coordinate (j, k); returns the absolute change.
    fn step(&mut self, j: usize, k: usize) -> f64 {
        let curv = self.h[(j, j)] * self.r[(k, k)];
        let old = self.omega[(j, k)];
        if curv <= 0.0 {
            // H_jj = 0 forces the whole row of H to vanish (H is PSD).
            if old != 0.0 {
                self.apply(j, k, -old);
            }
            return old.abs();
        }
        let q = self.r.nrows();
        let mut grad = self.s_xy[(j, k)];
        for l in 0..q {
            grad += self.h_omega[(j, l)] * self.r[(l, k)];
        }
        let new = soft_threshold(curv * old - grad, self.lambda1) / curv;
        let delta = new - old;
        if delta != 0.0 {
            self.apply(j, k, delta);
        }
        delta.abs()
    }

    fn apply(&mut self, j: usize, k: usize, delta: f64) {
        self.omega[(j, k)] += delta;
        let hj = self.h.column(j);
        let mut col = self.h_omega.column_mut(k);
        col.axpy(delta, &hj, 1.0);
    }

    fn full_sweep(&mut self) -> f64 {
        let (p, q) = self.omega.shape();
        let mut worst = 0.0_f64;
        for k in 0..q {
            for j in 0..p {
                worst = worst.max(self.step(j, k));
            }
        }
        worst
    }

    fn active(&self) -> Vec<(usize, usize)> {
        let (p, q) = self.omega.shape();
        let mut out = Vec::new();
        for k in 0..q {
            for j in 0..p {
                if self.omega[(j, k)] != 0.0 {
                    out.push((j, k));
                }
            }
        }
        out
    }
}

/// Runs the active-set coordinate descent to sweep tolerance `tol`;
/// `h = S_xx + λ₂L`.
pub(crate) fn direct_step(
    r: &Matrix,
    s_xy: &Matrix,
    h: &Matrix,
    lambda1: f64,
    warm: Matrix,
    opts: &SolverOptions,
    tol: f64,
) -> Matrix {
    let h_omega = h * &warm;
    let mut solver = Solver {
        h,
        r,
        s_xy,
        lambda1,
        omega: warm,
        h_omega,
    };
    let mut sweeps = 0;
    loop {
        // Full sweep over every coordinate, column-major.
        let change = solver.full_sweep();
        sweeps += 1;
        if change < tol || sweeps >= opts.max_inner {
            break;
        }
        // Iterate on the current support until it settles.
        let active = solver.active();
        while sweeps < opts.max_inner {
            let mut worst = 0.0_f64;
            for &(j, k) in &active {
                worst = worst.max(solver.step(j, k));
            }
            sweeps += 1;
            if worst < tol {
                break;
            }
        }
        if sweeps >= opts.max_inner {
            log::warn!(
                "coordinate descent reached {} sweeps without converging",
                opts.max_inner
            );
            break;
        }
    }
    solver.omega
}

/// Minimizer over Ω_xy for fixed Ω_yy, optionally warm-started.
pub fn update_direct_effects(
    omega_yy: &Matrix,
    stats: &SuffStats,
    l: &StructureMatrix,
    pen: PenaltyPair,
    warm: Option<&Matrix>,
    opts: &SolverOptions,
) -> Result<Matrix> {
    let (p, q) = (stats.p(), stats.q());
    if omega_yy.shape() != (q, q) {
        return Err(Error::dim(
            "omega_yy",
            format!("{q}x{q}"),
            format!("{}x{}", omega_yy.nrows(), omega_yy.ncols()),
        ));
    }
    if l.dim() != p {
        return Err(Error::dim("structure matrix", p, l.dim()));
    }
    let start = match warm {
        Some(w) if w.shape() == (p, q) => w.clone(),
        Some(w) => {
            return Err(Error::dim(
                "warm start",
                format!("{p}x{q}"),
                format!("{}x{}", w.nrows(), w.ncols()),
            ))
        }
        None => Matrix::zeros(p, q),
    };
    let r = linalg::spd_inverse(omega_yy, "omega_yy")?;
    let h = super::fit::structured_gram(stats, l, pen.lambda2);
    Ok(direct_step(&r, &stats.s_xy, &h, pen.lambda1, start, opts, opts.inner_tol))
}

/// Worst KKT violation of the direct-effects block, in gradient units.
pub(crate) fn direct_kkt(omega_xy: &Matrix, g: &Matrix, lambda1: f64) -> f64 {
    let mut worst = 0.0_f64;
    for (w, gv) in omega_xy.iter().zip(g.iter()) {
        let v = if *w != 0.0 {
            (gv + lambda1 * w.signum()).abs()
        } else {
            (gv.abs() - lambda1).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}
