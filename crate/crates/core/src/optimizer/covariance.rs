use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::SuffStats;
use crate::structure::StructureMatrix;

/// Spectral bookkeeping of one covariance update.
#[derive(Clone, Debug)]
pub struct EigenUpdate {
    /// Eigenvalues ζ of `Ω_yx(λ₂L + S_xx)Ω_xy S_yy`, clamped at 0.
    pub zeta: Vec<f64>,
    /// Positive roots η of `η² − η − ζ = 0`.
    pub eta: Vec<f64>,
    /// Common eigenvectors U of `Ω_yy S_yy` and `Ω_yx(λ₂L + S_xx)Ω_xy S_yy`.
    pub basis: Matrix,
    /// Largest magnitude of a negative ζ removed by clamping.
    pub clamped: f64,
}

#[derive(Clone, Debug)]
pub struct CovarianceUpdate {
    pub omega_yy: Matrix,
    pub r: Matrix,
    pub eigen: EigenUpdate,
}

/// Positive root of `η² − η − ζ = 0`.
pub(crate) fn positive_root(zeta: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * zeta).sqrt())
}

/// `Ω_yx H Ω_xy` using only the nonzero rows of `Ω_xy`.
pub(crate) fn coupling(omega_xy: &Matrix, h: &Matrix) -> Matrix {
    let rows: Vec<usize> = (0..omega_xy.nrows())
        .filter(|&j| omega_xy.row(j).iter().any(|v| *v != 0.0))
        .collect();
    let q = omega_xy.ncols();
    if rows.is_empty() {
        return Matrix::zeros(q, q);
    }
    let w = omega_xy.select_rows(rows.iter());
    let h_aa = h.select_rows(rows.iter()).select_columns(rows.iter());
    let mut m = w.tr_mul(&(h_aa * &w));
    linalg::symmetrize(&mut m);
    m
}

pub(crate) fn check_samples(stats: &SuffStats) -> Result<()> {
    if stats.n < stats.q() {
        return Err(Error::TooFewSamples {
            n: stats.n,
            q: stats.q(),
        });
    }
    Ok(())
}

/// Exact minimizer over Ω_yy with `h = S_xx + λ₂L` precomputed.
pub(crate) fn covariance_step(
    omega_xy: &Matrix,
    stats: &SuffStats,
    h: &Matrix,
) -> Result<CovarianceUpdate> {
    check_samples(stats)?;
    let q = stats.q();
    let chol = linalg::cholesky(&stats.s_yy, "S_yy")?;
    let c = chol.l();
    let m = coupling(omega_xy, h);
    if m.iter().all(|v| *v == 0.0) {
        let mut omega_yy = chol.inverse();
        linalg::symmetrize(&mut omega_yy);
        let basis = c
            .transpose()
            .solve_upper_triangular(&Matrix::identity(q, q))
            .expect("Cholesky factor is invertible");
        return Ok(CovarianceUpdate {
            omega_yy,
            r: stats.s_yy.clone(),
            eigen: EigenUpdate {
                zeta: vec![0.0; q],
                eta: vec![1.0; q],
                basis,
                clamped: 0.0,
            },
        });
    }
    // With S_yy = CCᵀ and X = CᵀΩ_yyC the stationarity equation
    // Ω_yy S_yy Ω_yy − Ω_yy = M becomes X² − X = CᵀMC.
    let mut n_mat = c.tr_mul(&(&m * &c));
    linalg::symmetrize(&mut n_mat);
    let eig = n_mat.symmetric_eigen();
    let mut clamped = 0.0_f64;
    let zeta: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&z| {
            if z < 0.0 {
                clamped = clamped.max(-z);
                0.0
            } else {
                z
            }
        })
        .collect();
    let zeta_scale = zeta.iter().fold(1.0_f64, |a, &z| a.max(z));
    if clamped > 1e-8 * zeta_scale {
        log::warn!("covariance update clamped a negative eigenvalue of magnitude {clamped:e}");
    }
    let eta: Vec<f64> = zeta.iter().map(|&z| positive_root(z)).collect();
    let v = &eig.eigenvectors;
    // Ω_yy = C⁻ᵀ V diag(η) Vᵀ C⁻¹ and R = C V diag(1/η) Vᵀ Cᵀ.
    let w = c
        .transpose()
        .solve_upper_triangular(v)
        .expect("Cholesky factor is invertible");
    let z = &c * v;
    let mut omega_yy = Matrix::zeros(q, q);
    let mut r = Matrix::zeros(q, q);
    for (jdx, &e) in eta.iter().enumerate() {
        let wc = w.column(jdx);
        let zc = z.column(jdx);
        omega_yy += (&wc * wc.transpose()) * e;
        r += (&zc * zc.transpose()) / e;
    }
    linalg::symmetrize(&mut omega_yy);
    linalg::symmetrize(&mut r);
    Ok(CovarianceUpdate {
        omega_yy,
        r,
        eigen: EigenUpdate {
            zeta,
            eta,
            basis: w,
            clamped,
        },
    })
}

/// Exact minimizer of the criterion over Ω_yy for fixed Ω_xy.
/// Returns `(Ω_yy, R)`.
pub fn update_covariance(
    omega_xy: &Matrix,
    stats: &SuffStats,
    l: &StructureMatrix,
    lambda2: f64,
) -> Result<(Matrix, Matrix)> {
    let up = covariance_update_detail(omega_xy, stats, l, lambda2)?;
    Ok((up.omega_yy, up.r))
}

pub fn covariance_update_detail(
    omega_xy: &Matrix,
    stats: &SuffStats,
    l: &StructureMatrix,
    lambda2: f64,
) -> Result<CovarianceUpdate> {
    if omega_xy.nrows() != stats.p() || omega_xy.ncols() != stats.q() {
        return Err(Error::dim(
            "omega_xy",
            format!("{}x{}", stats.p(), stats.q()),
            format!("{}x{}", omega_xy.nrows(), omega_xy.ncols()),
        ));
    }
    if l.dim() != stats.p() {
        return Err(Error::dim("structure matrix", stats.p(), l.dim()));
    }
    let h = super::fit::structured_gram(stats, l, lambda2);
    covariance_step(omega_xy, stats, &h)
}

/// `‖Ω S_yy Ω − Ω − M‖_F / (1 + ‖Ω‖_F)` with `M = Ω_yx H Ω_xy`.
pub(crate) fn stationarity_residual(
    omega_xy: &Matrix,
    omega_yy: &Matrix,
    stats: &SuffStats,
    h: &Matrix,
) -> f64 {
    let m = coupling(omega_xy, h);
    let lhs = omega_yy * &stats.s_yy * omega_yy - omega_yy - m;
    lhs.norm() / (1.0 + omega_yy.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::identity_structure;

    fn stats_with(s_yy: Matrix, p: usize) -> SuffStats {
        let q = s_yy.nrows();
        SuffStats {
            s_xx: Matrix::identity(p, p),
            s_yy,
            s_xy: Matrix::zeros(p, q),
            n: 10,
        }
    }

    #[test]
    fn zero_direct_effects_give_inverse_sample_covariance() {
        let stats = stats_with(Matrix::identity(2, 2) * 2.0, 3);
        let l = identity_structure(3).unwrap();
        let (omega_yy, r) = update_covariance(&Matrix::zeros(3, 2), &stats, &l, 0.3).unwrap();
        assert!((omega_yy - Matrix::identity(2, 2) * 0.5).amax() < 1e-15);
        assert!((r - Matrix::identity(2, 2) * 2.0).amax() < 1e-15);
    }

    #[test]
    fn root_formula() {
        assert_eq!(positive_root(0.0), 1.0);
        assert!((positive_root(2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        let mut stats = stats_with(Matrix::identity(3, 3), 2);
        stats.n = 2;
        let l = identity_structure(2).unwrap();
        assert!(matches!(
            update_covariance(&Matrix::zeros(2, 3), &stats, &l, 0.0),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn singular_s_yy_is_rejected() {
        let stats = stats_with(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]), 2);
        let l = identity_structure(2).unwrap();
        assert!(matches!(
            update_covariance(&Matrix::identity(2, 2), &stats, &l, 0.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn nonzero_update_is_stationary_and_consistent() {
        let s_yy = Matrix::from_row_slice(2, 2, &[1.5, 0.4, 0.4, 0.8]);
        let mut stats = stats_with(s_yy, 3);
        stats.s_xx = Matrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 1.1, -0.3, 0.0, -0.3, 0.9]);
        let l = crate::structure::chain_laplacian(3, 1).unwrap();
        let omega_xy = Matrix::from_row_slice(3, 2, &[0.5, 0.0, -0.2, 0.7, 0.0, 0.1]);
        let up = covariance_update_detail(&omega_xy, &stats, &l, 0.4).unwrap();
        let h = crate::optimizer::structured_gram(&stats, &l, 0.4);
        assert!(stationarity_residual(&omega_xy, &up.omega_yy, &stats, &h) < 1e-12);
        assert!((&up.omega_yy * &up.r - Matrix::identity(2, 2)).amax() < 1e-12);
        for (z, e) in up.eigen.zeta.iter().zip(&up.eigen.eta) {
            assert!(*e >= 1.0);
            assert!((e * e - e - z).abs() < 1e-12);
        }
        // U diagonalizes Ω_yy S_yy with eigenvalues η.
        let prod = &up.omega_yy * &stats.s_yy * &up.eigen.basis;
        let expect = &up.eigen.basis
            * Matrix::from_diagonal(&nalgebra::DVector::from_vec(up.eigen.eta.clone()));
        assert!((prod - expect).amax() < 1e-10);
    }
}
