//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Cholesky factorization that reports failure instead of regularizing.
/// Pivots below `n·ε·max(diag)` count as singular.
pub fn cholesky(m: &Matrix, what: &'static str) -> Result<Cholesky<f64, Dyn>> {
    if !m.is_square() {
        return Err(Error::dim(
            what,
            "square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite { what });
    }
    let chol = Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite { what })?;
    let max_diag = m.diagonal().amax();
    let floor = m.nrows() as f64 * f64::EPSILON * max_diag;
    if chol.l_dirty().diagonal().iter().any(|d| d * d <= floor) {
        return Err(Error::NotPositiveDefinite { what });
    }
    Ok(chol)
}

pub fn spd_inverse(m: &Matrix, what: &'static str) -> Result<Matrix> {
    let mut inv = cholesky(m, what)?.inverse();
    symmetrize(&mut inv);
    Ok(inv)
}

/// `log |m|` for a symmetric positive-definite matrix.
pub fn log_det_spd(m: &Matrix, what: &'static str) -> Result<f64> {
    let chol = cholesky(m, what)?;
    Ok(2.0
        * chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>())
}

pub fn symmetrize(m: &mut Matrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest absolute asymmetry `|m_ij − m_ji|`.
pub fn asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Trace of `a * b` without forming the product.
pub fn trace_product(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
