//! cGGM parametrization, sufficient statistics and the penalized criterion.
//!
//! The additive constant of the log-likelihood is dropped everywhere; all
//! criteria only ever compare differences. `neg_log_likelihood` is per sample,
//! i.e. `−(1/n) log L`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::structure::StructureMatrix;

/// Relative tolerance on column means for data to count as centered.
pub const CENTERING_TOL: f64 = 1e-10;

/// Column means and scales removed by [`center_scale`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub x_means: Vec<f64>,
    pub y_means: Vec<f64>,
    pub x_scales: Option<Vec<f64>>,
    pub y_scales: Option<Vec<f64>>,
}

/// Predictors `x` (n×p) and responses `y` (n×q).
#[derive(Clone, Debug, PartialEq)]
pub struct DataSet {
    pub x: Matrix,
    pub y: Matrix,
    pub centered_x: bool,
    pub centered_y: bool,
    pub standardization: Option<Standardization>,
}

impl DataSet {
    pub fn new(x: Matrix, y: Matrix) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::dim("DataSet rows", x.nrows(), y.nrows()));
        }
        if x.nrows() == 0 {
            return Err(Error::InvalidInput(
                "data set needs at least one row".into(),
            ));
        }
        Ok(DataSet {
            x,
            y,
            centered_x: false,
            centered_y: false,
            standardization: None,
        })
    }

    /// Wraps data the caller asserts is already centered. The claim is
    /// verified later by [`compute_suff_stats`].
    pub fn centered(x: Matrix, y: Matrix) -> Result<Self> {
        let mut d = DataSet::new(x, y)?;
        d.centered_x = true;
        d.centered_y = true;
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.y.ncols()
    }

    /// Rows selected by `idx`, keeping the centering flags.
    pub fn select_rows(&self, idx: &[usize]) -> DataSet {
        DataSet {
            x: self.x.select_rows(idx.iter()),
            y: self.y.select_rows(idx.iter()),
            centered_x: self.centered_x,
            centered_y: self.centered_y,
            standardization: self.standardization.clone(),
        }
    }

    /// Applies a previously computed standardization (e.g. from a training
    /// fold) to this data.
    pub fn apply_standardization(&self, st: &Standardization) -> Result<DataSet> {
        if st.x_means.len() != self.p() || st.y_means.len() != self.q() {
            return Err(Error::dim(
                "standardization",
                format!("p={}, q={}", st.x_means.len(), st.y_means.len()),
                format!("p={}, q={}", self.p(), self.q()),
            ));
        }
        let x = transform(&self.x, &st.x_means, st.x_scales.as_deref());
        let y = transform(&self.y, &st.y_means, st.y_scales.as_deref());
        Ok(DataSet {
            x,
            y,
            centered_x: true,
            centered_y: true,
            standardization: Some(st.clone()),
        })
    }

    /// Maps standardized data back to the original units.
    pub fn unscale(&self) -> DataSet {
        match &self.standardization {
            None => self.clone(),
            Some(st) => DataSet {
                x: untransform(&self.x, &st.x_means, st.x_scales.as_deref()),
                y: untransform(&self.y, &st.y_means, st.y_scales.as_deref()),
                centered_x: false,
                centered_y: false,
                standardization: None,
            },
        }
    }
}

fn transform(m: &Matrix, means: &[f64], scales: Option<&[f64]>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let c = m[(i, j)] - means[j];
        match scales {
            Some(s) => c / s[j],
            None => c,
        }
    })
}

fn untransform(m: &Matrix, means: &[f64], scales: Option<&[f64]>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let v = match scales {
            Some(s) => m[(i, j)] * s[j],
            None => m[(i, j)],
        };
        v + means[j]
    })
}

/// Empirical second moments of centered data.
#[derive(Clone, Debug, PartialEq)]
pub struct SuffStats {
    pub s_xx: Matrix,
    pub s_yy: Matrix,
    pub s_xy: Matrix,
    pub n: usize,
}

impl SuffStats {
    pub fn p(&self) -> usize {
        self.s_xx.nrows()
    }

    pub fn q(&self) -> usize {
        self.s_yy.nrows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl PenaltyPair {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(PenaltyPair { lambda1, lambda2 })
    }
}

/// A fitted (or candidate) parameter pair with derived regression quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct SpringFit {
    /// Direct effects Ω_xy, p×q.
    pub omega_xy: Matrix,
    /// Response precision Ω_yy, q×q.
    pub omega_yy: Matrix,
    /// Residual covariance R = Ω_yy⁻¹.
    pub r: Matrix,
    /// Regression coefficients B = −Ω_xy R.
    pub b: Matrix,
    pub lambda1: f64,
    pub lambda2: f64,
    pub objective_value: f64,
    pub n_outer_iters: usize,
    pub converged: bool,
    /// Objective after every outer iteration, starting with the initial point.
    pub objective_trace: Vec<f64>,
}

impl SpringFit {
    /// Builds a fit from its two free blocks; `r` and `b` are derived.
    pub fn new(omega_xy: Matrix, omega_yy: Matrix, pen: PenaltyPair) -> Result<Self> {
        if omega_xy.ncols() != omega_yy.nrows() || !omega_yy.is_square() {
            return Err(Error::dim(
                "SpringFit",
                format!("{}x{} precision", omega_xy.ncols(), omega_xy.ncols()),
                format!("{}x{}", omega_yy.nrows(), omega_yy.ncols()),
            ));
        }
        let r = linalg::spd_inverse(&omega_yy, "omega_yy")?;
        Ok(Self::from_parts(omega_xy, omega_yy, r, pen))
    }

    pub(crate) fn from_parts(
        omega_xy: Matrix,
        omega_yy: Matrix,
        r: Matrix,
        pen: PenaltyPair,
    ) -> Self {
        let b = -(&omega_xy * &r);
        SpringFit {
            omega_xy,
            omega_yy,
            r,
            b,
            lambda1: pen.lambda1,
            lambda2: pen.lambda2,
            objective_value: f64::NAN,
            n_outer_iters: 0,
            converged: false,
            objective_trace: Vec::new(),
        }
    }

    pub fn penalty(&self) -> PenaltyPair {
        PenaltyPair {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
        }
    }

    pub fn support_size(&self) -> usize {
        self.omega_xy.iter().filter(|v| **v != 0.0).count()
    }
}

fn check_finite(m: &Matrix, block: &'static str) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    block,
                    row: i,
                    column: j,
                });
            }
        }
    }
    Ok(())
}

fn check_centered(m: &Matrix, block: &'static str) -> Result<()> {
    let n = m.nrows() as f64;
    for (j, col) in m.column_iter().enumerate() {
        let mean = col.sum() / n;
        let rms = (col.norm_squared() / n).sqrt();
        if mean.abs() > CENTERING_TOL * rms {
            return Err(Error::NotCentered {
                block,
                column: j,
                mean,
            });
        }
    }
    Ok(())
}

/// `S_xx = XᵀX/n`, `S_yy = YᵀY/n`, `S_xy = XᵀY/n` for centered data.
pub fn compute_suff_stats(data: &DataSet) -> Result<SuffStats> {
    let n = data.n();
    if n == 0 {
        return Err(Error::InvalidInput("no samples".into()));
    }
    check_finite(&data.x, "X")?;
    check_finite(&data.y, "Y")?;
    check_centered(&data.x, "X")?;
    check_centered(&data.y, "Y")?;
    let inv_n = 1.0 / n as f64;
    let mut s_xx = data.x.tr_mul(&data.x) * inv_n;
    let mut s_yy = data.y.tr_mul(&data.y) * inv_n;
    linalg::symmetrize(&mut s_xx);
    linalg::symmetrize(&mut s_yy);
    let s_xy = data.x.tr_mul(&data.y) * inv_n;
    Ok(SuffStats {
        s_xx,
        s_yy,
        s_xy,
        n,
    })
}

/// Centers X and Y, scales Y columns to unit sample variance. X is only
/// scaled when `scale_x` is set.
pub fn center_scale_with(data: &DataSet, scale_x: bool) -> Result<DataSet> {
    let n = data.n();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "standardization needs n >= 2, got {n}"
        )));
    }
    check_finite(&data.x, "X")?;
    check_finite(&data.y, "Y")?;
    let (x_means, x_sd) = column_moments(&data.x);
    let (y_means, y_sd) = column_moments(&data.y);
    if let Some(j) = y_sd.iter().position(|s| *s == 0.0) {
        return Err(Error::ZeroVariance {
            block: "Y",
            column: j,
        });
    }
    if scale_x {
        if let Some(j) = x_sd.iter().position(|s| *s == 0.0) {
            return Err(Error::ZeroVariance {
                block: "X",
                column: j,
            });
        }
    }
    let st = Standardization {
        x_means,
        y_means,
        x_scales: scale_x.then_some(x_sd),
        y_scales: Some(y_sd),
    };
    data.apply_standardization(&st)
}

/// Column means of X and Y with no scaling.
pub fn centering(data: &DataSet) -> Standardization {
    Standardization {
        x_means: column_moments(&data.x).0,
        y_means: column_moments(&data.y).0,
        x_scales: None,
        y_scales: None,
    }
}

/// [`center_scale_with`] using the default of leaving X unscaled.
pub fn center_scale(data: &DataSet) -> Result<DataSet> {
    center_scale_with(data, false)
}

/// Column means and sample standard deviations (n − 1 denominator).
fn column_moments(m: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.nrows() as f64;
    m.column_iter()
        .map(|col| {
            let mean = col.sum() / n;
            let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
            (mean, (ss / (n - 1.0)).sqrt())
        })
        .unzip()
}

pub(crate) fn check_fit_dims(
    omega_xy: &Matrix,
    omega_yy: &Matrix,
    stats: &SuffStats,
) -> Result<()> {
    if omega_xy.nrows() != stats.p() || omega_xy.ncols() != stats.q() {
        return Err(Error::dim(
            "omega_xy",
            format!("{}x{}", stats.p(), stats.q()),
            format!("{}x{}", omega_xy.nrows(), omega_xy.ncols()),
        ));
    }
    if omega_yy.nrows() != stats.q() || omega_yy.ncols() != stats.q() {
        return Err(Error::dim(
            "omega_yy",
            format!("{}x{}", stats.q(), stats.q()),
            format!("{}x{}", omega_yy.nrows(), omega_yy.ncols()),
        ));
    }
    Ok(())
}

/// Entrywise inner product `Σ a_ij b_ij`, i.e. `tr(aᵀ b)`.
pub(crate) fn frob_dot(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `tr(Ω_yx M Ω_xy R)` for a symmetric p×p `m`.
pub(crate) fn quad_trace(omega_xy: &Matrix, m: &Matrix, r: &Matrix) -> f64 {
    frob_dot(&(m * omega_xy), &(omega_xy * r))
}

pub(crate) fn nll_parts(
    omega_xy: &Matrix,
    omega_yy: &Matrix,
    r: &Matrix,
    stats: &SuffStats,
) -> Result<f64> {
    let log_det = linalg::log_det_spd(omega_yy, "omega_yy")?;
    let tr_yy = linalg::trace_product(&stats.s_yy, omega_yy);
    let tr_xy = frob_dot(&stats.s_xy, omega_xy);
    let tr_quad = quad_trace(omega_xy, &stats.s_xx, r);
    Ok(0.5 * (-log_det + tr_yy + 2.0 * tr_xy + tr_quad))
}

/// Per-sample negative log-likelihood `−(1/n) log L`, constant dropped:
/// `½[−log|Ω_yy| + tr(S_yy Ω_yy) + 2 tr(S_xy Ω_yx) + tr(Ω_yx S_xx Ω_xy Ω_yy⁻¹)]`.
pub fn neg_log_likelihood(fit: &SpringFit, stats: &SuffStats) -> Result<f64> {
    check_fit_dims(&fit.omega_xy, &fit.omega_yy, stats)?;
    nll_parts(&fit.omega_xy, &fit.omega_yy, &fit.r, stats)
}

pub(crate) fn l1_norm(m: &Matrix) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

pub(crate) fn objective_parts(
    omega_xy: &Matrix,
    omega_yy: &Matrix,
    r: &Matrix,
    stats: &SuffStats,
    l: &Matrix,
    pen: PenaltyPair,
) -> Result<f64> {
    let nll = nll_parts(omega_xy, omega_yy, r, stats)?;
    let structure = if pen.lambda2 == 0.0 {
        0.0
    } else {
        0.5 * pen.lambda2 * quad_trace(omega_xy, l, r)
    };
    Ok(nll + structure + pen.lambda1 * l1_norm(omega_xy))
}

/// Penalized criterion `J = nll + (λ₂/2) tr(Ω_yx L Ω_xy Ω_yy⁻¹) + λ₁ ‖Ω_xy‖₁`.
pub fn objective(
    fit: &SpringFit,
    stats: &SuffStats,
    l: &StructureMatrix,
    pen: PenaltyPair,
) -> Result<f64> {
    check_fit_dims(&fit.omega_xy, &fit.omega_yy, stats)?;
    if l.dim() != fit.omega_xy.nrows() {
        return Err(Error::dim(
            "structure matrix",
            fit.omega_xy.nrows(),
            l.dim(),
        ));
    }
    objective_parts(&fit.omega_xy, &fit.omega_yy, &fit.r, stats, &l.values, pen)
}

/// `(B, R)` from `(Ω_xy, Ω_yy)`: `R = Ω_yy⁻¹`, `B = −Ω_xy R`.
pub fn to_regression(fit: &SpringFit) -> Result<(Matrix, Matrix)> {
    let r = linalg::spd_inverse(&fit.omega_yy, "omega_yy")?;
    let b = -(&fit.omega_xy * &r);
    Ok((b, r))
}

pub fn predict(b: &Matrix, x_new: &Matrix) -> Result<Matrix> {
    if x_new.ncols() != b.nrows() {
        return Err(Error::dim("predict", b.nrows(), x_new.ncols()));
    }
    Ok(x_new * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::identity_structure;

    fn m(r: usize, c: usize, v: &[f64]) -> Matrix {
        Matrix::from_row_slice(r, c, v)
    }

    #[test]
    fn suff_stats_trivial_cases() {
        let z = Matrix::zeros(3, 1);
        let s = compute_suff_stats(&DataSet::centered(z.clone(), z).unwrap()).unwrap();
        assert_eq!(
            (s.s_xx[(0, 0)], s.s_yy[(0, 0)], s.s_xy[(0, 0)]),
            (0.0, 0.0, 0.0)
        );

        let v = m(2, 1, &[1.0, -1.0]);
        let s = compute_suff_stats(&DataSet::centered(v.clone(), v).unwrap()).unwrap();
        assert_eq!(
            (s.s_xx[(0, 0)], s.s_yy[(0, 0)], s.s_xy[(0, 0)]),
            (1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn suff_stats_match_loops() {
        let raw = DataSet::new(
            m(
                5,
                3,
                &[
                    0.3, -1.2, 2.0, 1.1, 0.4, -0.7, -0.8, 0.9, 0.1, 2.2, -0.3, 0.5, -0.6, 1.7, 0.8,
                ],
            ),
            m(
                5,
                2,
                &[1.0, 0.2, -0.4, 0.9, 0.7, -1.3, 0.05, 0.6, -2.0, 0.33],
            ),
        )
        .unwrap();
        let d = raw.apply_standardization(&centering(&raw)).unwrap();
        let s = compute_suff_stats(&d).unwrap();
        let (x, y) = (&d.x, &d.y);
        for a in 0..3 {
            for b in 0..3 {
                let v: f64 = (0..5).map(|i| x[(i, a)] * x[(i, b)]).sum::<f64>() / 5.0;
                assert!((s.s_xx[(a, b)] - v).abs() < 1e-12);
            }
            for k in 0..2 {
                let v: f64 = (0..5).map(|i| x[(i, a)] * y[(i, k)]).sum::<f64>() / 5.0;
                assert!((s.s_xy[(a, k)] - v).abs() < 1e-12);
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let v: f64 = (0..5).map(|i| y[(i, a)] * y[(i, b)]).sum::<f64>() / 5.0;
                assert!((s.s_yy[(a, b)] - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn suff_stats_reject_bad_data() {
        let x = m(3, 1, &[1.0, 2.0, 3.0]);
        let y = m(3, 1, &[1.0, -1.0, 0.0]);
        let d = DataSet::new(x, y.clone()).unwrap();
        assert!(matches!(
            compute_suff_stats(&d),
            Err(Error::NotCentered { block: "X", .. })
        ));
        let x = m(3, 1, &[1.0, f64::NAN, -1.0]);
        let d = DataSet {
            x: x.clone(),
            y,
            ..d
        };
        assert!(matches!(
            compute_suff_stats(&d),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn center_scale_examples() {
        let x = m(3, 1, &[0.0, 5.0, 1.0]);
        let y = m(3, 1, &[1.0, 2.0, 3.0]);
        let d = center_scale(&DataSet::new(x, y).unwrap()).unwrap();
        // (1,2,3) has sample sd 1.
        assert_eq!(d.y.as_slice(), &[-1.0, 0.0, 1.0]);
        assert!((d.x.sum()).abs() < 1e-12);
        let back = d.unscale();
        assert!((back.x[(1, 0)] - 5.0).abs() < 1e-12);
        assert!((back.y[(2, 0)] - 3.0).abs() < 1e-12);

        // Already centered with unit sample variance.
        let c = DataSet::new(
            m(2, 1, &[0.5f64.sqrt(), -(0.5f64.sqrt())]),
            m(2, 1, &[0.5f64.sqrt(), -(0.5f64.sqrt())]),
        )
        .unwrap();
        let again = center_scale(&c).unwrap();
        assert!((&again.y - &c.y).amax() < 1e-12);
        assert!((&again.x - &c.x).amax() < 1e-12);

        let flat = DataSet::new(
            m(3, 1, &[1.0, 2.0, 3.0]),
            m(3, 2, &[1.0, 4.0, 2.0, 4.0, 3.0, 4.0]),
        )
        .unwrap();
        assert!(matches!(
            center_scale(&flat),
            Err(Error::ZeroVariance {
                block: "Y",
                column: 1
            })
        ));
    }

    fn unit_stats(q: usize) -> SuffStats {
        SuffStats {
            s_xx: Matrix::identity(2, 2),
            s_yy: Matrix::identity(q, q),
            s_xy: Matrix::zeros(2, q),
            n: 10,
        }
    }

    #[test]
    fn nll_identity_case() {
        let pen = PenaltyPair::new(0.0, 0.0).unwrap();
        let f = SpringFit::new(Matrix::zeros(2, 3), Matrix::identity(3, 3), pen).unwrap();
        assert_eq!(neg_log_likelihood(&f, &unit_stats(3)).unwrap(), 1.5);
    }

    #[test]
    fn doubling_direct_effects_scales_their_traces() {
        let stats = SuffStats {
            s_xx: m(2, 2, &[2.0, 0.3, 0.3, 1.0]),
            s_yy: m(2, 2, &[1.5, 0.2, 0.2, 0.8]),
            s_xy: m(2, 2, &[0.4, -0.1, 0.2, 0.3]),
            n: 10,
        };
        let oyy = m(2, 2, &[1.2, -0.3, -0.3, 0.9]);
        let oxy = m(2, 2, &[0.5, 0.0, -0.2, 0.7]);
        let pen = PenaltyPair::new(0.0, 0.0).unwrap();
        let f1 = SpringFit::new(oxy.clone(), oyy.clone(), pen).unwrap();
        let f2 = SpringFit::new(&oxy * 2.0, oyy.clone(), pen).unwrap();
        let r = f1.r.clone();
        let lin = (stats.s_xy.transpose() * &oxy).trace();
        let quad = (oxy.transpose() * &stats.s_xx * &oxy * &r).trace();
        let d = neg_log_likelihood(&f2, &stats).unwrap() - neg_log_likelihood(&f1, &stats).unwrap();
        assert!((d - 0.5 * (2.0 * lin + 3.0 * quad)).abs() < 1e-12);
    }

    #[test]
    fn objective_penalty_terms() {
        let stats = unit_stats(1);
        let l = identity_structure(2).unwrap();
        let oxy = m(2, 1, &[0.4, -0.7]);
        let sigma2 = 1.0 / 2.5;
        let zero = PenaltyPair::new(0.0, 0.0).unwrap();
        let f = SpringFit::new(oxy.clone(), m(1, 1, &[2.5]), zero).unwrap();
        let nll = neg_log_likelihood(&f, &stats).unwrap();
        assert_eq!(objective(&f, &stats, &l, zero).unwrap(), nll);

        let pen = PenaltyPair::new(0.0, 0.8).unwrap();
        let structure = objective(&f, &stats, &l, pen).unwrap() - nll;
        let direct = 0.4 * sigma2 * (0.4f64.powi(2) + 0.7f64.powi(2));
        assert!((structure - direct).abs() < 1e-14);

        let z = SpringFit::new(Matrix::zeros(2, 1), m(1, 1, &[2.5]), zero).unwrap();
        let big = PenaltyPair::new(3.0, 7.0).unwrap();
        let chain = crate::structure::chain_laplacian(2, 1).unwrap();
        assert_eq!(
            objective(&z, &stats, &chain, big).unwrap(),
            neg_log_likelihood(&z, &stats).unwrap()
        );

        let wrong = identity_structure(3).unwrap();
        assert!(matches!(
            objective(&f, &stats, &wrong, pen),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn regression_mapping() {
        let pen = PenaltyPair::new(0.0, 0.0).unwrap();
        let oxy = m(2, 3, &[0.1, 0.0, -0.4, 0.0, 0.3, 0.2]);
        let f = SpringFit::new(oxy.clone(), Matrix::identity(3, 3), pen).unwrap();
        let (b, _) = to_regression(&f).unwrap();
        assert_eq!(b, -&oxy);

        let oyy = m(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.5, -0.3, 0.1, -0.3, 1.0]);
        let f = SpringFit::new(oxy.clone(), oyy.clone(), pen).unwrap();
        let (b, _) = to_regression(&f).unwrap();
        assert!((&b * &oyy + &oxy).amax() < 1e-10);

        let u = SpringFit::new(m(3, 1, &[0.5, 0.0, -1.0]), m(1, 1, &[4.0]), pen).unwrap();
        let (b, r) = to_regression(&u).unwrap();
        assert_eq!(r[(0, 0)], 0.25);
        assert_eq!(b.as_slice(), &[-0.125, -0.0, 0.25]);
    }

    #[test]
    fn prediction() {
        let b = m(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let x = m(3, 2, &[1.0, 2.0, -1.0, 0.0, 0.5, 4.0]);
        let got = predict(&b, &x).unwrap();
        assert_eq!(
            got.as_slice(),
            m(3, 2, &[2.0, 4.0, -1.0, 2.0, 2.5, 11.0]).as_slice()
        );
        assert_eq!(predict(&b, &Matrix::identity(2, 2)).unwrap(), b);
        assert!(predict(&Matrix::zeros(2, 2), &x)
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
        assert!(predict(&b, &Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn penalty_validation() {
        assert!(PenaltyPair::new(-0.1, 0.0).is_err());
        assert!(PenaltyPair::new(0.1, f64::INFINITY).is_err());
        assert!(PenaltyPair::new(0.0, 0.0).is_ok());
    }
}
