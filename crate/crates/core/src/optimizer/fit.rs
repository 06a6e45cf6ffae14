use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{
    self, check_fit_dims, compute_suff_stats, DataSet, PenaltyPair, SpringFit, SuffStats,
};
use crate::structure::StructureMatrix;

use super::covariance::{check_samples, covariance_step, stationarity_residual};
use super::direct::{direct_kkt, direct_step, smooth_gradient};
use super::SolverOptions;

/// `S_xx + λ₂L`.
pub fn structured_gram(stats: &SuffStats, l: &StructureMatrix, lambda2: f64) -> Matrix {
    if lambda2 == 0.0 {
        stats.s_xx.clone()
    } else {
        &stats.s_xx + &l.values * lambda2
    }
}

/// Alternating minimization from Ω_xy = 0 or from `warm`.
pub fn fit(
    data: &DataSet,
    l: &StructureMatrix,
    pen: PenaltyPair,
    opts: &SolverOptions,
    warm: Option<&SpringFit>,
) -> Result<SpringFit> {
    let stats = compute_suff_stats(data)?;
    fit_with_stats(&stats, l, pen, opts, warm)
}

pub fn fit_with_stats(
    stats: &SuffStats,
    l: &StructureMatrix,
    pen: PenaltyPair,
    opts: &SolverOptions,
    warm: Option<&SpringFit>,
) -> Result<SpringFit> {
    let pen = PenaltyPair::new(pen.lambda1, pen.lambda2)?;
    opts.validate()?;
    if l.dim() != stats.p() {
        return Err(Error::dim("structure matrix", stats.p(), l.dim()));
    }
    check_samples(stats)?;
    let h = structured_gram(stats, l, pen.lambda2);
    fit_inner(stats, &l.values, &h, pen, opts, warm)
}

pub(crate) fn fit_inner(
    stats: &SuffStats,
    l: &Matrix,
    h: &Matrix,
    pen: PenaltyPair,
    opts: &SolverOptions,
    warm: Option<&SpringFit>,
) -> Result<SpringFit> {
    let (mut omega_xy, mut omega_yy, mut r) = match warm {
        Some(w) => {
            check_fit_dims(&w.omega_xy, &w.omega_yy, stats)?;
            (w.omega_xy.clone(), w.omega_yy.clone(), w.r.clone())
        }
        None => {
            let omega_xy = Matrix::zeros(stats.p(), stats.q());
            let up = covariance_step(&omega_xy, stats, h)?;
            (omega_xy, up.omega_yy, up.r)
        }
    };
    let mut j_prev = model::objective_parts(&omega_xy, &omega_yy, &r, stats, l, pen)?;
    if !j_prev.is_finite() {
        return Err(Error::NonFiniteObjective { iteration: 0 });
    }
    let mut trace = vec![j_prev];
    let mut converged = false;
    let mut iters = 0;
    // Inner solves are only as accurate as the outer iterate warrants.
    let mut last_move = f64::INFINITY;
    while iters < opts.max_outer {
        iters += 1;
        let up = covariance_step(&omega_xy, stats, h)?;
        omega_yy = up.omega_yy;
        r = up.r;
        let tol = opts.inner_tol.max(1e-2 * last_move);
        let before = omega_xy.clone();
        omega_xy = direct_step(&r, &stats.s_xy, h, pen.lambda1, omega_xy, opts, tol);
        let mut j_new = model::objective_parts(&omega_xy, &omega_yy, &r, stats, l, pen)?;
        if opts.rescale && j_new.is_finite() {
            j_new = rescale(&mut omega_xy, &mut omega_yy, &mut r, j_new)?;
        }
        if !j_new.is_finite() {
            return Err(Error::NonFiniteObjective { iteration: iters });
        }
        last_move = (&omega_xy - &before).amax();
        trace.push(j_new);
        let rel = (j_prev - j_new) / (j_prev.abs() + 1e-12);
        if opts.verbose {
            log::info!("outer {iters}: J = {j_new:.12e}, relative decrease {rel:e}");
        }
        j_prev = j_new;
        if rel < opts.outer_tol
            && (opts.kkt_tol.is_infinite() || {
                let g = smooth_gradient(&omega_xy, &stats.s_xy, h, &r);
                let res = direct_kkt(&omega_xy, &g, pen.lambda1)
                    .max(stationarity_residual(&omega_xy, &omega_yy, stats, h));
                res <= opts.kkt_tol
            })
        {
            converged = true;
            break;
        }
    }
    let mut out = SpringFit::from_parts(omega_xy, omega_yy, r, pen);
    out.objective_value = j_prev;
    out.n_outer_iters = iters;
    out.converged = converged;
    out.objective_trace = trace;
    Ok(out)
}

/// Every term of J except `−½log|Ω_yy|` is homogeneous of degree one in
/// `(Ω_xy, Ω_yy)`, so along `c ↦ (cΩ_xy, cΩ_yy)` the objective is
/// `−½log|Ω_yy| − (q/2)log c + cA` with minimizer `c = q/(2A)`.
fn rescale(omega_xy: &mut Matrix, omega_yy: &mut Matrix, r: &mut Matrix, j: f64) -> Result<f64> {
    let half_q = 0.5 * omega_yy.nrows() as f64;
    let log_det = crate::linalg::log_det_spd(omega_yy, "omega_yy")?;
    let a = j + 0.5 * log_det;
    if !(a > 0.0) {
        return Ok(j);
    }
    let c = half_q / a;
    *omega_xy *= c;
    *omega_yy *= c;
    *r /= c;
    // J(c) = −½log|Ω_yy| − (q/2)log c + q/2, never above J(1).
    Ok((-0.5 * log_det - half_q * c.ln() + half_q).min(j))
}

/// Largest optimality violation over both blocks: the direct-effects KKT
/// conditions (gradient units) and the normalized covariance stationarity
/// residual.
pub fn kkt_residual(
    fit: &SpringFit,
    stats: &SuffStats,
    l: &StructureMatrix,
    pen: PenaltyPair,
) -> f64 {
    let h = structured_gram(stats, l, pen.lambda2);
    let g = smooth_gradient(&fit.omega_xy, &stats.s_xy, &h, &fit.r);
    let xy = direct_kkt(&fit.omega_xy, &g, pen.lambda1);
    let yy = stationarity_residual(&fit.omega_xy, &fit.omega_yy, stats, &h);
    xy.max(yy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::identity_structure;

    fn toy() -> DataSet {
        let x = Matrix::from_row_slice(
            6,
            2,
            &[
                1.0, 0.5, -1.0, 0.2, 0.5, -0.4, -0.5, 0.9, 0.3, -0.7, -0.3, -0.5,
            ],
        );
        let y = Matrix::from_row_slice(
            6,
            2,
            &[
                0.9, 0.1, -1.1, 0.3, 0.4, -0.2, -0.3, 0.5, 0.2, -0.4, -0.1, -0.3,
            ],
        );
        crate::model::center_scale(&DataSet::new(x, y).unwrap()).unwrap()
    }

    #[test]
    fn huge_penalty_gives_empty_fit() {
        let d = toy();
        let l = identity_structure(2).unwrap();
        let f = fit(
            &d,
            &l,
            PenaltyPair::new(1e3, 0.1).unwrap(),
            &SolverOptions::default(),
            None,
        )
        .unwrap();
        assert!(f.omega_xy.iter().all(|v| *v == 0.0));
        assert!(f.converged && f.n_outer_iters <= 2);
        let stats = compute_suff_stats(&d).unwrap();
        let s_inv = crate::linalg::spd_inverse(&stats.s_yy, "s").unwrap();
        assert!((&f.omega_yy - s_inv).amax() < 1e-12);
        assert!(kkt_residual(&f, &stats, &l, f.penalty()) <= 1e-10);
    }

    #[test]
    fn too_few_samples_rejected() {
        let x = Matrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let y = Matrix::from_row_slice(2, 3, &[1.0, 2.0, 0.5, -1.0, -2.0, -0.5]);
        let d = DataSet::centered(x, y).unwrap();
        let l = identity_structure(1).unwrap();
        let err = fit(
            &d,
            &l,
            PenaltyPair::new(0.1, 0.0).unwrap(),
            &SolverOptions::default(),
            None,
        );
        assert!(matches!(err, Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn rescaling_reaches_the_same_optimum_sooner() {
        let d = toy();
        let l = identity_structure(2).unwrap();
        let pen = PenaltyPair::new(0.02, 0.3).unwrap();
        let tight = SolverOptions {
            kkt_tol: 1e-9,
            max_outer: 5000,
            ..Default::default()
        };
        let a = fit(&d, &l, pen, &tight, None).unwrap();
        let plain = SolverOptions {
            rescale: false,
            ..tight
        };
        let b = fit(&d, &l, pen, &plain, None).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.objective_value - b.objective_value).abs() < 1e-10);
        assert!((&a.omega_xy - &b.omega_xy).amax() < 1e-6);
        assert!(a.n_outer_iters <= b.n_outer_iters);
        for w in a.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn converged_fit_certifies_and_descends() {
        let d = toy();
        let l = identity_structure(2).unwrap();
        let pen = PenaltyPair::new(0.05, 0.1).unwrap();
        let f = fit(&d, &l, pen, &SolverOptions::default(), None).unwrap();
        let stats = compute_suff_stats(&d).unwrap();
        assert!(f.converged);
        assert!(kkt_residual(&f, &stats, &l, pen) <= 1e-5);
        for w in f.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-10);
        }
        // Perturbing an active entry breaks stationarity.
        let (j, k) = (0..2)
            .flat_map(|k| (0..2).map(move |j| (j, k)))
            .find(|&(j, k)| f.omega_xy[(j, k)] != 0.0)
            .expect("non-empty support");
        let mut bumped = f.omega_xy.clone();
        bumped[(j, k)] += 0.1;
        let g = SpringFit::new(bumped, f.omega_yy.clone(), pen).unwrap();
        assert!(kkt_residual(&g, &stats, &l, pen) > 1e-3);
    }
}
