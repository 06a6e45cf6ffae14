//! Degrees of freedom, information criteria and K-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{
    centering, compute_suff_stats, nll_parts, DataSet, PenaltyPair, SpringFit, SuffStats,
};
use crate::optimizer::{structured_gram, PenaltyGrid, SolverOptions};
use crate::structure::StructureMatrix;

/// Nonzero entries of Ω_xy, sorted column-major (vec order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSet {
    pub indices: Vec<(usize, usize)>,
}

impl ActiveSet {
    pub fn from_matrix(omega_xy: &Matrix) -> Self {
        let (p, q) = omega_xy.shape();
        let indices = (0..q)
            .flat_map(|k| (0..p).map(move |j| (j, k)))
            .filter(|&(j, k)| omega_xy[(j, k)] != 0.0)
            .collect();
        ActiveSet { indices }
    }

    pub fn from_fit(fit: &SpringFit) -> Self {
        Self::from_matrix(&fit.omega_xy)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `(R ⊗ M)_AA` without forming the Kronecker product.
    pub fn kron_block(&self, r: &Matrix, m: &Matrix) -> Matrix {
        let a = &self.indices;
        Matrix::from_fn(a.len(), a.len(), |u, v| {
            let (ju, ku) = a[u];
            let (jv, kv) = a[v];
            r[(ku, kv)] * m[(ju, jv)]
        })
    }
}

/// `card(A) − λ₂ tr[(R ⊗ L)_AA ((R ⊗ (S_xx + λ₂L))_AA)⁻¹]`.
pub fn degrees_of_freedom(
    fit: &SpringFit,
    stats: &SuffStats,
    l: &StructureMatrix,
    lambda2: f64,
) -> Result<f64> {
    let active = ActiveSet::from_fit(fit);
    if lambda2 == 0.0 || active.is_empty() {
        return Ok(active.len() as f64);
    }
    if l.dim() != stats.p() {
        return Err(Error::dim("structure matrix", stats.p(), l.dim()));
    }
    let singular = || Error::SingularDf {
        lambda1: fit.lambda1,
        lambda2,
    };
    let h = structured_gram(stats, l, lambda2);
    let lhs = active.kron_block(&fit.r, &l.values);
    let sys = active.kron_block(&fit.r, &h);
    // tr(P Q⁻¹) = tr(Q⁻¹ P)
    let solved = match sys.clone().cholesky() {
        Some(ch) => ch.solve(&lhs),
        None => sys.lu().solve(&lhs).ok_or_else(singular)?,
    };
    let tr = solved.trace();
    if !tr.is_finite() {
        return Err(singular());
    }
    Ok(active.len() as f64 - lambda2 * tr)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
}

impl Criterion {
    pub fn weight(self, n: usize) -> f64 {
        match self {
            Criterion::Aic => 2.0,
            Criterion::Bic => (n as f64).ln(),
        }
    }
}

/// `−2 log L + pen · df`.
pub fn penalized_criterion(loglik: f64, df: f64, kind: Criterion, n: usize) -> f64 {
    -2.0 * loglik + kind.weight(n) * df
}

pub fn information_criterion(
    fit: &SpringFit,
    stats: &SuffStats,
    l: &StructureMatrix,
    pen: PenaltyPair,
    kind: Criterion,
    n: usize,
) -> Result<f64> {
    let df = degrees_of_freedom(fit, stats, l, pen.lambda2)?;
    let loglik = -(n as f64) * nll_parts(&fit.omega_xy, &fit.omega_yy, &fit.r, stats)?;
    Ok(penalized_criterion(loglik, df, kind, n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvCell {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mean_pe: f64,
    pub se_pe: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// Fold of each sample, in `0..K`.
    pub fold_assignment: Vec<usize>,
    pub grid: PenaltyGrid,
    /// λ₂-major, same layout as [`crate::optimizer::PathResult`].
    pub cells: Vec<CvCell>,
    pub best_pair: PenaltyPair,
    pub best_index: usize,
}

/// Seeded shuffle then round-robin split; fold sizes differ by at most one.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    let mut folds = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        folds[i] = pos % k;
    }
    folds
}

/// K-fold cross-validation of the prediction error over the whole grid.
pub fn cross_validate(
    data: &DataSet,
    l: &StructureMatrix,
    grid: &PenaltyGrid,
    k: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<CvReport> {
    cross_validate_with(data, l, grid, k, seed, opts, None)
}

/// As [`cross_validate`] with folds (and λ₂ sweeps within them) on at most
/// `threads` workers.
pub fn cross_validate_with(
    data: &DataSet,
    l: &StructureMatrix,
    grid: &PenaltyGrid,
    k: usize,
    seed: u64,
    opts: &SolverOptions,
    threads: Option<usize>,
) -> Result<CvReport> {
    let n = data.n();
    if k < 2 || n < k {
        return Err(Error::InvalidInput(format!(
            "cross-validation needs 2 <= K <= n, got K={k}, n={n}"
        )));
    }
    if l.dim() != data.p() {
        return Err(Error::dim("structure matrix", data.p(), l.dim()));
    }
    let grid = PenaltyGrid::new(grid.lambda1_values.clone(), grid.lambda2_values.clone())?;
    let folds = fold_assignment(n, k, seed);
    let per_fold: Vec<Result<Vec<f64>>> = crate::optimizer::path::with_pool(threads, || {
        (0..k)
            .into_par_iter()
            .map(|f| fold_errors(data, l, &grid, opts, &folds, f))
            .collect()
    });
    let n_cells = grid.len();
    let mut fold_pe = Vec::with_capacity(k);
    for (f, res) in per_fold.into_iter().enumerate() {
        let sse = res?;
        let n_f = folds.iter().filter(|&&x| x == f).count() as f64;
        fold_pe.push((sse, n_f));
    }
    let n1 = grid.lambda1_values.len();
    let cells: Vec<CvCell> = (0..n_cells)
        .map(|c| {
            let total: f64 = fold_pe.iter().map(|(sse, _)| sse[c]).sum();
            let mean_pe = total / n as f64;
            let per: Vec<f64> = fold_pe.iter().map(|(sse, nf)| sse[c] / nf).collect();
            let m = per.iter().sum::<f64>() / k as f64;
            let var = per.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (k as f64 - 1.0);
            CvCell {
                lambda1: grid.lambda1_values[c % n1],
                lambda2: grid.lambda2_values[c / n1],
                mean_pe,
                se_pe: (var / k as f64).sqrt(),
            }
        })
        .collect();
    let mut best = 0;
    for (i, c) in cells.iter().enumerate().skip(1) {
        let b = &cells[best];
        let better = c.mean_pe < b.mean_pe
            || (c.mean_pe == b.mean_pe
                && (c.lambda1 > b.lambda1 || (c.lambda1 == b.lambda1 && c.lambda2 > b.lambda2)));
        if better {
            best = i;
        }
    }
    Ok(CvReport {
        fold_assignment: folds,
        best_pair: PenaltyPair {
            lambda1: cells[best].lambda1,
            lambda2: cells[best].lambda2,
        },
        best_index: best,
        grid,
        cells,
    })
}

/// Sum of held-out squared errors per grid cell for fold `f`.
fn fold_errors(
    data: &DataSet,
    l: &StructureMatrix,
    grid: &PenaltyGrid,
    opts: &SolverOptions,
    folds: &[usize],
    f: usize,
) -> Result<Vec<f64>> {
    let train_idx: Vec<usize> = (0..data.n()).filter(|&i| folds[i] != f).collect();
    let test_idx: Vec<usize> = (0..data.n()).filter(|&i| folds[i] == f).collect();
    if train_idx.len() < data.q() {
        return Err(Error::TooFewSamples {
            n: train_idx.len(),
            q: data.q(),
        });
    }
    let raw_train = data.select_rows(&train_idx);
    let raw_test = data.select_rows(&test_idx);
    // Training means only; the response scale is left as given.
    let st = centering(&raw_train);
    let train = raw_train.apply_standardization(&st)?;
    let test = raw_test.apply_standardization(&st)?;
    let stats = compute_suff_stats(&train)?;
    let path = crate::optimizer::path::path_from_stats(&stats, l, grid, opts)?;
    Ok(path
        .cells
        .iter()
        .map(|c| {
            let resid = &test.x * &c.b - &test.y;
            resid.norm_squared()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_and_balance() {
        for (n, k) in [(10, 3), (7, 7), (103, 5)] {
            let f = fold_assignment(n, k, 42);
            let mut counts = vec![0; k];
            for &x in &f {
                counts[x] += 1;
            }
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1);
            assert_eq!(counts.iter().sum::<usize>(), n);
        }
        assert_eq!(fold_assignment(50, 5, 9), fold_assignment(50, 5, 9));
    }

    #[test]
    fn bic_minus_aic() {
        let (ll, df, n) = (-12.5, 3.7, 40);
        let d = penalized_criterion(ll, df, Criterion::Bic, n)
            - penalized_criterion(ll, df, Criterion::Aic, n);
        assert!((d - ((n as f64).ln() - 2.0) * df).abs() < 1e-12);
        for n in 8..200 {
            assert!(Criterion::Bic.weight(n) > Criterion::Aic.weight(n));
        }
    }

    #[test]
    fn df_is_support_size_without_structure() {
        let omega = Matrix::from_row_slice(3, 2, &[0.0, 1.0, 2.0, 0.0, 0.5, -0.1]);
        let f = SpringFit::new(
            omega,
            Matrix::identity(2, 2),
            PenaltyPair::new(0.1, 0.0).unwrap(),
        )
        .unwrap();
        let stats = SuffStats {
            s_xx: Matrix::identity(3, 3),
            s_yy: Matrix::identity(2, 2),
            s_xy: Matrix::zeros(3, 2),
            n: 5,
        };
        let l = crate::structure::chain_laplacian(3, 1).unwrap();
        assert_eq!(degrees_of_freedom(&f, &stats, &l, 0.0).unwrap(), 4.0);
        let empty = SpringFit::new(
            Matrix::zeros(3, 2),
            Matrix::identity(2, 2),
            PenaltyPair::new(0.1, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(degrees_of_freedom(&empty, &stats, &l, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn active_set_is_column_major() {
        let omega = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(
            ActiveSet::from_matrix(&omega).indices,
            vec![(1, 0), (0, 1), (1, 1)]
        );
    }
}
