use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{compute_suff_stats, nll_parts, DataSet, PenaltyPair, SpringFit, SuffStats};
use crate::selection::{self, Criterion};
use crate::structure::StructureMatrix;

use super::covariance::check_samples;
use super::fit::{fit_inner, kkt_residual, structured_gram};
use super::SolverOptions;

/// Default λ₂ values.
pub const DEFAULT_LAMBDA2: [f64; 5] = [0.0, 0.01, 0.1, 1.0, 10.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyGrid {
    /// Strictly decreasing.
    pub lambda1_values: Vec<f64>,
    pub lambda2_values: Vec<f64>,
}

impl PenaltyGrid {
    pub fn new(lambda1_values: Vec<f64>, lambda2_values: Vec<f64>) -> Result<Self> {
        if lambda1_values.is_empty() || lambda2_values.is_empty() {
            return Err(Error::InvalidInput("penalty grid must be nonempty".into()));
        }
        if lambda1_values
            .iter()
            .chain(&lambda2_values)
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::InvalidInput(
                "penalties must be finite and nonnegative".into(),
            ));
        }
        if lambda1_values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput(
                "lambda1 values must be strictly decreasing".into(),
            ));
        }
        Ok(PenaltyGrid {
            lambda1_values,
            lambda2_values,
        })
    }

    /// `count` log-spaced λ₁ values from `max|S_xy|` down to `min_ratio` times it.
    pub fn lambda1_sequence(stats: &SuffStats, count: usize, min_ratio: f64) -> Result<Vec<f64>> {
        let lmax = crate::linalg::max_abs(&stats.s_xy);
        if !(lmax > 0.0) {
            return Err(Error::InvalidInput(
                "S_xy is zero; no penalty grid can be anchored".into(),
            ));
        }
        if count == 0 || !(min_ratio > 0.0 && min_ratio < 1.0) {
            return Err(Error::InvalidInput(format!(
                "lambda1 grid needs count >= 1 and ratio in (0, 1), got {count}:{min_ratio}"
            )));
        }
        if count == 1 {
            return Ok(vec![lmax]);
        }
        let step = min_ratio.ln() / (count - 1) as f64;
        Ok((0..count).map(|i| lmax * (step * i as f64).exp()).collect())
    }

    pub fn from_stats(
        stats: &SuffStats,
        count: usize,
        min_ratio: f64,
        lambda2_values: Vec<f64>,
    ) -> Result<Self> {
        Self::new(
            Self::lambda1_sequence(stats, count, min_ratio)?,
            lambda2_values,
        )
    }

    /// 50 values down to 1% of `max|S_xy|`, λ₂ ∈ {0, 0.01, 0.1, 1, 10}.
    pub fn default_for(stats: &SuffStats) -> Result<Self> {
        Self::from_stats(stats, 50, 0.01, DEFAULT_LAMBDA2.to_vec())
    }

    pub fn len(&self) -> usize {
        self.lambda1_values.len() * self.lambda2_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathCell {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Nonzero entries of Ω_xy, column-major.
    pub support: Vec<(usize, usize)>,
    pub omega_xy: Matrix,
    pub omega_yy: Matrix,
    pub b: Matrix,
    pub df: f64,
    pub aic: f64,
    pub bic: f64,
    /// `log L` with the constant dropped.
    pub loglik: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kkt: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub grid: PenaltyGrid,
    /// λ₂-major: cell `(i1, i2)` lives at `i2 * n_lambda1 + i1`.
    pub cells: Vec<PathCell>,
}

impl PathResult {
    pub fn cell(&self, i1: usize, i2: usize) -> &PathCell {
        &self.cells[i2 * self.grid.lambda1_values.len() + i1]
    }

    /// Index of the cell minimizing `key`; ties go to larger λ₁ then larger λ₂.
    pub fn argmin_by(&self, key: impl Fn(&PathCell) -> f64) -> usize {
        let mut best = 0;
        for (i, c) in self.cells.iter().enumerate().skip(1) {
            let (a, b) = (key(c), key(&self.cells[best]));
            let better = a < b
                || (a == b
                    && (c.lambda1 > self.cells[best].lambda1
                        || (c.lambda1 == self.cells[best].lambda1
                            && c.lambda2 > self.cells[best].lambda2)));
            if better {
                best = i;
            }
        }
        best
    }
}

/// Regularization path with warm starts along decreasing λ₁, one sweep per λ₂.
pub fn fit_path(
    data: &DataSet,
    l: &StructureMatrix,
    grid: &PenaltyGrid,
    opts: &SolverOptions,
) -> Result<PathResult> {
    fit_path_with(data, l, grid, opts, None)
}

/// As [`fit_path`], running λ₂ sweeps on at most `threads` workers
/// (`None` uses the ambient rayon pool). Results do not depend on scheduling.
pub fn fit_path_with(
    data: &DataSet,
    l: &StructureMatrix,
    grid: &PenaltyGrid,
    opts: &SolverOptions,
    threads: Option<usize>,
) -> Result<PathResult> {
    let stats = compute_suff_stats(data)?;
    with_pool(threads, || path_from_stats(&stats, l, grid, opts))
}

pub(crate) fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(t) => match rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
    }
}

pub(crate) fn path_from_stats(
    stats: &SuffStats,
    l: &StructureMatrix,
    grid: &PenaltyGrid,
    opts: &SolverOptions,
) -> Result<PathResult> {
    let grid = PenaltyGrid::new(grid.lambda1_values.clone(), grid.lambda2_values.clone())?;
    opts.validate()?;
    if l.dim() != stats.p() {
        return Err(Error::dim("structure matrix", stats.p(), l.dim()));
    }
    check_samples(stats)?;
    let sweeps: Vec<Result<Vec<PathCell>>> = grid
        .lambda2_values
        .par_iter()
        .map(|&lambda2| sweep(stats, l, &grid.lambda1_values, lambda2, opts))
        .collect();
    let mut cells = Vec::with_capacity(grid.len());
    for s in sweeps {
        cells.extend(s?);
    }
    Ok(PathResult { grid, cells })
}

fn sweep(
    stats: &SuffStats,
    l: &StructureMatrix,
    lambda1_values: &[f64],
    lambda2: f64,
    opts: &SolverOptions,
) -> Result<Vec<PathCell>> {
    let h = structured_gram(stats, l, lambda2);
    let mut warm: Option<SpringFit> = None;
    let mut cells = Vec::with_capacity(lambda1_values.len());
    for &lambda1 in lambda1_values {
        let pen = PenaltyPair { lambda1, lambda2 };
        let tag = |e: Error| Error::Cell {
            lambda1,
            lambda2,
            source: Box::new(e),
        };
        let f = fit_inner(stats, &l.values, &h, pen, opts, warm.as_ref()).map_err(tag)?;
        let cell = summarize(&f, stats, l, pen).map_err(tag)?;
        cells.push(cell);
        warm = Some(f);
    }
    Ok(cells)
}

pub(crate) fn summarize(
    f: &SpringFit,
    stats: &SuffStats,
    l: &StructureMatrix,
    pen: PenaltyPair,
) -> Result<PathCell> {
    let df = selection::degrees_of_freedom(f, stats, l, pen.lambda2)?;
    let nll = nll_parts(&f.omega_xy, &f.omega_yy, &f.r, stats)?;
    let n = stats.n as f64;
    let loglik = -n * nll;
    Ok(PathCell {
        lambda1: pen.lambda1,
        lambda2: pen.lambda2,
        support: selection::ActiveSet::from_matrix(&f.omega_xy).indices,
        omega_xy: f.omega_xy.clone(),
        omega_yy: f.omega_yy.clone(),
        b: f.b.clone(),
        df,
        aic: selection::penalized_criterion(loglik, df, Criterion::Aic, stats.n),
        bic: selection::penalized_criterion(loglik, df, Criterion::Bic, stats.n),
        loglik,
        objective: f.objective_value,
        iterations: f.n_outer_iters,
        converged: f.converged,
        kkt: kkt_residual(f, stats, l, pen),
    })
}
