//! Synthetic data following the multivariate regression model
//! `Y = X B + E` with `B = −Ω_xy R`, Gaussian predictors and Gaussian
//! noise with covariance `R`.
//!
//! Randomness comes from ChaCha20 seeded with the user seed; every matrix is
//! drawn from its own stream so adding a draw never shifts earlier ones.
//! Standard normals use the ziggurat sampler of `rand_distr` (version pinned
//! through `Cargo.lock`).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::DataSet;

const STREAM_COEFFICIENTS: u64 = 1;
const STREAM_X_TRAIN: u64 = 2;
const STREAM_NOISE_TRAIN: u64 = 3;
const STREAM_X_TEST: u64 = 4;
const STREAM_NOISE_TEST: u64 = 5;
const STREAM_SWAP: u64 = 6;

/// Independent generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Uniformly random cells of Ω_xy.
    Uniform,
    /// Runs of consecutive predictors within a response column.
    ContiguousBlocks { block_len: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoefficientGenerator {
    /// `support_size` entries of Ω_xy drawn from {−1, 1}.
    RandomSigns {
        support_size: usize,
        placement: Placement,
    },
    /// Two smooth bumps (q = 1 only).
    Bump,
    /// Bump with entries permuted by `swap_seed`.
    SwappedBump { swap_seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub p: usize,
    pub q: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub coefficients: CoefficientGenerator,
    /// Toeplitz parameter of R when q > 1.
    pub tau: f64,
    /// Noise variance when q = 1.
    pub sigma2: f64,
    pub seed: u64,
}

impl SimSpec {
    /// Two-bump univariate scenario: p = 100, n = 120, σ² = 5.
    pub fn bump_univariate(seed: u64) -> Self {
        SimSpec {
            p: 100,
            q: 1,
            n_train: 120,
            n_test: 1000,
            coefficients: CoefficientGenerator::Bump,
            tau: 0.0,
            sigma2: 5.0,
            seed,
        }
    }

    /// Correlated-outcomes scenario: p = 40, q = 5, 25 random ±1 direct effects.
    pub fn toeplitz_multivariate(tau: f64, seed: u64) -> Self {
        SimSpec {
            p: 40,
            q: 5,
            n_train: 50,
            n_test: 1000,
            coefficients: CoefficientGenerator::RandomSigns {
                support_size: 25,
                placement: Placement::Uniform,
            },
            tau,
            sigma2: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.q == 0 || self.n_train == 0 || self.n_test == 0 {
            return Err(Error::InvalidInput(
                "simulation dimensions must be positive".into(),
            ));
        }
        if !(self.tau.abs() < 1.0) {
            return Err(Error::InvalidInput(format!(
                "|tau| must be < 1, got {}",
                self.tau
            )));
        }
        match &self.coefficients {
            CoefficientGenerator::RandomSigns {
                support_size,
                placement,
            } => {
                if *support_size > self.p * self.q {
                    return Err(Error::InvalidInput(format!(
                        "support size {support_size} exceeds p*q = {}",
                        self.p * self.q
                    )));
                }
                if let Placement::ContiguousBlocks { block_len } = placement {
                    if *block_len == 0 || *block_len > self.p {
                        return Err(Error::InvalidInput(format!(
                            "block length must be in 1..={}",
                            self.p
                        )));
                    }
                }
            }
            CoefficientGenerator::Bump | CoefficientGenerator::SwappedBump { .. } => {
                if self.q != 1 {
                    return Err(Error::InvalidInput(
                        "bump coefficients require q = 1".into(),
                    ));
                }
            }
        }
        if self.q == 1 && !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub omega_xy_true: Matrix,
    pub r_true: Matrix,
    /// `−Ω_xy R`.
    pub b_true: Matrix,
}

/// `R_ij = τ^{|i−j|}`.
pub fn toeplitz_cov(q: usize, tau: f64) -> Result<Matrix> {
    if !(tau.abs() < 1.0) {
        return Err(Error::InvalidInput(format!("|tau| must be < 1, got {tau}")));
    }
    let r = Matrix::from_fn(q, q, |i, j| tau.powi(i.abs_diff(j) as i32));
    linalg::cholesky(&r, "Toeplitz covariance")?;
    Ok(r)
}

/// Two smooth bumps: `−((30−j)²−100)/200` on j = 21..39 and
/// `((70−j)²−100)/200` on j = 61..80 (1-based), zero elsewhere. For p ≠ 100
/// the same profile is evaluated at the rescaled position `j·100/p`.
pub fn bump_coefficients(p: usize) -> Vec<f64> {
    (1..=p)
        .map(|j| {
            let t = if p == 100 {
                j as f64
            } else {
                j as f64 * 100.0 / p as f64
            };
            if (21.0..=39.0).contains(&t) {
                -((30.0 - t).powi(2) - 100.0) / 200.0
            } else if (61.0..=80.0).contains(&t) {
                ((70.0 - t).powi(2) - 100.0) / 200.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Seeded uniform permutation of the entries.
pub fn swap_coefficients(omega: &[f64], seed: u64) -> Vec<f64> {
    let mut out = omega.to_vec();
    out.shuffle(&mut stream_rng(seed, STREAM_SWAP));
    out
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Matrix {
    // Row-major draw order.
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = StandardNormal.sample(rng);
        }
    }
    m
}

fn direct_effects(spec: &SimSpec) -> Matrix {
    let (p, q) = (spec.p, spec.q);
    match &spec.coefficients {
        CoefficientGenerator::Bump => Matrix::from_vec(p, 1, bump_coefficients(p)),
        CoefficientGenerator::SwappedBump { swap_seed } => {
            Matrix::from_vec(p, 1, swap_coefficients(&bump_coefficients(p), *swap_seed))
        }
        CoefficientGenerator::RandomSigns {
            support_size,
            placement,
        } => {
            let mut rng = stream_rng(spec.seed, STREAM_COEFFICIENTS);
            let mut omega = Matrix::zeros(p, q);
            let cells: Vec<(usize, usize)> = match placement {
                Placement::Uniform => {
                    let mut all: Vec<(usize, usize)> =
                        (0..q).flat_map(|k| (0..p).map(move |j| (j, k))).collect();
                    all.shuffle(&mut rng);
                    all.truncate(*support_size);
                    all
                }
                Placement::ContiguousBlocks { block_len } => {
                    contiguous_cells(p, q, *support_size, *block_len, &mut rng)
                }
            };
            for (j, k) in cells {
                omega[(j, k)] = if rand::Rng::random::<bool>(&mut rng) {
                    1.0
                } else {
                    -1.0
                };
            }
            omega
        }
    }
}

/// Picks blocks of consecutive rows in random columns until `count` cells are
/// filled; overlapping blocks merge.
fn contiguous_cells(
    p: usize,
    q: usize,
    count: usize,
    block_len: usize,
    rng: &mut ChaCha20Rng,
) -> Vec<(usize, usize)> {
    use rand::Rng;
    let mut taken = vec![false; p * q];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.random_range(0..q);
        let start = rng.random_range(0..=p - block_len);
        for j in start..start + block_len {
            if out.len() == count {
                break;
            }
            if !taken[k * p + j] {
                taken[k * p + j] = true;
                out.push((j, k));
            }
        }
    }
    out
}

fn draw_responses(x: &Matrix, b: &Matrix, chol_r: &Matrix, rng: &mut ChaCha20Rng) -> Matrix {
    let z = gaussian_matrix(x.nrows(), b.ncols(), rng);
    x * b + z * chol_r.transpose()
}

/// Draws train and test sets and the ground truth. Outputs are raw (not centered).
pub fn gen_dataset(spec: &SimSpec) -> Result<(DataSet, DataSet, GroundTruth)> {
    spec.validate()?;
    let omega_xy_true = direct_effects(spec);
    let r_true = if spec.q == 1 {
        Matrix::from_element(1, 1, spec.sigma2)
    } else {
        toeplitz_cov(spec.q, spec.tau)?
    };
    let b_true = -(&omega_xy_true * &r_true);
    let c = linalg::cholesky(&r_true, "R")?.l();
    let x_train = gaussian_matrix(
        spec.n_train,
        spec.p,
        &mut stream_rng(spec.seed, STREAM_X_TRAIN),
    );
    let y_train = draw_responses(
        &x_train,
        &b_true,
        &c,
        &mut stream_rng(spec.seed, STREAM_NOISE_TRAIN),
    );
    let x_test = gaussian_matrix(
        spec.n_test,
        spec.p,
        &mut stream_rng(spec.seed, STREAM_X_TEST),
    );
    let y_test = draw_responses(
        &x_test,
        &b_true,
        &c,
        &mut stream_rng(spec.seed, STREAM_NOISE_TEST),
    );
    Ok((
        DataSet::new(x_train, y_train)?,
        DataSet::new(x_test, y_test)?,
        GroundTruth {
            omega_xy_true,
            r_true,
            b_true,
        },
    ))
}

/// `(1/m) Σ_i ‖x_iᵀB̂ − y_i‖²` over the test rows.
pub fn prediction_error(b_hat: &Matrix, test: &DataSet) -> Result<f64> {
    if b_hat.nrows() != test.p() || b_hat.ncols() != test.q() {
        return Err(Error::dim(
            "prediction_error",
            format!("{}x{}", test.p(), test.q()),
            format!("{}x{}", b_hat.nrows(), b_hat.ncols()),
        ));
    }
    Ok((&test.x * b_hat - &test.y).norm_squared() / test.n() as f64)
}

pub fn coefficient_mse(b_hat: &Matrix, b_true: &Matrix) -> Result<f64> {
    if b_hat.shape() != b_true.shape() {
        return Err(Error::dim(
            "coefficient_mse",
            format!("{:?}", b_true.shape()),
            format!("{:?}", b_hat.shape()),
        ));
    }
    Ok((b_hat - b_true).norm_squared() / b_hat.len() as f64)
}
