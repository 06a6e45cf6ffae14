//! Independent reference implementations used by the integration tests.
//! They use explicit Kronecker products, plain loops and generic descent
//! instead of the library's structured solvers.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spring_core::linalg::Matrix;
use spring_core::{DataSet, SuffStats};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Centered data from `Y = X B + E` with a random sparse B and correlated
/// noise.
pub fn random_data(seed: u64, n: usize, p: usize, q: usize) -> DataSet {
    let mut g = rng(seed);
    let x = gaussian(&mut g, n, p);
    let b = Matrix::from_fn(p, q, |_, _| {
        if g.random::<f64>() < 0.3 {
            g.random_range(-1.5..1.5)
        } else {
            0.0
        }
    });
    let a = gaussian(&mut g, q, q) * 0.5 + Matrix::identity(q, q);
    let e = gaussian(&mut g, n, q) * a;
    let y = &x * b + e;
    let raw = DataSet::new(x, y).unwrap();
    let st = spring_core::model::centering(&raw);
    raw.apply_standardization(&st).unwrap()
}

pub fn random_psd(rng: &mut ChaCha8Rng, p: usize) -> Matrix {
    let a = gaussian(rng, p, p);
    let m = &a * a.transpose() / p as f64;
    (&m + m.transpose()) * 0.5
}

pub fn random_spd(rng: &mut ChaCha8Rng, q: usize) -> Matrix {
    random_psd(rng, q) + Matrix::identity(q, q) * 0.5
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Column-major vec.
pub fn vec(m: &Matrix) -> Vec<f64> {
    m.as_slice().to_vec()
}

pub fn sym_sqrt(m: &Matrix, power: f64) -> Matrix {
    let e = m.clone().symmetric_eigen();
    let d = Matrix::from_diagonal(&e.eigenvalues.map(|v| v.powf(power)));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

pub fn log_det(m: &Matrix) -> Option<f64> {
    let c = m.clone().cholesky()?;
    Some(2.0 * c.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Penalized criterion in vector form, evaluated from the raw n-row data:
/// `−½ log|Ω_yy| + ‖ỹ + X̃ω‖²/(2n) + (λ₂/2) ωᵀ(Ω_yy⁻¹ ⊗ L)ω + λ₁‖ω‖₁`
/// with `ỹ = vec(Y Ω_yy^{1/2})` and `X̃ = Ω_yy^{-1/2} ⊗ X`.
pub fn vectorized_objective(
    data: &DataSet,
    omega_xy: &Matrix,
    omega_yy: &Matrix,
    l: &Matrix,
    lambda1: f64,
    lambda2: f64,
) -> f64 {
    let n = data.x.nrows() as f64;
    let half = sym_sqrt(omega_yy, 0.5);
    let neg_half = sym_sqrt(omega_yy, -0.5);
    let y_t = vec(&(&data.y * half));
    let x_t = kron(&neg_half, &data.x);
    let w = vec(omega_xy);
    let fitted = &x_t * nalgebra::DVector::from_vec(w.clone());
    let resid: f64 = y_t.iter().zip(fitted.iter()).map(|(a, b)| (a + b).powi(2)).sum();
    let r = omega_yy.clone().try_inverse().unwrap();
    let kl = kron(&r, l);
    let wv = nalgebra::DVector::from_vec(w.clone());
    let structure = (wv.transpose() * kl * &wv)[(0, 0)];
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    -0.5 * log_det(omega_yy).unwrap() + resid / (2.0 * n) + 0.5 * lambda2 * structure + lambda1 * l1
}

fn soft(z: f64, t: f64) -> f64 {
    z.signum() * (z.abs() - t).max(0.0)
}

/// Smooth part of the criterion from sufficient statistics, with the
/// quadratic written through the explicit `R ⊗ H` matrix.
fn smooth(stats: &SuffStats, h: &Matrix, w: &[f64], omega_yy: &Matrix) -> Option<f64> {
    let ld = log_det(omega_yy)?;
    let r = omega_yy.clone().try_inverse()?;
    let k = kron(&r, h);
    let wv = nalgebra::DVector::from_column_slice(w);
    let sxy = vec(&stats.s_xy);
    let lin: f64 = sxy.iter().zip(w).map(|(a, b)| a * b).sum();
    let quad = (wv.transpose() * k * &wv)[(0, 0)];
    Some(0.5 * (-ld + (&stats.s_yy * omega_yy).trace()) + lin + 0.5 * quad)
}

fn smooth_grad(stats: &SuffStats, h: &Matrix, w: &[f64], omega_yy: &Matrix) -> (Vec<f64>, Matrix) {
    let (p, q) = stats.s_xy.shape();
    let r = omega_yy.clone().try_inverse().unwrap();
    let k = kron(&r, h);
    let wv = nalgebra::DVector::from_column_slice(w);
    let gw = k * &wv;
    let g_w: Vec<f64> = vec(&stats.s_xy).iter().zip(gw.iter()).map(|(a, b)| a + b).collect();
    let om = Matrix::from_column_slice(p, q, w);
    let m = om.transpose() * h * &om;
    let g_o = (&stats.s_yy - &r - &r * m * &r) * 0.5;
    (g_w, (&g_o + g_o.transpose()) * 0.5)
}

/// Accelerated proximal gradient on the joint vectorized problem over
/// `(ω, Ω_yy)`, with backtracking that also keeps Ω_yy positive definite.
pub fn proximal_oracle(stats: &SuffStats, l: &Matrix, lambda1: f64, lambda2: f64) -> (Matrix, Matrix, f64) {
    let (p, q) = stats.s_xy.shape();
    let o = stats.s_yy.clone().try_inverse().unwrap();
    proximal_oracle_with(stats, l, lambda1, lambda2, Matrix::zeros(p, q), o, Blocks::Both)
}

#[derive(Clone, Copy, PartialEq)]
pub enum Blocks {
    Both,
    DirectOnly,
    CovarianceOnly,
}

/// As [`proximal_oracle`], starting from `(w0, o0)` and moving only the
/// selected blocks.
pub fn proximal_oracle_with(
    stats: &SuffStats,
    l: &Matrix,
    lambda1: f64,
    lambda2: f64,
    w0: Matrix,
    o0: Matrix,
    blocks: Blocks,
) -> (Matrix, Matrix, f64) {
    let (p, q) = stats.s_xy.shape();
    let h = &stats.s_xx + l * lambda2;
    let full = |w: &[f64], o: &Matrix| smooth(stats, &h, w, o).map(|f| f + lambda1 * w.iter().map(|v| v.abs()).sum::<f64>());
    let mut w = vec(&w0);
    let mut o = o0;
    let (mut yw, mut yo) = (w.clone(), o.clone());
    let mut t: f64 = 1.0;
    let mut step: f64 = 1.0;
    let mut f_cur = full(&w, &o).unwrap();
    let mut restarted = false;
    for _ in 0..200_000 {
        let f_y = smooth(stats, &h, &yw, &yo).unwrap();
        let (mut gw, mut go) = smooth_grad(stats, &h, &yw, &yo);
        if blocks == Blocks::CovarianceOnly {
            gw.iter_mut().for_each(|g| *g = 0.0);
        }
        if blocks == Blocks::DirectOnly {
            go.fill(0.0);
        }
        let (nw, no) = loop {
            let nw: Vec<f64> = if blocks == Blocks::CovarianceOnly {
                yw.clone()
            } else {
                yw.iter().zip(&gw).map(|(v, g)| soft(v - step * g, step * lambda1)).collect()
            };
            let no = &yo - &go * step;
            let no = (&no + no.transpose()) * 0.5;
            if let Some(f_new) = smooth(stats, &h, &nw, &no) {
                let dw: Vec<f64> = nw.iter().zip(&yw).map(|(a, b)| a - b).collect();
                let d_o = &no - &yo;
                let lin: f64 = dw.iter().zip(&gw).map(|(a, b)| a * b).sum::<f64>() + d_o.dot(&go);
                let sq: f64 = dw.iter().map(|v| v * v).sum::<f64>() + d_o.norm_squared();
                if f_new <= f_y + lin + sq / (2.0 * step) + 1e-15 {
                    break (nw, no);
                }
            }
            step *= 0.5;
        };
        let f_new = full(&nw, &no).unwrap();
        // Gradient-mapping norm at the extrapolated point.
        let change: f64 =
            nw.iter().zip(&yw).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max).max((&no - &yo).amax()) / step;
        if change < 1e-12 {
            w = nw;
            o = no;
            f_cur = f_cur.min(f_new);
            break;
        }
        if f_new > f_cur && !restarted {
            // Restart momentum once; a second rise is rounding noise.
            restarted = true;
            t = 1.0;
            yw = w.clone();
            yo = o.clone();
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        yw = nw.iter().zip(&w).map(|(a, b)| a + beta * (a - b)).collect();
        yo = &no + (&no - &o) * beta;
        if log_det(&yo).is_none() {
            yw = nw.clone();
            yo = no.clone();
        }
        t = t_next;
        restarted = false;
        w = nw;
        o = no;
        f_cur = f_new;
        step *= 1.5;
    }
    (Matrix::from_column_slice(p, q, &w), o, f_cur)
}

/// Minimizes the criterion over Ω_yy alone (Ω_xy fixed) by
/// Barzilai-Borwein gradient steps, stopping on the gradient norm so the
/// result is not limited by the resolution of objective values.
pub fn covariance_oracle(stats: &SuffStats, l: &Matrix, lambda2: f64, omega_xy: &Matrix) -> Matrix {
    let h = &stats.s_xx + l * lambda2;
    let w = vec(omega_xy);
    let grad = |o: &Matrix| smooth_grad(stats, &h, &w, o).1;
    let mut o = stats.s_yy.clone().try_inverse().unwrap();
    let mut g = grad(&o);
    let mut alpha = 1e-2;
    for _ in 0..100_000 {
        if g.amax() < 1e-13 {
            break;
        }
        let mut next = &o - &g * alpha;
        while log_det(&next).is_none() {
            alpha *= 0.5;
            next = &o - &g * alpha;
        }
        let g_next = grad(&next);
        let s_k = &next - &o;
        let y_k = &g_next - &g;
        let sy = s_k.dot(&y_k);
        alpha = if sy > 0.0 { s_k.norm_squared() / sy } else { 1e-2 };
        o = next;
        g = g_next;
    }
    o
}

/// Alternating minimization of
/// `log σ + ‖y − Xβ‖²/(2nσ²) + λ₁‖β‖₁/σ²` over β (coordinate-wise) and σ.
pub fn univariate_oracle(x: &Matrix, y: &[f64], lambda1: f64) -> (Vec<f64>, f64) {
    let (n, p) = x.shape();
    let nf = n as f64;
    let mut beta = vec![0.0; p];
    let mut sigma2: f64 = y.iter().map(|v| v * v).sum::<f64>() / nf;
    let col_sq: Vec<f64> = (0..p).map(|j| (0..n).map(|i| x[(i, j)].powi(2)).sum::<f64>() / nf).collect();
    let mut resid: Vec<f64> = y.to_vec();
    for _ in 0..1000 {
        let before = (beta.clone(), sigma2);
        // β given σ: each coordinate minimizes (a/2)β_j² − cβ_j + λ₁|β_j|
        // after multiplying through by σ².
        for _ in 0..100_000 {
            let mut moved = 0.0_f64;
            for j in 0..p {
                if col_sq[j] == 0.0 {
                    continue;
                }
                let c: f64 = (0..n).map(|i| x[(i, j)] * (resid[i] + x[(i, j)] * beta[j])).sum::<f64>() / nf;
                let new = soft(c, lambda1) / col_sq[j];
                let d = new - beta[j];
                if d != 0.0 {
                    for i in 0..n {
                        resid[i] -= x[(i, j)] * d;
                    }
                    beta[j] = new;
                    moved = moved.max(d.abs());
                }
            }
            if moved < 1e-14 {
                break;
            }
        }
        // σ given β: stationarity of the scalar criterion.
        let rss: f64 = resid.iter().map(|v| v * v).sum();
        let l1: f64 = beta.iter().map(|v| v.abs()).sum();
        sigma2 = rss / nf + 2.0 * lambda1 * l1;
        let delta = beta.iter().zip(&before.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if delta < 1e-14 && (sigma2 - before.1).abs() < 1e-14 {
            break;
        }
    }
    (beta, sigma2)
}

/// Degrees of freedom from the full pq×pq Kronecker matrices.
pub fn df_oracle(omega_xy: &Matrix, r: &Matrix, s_xx: &Matrix, l: &Matrix, lambda2: f64) -> f64 {
    let active: Vec<usize> = omega_xy
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, _)| i)
        .collect();
    let a = active.len();
    if a == 0 {
        return 0.0;
    }
    let kl = kron(r, l);
    let kh = kron(r, &(s_xx + l * lambda2));
    let sub = |m: &Matrix| Matrix::from_fn(a, a, |i, j| m[(active[i], active[j])]);
    let prod = sub(&kl) * sub(&kh).try_inverse().unwrap();
    a as f64 - lambda2 * prod.trace()
}

/// Adjacency of all 4^k motifs by direct Hamming distance.
pub fn brute_hamming(k: u32, ell: u32) -> Vec<Vec<bool>> {
    let d = 4usize.pow(k);
    let digits = |mut a: usize| {
        let mut v = vec![0; k as usize];
        for s in v.iter_mut().rev() {
            *s = a % 4;
            a /= 4;
        }
        v
    };
    let all: Vec<Vec<usize>> = (0..d).map(digits).collect();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| all[a].iter().zip(&all[b]).filter(|(x, y)| x != y).count() as u32 <= ell)
                .collect()
        })
        .collect()
}

/// Marker correlation matrix `ρ^{d_ij}` on one chromosome.
pub fn marker_correlation(distances: &[f64], rho: f64) -> Matrix {
    let p = distances.len() + 1;
    let pos: Vec<f64> = std::iter::once(0.0)
        .chain(distances.iter().scan(0.0, |s, d| {
            *s += d;
            Some(*s)
        }))
        .collect();
    Matrix::from_fn(p, p, |i, j| rho.powf((pos[i] - pos[j]).abs()))
}
