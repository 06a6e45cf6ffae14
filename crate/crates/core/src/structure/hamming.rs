//! ℓ-distance graphs over DNA motifs of length k.
//!
//! Motifs are ordered lexicographically with `A < C < G < T` and the leftmost
//! letter most significant, so motif index `i` is its base-4 expansion.
//! `D^{k,ℓ}` has a one wherever two motifs differ in at most ℓ positions.

use super::{Provenance, StructureMatrix};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DEFAULT_MAX_MOTIF_LEN: u32 = 10;

const ALPHABET: [char; 4] = ['A', 'C', 'G', 'T'];

/// Symmetric 0/1 matrix stored as sorted neighbour lists (diagonal included).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HammingAdjacency {
    pub k: u32,
    pub ell: u32,
    rows: Vec<Vec<u32>>,
}

impl HammingAdjacency {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn neighbors(&self, a: usize) -> &[u32] {
        &self.rows[a]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Matrix {
        let m = self.dim();
        let mut out = Matrix::zeros(m, m);
        for (a, row) in self.rows.iter().enumerate() {
            for &b in row {
                out[(a, b as usize)] = 1.0;
            }
        }
        out
    }
}

/// Letters of motif `index` among motifs of length `k`.
pub fn motif_label(index: usize, k: u32) -> String {
    (0..k)
        .rev()
        .map(|pos| ALPHABET[(index >> (2 * pos)) & 3])
        .collect()
}

type Rows = Vec<Vec<u32>>;

fn identity_rows(m: usize) -> Rows {
    (0..m as u32).map(|i| vec![i]).collect()
}

fn ones_rows(m: usize) -> Rows {
    let all: Vec<u32> = (0..m as u32).collect();
    vec![all; m]
}

/// Boolean Kronecker product `a ⊗ b`.
fn kron(a: &Rows, b: &Rows) -> Rows {
    let mb = b.len() as u32;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for arow in a {
        for brow in b {
            let mut row = Vec::with_capacity(arow.len() * brow.len());
            for &ja in arow {
                row.extend(brow.iter().map(|&jb| ja * mb + jb));
            }
            out.push(row);
        }
    }
    out
}

/// Entrywise OR of two equally sized 0/1 matrices.
fn or(x: Rows, y: &Rows) -> Rows {
    x.into_iter()
        .zip(y)
        .map(|(xr, yr)| {
            let mut merged = Vec::with_capacity(xr.len().max(yr.len()));
            let (mut i, mut j) = (0, 0);
            while i < xr.len() || j < yr.len() {
                let next = match (xr.get(i), yr.get(j)) {
                    (Some(&a), Some(&b)) if a == b => {
                        i += 1;
                        j += 1;
                        a
                    }
                    (Some(&a), Some(&b)) if a < b => {
                        i += 1;
                        a
                    }
                    (_, Some(&b)) => {
                        j += 1;
                        b
                    }
                    (Some(&a), None) => {
                        i += 1;
                        a
                    }
                    (None, None) => unreachable!(),
                };
                merged.push(next);
            }
            merged
        })
        .collect()
}

fn validate(k: u32, ell: u32, max_k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("motif length k must be >= 1".into()));
    }
    if ell > k {
        return Err(Error::InvalidInput(format!(
            "distance threshold ell={ell} exceeds k={k}"
        )));
    }
    if k > max_k {
        return Err(Error::InvalidInput(format!(
            "motif length k={k} exceeds the configured limit {max_k}"
        )));
    }
    Ok(())
}

fn base_case(ell: u32) -> Rows {
    if ell == 0 {
        identity_rows(4)
    } else {
        ones_rows(4)
    }
}

/// `D^{k,ℓ}` by recursion on motif length:
/// `D^{k+1,ℓ} = (D^{1,0} ⊗ D^{k,ℓ}) ∨ (D^{1,1} ⊗ D^{k,ℓ−1})`.
pub fn hamming_adjacency(k: u32, ell: u32) -> Result<HammingAdjacency> {
    hamming_adjacency_with_limit(k, ell, DEFAULT_MAX_MOTIF_LEN)
}

pub fn hamming_adjacency_with_limit(k: u32, ell: u32, max_k: u32) -> Result<HammingAdjacency> {
    validate(k, ell, max_k)?;
    let i4 = identity_rows(4);
    let j4 = ones_rows(4);
    // level[t] holds D^{j, lo + t} for the current length j.
    let lo_at = |j: u32| ell.saturating_sub(k - j);
    let mut lo = lo_at(1);
    let mut level: Vec<Rows> = (lo..=ell).map(|l| base_case(l.min(1))).collect();
    for j in 1..k {
        let next_lo = lo_at(j + 1);
        let mut next = Vec::with_capacity((ell - next_lo + 1) as usize);
        for l in next_lo..=ell {
            let get = |l: u32| -> &Rows { &level[(l - lo) as usize] };
            let mut d = kron(&i4, get(l));
            if l >= 1 {
                d = or(d, &kron(&j4, get(l - 1)));
            }
            next.push(d);
        }
        level = next;
        lo = next_lo;
    }
    Ok(HammingAdjacency {
        k,
        ell,
        rows: level.pop().expect("non-empty level"),
    })
}

/// `D^{k,ℓ}` built by sweeping ℓ upward from `D^{k,0} = I`, appending letters
/// on the right: `D^{k,ℓ+1} = (D^{k−1,ℓ+1} ⊗ D^{1,0}) ∨ (D^{k−1,ℓ} ⊗ D^{1,1})`.
/// Independent construction path used to cross-check [`hamming_adjacency`].
pub fn hamming_adjacency_by_ell(k: u32, ell: u32) -> Result<HammingAdjacency> {
    validate(k, ell, DEFAULT_MAX_MOTIF_LEN)?;
    let i4 = identity_rows(4);
    let j4 = ones_rows(4);
    // table[l] = D^{j,l} for l = 0..=min(j, ell) at the current length j.
    let mut table: Vec<Rows> = (0..=ell.min(1)).map(base_case).collect();
    for j in 2..=k {
        let size = 4usize.pow(j);
        let mut next: Vec<Rows> = vec![identity_rows(size)];
        for l in 0..ell.min(j) {
            let prev_upper = &table[(l + 1).min(j - 1) as usize];
            let prev_lower = &table[l as usize];
            let d = or(kron(prev_upper, &i4), &kron(prev_lower, &j4));
            next.push(d);
        }
        table = next;
    }
    Ok(HammingAdjacency {
        k,
        ell,
        rows: table.pop().expect("non-empty table"),
    })
}

/// Diagonal convention for [`hamming_laplacian_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LaplacianDiagonal {
    /// `Σ_c d_ac` including `c = a`; row sums are +1.
    #[default]
    IncludeSelf,
    /// Ordinary graph degree; row sums are 0.
    DegreeOnly,
}

pub fn hamming_laplacian(k: u32, ell: u32) -> Result<StructureMatrix> {
    hamming_laplacian_with(k, ell, LaplacianDiagonal::IncludeSelf)
}

pub fn hamming_laplacian_with(
    k: u32,
    ell: u32,
    diag: LaplacianDiagonal,
) -> Result<StructureMatrix> {
    let adj = hamming_adjacency(k, ell)?;
    let m = adj.dim();
    let mut values = Matrix::zeros(m, m);
    for a in 0..m {
        let row = adj.neighbors(a);
        for &b in row {
            if b as usize != a {
                values[(a, b as usize)] = -1.0;
            }
        }
        values[(a, a)] = match diag {
            LaplacianDiagonal::IncludeSelf => row.len() as f64,
            LaplacianDiagonal::DegreeOnly => (row.len() - 1) as f64,
        };
    }
    StructureMatrix::new(values, Provenance::Hamming { k, ell })
}
