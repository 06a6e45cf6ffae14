use super::{Provenance, StructureMatrix};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// (p−1)×p first forward difference operator: `D_ii = 1`, `D_i,i+1 = −1`.
pub fn first_difference(p: usize) -> Matrix {
    let mut d = Matrix::zeros(p.saturating_sub(1), p);
    for i in 0..p.saturating_sub(1) {
        d[(i, i)] = 1.0;
        d[(i, i + 1)] = -1.0;
    }
    d
}

/// Combinatorial Laplacian of a chain graph, `(DᵀD)^order`.
pub fn chain_laplacian(p: usize, order: u32) -> Result<StructureMatrix> {
    if p < 2 {
        return Err(Error::InvalidInput(format!(
            "chain Laplacian needs p >= 2, got {p}"
        )));
    }
    if order == 0 {
        return Err(Error::InvalidInput(
            "chain Laplacian order must be >= 1".into(),
        ));
    }
    // DᵀD is tridiagonal; build it directly.
    let mut base = Matrix::zeros(p, p);
    for i in 0..p {
        let deg = if i == 0 || i == p - 1 { 1.0 } else { 2.0 };
        base[(i, i)] = deg;
        if i + 1 < p {
            base[(i, i + 1)] = -1.0;
            base[(i + 1, i)] = -1.0;
        }
    }
    let mut values = base.clone();
    for _ in 1..order {
        values = &values * &base;
    }
    StructureMatrix::new(values, Provenance::Chain { order })
}
