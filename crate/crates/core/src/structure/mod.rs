//! Structure matrices `L` for the quadratic penalty: identity, chain
//! difference Laplacians, genetic-map precisions and Hamming-graph
//! Laplacians over DNA motifs. Also hosts marginal-correlation screening.

mod chain;
mod genetic;
mod hamming;
mod screen;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub use chain::{chain_laplacian, first_difference};
pub use genetic::{genetic_precision, Chromosome, GeneticMap, DEFAULT_RHO};
pub use hamming::{
    hamming_adjacency, hamming_adjacency_by_ell, hamming_adjacency_with_limit, hamming_laplacian,
    hamming_laplacian_with, motif_label, HammingAdjacency, LaplacianDiagonal,
    DEFAULT_MAX_MOTIF_LEN,
};
pub use screen::{restrict, screen_predictors};

/// Above this size the PSD check at construction is skipped.
pub const PSD_CHECK_MAX_DIM: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Identity,
    Chain { order: u32 },
    Genetic,
    Hamming { k: u32, ell: u32 },
    Custom,
}

/// Symmetric positive semidefinite p×p prior matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureMatrix {
    pub values: Matrix,
    pub provenance: Provenance,
}

impl StructureMatrix {
    /// Validates symmetry (1e-12 relative) and, for p ≤ [`PSD_CHECK_MAX_DIM`],
    /// positive semidefiniteness (smallest eigenvalue ≥ −1e-8·‖L‖).
    pub fn new(values: Matrix, provenance: Provenance) -> Result<Self> {
        if !values.is_square() || values.nrows() == 0 {
            return Err(Error::dim(
                "structure matrix",
                "nonempty square matrix",
                format!("{}x{}", values.nrows(), values.ncols()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "structure matrix has non-finite entries".into(),
            ));
        }
        let scale = values.norm().max(1.0);
        if linalg::asymmetry(&values) > 1e-12 * scale {
            return Err(Error::InvalidInput(
                "structure matrix is not symmetric".into(),
            ));
        }
        if values.nrows() <= PSD_CHECK_MAX_DIM {
            let min_eig = linalg::min_eigenvalue(&values);
            if min_eig < -1e-8 * scale {
                return Err(Error::InvalidInput(format!(
                    "structure matrix is not positive semidefinite (smallest eigenvalue {min_eig:e})"
                )));
            }
        }
        Ok(StructureMatrix { values, provenance })
    }

    pub fn custom(values: Matrix) -> Result<Self> {
        Self::new(values, Provenance::Custom)
    }

    pub fn identity(p: usize) -> Result<Self> {
        identity_structure(p)
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }
}

pub fn identity_structure(p: usize) -> Result<StructureMatrix> {
    if p == 0 {
        return Err(Error::InvalidInput(
            "identity structure needs p >= 1".into(),
        ));
    }
    Ok(StructureMatrix {
        values: Matrix::identity(p, p),
        provenance: Provenance::Identity,
    })
}
