//! Tridiagonal precision of an inhomogeneous AR(1) marker covariance.
//!
//! Markers at genetic distance `d` have correlation `ρ^d`, so along a
//! chromosome the covariance is `ρ^{d_ij}` with additive distances and its
//! inverse is tridiagonal. Markers on different chromosomes are independent.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::{Provenance, StructureMatrix};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DEFAULT_RHO: f64 = 0.98;

#[derive(Clone, Debug, PartialEq)]
pub struct Chromosome {
    pub name: String,
    /// Global marker indices (column of X) in map order.
    pub markers: Vec<usize>,
    /// `distances[i]` separates `markers[i]` and `markers[i + 1]`.
    pub distances: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneticMap {
    pub marker_names: Vec<String>,
    pub chromosomes: Vec<Chromosome>,
    pub rho: f64,
}

#[derive(Deserialize)]
struct MapRow {
    marker: String,
    chromosome: String,
    #[serde(rename = "position_cM")]
    position_cm: f64,
}

impl GeneticMap {
    /// Single chromosome whose consecutive markers are `distances` apart.
    pub fn single_chromosome(distances: Vec<f64>, rho: f64) -> Self {
        let p = distances.len() + 1;
        GeneticMap {
            marker_names: (0..p).map(|i| format!("M{}", i + 1)).collect(),
            chromosomes: vec![Chromosome {
                name: "1".into(),
                markers: (0..p).collect(),
                distances,
            }],
            rho,
        }
    }

    pub fn num_markers(&self) -> usize {
        self.marker_names.len()
    }

    /// Reads `marker,chromosome,position_cM` rows. Marker order in the file
    /// defines the column order; within a chromosome positions must increase.
    pub fn from_csv<R: Read>(reader: R, rho: f64) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut marker_names = Vec::new();
        let mut chromosomes: Vec<Chromosome> = Vec::new();
        let mut last_pos: Vec<f64> = Vec::new();
        for (idx, row) in rdr.deserialize::<MapRow>().enumerate() {
            let row =
                row.map_err(|e| Error::InvalidInput(format!("genetic map row {}: {e}", idx + 1)))?;
            if !row.position_cm.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "genetic map row {}: non-finite position",
                    idx + 1
                )));
            }
            match chromosomes.iter().position(|c| c.name == row.chromosome) {
                Some(c) => {
                    let d = row.position_cm - last_pos[c];
                    if d <= 0.0 {
                        return Err(Error::InvalidInput(format!(
                            "marker {} is not after its predecessor on chromosome {} (distance {d})",
                            row.marker, row.chromosome
                        )));
                    }
                    chromosomes[c].markers.push(idx);
                    chromosomes[c].distances.push(d);
                    last_pos[c] = row.position_cm;
                }
                None => {
                    chromosomes.push(Chromosome {
                        name: row.chromosome.clone(),
                        markers: vec![idx],
                        distances: Vec::new(),
                    });
                    last_pos.push(row.position_cm);
                }
            }
            marker_names.push(row.marker);
        }
        if marker_names.is_empty() {
            return Err(Error::InvalidInput("genetic map has no markers".into()));
        }
        Ok(GeneticMap {
            marker_names,
            chromosomes,
            rho,
        })
    }

    pub fn from_path(path: &Path, rho: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_csv(file, rho)
    }
}

/// Builds `L` with
/// `w_ii = (1 − ρ^{2d₋ + 2d₊}) / ((1 − ρ^{2d₋})(1 − ρ^{2d₊}))` and
/// `w_i,i+1 = −ρ^{d₊} / (1 − ρ^{2d₊})`; a missing neighbour is an infinite
/// distance, i.e. `ρ^{2d} = 0`.
pub fn genetic_precision(map: &GeneticMap) -> Result<StructureMatrix> {
    let rho = map.rho;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rho must lie in (0, 1), got {rho}"
        )));
    }
    let p = map.num_markers();
    let mut values = Matrix::zeros(p, p);
    let mut seen = vec![false; p];
    for chrom in &map.chromosomes {
        if chrom.distances.len() + 1 != chrom.markers.len() {
            return Err(Error::InvalidInput(format!(
                "chromosome {} has {} markers but {} distances",
                chrom.name,
                chrom.markers.len(),
                chrom.distances.len()
            )));
        }
        if let Some(d) = chrom
            .distances
            .iter()
            .find(|d| !(**d > 0.0) || !d.is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "nonpositive distance {d} on chromosome {}",
                chrom.name
            )));
        }
        for &m in &chrom.markers {
            if m >= p || seen[m] {
                return Err(Error::InvalidInput(format!(
                    "marker index {m} invalid or repeated"
                )));
            }
            seen[m] = true;
        }
        // ρ^{2d} towards the previous / next marker, 0 at chromosome ends.
        let t = |i: usize| rho.powf(2.0 * chrom.distances[i]);
        let len = chrom.markers.len();
        for i in 0..len {
            let t_prev = if i == 0 { 0.0 } else { t(i - 1) };
            let t_next = if i + 1 == len { 0.0 } else { t(i) };
            let gi = chrom.markers[i];
            values[(gi, gi)] = (1.0 - t_prev * t_next) / ((1.0 - t_prev) * (1.0 - t_next));
            if i + 1 < len {
                let gj = chrom.markers[i + 1];
                let w = -rho.powf(chrom.distances[i]) / (1.0 - t(i));
                values[(gi, gj)] = w;
                values[(gj, gi)] = w;
            }
        }
    }
    if let Some(m) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidInput(format!(
            "marker {m} belongs to no chromosome"
        )));
    }
    StructureMatrix::new(values, Provenance::Genetic)
}
