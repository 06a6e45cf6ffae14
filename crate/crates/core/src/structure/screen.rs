//! Marginal-correlation screening of predictors.

use super::StructureMatrix;
use crate::error::{Error, Result};
use crate::model::DataSet;

fn column_stats(col: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let mean = col.clone().sum::<f64>() / n;
    let ss = col.map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss.sqrt())
}

/// Keeps the `m` predictors with the largest `max_k |corr(X_j, Y_k)|`, ranked
/// by decreasing score with ties broken by index. Zero-variance predictors
/// score 0.
pub fn screen_predictors(data: &DataSet, m: usize) -> Result<Vec<usize>> {
    let p = data.p();
    if m == 0 || m > p {
        return Err(Error::InvalidInput(format!(
            "screening keep count must be in 1..={p}, got {m}"
        )));
    }
    let n = data.n() as f64;
    let y_stats: Vec<(f64, f64)> = data
        .y
        .column_iter()
        .map(|c| column_stats(c.iter().copied(), n))
        .collect();
    let scores: Vec<f64> = data
        .x
        .column_iter()
        .enumerate()
        .map(|(j, xc)| {
            let (xm, xs) = column_stats(xc.iter().copied(), n);
            if xs == 0.0 {
                log::warn!("predictor {j} has zero variance; its correlation is taken as 0");
                return 0.0;
            }
            data.y
                .column_iter()
                .zip(&y_stats)
                .map(|(yc, &(ym, ys))| {
                    if ys == 0.0 {
                        return 0.0;
                    }
                    let cov: f64 = xc
                        .iter()
                        .zip(yc.iter())
                        .map(|(a, b)| (a - xm) * (b - ym))
                        .sum();
                    (cov / (xs * ys)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(m);
    Ok(order)
}

/// Restricts X columns and L rows/columns to `keep`, in that order.
pub fn restrict(
    data: &DataSet,
    l: &StructureMatrix,
    keep: &[usize],
) -> Result<(DataSet, StructureMatrix)> {
    if l.dim() != data.p() {
        return Err(Error::dim("structure matrix", data.p(), l.dim()));
    }
    if let Some(bad) = keep.iter().find(|&&j| j >= data.p()) {
        return Err(Error::InvalidInput(format!(
            "predictor index {bad} out of range"
        )));
    }
    let x = data.x.select_columns(keep.iter());
    let values = l
        .values
        .select_rows(keep.iter())
        .select_columns(keep.iter());
    let mut sub = data.clone();
    sub.x = x;
    Ok((
        sub,
        StructureMatrix {
            values,
            provenance: l.provenance.clone(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn exact_copy_of_response_ranks_first() {
        let x = Matrix::from_row_slice(
            4,
            3,
            &[1.0, 0.3, 2.0, 0.0, -1.0, 1.0, 2.0, 0.2, -3.0, 1.0, 0.5, 0.0],
        );
        let y = Matrix::from_column_slice(4, 1, &[2.0, 1.0, -3.0, 0.0]);
        let d = DataSet::new(x, y).unwrap();
        assert_eq!(screen_predictors(&d, 1).unwrap(), vec![2]);
        let all = screen_predictors(&d, 3).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn constant_predictor_scores_zero() {
        let x = Matrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = Matrix::from_column_slice(3, 1, &[0.0, 1.0, 2.5]);
        let d = DataSet::new(x, y).unwrap();
        assert_eq!(screen_predictors(&d, 2).unwrap(), vec![1, 0]);
        assert!(screen_predictors(&d, 0).is_err());
        assert!(screen_predictors(&d, 3).is_err());
    }

    #[test]
    fn restrict_selects_rows_and_columns() {
        let x = Matrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        let y = Matrix::zeros(3, 1);
        let d = DataSet::new(x, y).unwrap();
        let l = crate::structure::chain_laplacian(3, 1).unwrap();
        let (sub, lsub) = restrict(&d, &l, &[2, 0]).unwrap();
        assert_eq!(sub.x.column(0), d.x.column(2));
        assert_eq!(
            lsub.values,
            Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0])
        );
    }
}
