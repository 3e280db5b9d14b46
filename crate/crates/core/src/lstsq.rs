//! Dense complex least squares with column equilibration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub coefficients: Vec<Complex64>,
    /// Ratio of extreme singular values of the column-scaled design matrix.
    pub condition: f64,
    /// Largest absolute residual over the rows.
    pub max_residual: f64,
}

/// Solves `min |A x - b|` for a row-major `rows x cols` design matrix.
///
/// Columns are scaled to unit norm before the SVD; the reported condition
/// number refers to the scaled system.
pub fn lstsq(rows: usize, cols: usize, design: &[Complex64], rhs: &[Complex64]) -> Result<LstsqSolution> {
    if design.len() != rows * cols || rhs.len() != rows {
        return Err(Error::Config("least-squares dimensions do not match".to_string()));
    }
    if rows < cols {
        return Err(Error::Config(format!(
            "least-squares system has {rows} rows for {cols} unknowns"
        )));
    }
    let mut a = DMatrix::from_row_slice(rows, cols, design);
    let mut scales = vec![1.0; cols];
    for (j, scale) in scales.iter_mut().enumerate() {
        let norm = a.column(j).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            *scale = norm;
            a.column_mut(j).iter_mut().for_each(|v| *v /= norm);
        }
    }
    let b = DMatrix::from_column_slice(rows, 1, rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = svd
        .solve(&b, smax * f64::EPSILON * rows as f64)
        .map_err(|e| Error::Numeric(format!("least-squares solve failed: {e}")))?;
    let residual = &a * &x - &b;
    let max_residual = residual.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let coefficients = x.iter().zip(&scales).map(|(v, s)| v / *s).collect();
    Ok(LstsqSolution {
        coefficients,
        condition,
        max_residual,
    })
}
