//! Dense least squares through the singular value decomposition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// Numerical rank of the column-equilibrated system.
    pub rank: usize,
    /// Ratio of extreme singular values of the equilibrated system
    /// (infinite when rank deficient).
    pub condition: f64,
}

/// Minimizes `||a x - b||` with a rank-revealing SVD.
///
/// Columns are scaled to unit norm first, so Vandermonde and Krylov systems
/// whose columns differ by orders of magnitude keep their full rank. Singular
/// values below `max(m, n) * eps * sigma_max` are treated as zero and the
/// solution is the minimum-norm one in the scaled coordinates. Zero columns
/// get a zero coefficient.
pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Result<LeastSquares> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if n == 0 {
        return Ok(LeastSquares {
            solution: Vec::new(),
            rank: 0,
            condition: 1.0,
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::SolverFailure("non-finite entry in least-squares system".into()));
    }

    let scales: Vec<f64> = (0..n)
        .map(|j| {
            let norm = a.column(j).norm();
            if norm > 0.0 {
                1.0 / norm
            } else {
                0.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (j, &s) in scales.iter().enumerate() {
        scaled.column_mut(j).scale_mut(s);
    }

    let svd = scaled.svd(true, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.max();
    let tol = (m.max(n) as f64) * f64::EPSILON * sigma_max;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let sigma_min = sv.min();
    let condition = if rank < n || sigma_min == 0.0 {
        f64::INFINITY
    } else {
        sigma_max / sigma_min
    };

    let rhs = DVector::from_column_slice(b);
    let y = svd
        .solve(&rhs, tol.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::SolverFailure(e.to_string()))?;
    let solution = y.iter().zip(&scales).map(|(v, s)| v * s).collect();

    Ok(LeastSquares {
        solution,
        rank,
        condition,
    })
}
