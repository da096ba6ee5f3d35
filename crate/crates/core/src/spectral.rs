//! Simplicial Fourier analysis of edge flows.
//!
//! The eigenvectors of the Hodge Laplacian `L1` split into three families:
//! gradient eigenvectors spanning `im(B1^T)`, curl eigenvectors spanning
//! `im(B2)` and harmonic eigenvectors spanning `ker(L1)`. For a gradient
//! eigenvector the eigenvalue equals its divergence energy `||B1 u||^2`, for a
//! curl eigenvector its circulation energy `||B2^T u||^2`.
//!
//! When a gradient and a curl eigenvalue coincide the solver may return any
//! basis of the shared eigenspace. Because `L1_lower * L1_upper = 0`, each
//! eigenspace of `L1` is invariant under `L1_lower`, so diagonalizing
//! `V^T L1_lower V` inside the eigenspace rotates the basis into pure gradient
//! and pure curl directions.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::complex::{EdgeFlow, HodgeLaplacians, HodgeSystem};
use crate::error::{Error, Result};
use crate::rank::integer_rank;
use crate::vecops;

/// Default harmonic threshold relative to the largest eigenvalue.
pub const DEFAULT_TOL_ZERO: f64 = 1e-8;

/// Relative gap below which consecutive eigenvalues count as one eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyKind {
    Gradient,
    Curl,
    Harmonic,
}

impl FrequencyKind {
    pub const ALL: [FrequencyKind; 3] = [FrequencyKind::Gradient, FrequencyKind::Curl, FrequencyKind::Harmonic];
}

impl fmt::Display for FrequencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyKind::Gradient => "Gradient",
            FrequencyKind::Curl => "Curl",
            FrequencyKind::Harmonic => "Harmonic",
        })
    }
}

impl FromStr for FrequencyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gradient" | "g" => Ok(FrequencyKind::Gradient),
            "curl" | "c" => Ok(FrequencyKind::Curl),
            "harmonic" | "h" => Ok(FrequencyKind::Harmonic),
            other => Err(Error::InvalidArgument(format!("unknown frequency kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Harmonic threshold as a fraction of the largest eigenvalue.
    pub tol_zero: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol_zero: DEFAULT_TOL_ZERO,
        }
    }
}

/// Eigendecomposition of `L1` with every eigenpair labelled.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    labels: Vec<FrequencyKind>,
    tol_zero: f64,
    rank_b1: usize,
    rank_b2: usize,
}

/// Projections of a flow onto the eigenvectors of each Hodge subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeEmbedding {
    pub gradient: Vec<f64>,
    pub curl: Vec<f64>,
    pub harmonic: Vec<f64>,
}

impl HodgeEmbedding {
    pub fn get(&self, kind: FrequencyKind) -> &[f64] {
        match kind {
            FrequencyKind::Gradient => &self.gradient,
            FrequencyKind::Curl => &self.curl,
            FrequencyKind::Harmonic => &self.harmonic,
        }
    }
}

impl Spectrum {
    /// Full eigendecomposition of `L1` with the default harmonic threshold.
    pub fn new(system: &HodgeSystem) -> Result<Self> {
        Self::with_options(system, SpectralOptions::default())
    }

    pub fn with_options(system: &HodgeSystem, opts: SpectralOptions) -> Result<Self> {
        eigendecompose(system, opts)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as matrix columns, aligned with
    /// [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> EdgeFlow {
        EdgeFlow::new(self.eigenvectors.column(i).iter().copied().collect())
    }

    pub fn labels(&self) -> &[FrequencyKind] {
        &self.labels
    }

    /// Absolute harmonic threshold used for classification.
    pub fn tol_zero(&self) -> f64 {
        self.tol_zero
    }

    pub fn rank_b1(&self) -> usize {
        self.rank_b1
    }

    pub fn rank_b2(&self) -> usize {
        self.rank_b2
    }

    /// Indices of eigenpairs with the given label, ascending.
    pub fn indices(&self, kind: FrequencyKind) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == kind)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count(&self, kind: FrequencyKind) -> usize {
        self.labels.iter().filter(|&&l| l == kind).count()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                found: n,
            })
        }
    }

    /// Simplicial Fourier transform `U^T f`.
    pub fn sft(&self, flow: &EdgeFlow) -> Result<Vec<f64>> {
        self.check(flow.len())?;
        let f = DVector::from_column_slice(flow);
        Ok(self.eigenvectors.tr_mul(&f).iter().copied().collect())
    }

    /// Inverse transform `U x`.
    pub fn isft(&self, coeffs: &[f64]) -> Result<EdgeFlow> {
        self.check(coeffs.len())?;
        let x = DVector::from_column_slice(coeffs);
        Ok(EdgeFlow::new((&self.eigenvectors * x).iter().copied().collect()))
    }

    /// Gradient, curl and harmonic embeddings `U_S^T f`.
    pub fn embed(&self, flow: &EdgeFlow) -> Result<HodgeEmbedding> {
        let coeffs = self.sft(flow)?;
        let pick = |kind| self.indices(kind).into_iter().map(|i| coeffs[i]).collect();
        Ok(HodgeEmbedding {
            gradient: pick(FrequencyKind::Gradient),
            curl: pick(FrequencyKind::Curl),
            harmonic: pick(FrequencyKind::Harmonic),
        })
    }

    /// Orthogonal projection `U_S U_S^T f` onto one Hodge subspace.
    pub fn project(&self, flow: &EdgeFlow, kind: FrequencyKind) -> Result<EdgeFlow> {
        let mut coeffs = self.sft(flow)?;
        for (c, &l) in coeffs.iter_mut().zip(&self.labels) {
            if l != kind {
                *c = 0.0;
            }
        }
        self.isft(&coeffs)
    }

    /// Applies a diagonal spectral operator: `U diag(response) U^T f`.
    pub fn apply_response(&self, response: &[f64], flow: &EdgeFlow) -> Result<EdgeFlow> {
        self.check(response.len())?;
        let coeffs: Vec<f64> = self.sft(flow)?.iter().zip(response).map(|(c, r)| c * r).collect();
        self.isft(&coeffs)
    }
}

/// Labels one eigenpair of `L1`.
///
/// Harmonic when `eigenvalue < tol_zero`; otherwise gradient or curl by
/// whichever of `||B1 u||^2` and `||B2^T u||^2` dominates. If both exceed
/// `tol_zero * ||u||` the vector mixes the two subspaces and
/// [`Error::AmbiguousEigenvector`] is returned.
pub fn classify(
    system: &HodgeSystem,
    index: usize,
    eigenvalue: f64,
    vector: &[f64],
    tol_zero: f64,
) -> Result<FrequencyKind> {
    if eigenvalue < tol_zero {
        return Ok(FrequencyKind::Harmonic);
    }
    let b1 = system.incidence.b1.to_f64();
    let b2t = system.incidence.b2.transpose().to_f64();
    let div = b1.mul_vec(vector);
    let circ = b2t.mul_vec(vector);
    let (divergence, curl) = (vecops::dot(&div, &div), vecops::dot(&circ, &circ));
    if divergence.min(curl) > tol_zero * vecops::norm(vector) {
        return Err(Error::AmbiguousEigenvector {
            index,
            divergence,
            curl,
        });
    }
    Ok(if divergence >= curl {
        FrequencyKind::Gradient
    } else {
        FrequencyKind::Curl
    })
}

/// Flips each column so its first non-negligible entry is positive.
fn orient_columns(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let scale = col.amax();
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-9 * scale) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

/// Eigenpairs of the graph Laplacian `L0`, ascending, with the same sign
/// convention as the edge spectrum.
pub fn node_spectrum(lap: &HodgeLaplacians) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = lap.l0.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let eig = nalgebra::SymmetricEigen::try_new(lap.l0.to_dense(), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigensolverFailure("graph Laplacian did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    orient_columns(&mut vectors);
    Ok((values, vectors))
}

/// Full symmetric eigendecomposition of `L1`, with degenerate eigenspaces
/// split into gradient and curl directions and every eigenpair classified.
pub fn eigendecompose(system: &HodgeSystem, opts: SpectralOptions) -> Result<Spectrum> {
    let lap = &system.laplacians;
    let n = lap.dim();
    let rank_b1 = integer_rank(&system.incidence.b1)?;
    let rank_b2 = integer_rank(&system.incidence.b2)?;

    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
            labels: Vec::new(),
            tol_zero: opts.tol_zero,
            rank_b1,
            rank_b2,
        });
    }

    let l1 = lap.l1.to_dense();
    let lower = lap.l1_lower.to_dense();
    let eig = nalgebra::SymmetricEigen::try_new(l1.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigensolverFailure("symmetric QR iteration did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let lambda_max = values[n - 1].max(0.0);
    let tol_zero = if lambda_max > 0.0 {
        opts.tol_zero * lambda_max
    } else {
        opts.tol_zero
    };
    let gap = DEGENERACY_TOL * lambda_max.max(1.0);

    // Rotate each degenerate, non-harmonic eigenspace so that every basis
    // vector is an eigenvector of L1_lower as well.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= gap {
            end += 1;
        }
        if end - start > 1 && values[start] >= tol_zero {
            let block = vectors.columns(start, end - start).into_owned();
            let projected = block.transpose() * &lower * &block;
            let sym = (&projected + projected.transpose()) * 0.5;
            let inner = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
                .ok_or_else(|| Error::EigensolverFailure("degenerate eigenspace rotation".into()))?;
            let rotated = &block * &inner.eigenvectors;
            vectors.columns_mut(start, end - start).copy_from(&rotated);
            for (j, value) in values.iter_mut().enumerate().take(end).skip(start) {
                let u = vectors.column(j);
                *value = u.dot(&(&l1 * u));
            }
        }
        start = end;
    }

    // Rayleigh quotients may reorder values inside a cluster.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);

    orient_columns(&mut vectors);

    let labels = (0..n)
        .map(|i| {
            let u: Vec<f64> = vectors.column(i).iter().copied().collect();
            classify(system, i, values[i], &u, tol_zero)
        })
        .collect::<Result<Vec<_>>>()?;

    let spectrum = Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
        labels,
        tol_zero,
        rank_b1,
        rank_b2,
    };
    let (gradient, curl) = (
        spectrum.count(FrequencyKind::Gradient),
        spectrum.count(FrequencyKind::Curl),
    );
    if gradient != rank_b1 || curl != rank_b2 {
        return Err(Error::ClassificationMismatch {
            gradient,
            curl,
            rank_b1,
            rank_b2,
        });
    }
    Ok(spectrum)
}
