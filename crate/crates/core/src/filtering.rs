//! Polynomial filters of the Hodge Laplacian applied to edge flows.
//!
//! An FIR filter `H = sum_l h_l L1^l` and a subspace-varying filter
//! `H = h0 I + sum_l alpha_l L1_lower^l + sum_l beta_l L1_upper^l` are applied
//! with repeated sparse shifts, never forming matrix powers. Each shift touches
//! only an edge's lower and upper neighbors, so one application costs
//! `O(L * nnz(L1))`.

use serde::{Deserialize, Serialize};

use crate::complex::{EdgeFlow, HodgeLaplacians};
use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, OpCount, OpCounter};
use crate::spectral::{FrequencyKind, Spectrum};
use crate::vecops;

/// Coefficients `h_0 .. h_{L-1}` of `sum_l h_l L1^l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirFilter {
    #[serde(rename = "h")]
    coeffs: Vec<f64>,
}

impl FirFilter {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidFilter("FIR filter needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFilter("non-finite coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn identity() -> Self {
        Self { coeffs: vec![1.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Filter length `L`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `sum_l h_l x^l`.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }
}

/// Subspace-varying filter: `h0` on the identity, `alpha` on powers
/// `1..=L1` of the lower Laplacian and `beta` on powers `1..=L2` of the upper
/// Laplacian. Empty `alpha` or `beta` drop the corresponding sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvFilter {
    h0: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl SvFilter {
    pub fn new(h0: f64, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if !h0.is_finite() || alpha.iter().chain(&beta).any(|c| !c.is_finite()) {
            return Err(Error::InvalidFilter("non-finite coefficient".into()));
        }
        Ok(Self { h0, alpha, beta })
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Total length `1 + L1 + L2`.
    pub fn total_len(&self) -> usize {
        1 + self.alpha.len() + self.beta.len()
    }

    /// Response at an eigenvalue of the given kind.
    pub fn eval(&self, x: f64, kind: FrequencyKind) -> f64 {
        match kind {
            FrequencyKind::Harmonic => self.h0,
            FrequencyKind::Gradient => self.h0 + x * horner(&self.alpha, x),
            FrequencyKind::Curl => self.h0 + x * horner(&self.beta, x),
        }
    }
}

/// Either filter family.
#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    Fir(FirFilter),
    Sv(SvFilter),
}

impl Filter {
    pub fn apply(&self, lap: &HodgeLaplacians, flow: &EdgeFlow) -> Result<EdgeFlow> {
        match self {
            Filter::Fir(f) => apply_fir(f, lap, flow),
            Filter::Sv(f) => apply_sv(f, lap, flow),
        }
    }

    pub fn response(&self, spectrum: &Spectrum) -> FrequencyResponse {
        match self {
            Filter::Fir(f) => response_fir(f, spectrum),
            Filter::Sv(f) => response_sv(f, spectrum),
        }
    }
}

impl From<FirFilter> for Filter {
    fn from(f: FirFilter) -> Self {
        Filter::Fir(f)
    }
}

impl From<SvFilter> for Filter {
    fn from(f: SvFilter) -> Self {
        Filter::Sv(f)
    }
}

/// Filter response at each eigenvalue of a [`Spectrum`], in spectrum order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub values: Vec<f64>,
}

/// `c_0 + c_1 x + ... + c_n x^n`.
fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// One lower and one upper shift: `(L1_lower f, L1_upper f)`.
pub fn shift(lap: &HodgeLaplacians, flow: &EdgeFlow) -> Result<(EdgeFlow, EdgeFlow)> {
    flow.check_len(lap.dim())?;
    Ok((
        EdgeFlow::new(lap.l1_lower.mul_vec(flow)),
        EdgeFlow::new(lap.l1_upper.mul_vec(flow)),
    ))
}

/// Horner accumulation of `sum_{l=0}^{n-1} c_l S^l f`, counting flops.
fn shift_polynomial<C: OpCounter>(shift: &CsrMatrix<f64>, coeffs: &[f64], flow: &[f64], counter: &mut C) -> Vec<f64> {
    let n = flow.len();
    let Some((&last, rest)) = coeffs.split_last() else {
        return vec![0.0; n];
    };
    let mut acc: Vec<f64> = flow.iter().map(|v| last * v).collect();
    counter.record(n as u64);
    let mut shifted = vec![0.0; n];
    for &c in rest.iter().rev() {
        shift.mul_vec_counted(&acc, &mut shifted, counter);
        std::mem::swap(&mut acc, &mut shifted);
        vecops::axpy(c, flow, &mut acc);
        counter.record(2 * n as u64);
    }
    acc
}

/// `sum_l h_l L1^l f` by repeated shifts with `L1`.
pub fn apply_fir(filter: &FirFilter, lap: &HodgeLaplacians, flow: &EdgeFlow) -> Result<EdgeFlow> {
    apply_fir_counted(filter, lap, flow, &mut ())
}

/// [`apply_fir`] that also reports its floating point operation count.
pub fn apply_fir_instrumented(filter: &FirFilter, lap: &HodgeLaplacians, flow: &EdgeFlow) -> Result<(EdgeFlow, OpCount)> {
    let mut count = OpCount::default();
    let out = apply_fir_counted(filter, lap, flow, &mut count)?;
    Ok((out, count))
}

fn apply_fir_counted<C: OpCounter>(
    filter: &FirFilter,
    lap: &HodgeLaplacians,
    flow: &EdgeFlow,
    counter: &mut C,
) -> Result<EdgeFlow> {
    flow.check_len(lap.dim())?;
    Ok(EdgeFlow::new(shift_polynomial(&lap.l1, &filter.coeffs, flow, counter)))
}

/// `h0 f + sum alpha_l L1_lower^l f + sum beta_l L1_upper^l f` by two
/// independent shift recursions.
pub fn apply_sv(filter: &SvFilter, lap: &HodgeLaplacians, flow: &EdgeFlow) -> Result<EdgeFlow> {
    apply_sv_counted(filter, lap, flow, &mut ())
}

/// [`apply_sv`] that also reports its floating point operation count.
pub fn apply_sv_instrumented(filter: &SvFilter, lap: &HodgeLaplacians, flow: &EdgeFlow) -> Result<(EdgeFlow, OpCount)> {
    let mut count = OpCount::default();
    let out = apply_sv_counted(filter, lap, flow, &mut count)?;
    Ok((out, count))
}

fn apply_sv_counted<C: OpCounter>(
    filter: &SvFilter,
    lap: &HodgeLaplacians,
    flow: &EdgeFlow,
    counter: &mut C,
) -> Result<EdgeFlow> {
    flow.check_len(lap.dim())?;
    let n = flow.len();
    let mut out: Vec<f64> = flow.iter().map(|v| filter.h0 * v).collect();
    counter.record(n as u64);
    for (shift, coeffs) in [(&lap.l1_lower, &filter.alpha), (&lap.l1_upper, &filter.beta)] {
        if coeffs.is_empty() {
            continue;
        }
        // sum_{l=1}^{K} c_l S^l f = S * (sum_{l=0}^{K-1} c_{l+1} S^l f)
        let inner = shift_polynomial(shift, coeffs, flow, counter);
        let mut term = vec![0.0; n];
        shift.mul_vec_counted(&inner, &mut term, counter);
        vecops::axpy(1.0, &term, &mut out);
        counter.record(n as u64);
    }
    Ok(EdgeFlow::new(out))
}

pub fn response_fir(filter: &FirFilter, spectrum: &Spectrum) -> FrequencyResponse {
    FrequencyResponse {
        values: spectrum.eigenvalues().iter().map(|&x| filter.eval(x)).collect(),
    }
}

/// Response branching on each eigenvalue's label.
pub fn response_sv(filter: &SvFilter, spectrum: &Spectrum) -> FrequencyResponse {
    FrequencyResponse {
        values: spectrum
            .eigenvalues()
            .iter()
            .zip(spectrum.labels())
            .map(|(&x, &kind)| filter.eval(x, kind))
            .collect(),
    }
}

/// Which Laplacian a regularized inverse smooths with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianChoice {
    /// `L1`, penalizing gradient and curl energy.
    Full,
    /// `L1_lower`, penalizing divergence only.
    Lower,
}

/// Low-pass baseline `(I + mu L)^{-1} f`, solved with a Cholesky
/// factorization.
pub fn apply_regularized_inverse(
    lap: &HodgeLaplacians,
    choice: LaplacianChoice,
    mu: f64,
    flow: &EdgeFlow,
) -> Result<EdgeFlow> {
    flow.check_len(lap.dim())?;
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!("regularization weight must be >= 0, got {mu}")));
    }
    let l = match choice {
        LaplacianChoice::Full => &lap.l1,
        LaplacianChoice::Lower => &lap.l1_lower,
    };
    let n = lap.dim();
    let system = nalgebra::DMatrix::identity(n, n) + l.to_dense() * mu;
    let chol = system
        .cholesky()
        .ok_or_else(|| Error::SolverFailure("regularized system is not positive definite".into()))?;
    let x = chol.solve(&nalgebra::DVector::from_column_slice(flow));
    Ok(EdgeFlow::new(x.iter().copied().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{HodgeSystem, SimplicialComplex};

    fn triangle_with_tail() -> HodgeSystem {
        let c = SimplicialComplex::from_indices(4, &[[0, 1], [1, 2], [0, 2], [2, 3]], &[[0, 1, 2]]).unwrap();
        HodgeSystem::new(c)
    }

    #[test]
    fn fir_requires_coefficients() {
        assert!(FirFilter::new(vec![]).is_err());
        assert!(FirFilter::new(vec![f64::NAN]).is_err());
        assert!(SvFilter::new(1.0, vec![f64::INFINITY], vec![]).is_err());
    }

    #[test]
    fn fir_response_is_polynomial() {
        let f = FirFilter::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(2.0), 3.0);
        let g = FirFilter::new(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(g.eval(2.0), 1.0 - 4.0 + 2.0);
    }

    #[test]
    fn sv_response_branches() {
        let f = SvFilter::new(0.5, vec![1.0, 2.0], vec![]).unwrap();
        assert_eq!(f.eval(3.0, FrequencyKind::Harmonic), 0.5);
        assert_eq!(f.eval(3.0, FrequencyKind::Gradient), 0.5 + 3.0 + 18.0);
        assert_eq!(f.eval(3.0, FrequencyKind::Curl), 0.5);
        assert_eq!(f.total_len(), 3);
    }

    #[test]
    fn zero_flow_shifts_to_zero() {
        let sys = triangle_with_tail();
        let (lo, up) = shift(&sys.laplacians, &EdgeFlow::zeros(4)).unwrap();
        assert!(lo.iter().chain(up.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn identity_and_single_shift() {
        let sys = triangle_with_tail();
        let f = EdgeFlow::new(vec![1.0, -2.0, 0.5, 3.0]);
        let same = apply_fir(&FirFilter::identity(), &sys.laplacians, &f).unwrap();
        assert_eq!(same, f);

        let once = apply_fir(&FirFilter::new(vec![0.0, 1.0]).unwrap(), &sys.laplacians, &f).unwrap();
        let (lo, up) = shift(&sys.laplacians, &f).unwrap();
        for k in 0..4 {
            assert!((once[k] - lo[k] - up[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn sv_with_only_h0_scales() {
        let sys = triangle_with_tail();
        let f = EdgeFlow::new(vec![1.0, -2.0, 0.5, 3.0]);
        let out = apply_sv(&SvFilter::new(-1.5, vec![], vec![]).unwrap(), &sys.laplacians, &f).unwrap();
        assert_eq!(out, f.scaled(-1.5));
    }

    #[test]
    fn dimension_is_checked() {
        let sys = triangle_with_tail();
        let f = EdgeFlow::zeros(3);
        assert!(apply_fir(&FirFilter::identity(), &sys.laplacians, &f).is_err());
        assert!(shift(&sys.laplacians, &f).is_err());
    }

    #[test]
    fn regularized_inverse_with_zero_weight_is_identity() {
        let sys = triangle_with_tail();
        let f = EdgeFlow::new(vec![1.0, -2.0, 0.5, 3.0]);
        let out = apply_regularized_inverse(&sys.laplacians, LaplacianChoice::Full, 0.0, &f).unwrap();
        for k in 0..4 {
            assert!((out[k] - f[k]).abs() < 1e-14);
        }
        assert!(apply_regularized_inverse(&sys.laplacians, LaplacianChoice::Lower, -1.0, &f).is_err());
    }

    #[test]
    fn instrumented_count_formula() {
        let sys = triangle_with_tail();
        let f = EdgeFlow::new(vec![1.0; 4]);
        let filter = FirFilter::new(vec![1.0, 2.0, 3.0]).unwrap();
        let (_, count) = apply_fir_instrumented(&filter, &sys.laplacians, &f).unwrap();
        let nnz = sys.laplacians.l1.nnz() as u64;
        // N for the leading scale, then per remaining coefficient one shift
        // (2 nnz) and one axpy (2 N)
        assert_eq!(count.0, 4 + 2 * (2 * nnz + 8));
    }
}
