use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::complex::{EdgeFlow, HodgeLaplacians};
use crate::error::{Error, Result};

/// First-order autoregressive flow model `f_{t+1} = S^{-1} f_t` with
/// `S = 0.5 I + 0.3 L1_lower + L1_upper + 0.5 L1_upper^2`.
///
/// `S` is symmetric with every eigenvalue at least 0.5, so a step at most
/// doubles the norm of a flow; harmonic flows are exactly doubled.
#[derive(Debug, Clone)]
pub struct ArModel {
    system: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
}

impl ArModel {
    pub fn new(lap: &HodgeLaplacians) -> Result<Self> {
        let n = lap.dim();
        let lower = lap.l1_lower.to_dense();
        let upper = lap.l1_upper.to_dense();
        let system = DMatrix::identity(n, n) * 0.5 + lower * 0.3 + &upper + (&upper * &upper) * 0.5;
        let factor = system
            .clone()
            .cholesky()
            .ok_or_else(|| Error::SolverFailure("autoregressive system is not positive definite".into()))?;
        Ok(Self { system, factor })
    }

    /// The SPD matrix whose inverse drives the model.
    pub fn system_matrix(&self) -> &DMatrix<f64> {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.system.nrows()
    }

    pub fn step(&self, flow: &EdgeFlow) -> Result<EdgeFlow> {
        flow.check_len(self.dim())?;
        let x = self.factor.solve(&DVector::from_column_slice(flow));
        Ok(EdgeFlow::new(x.iter().copied().collect()))
    }

    /// `f_0, f_1, ..., f_steps` starting from `init`.
    pub fn trajectory(&self, init: EdgeFlow, steps: usize) -> Result<Vec<EdgeFlow>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(init);
        for t in 0..steps {
            let next = self.step(&out[t])?;
            out.push(next);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::HodgeSystem;
    use crate::experiments::toy_complex;
    use crate::spectral::{FrequencyKind, Spectrum};

    #[test]
    fn zero_maps_to_zero_and_harmonic_doubles() {
        let sys = HodgeSystem::new(toy_complex());
        let ar = ArModel::new(&sys.laplacians).unwrap();
        assert!(ar.step(&EdgeFlow::zeros(10)).unwrap().iter().all(|v| *v == 0.0));

        let s = Spectrum::new(&sys).unwrap();
        let h = s.eigenvector(s.indices(FrequencyKind::Harmonic)[0]);
        let next = ar.step(&h).unwrap();
        for (a, b) in next.iter().zip(h.iter()) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn trajectory_length() {
        let sys = HodgeSystem::new(toy_complex());
        let ar = ArModel::new(&sys.laplacians).unwrap();
        let traj = ar.trajectory(EdgeFlow::new(vec![1.0; 10]), 5).unwrap();
        assert_eq!(traj.len(), 6);
        assert!(ar.step(&EdgeFlow::zeros(3)).is_err());
    }
}
