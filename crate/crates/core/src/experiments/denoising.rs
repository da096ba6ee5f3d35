use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gaussian_flow, nrmse, Curve, ExperimentReport};
use crate::complex::{EdgeFlow, HodgeSystem};
use crate::design::{design_fir, design_sv, DesignOptions, DesignSpec};
use crate::error::{Error, Result};
use crate::filtering::{apply_fir, apply_regularized_inverse, apply_sv, FirFilter, LaplacianChoice, SvFilter};
use crate::spectral::{node_spectrum, FrequencyKind, Spectrum};
use crate::vecops;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenoiseMethod {
    /// The noisy flow itself.
    Input,
    /// `(I + mu L1)^{-1}`.
    RegularizedFull,
    /// `(I + mu L1_lower)^{-1}`.
    RegularizedLower,
    /// Gradient-preserving shared-coefficient filter.
    Fir,
    /// Gradient-preserving subspace-varying filter.
    Sv,
}

impl DenoiseMethod {
    pub const ALL: [DenoiseMethod; 5] = [
        DenoiseMethod::Input,
        DenoiseMethod::RegularizedFull,
        DenoiseMethod::RegularizedLower,
        DenoiseMethod::Fir,
        DenoiseMethod::Sv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DenoiseMethod::Input => "input",
            DenoiseMethod::RegularizedFull => "regularized-full",
            DenoiseMethod::RegularizedLower => "regularized-lower",
            DenoiseMethod::Fir => "fir",
            DenoiseMethod::Sv => "sv",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenoisingConfig {
    /// Noise standard deviation; `None` calibrates it to `target_input_error`.
    pub sigma: Option<f64>,
    pub target_input_error: f64,
    pub trials: usize,
    pub mu: f64,
    pub fir_length: usize,
    pub sv_lengths: (usize, usize),
    pub seed: u64,
    pub design: DesignOptions,
}

impl Default for DenoisingConfig {
    fn default() -> Self {
        Self {
            sigma: None,
            target_input_error: 0.46,
            trials: 100,
            mu: 0.5,
            fir_length: 4,
            sv_lengths: (1, 1),
            seed: 0,
            design: DesignOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoisingResult {
    pub sigma: f64,
    pub clean: Vec<f64>,
    pub fir: FirFilter,
    pub sv: SvFilter,
    /// Per-method NRMSE of every trial, in [`DenoiseMethod::ALL`] order.
    pub trial_errors: Vec<(DenoiseMethod, Vec<f64>)>,
}

impl DenoisingResult {
    pub fn mean_error(&self, method: DenoiseMethod) -> f64 {
        let errs = &self.trial_errors.iter().find(|(m, _)| *m == method).expect("all methods run").1;
        errs.iter().sum::<f64>() / errs.len() as f64
    }

    pub fn report(&self, config: &DenoisingConfig) -> Result<ExperimentReport> {
        let mut report = ExperimentReport::new("denoise", Some(config.seed), &["method"], &["nrmse"]);
        report.parameter("sigma", self.sigma);
        report.parameter("sigma_calibrated", config.sigma.is_none());
        report.parameter("target_input_error", config.target_input_error);
        report.parameter("trials", config.trials);
        report.parameter("mu", config.mu);
        report.parameter("fir_length", config.fir_length);
        report.parameter("sv_l1", config.sv_lengths.0);
        report.parameter("sv_l2", config.sv_lengths.1);
        for method in DenoiseMethod::ALL {
            report.push(vec![method.name().into()], vec![Some(self.mean_error(method))])?;
        }
        let curve = Curve {
            x: "trial".into(),
            series: DenoiseMethod::ALL.iter().map(|m| m.name().to_string()).collect(),
            points: (0..config.trials)
                .map(|t| (t as f64, self.trial_errors.iter().map(|(_, e)| Some(e[t])).collect()))
                .collect(),
        };
        report.curves.insert("denoise".into(), curve);
        Ok(report)
    }
}

/// Gradient flow denoising. The clean flow is `B1^T U0 1`, the gradient of
/// the node signal that is all-ones in the graph Fourier domain; each trial
/// adds i.i.d. Gaussian noise and scores every method against the clean flow.
///
/// With `sigma` unset, the noise level is chosen so that the mean input error
/// over the drawn noise equals the target exactly: that mean is linear in
/// `sigma` for a fixed set of draws.
pub fn run_denoising(system: &HodgeSystem, spectrum: &Spectrum, config: &DenoisingConfig) -> Result<DenoisingResult> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let lap = &system.laplacians;
    let n = lap.dim();

    let (_, u0) = node_spectrum(lap)?;
    let v: Vec<f64> = u0.column_sum().iter().copied().collect();
    let b1t = system.incidence.b1.transpose().to_f64();
    let clean = EdgeFlow::new(b1t.mul_vec(&v));
    let clean_norm = clean.norm();
    if clean_norm == 0.0 {
        return Err(Error::ZeroReference);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noises: Vec<EdgeFlow> = (0..config.trials).map(|_| gaussian_flow(&mut rng, n)).collect();
    let sigma = match config.sigma {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(Error::InvalidArgument(format!("noise level must be positive, got {s}"))),
        None => {
            let mean_noise = noises.iter().map(|e| e.norm()).sum::<f64>() / config.trials as f64;
            config.target_input_error * clean_norm / mean_noise
        }
    };

    let spec = DesignSpec::preserve(spectrum, FrequencyKind::Gradient);
    let (fir, _) = design_fir(spectrum, &spec, config.fir_length, config.design)?;
    let (l1, l2) = config.sv_lengths;
    let (sv, _) = design_sv(spectrum, &spec, l1, l2, config.design)?;

    let mut trial_errors: Vec<(DenoiseMethod, Vec<f64>)> =
        DenoiseMethod::ALL.iter().map(|&m| (m, Vec::with_capacity(config.trials))).collect();
    for noise in &noises {
        let noisy = EdgeFlow::new(vecops::axpby(1.0, &clean, sigma, noise));
        for (method, errs) in trial_errors.iter_mut() {
            let estimate = match method {
                DenoiseMethod::Input => noisy.clone(),
                DenoiseMethod::RegularizedFull => apply_regularized_inverse(lap, LaplacianChoice::Full, config.mu, &noisy)?,
                DenoiseMethod::RegularizedLower => apply_regularized_inverse(lap, LaplacianChoice::Lower, config.mu, &noisy)?,
                DenoiseMethod::Fir => apply_fir(&fir, lap, &noisy)?,
                DenoiseMethod::Sv => apply_sv(&sv, lap, &noisy)?,
            };
            errs.push(nrmse(&estimate, &clean)?);
        }
    }

    Ok(DenoisingResult {
        sigma,
        clean: clean.into_values(),
        fir,
        sv,
        trial_errors,
    })
}
