mod common;

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{norm, toy};
use hodgefir::experiments::{
    gaussian_flow, nrmse, run_denoising, run_extraction, run_prediction, sioux_falls, ArModel, DenoiseMethod,
    DenoisingConfig, ExtractionConfig, Family, PredictionConfig,
};
use hodgefir::{FrequencyKind, HodgeSystem};

#[test]
fn extraction_is_exact_at_full_length() {
    let (sys, s) = toy();
    let config = ExtractionConfig { lengths: vec![10], ..Default::default() };
    for kind in FrequencyKind::ALL {
        for family in [Family::Fir, Family::Sv] {
            let points = run_extraction(&sys, &s, kind, family, &config).unwrap();
            assert!(points[0].error < 1e-6, "{kind} {family}: {}", points[0].error);
        }
    }
}

#[test]
fn sv_gradient_extraction_is_never_worse_than_fir() {
    let (sys, s) = toy();
    let config = ExtractionConfig::default();
    let fir = run_extraction(&sys, &s, FrequencyKind::Gradient, Family::Fir, &config).unwrap();
    let sv = run_extraction(&sys, &s, FrequencyKind::Gradient, Family::Sv, &config).unwrap();
    for (a, b) in fir.iter().zip(&sv) {
        assert!(b.error <= a.error + 1e-9, "L={}: sv {} fir {}", a.l_total, b.error, a.error);
    }
}

#[test]
fn sv_design_residual_is_never_worse_for_gradient_and_curl() {
    let (sys, s) = toy();
    let config = ExtractionConfig::default();
    for kind in [FrequencyKind::Gradient, FrequencyKind::Curl] {
        let fir = run_extraction(&sys, &s, kind, Family::Fir, &config).unwrap();
        let sv = run_extraction(&sys, &s, kind, Family::Sv, &config).unwrap();
        for (a, b) in fir.iter().zip(&sv) {
            assert!(b.design_residual <= a.design_residual + 1e-9, "{kind} L={}", a.l_total);
        }
    }
}

#[test]
fn harmonic_sv_curve_is_nonincreasing() {
    let (sys, s) = toy();
    let points = run_extraction(&sys, &s, FrequencyKind::Harmonic, Family::Sv, &ExtractionConfig::default()).unwrap();
    for w in points.windows(2) {
        assert!(w[1].design_residual <= w[0].design_residual + 1e-9);
    }
}

#[test]
fn denoising_with_exact_designs_recovers_clean_flow_as_noise_vanishes() {
    let (sys, s) = toy();
    let config = DenoisingConfig {
        sigma: Some(1e-9),
        trials: 5,
        fir_length: 10,
        sv_lengths: (6, 0),
        ..Default::default()
    };
    let result = run_denoising(&sys, &s, &config).unwrap();
    assert!(result.mean_error(DenoiseMethod::Fir) < 1e-6);
    assert!(result.mean_error(DenoiseMethod::Sv) < 1e-6);
    assert!(result.mean_error(DenoiseMethod::Input) < 1e-6);
}

#[test]
fn denoising_ordering_holds_across_replications() {
    let (sys, s) = toy();
    for seed in 0..20 {
        let config = DenoisingConfig { seed, trials: 100, ..Default::default() };
        let r = run_denoising(&sys, &s, &config).unwrap();
        let input = r.mean_error(DenoiseMethod::Input);
        let fir = r.mean_error(DenoiseMethod::Fir);
        let sv = r.mean_error(DenoiseMethod::Sv);
        assert!(sv < fir && fir < input, "seed {seed}: sv {sv} fir {fir} input {input}");
    }
}

#[test]
fn denoising_calibrates_input_error() {
    let (sys, s) = toy();
    let r = run_denoising(&sys, &s, &DenoisingConfig::default()).unwrap();
    assert!((r.mean_error(DenoiseMethod::Input) - 0.46).abs() < 1e-9);
    assert!(run_denoising(&sys, &s, &DenoisingConfig { sigma: Some(0.0), ..Default::default() }).is_err());
}

#[test]
fn runs_are_deterministic() {
    let (sys, s) = toy();
    let config = DenoisingConfig { trials: 10, seed: 3, ..Default::default() };
    let a = run_denoising(&sys, &s, &config).unwrap();
    let b = run_denoising(&sys, &s, &config).unwrap();
    assert_eq!(a, b);

    let sys = HodgeSystem::new(sioux_falls());
    let config = PredictionConfig { l_totals: vec![1, 2, 3], seeds: vec![5], ..Default::default() };
    assert_eq!(run_prediction(&sys, &config).unwrap(), run_prediction(&sys, &config).unwrap());
}

#[test]
fn prediction_training_residual_shrinks_with_length() {
    let sys = HodgeSystem::new(sioux_falls());
    let config = PredictionConfig { l_totals: vec![3, 10], ..Default::default() };
    let result = run_prediction(&sys, &config).unwrap();
    let rows = &result.runs[0].rows;
    assert!(rows[1].fir_train_residual <= rows[0].fir_train_residual);
    assert!(rows[0].sv_error.is_some());
    let single = run_prediction(&sys, &PredictionConfig { l_totals: vec![1], ..Default::default() }).unwrap();
    assert!(single.runs[0].rows[0].sv_error.is_none());
}

#[test]
fn ar_operator_is_bounded() {
    let sys = HodgeSystem::new(sioux_falls());
    let model = ArModel::new(&sys.laplacians).unwrap();
    let eig = SymmetricEigen::new(model.system_matrix().clone()).eigenvalues;
    assert!(eig.min() >= 0.5 - 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let states = model.trajectory(gaussian_flow(&mut rng, model.dim()), 20).unwrap();
    assert_eq!(states.len(), 21);
    for w in states.windows(2) {
        assert!(norm(&w[1]) <= 2.0 * norm(&w[0]) * (1.0 + 1e-12));
    }
}

#[test]
fn nrmse_rejects_zero_reference() {
    assert!(nrmse(&[1.0], &[0.0]).is_err());
    assert!(nrmse(&[1.0, 2.0], &[1.0]).is_err());
    assert_eq!(nrmse(&[3.0, 4.0], &[0.0, 5.0]).unwrap(), (9.0f64 + 1.0).sqrt() / 5.0);
}
