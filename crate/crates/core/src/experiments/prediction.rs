use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gaussian_flow, nrmse, sv_splits, ArModel, Curve, ExperimentReport};
use crate::complex::{EdgeFlow, HodgeSystem};
use crate::design::{fit_fir_from_data, fit_sv_from_data, FlowPair};
use crate::error::{Error, Result};
use crate::filtering::{apply_fir, apply_sv};

/// How one-step prediction errors over a test trajectory are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorAggregate {
    /// NRMSE of all predictions stacked into one vector.
    #[default]
    Concatenated,
    /// Mean of the per-step NRMSEs.
    PerStepMean,
}

#[derive(Debug, Clone)]
pub struct PredictionConfig {
    pub l_totals: Vec<usize>,
    pub train_pairs: usize,
    /// Number of one-step predictions scored on the test trajectory.
    pub test_len: usize,
    pub seeds: Vec<u64>,
    pub aggregate: ErrorAggregate,
}

impl Default for PredictionConfig {
    fn default() -> Self {
        Self {
            l_totals: (1..=10).collect(),
            train_pairs: 20,
            test_len: 80,
            seeds: vec![0],
            aggregate: ErrorAggregate::Concatenated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub l_total: usize,
    pub fir_error: f64,
    pub fir_train_residual: f64,
    /// Best split's test error; undefined at total length 1, where the two
    /// families coincide.
    pub sv_error: Option<f64>,
    pub sv_split: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub rows: Vec<PredictionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub runs: Vec<SeedRun>,
}

impl PredictionResult {
    /// Per-length mean over seeds of the shared-coefficient filter error.
    pub fn mean_fir(&self) -> Vec<f64> {
        self.mean_by(|r| Some(r.fir_error)).into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    }

    /// Per-length mean over seeds of the subspace-varying filter error.
    pub fn mean_sv(&self) -> Vec<Option<f64>> {
        self.mean_by(|r| r.sv_error)
    }

    fn mean_by(&self, f: impl Fn(&PredictionRow) -> Option<f64>) -> Vec<Option<f64>> {
        let Some(first) = self.runs.first() else {
            return Vec::new();
        };
        (0..first.rows.len())
            .map(|i| {
                let vals: Option<Vec<f64>> = self.runs.iter().map(|run| f(&run.rows[i])).collect();
                vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
            })
            .collect()
    }

    pub fn l_totals(&self) -> Vec<usize> {
        self.runs.first().map(|r| r.rows.iter().map(|row| row.l_total).collect()).unwrap_or_default()
    }

    /// Table of mean `e1` (shared-coefficient) and `e2` (subspace-varying)
    /// per total length, with per-seed curves alongside.
    pub fn report(&self, config: &PredictionConfig) -> Result<ExperimentReport> {
        let mut report = ExperimentReport::new("predict", config.seeds.first().copied(), &["l_total"], &["e1", "e2"]);
        report.parameter("seeds", config.seeds.clone());
        report.parameter("train_pairs", config.train_pairs);
        report.parameter("test_len", config.test_len);
        report.parameter("aggregate", serde_json::to_value(config.aggregate)?);
        let (e1, e2, ls) = (self.mean_fir(), self.mean_sv(), self.l_totals());
        for (i, l) in ls.iter().enumerate() {
            report.push(vec![l.to_string()], vec![Some(e1[i]), e2[i]])?;
        }
        report.curves.insert(
            "prediction".into(),
            Curve {
                x: "l_total".into(),
                series: vec!["e1".into(), "e2".into()],
                points: ls.iter().enumerate().map(|(i, &l)| (l as f64, vec![Some(e1[i]), e2[i]])).collect(),
            },
        );
        for (name, pick) in [
            ("prediction_e1", (|r: &PredictionRow| Some(r.fir_error)) as fn(&PredictionRow) -> Option<f64>),
            ("prediction_e2", |r: &PredictionRow| r.sv_error),
        ] {
            report.curves.insert(
                name.into(),
                Curve {
                    x: "l_total".into(),
                    series: self.runs.iter().map(|r| format!("seed_{}", r.seed)).collect(),
                    points: ls
                        .iter()
                        .enumerate()
                        .map(|(i, &l)| (l as f64, self.runs.iter().map(|r| pick(&r.rows[i])).collect()))
                        .collect(),
                },
            );
        }
        Ok(report)
    }
}

fn aggregate_error(predictions: &[EdgeFlow], truth: &[EdgeFlow], how: ErrorAggregate) -> Result<f64> {
    match how {
        ErrorAggregate::Concatenated => {
            let p: Vec<f64> = predictions.iter().flat_map(|f| f.iter().copied()).collect();
            let t: Vec<f64> = truth.iter().flat_map(|f| f.iter().copied()).collect();
            nrmse(&p, &t)
        }
        ErrorAggregate::PerStepMean => {
            let errs = predictions
                .iter()
                .zip(truth)
                .map(|(p, t)| nrmse(p, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(errs.iter().sum::<f64>() / errs.len() as f64)
        }
    }
}

fn run_seed(system: &HodgeSystem, ar: &ArModel, config: &PredictionConfig, seed: u64) -> Result<SeedRun> {
    let lap = &system.laplacians;
    let n = lap.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (0..config.train_pairs)
        .map(|_| {
            let input = gaussian_flow(&mut rng, n);
            let output = ar.step(&input)?;
            Ok(FlowPair::new(input, output))
        })
        .collect::<Result<Vec<_>>>()?;
    let trajectory = ar.trajectory(gaussian_flow(&mut rng, n), config.test_len)?;
    let (observed, truth) = (&trajectory[..config.test_len], &trajectory[1..]);

    let rows = config
        .l_totals
        .iter()
        .map(|&l_total| {
            let (fir, fit) = fit_fir_from_data(lap, &pairs, l_total)?;
            let predictions = observed.iter().map(|f| apply_fir(&fir, lap, f)).collect::<Result<Vec<_>>>()?;
            let fir_error = aggregate_error(&predictions, truth, config.aggregate)?;

            let mut best: Option<(f64, (usize, usize))> = None;
            if l_total > 1 {
                for (l1, l2) in sv_splits(l_total) {
                    let (sv, _) = fit_sv_from_data(lap, &pairs, l1, l2)?;
                    let predictions = observed.iter().map(|f| apply_sv(&sv, lap, f)).collect::<Result<Vec<_>>>()?;
                    let err = aggregate_error(&predictions, truth, config.aggregate)?;
                    if best.is_none_or(|(b, _)| err < b) {
                        best = Some((err, (l1, l2)));
                    }
                }
            }
            Ok(PredictionRow {
                l_total,
                fir_error,
                fir_train_residual: fit.residual,
                sv_error: best.map(|b| b.0),
                sv_split: best.map(|b| b.1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeedRun { seed, rows })
}

/// Learns the autoregressive model from random input/output pairs with both
/// filter families and scores one-step predictions along a test trajectory.
/// For the subspace-varying family the best split per total length is kept.
pub fn run_prediction(system: &HodgeSystem, config: &PredictionConfig) -> Result<PredictionResult> {
    if config.train_pairs == 0 {
        return Err(Error::EmptyData);
    }
    if config.test_len == 0 || config.seeds.is_empty() || config.l_totals.contains(&0) {
        return Err(Error::InvalidArgument(
            "prediction needs a test length, at least one seed and positive filter lengths".into(),
        ));
    }
    let ar = ArModel::new(&system.laplacians)?;
    let runs = config
        .seeds
        .iter()
        .map(|&seed| run_seed(system, &ar, config, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionResult { runs })
}
