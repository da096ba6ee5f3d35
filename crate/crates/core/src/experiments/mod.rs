//! Synthetic experiments: subspace extraction and denoising on the toy
//! complex, and flow prediction under an autoregressive model.

mod ar;
mod denoising;
mod extraction;
mod prediction;
mod report;

pub use ar::ArModel;
pub use denoising::{run_denoising, DenoiseMethod, DenoisingConfig, DenoisingResult};
pub use extraction::{best_sv_design, extraction_report, run_extraction, ExtractionConfig, ExtractionPoint};
pub use prediction::{run_prediction, ErrorAggregate, PredictionConfig, PredictionResult, PredictionRow, SeedRun};
pub use report::{Curve, ExperimentReport, ReportRow};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::complex::{EdgeFlow, SimplicialComplex};
use crate::error::{Error, Result};
use crate::io;
use crate::vecops;

const TOY_COMPLEX: &str = include_str!("../../data/toy_complex.json");
const SIOUX_FALLS: &str = include_str!("../../data/sioux_falls.json");

/// `||estimate - truth|| / ||truth||`.
pub fn nrmse(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: estimate.len(),
        });
    }
    vecops::relative_error(estimate, truth).ok_or(Error::ZeroReference)
}

/// Seven nodes, ten edges and the filled triangles {1,2,3}, {1,3,4}, {5,6,7}.
pub fn toy_complex() -> SimplicialComplex {
    io::parse_complex(TOY_COMPLEX).expect("bundled toy complex is valid")
}

/// The 24-node, 38-edge Sioux Falls road network with its two 3-cliques
/// filled.
pub fn sioux_falls() -> SimplicialComplex {
    io::parse_complex(SIOUX_FALLS).expect("bundled Sioux Falls complex is valid")
}

/// Raw JSON of a bundled complex by name (`toy` or `sioux-falls`).
pub fn bundled_complex_json(name: &str) -> Option<&'static str> {
    match name {
        "toy" => Some(TOY_COMPLEX),
        "sioux-falls" | "siouxfalls" | "sioux_falls" => Some(SIOUX_FALLS),
        _ => None,
    }
}

/// Filter family, as used in experiment configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fir,
    Sv,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Fir => "fir",
            Family::Sv => "sv",
        })
    }
}

/// I.i.d. standard normal flow.
pub fn gaussian_flow<R: Rng + ?Sized>(rng: &mut R, n: usize) -> EdgeFlow {
    EdgeFlow::new((0..n).map(|_| rng.sample(StandardNormal)).collect())
}

/// All splits `(l1, l2)` with `1 + l1 + l2 = total`.
pub fn sv_splits(total: usize) -> Vec<(usize, usize)> {
    if total == 0 {
        return Vec::new();
    }
    (0..total).map(|l1| (l1, total - 1 - l1)).collect()
}

/// Spearman rank correlation, with tied values sharing their mean rank.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let mean = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                out[k] = mean;
            }
            i = j + 1;
        }
        out
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
