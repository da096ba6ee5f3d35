use serde::{Deserialize, Serialize};

use super::{nrmse, sv_splits, Curve, ExperimentReport, Family};
use crate::complex::{EdgeFlow, HodgeSystem};
use crate::design::{design_fir, design_sv, DesignOptions, DesignReport, DesignSpec};
use crate::error::{Error, Result};
use crate::filtering::{apply_fir, apply_sv, SvFilter};
use crate::spectral::{FrequencyKind, Spectrum};

#[derive(Debug, Clone)]
pub struct ExtractionConfig {
    /// Total filter lengths to sweep.
    pub lengths: Vec<usize>,
    pub design: DesignOptions,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            lengths: (1..=10).collect(),
            design: DesignOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionPoint {
    pub component: FrequencyKind,
    pub family: Family,
    pub l_total: usize,
    /// Lower/upper lengths of the subspace-varying filter.
    pub split: Option<(usize, usize)>,
    pub design_residual: f64,
    pub error: f64,
}

/// Subspace-varying design of total length `total` with the split of
/// smallest design residual (ties go to the smaller `l1`).
pub fn best_sv_design(
    spectrum: &Spectrum,
    spec: &DesignSpec,
    total: usize,
    opts: DesignOptions,
) -> Result<(SvFilter, DesignReport, (usize, usize))> {
    let mut best: Option<(SvFilter, DesignReport, (usize, usize))> = None;
    for (l1, l2) in sv_splits(total) {
        let (filter, report) = design_sv(spectrum, spec, l1, l2, opts)?;
        if best.as_ref().is_none_or(|b| report.residual < b.1.residual) {
            best = Some((filter, report, (l1, l2)));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("total filter length must be at least 1".into()))
}

/// Extracts one Hodge component of `f = U1 1` with filters designed to pass
/// only that component, and scores them against the exact projection.
pub fn run_extraction(
    system: &HodgeSystem,
    spectrum: &Spectrum,
    component: FrequencyKind,
    family: Family,
    config: &ExtractionConfig,
) -> Result<Vec<ExtractionPoint>> {
    let flow = spectrum.isft(&vec![1.0; spectrum.len()])?;
    let truth = spectrum.project(&flow, component)?;
    let spec = DesignSpec::preserve(spectrum, component);
    let lap = &system.laplacians;

    config
        .lengths
        .iter()
        .map(|&l_total| {
            let (output, residual, split): (EdgeFlow, f64, Option<(usize, usize)>) = match family {
                Family::Fir => {
                    let (filter, report) = design_fir(spectrum, &spec, l_total, config.design)?;
                    (apply_fir(&filter, lap, &flow)?, report.residual, None)
                }
                Family::Sv => {
                    let (filter, report, split) = best_sv_design(spectrum, &spec, l_total, config.design)?;
                    (apply_sv(&filter, lap, &flow)?, report.residual, Some(split))
                }
            };
            Ok(ExtractionPoint {
                component,
                family,
                l_total,
                split,
                design_residual: residual,
                error: nrmse(&output, &truth)?,
            })
        })
        .collect()
}

/// Sweeps every component present in the spectrum with both families.
pub fn extraction_report(system: &HodgeSystem, spectrum: &Spectrum, config: &ExtractionConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "extract",
        None,
        &["component", "family", "l_total", "l1", "l2", "design_residual"],
        &["nrmse"],
    );
    report.parameter("weight_by_multiplicity", config.design.weight_by_multiplicity);
    for component in FrequencyKind::ALL {
        if spectrum.count(component) == 0 {
            continue;
        }
        let mut series: Vec<Vec<ExtractionPoint>> = Vec::new();
        for family in [Family::Fir, Family::Sv] {
            let points = run_extraction(system, spectrum, component, family, config)?;
            for p in &points {
                let (l1, l2) = match p.split {
                    Some((a, b)) => (a.to_string(), b.to_string()),
                    None => (String::new(), String::new()),
                };
                report.push(
                    vec![
                        component.to_string().to_lowercase(),
                        family.to_string(),
                        p.l_total.to_string(),
                        l1,
                        l2,
                        crate::io::format_float(p.design_residual),
                    ],
                    vec![Some(p.error)],
                )?;
            }
            series.push(points);
        }
        let curve = Curve {
            x: "l_total".into(),
            series: vec!["fir".into(), "sv".into()],
            points: config
                .lengths
                .iter()
                .enumerate()
                .map(|(i, &l)| (l as f64, series.iter().map(|s| Some(s[i].error)).collect()))
                .collect(),
        };
        report.curves.insert(format!("extract_{}", component.to_string().to_lowercase()), curve);
    }
    Ok(report)
}
