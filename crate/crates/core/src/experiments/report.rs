use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::format_float;

/// One table row: configuration values aligned with
/// [`ExperimentReport::columns`] and metric values aligned with
/// [`ExperimentReport::metrics`] (absent where undefined).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub config: Vec<String>,
    pub values: Vec<Option<f64>>,
}

/// A plot-ready series table: one x column and several named y columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub x: String,
    pub series: Vec<String>,
    pub points: Vec<(f64, Vec<Option<f64>>)>,
}

impl Curve {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.x.clone()];
        header.extend(self.series.iter().cloned());
        w.write_record(&header)?;
        for (x, ys) in &self.points {
            let mut record = vec![format_float(*x)];
            record.extend(ys.iter().map(|y| y.map(format_float).unwrap_or_default()));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: Option<u64>,
    /// Scalar settings and derived quantities (e.g. a calibrated noise level).
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub metrics: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub curves: BTreeMap<String, Curve>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: Option<u64>, columns: &[&str], metrics: &[&str]) -> Self {
        Self {
            experiment: experiment.into(),
            seed,
            parameters: BTreeMap::new(),
            metrics: metrics.iter().map(|c| c.to_string()).collect(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            curves: BTreeMap::new(),
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.parameters.insert(key.into(), value.into());
    }

    pub fn push(&mut self, config: Vec<String>, values: Vec<Option<f64>>) -> Result<()> {
        for (expected, found) in [(self.columns.len(), config.len()), (self.metrics.len(), values.len())] {
            if expected != found {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        self.rows.push(ReportRow { config, values });
        Ok(())
    }

    /// Table with the configuration columns followed by the metrics;
    /// undefined values are written as `--`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.columns.clone();
        header.extend(self.metrics.iter().cloned());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record = row.config.clone();
            record.extend(row.values.iter().map(|v| v.map(format_float).unwrap_or_else(|| "--".into())));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
