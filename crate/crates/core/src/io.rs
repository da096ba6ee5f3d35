//! File formats: complexes and filters as JSON, flows and tables as CSV.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{EdgeFlow, NodeId, SimplicialComplex};
use crate::design::{DesignSpec, FlowPair};
use crate::error::{Error, Result};
use crate::filtering::{Filter, FirFilter, FrequencyResponse, SvFilter};
use crate::spectral::Spectrum;

/// On-disk form of a complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<[NodeId; 2]>,
    #[serde(default)]
    pub triangles: Vec<[NodeId; 3]>,
}

impl ComplexFile {
    pub fn build(self) -> Result<SimplicialComplex> {
        SimplicialComplex::new(self.nodes, self.edges, self.triangles)
    }

    /// Canonical listing of a complex, in reference orientation and order.
    pub fn from_complex(complex: &SimplicialComplex, description: Option<String>) -> Self {
        let nodes = complex.nodes();
        Self {
            description,
            nodes: nodes.to_vec(),
            edges: complex
                .edges()
                .iter()
                .map(|&[u, v]| [nodes[u].clone(), nodes[v].clone()])
                .collect(),
            triangles: complex
                .triangles()
                .iter()
                .map(|&[u, v, w]| [nodes[u].clone(), nodes[v].clone(), nodes[w].clone()])
                .collect(),
        }
    }
}

pub fn parse_complex(json: &str) -> Result<SimplicialComplex> {
    serde_json::from_str::<ComplexFile>(json)?.build()
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    parse_complex(&fs::read_to_string(path)?)
}

pub fn complex_to_json(complex: &SimplicialComplex, description: Option<String>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ComplexFile::from_complex(complex, description))?)
}

#[derive(Debug, Deserialize)]
struct FlowRow {
    u: String,
    v: String,
    value: f64,
}

/// Reads a `u,v,value` flow table. A row written against the reference
/// orientation, `(v, u)`, is negated. Edges absent from the table are zero;
/// edges not in the complex and repeated edges are errors.
pub fn read_flow<R: Read>(complex: &SimplicialComplex, reader: R) -> Result<EdgeFlow> {
    let mut values = vec![0.0; complex.num_edges()];
    let mut seen = vec![false; complex.num_edges()];
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for row in rdr.deserialize() {
        let row: FlowRow = row?;
        if !row.value.is_finite() {
            return Err(Error::Format(format!("non-finite value on edge ({}, {})", row.u, row.v)));
        }
        let (k, sign) = complex.find_edge(&row.u, &row.v)?;
        if seen[k] {
            return Err(Error::DuplicateEntry(row.u, row.v));
        }
        seen[k] = true;
        values[k] = sign * row.value;
    }
    let missing = seen.iter().filter(|s| !**s).count();
    if missing > 0 {
        log::warn!("{missing} edge(s) missing from flow file, set to 0");
    }
    Ok(EdgeFlow::new(values))
}

pub fn read_flow_file(complex: &SimplicialComplex, path: &Path) -> Result<EdgeFlow> {
    read_flow(complex, fs::File::open(path)?)
}

/// Writes a flow as `u,v,value` in reference orientation.
pub fn write_flow<W: Write>(complex: &SimplicialComplex, flow: &EdgeFlow, writer: W) -> Result<()> {
    flow.check_len(complex.num_edges())?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["u", "v", "value"])?;
    for (k, value) in flow.iter().enumerate() {
        let (u, v) = complex.edge_labels(k);
        w.write_record([u.to_string(), v.to_string(), format_float(*value)])?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Parses a filter file: `{"h": [...]}` for the shared-coefficient family,
/// `{"h0": .., "alpha": [...], "beta": [...]}` for the subspace-varying one.
pub fn parse_filter(json: &str) -> Result<Filter> {
    let value: Value = serde_json::from_str(json)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Format("filter file must be a JSON object".into()))?;
    let has_fir = obj.contains_key("h");
    let has_sv = ["h0", "alpha", "beta"].iter().any(|k| obj.contains_key(*k));
    for key in obj.keys() {
        if !["h", "h0", "alpha", "beta"].contains(&key.as_str()) {
            return Err(Error::Format(format!("unknown filter field `{key}`")));
        }
    }
    match (has_fir, has_sv) {
        (true, false) => {
            let h: Vec<f64> = serde_json::from_value(obj["h"].clone())?;
            Ok(Filter::Fir(FirFilter::new(h)?))
        }
        (false, true) => {
            let h0 = obj
                .get("h0")
                .ok_or_else(|| Error::Format("subspace-varying filter needs `h0`".into()))?;
            let h0: f64 = serde_json::from_value(h0.clone())?;
            let list = |k: &str| -> Result<Vec<f64>> {
                match obj.get(k) {
                    Some(v) => Ok(serde_json::from_value(v.clone())?),
                    None => Ok(Vec::new()),
                }
            };
            Ok(Filter::Sv(SvFilter::new(h0, list("alpha")?, list("beta")?)?))
        }
        (true, true) => Err(Error::Format("filter file mixes `h` with `h0`/`alpha`/`beta`".into())),
        (false, false) => Err(Error::Format("filter file has neither `h` nor `h0`".into())),
    }
}

pub fn read_filter(path: &Path) -> Result<Filter> {
    parse_filter(&fs::read_to_string(path)?)
}

pub fn filter_to_json(filter: &Filter) -> Result<String> {
    let v = match filter {
        Filter::Fir(f) => serde_json::json!({ "h": f.coeffs() }),
        Filter::Sv(f) => serde_json::json!({ "h0": f.h0(), "alpha": f.alpha(), "beta": f.beta() }),
    };
    Ok(serde_json::to_string_pretty(&v)?)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum IndexTargets {
    List(Vec<f64>),
    Map(BTreeMap<String, f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexSpecFile {
    targets: IndexTargets,
    default: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelSpecFile {
    gradient: Option<f64>,
    curl: Option<f64>,
    harmonic: Option<f64>,
}

/// Parses a design spec against a spectrum. Two forms are accepted:
///
/// * by label, `{"gradient": 1.0, "curl": 0.0, "harmonic": 0.0}` (missing
///   labels target 0);
/// * by eigenvalue index, `{"targets": [g0, g1, ...]}` with one entry per
///   eigenvalue, or `{"targets": {"3": 1.0, ...}, "default": 0.0}`.
pub fn parse_design_spec(json: &str, spectrum: &Spectrum) -> Result<DesignSpec> {
    let value: Value = serde_json::from_str(json)?;
    if value.get("targets").is_some() {
        let file: IndexSpecFile = serde_json::from_value(value)?;
        let targets = match file.targets {
            IndexTargets::List(list) => list,
            IndexTargets::Map(map) => {
                let mut out = vec![None; spectrum.len()];
                for (key, target) in map {
                    let i: usize = key
                        .parse()
                        .map_err(|_| Error::InvalidSpec(format!("`{key}` is not an eigenvalue index")))?;
                    let slot = out.get_mut(i).ok_or(Error::IndexOutOfRange {
                        index: i,
                        len: spectrum.len(),
                    })?;
                    *slot = Some(target);
                }
                out.into_iter()
                    .enumerate()
                    .map(|(i, t)| {
                        t.or(file.default)
                            .ok_or_else(|| Error::InvalidSpec(format!("no target for eigenvalue {i} and no default")))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        DesignSpec::new(spectrum, targets)
    } else {
        let file: LabelSpecFile = serde_json::from_value(value)?;
        DesignSpec::by_kind(
            spectrum,
            file.gradient.unwrap_or(0.0),
            file.curl.unwrap_or(0.0),
            file.harmonic.unwrap_or(0.0),
        )
    }
}

/// Reads training pairs from a directory of `<name>_in.csv` /
/// `<name>_out.csv` files, sorted by name.
pub fn read_pairs_dir(complex: &SimplicialComplex, dir: &Path) -> Result<Vec<FlowPair>> {
    let mut inputs: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut outputs: BTreeMap<String, PathBuf> = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some(stem) = name.strip_suffix("_in.csv") {
            inputs.insert(stem.to_owned(), path.clone());
        } else if let Some(stem) = name.strip_suffix("_out.csv") {
            outputs.insert(stem.to_owned(), path.clone());
        }
    }
    for stem in inputs.keys().chain(outputs.keys()) {
        if !(inputs.contains_key(stem) && outputs.contains_key(stem)) {
            return Err(Error::Format(format!("pair `{stem}` lacks its _in.csv or _out.csv half")));
        }
    }
    if inputs.is_empty() {
        return Err(Error::EmptyData);
    }
    inputs
        .iter()
        .map(|(stem, input)| {
            Ok(FlowPair::new(
                read_flow_file(complex, input)?,
                read_flow_file(complex, &outputs[stem])?,
            ))
        })
        .collect()
}

/// `index,eigenvalue,label` table.
pub fn write_spectrum<W: Write>(spectrum: &Spectrum, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "eigenvalue", "label"])?;
    for (i, (value, label)) in spectrum.eigenvalues().iter().zip(spectrum.labels()).enumerate() {
        w.write_record([i.to_string(), format_float(*value), label.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Eigenvectors as a dense matrix: one row per edge, one column per
/// eigenvalue index.
pub fn write_eigenvectors<W: Write>(complex: &SimplicialComplex, spectrum: &Spectrum, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["u".to_string(), "v".to_string()];
    header.extend((0..spectrum.len()).map(|i| format!("u{i}")));
    w.write_record(&header)?;
    let vectors = spectrum.eigenvectors();
    for k in 0..complex.num_edges() {
        let (u, v) = complex.edge_labels(k);
        let mut record = vec![u.to_string(), v.to_string()];
        record.extend(vectors.row(k).iter().map(|x| format_float(*x)));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// `eigenvalue,label,response` table.
pub fn write_response<W: Write>(spectrum: &Spectrum, response: &FrequencyResponse, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["eigenvalue", "label", "response"])?;
    for ((value, label), r) in spectrum.eigenvalues().iter().zip(spectrum.labels()).zip(&response.values) {
        w.write_record([format_float(*value), label.to_string(), format_float(*r)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> SimplicialComplex {
        parse_complex(include_str!("../data/toy_complex.json")).unwrap()
    }

    #[test]
    fn complex_round_trip() {
        let c = toy();
        let json = complex_to_json(&c, None).unwrap();
        let back = parse_complex(&json).unwrap();
        assert_eq!(back.edges(), c.edges());
        assert_eq!(back.triangles(), c.triangles());
    }

    #[test]
    fn unknown_complex_field_is_rejected() {
        assert!(parse_complex(r#"{"nodes":[1,2],"edges":[[1,2]],"faces":[]}"#).is_err());
    }

    #[test]
    fn flow_reversed_rows_are_negated_and_missing_are_zero() {
        let c = toy();
        let f = read_flow(&c, "u,v,value\n2,1,1.5\n5,6,-2\n".as_bytes()).unwrap();
        assert_eq!(f[c.edge_index(0, 1).unwrap()], -1.5);
        assert_eq!(f[c.edge_index(4, 5).unwrap()], -2.0);
        assert_eq!(f.iter().filter(|v| **v == 0.0).count(), 8);
    }

    #[test]
    fn flow_errors() {
        let c = toy();
        assert!(matches!(read_flow(&c, "u,v,value\n1,7,1\n".as_bytes()), Err(Error::UnknownEdge(..))));
        assert!(matches!(read_flow(&c, "u,v,value\n1,9,1\n".as_bytes()), Err(Error::UnknownNode(_))));
        assert!(matches!(
            read_flow(&c, "u,v,value\n1,2,1\n2,1,1\n".as_bytes()),
            Err(Error::DuplicateEntry(..))
        ));
        assert!(read_flow(&c, "u,v,value\n1,2,abc\n".as_bytes()).is_err());
    }

    #[test]
    fn flow_round_trip() {
        let c = toy();
        let f = EdgeFlow::new((0..10).map(|i| i as f64 * 0.1 - 0.35).collect());
        let mut buf = Vec::new();
        write_flow(&c, &f, &mut buf).unwrap();
        assert_eq!(read_flow(&c, buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn filter_families_by_field_presence() {
        assert!(matches!(parse_filter(r#"{"h":[1,0.5]}"#).unwrap(), Filter::Fir(_)));
        match parse_filter(r#"{"h0":0.5,"alpha":[1]}"#).unwrap() {
            Filter::Sv(f) => {
                assert_eq!(f.alpha(), &[1.0]);
                assert!(f.beta().is_empty());
            }
            _ => panic!("expected subspace-varying filter"),
        }
        assert!(parse_filter(r#"{"h":[1],"h0":1}"#).is_err());
        assert!(parse_filter(r#"{"alpha":[1]}"#).is_err());
        assert!(parse_filter(r#"{}"#).is_err());
        assert!(parse_filter(r#"{"h":[1],"gain":2}"#).is_err());
    }

    #[test]
    fn filter_json_round_trip() {
        let f: Filter = SvFilter::new(0.25, vec![1.0, -0.5], vec![2.0]).unwrap().into();
        assert_eq!(parse_filter(&filter_to_json(&f).unwrap()).unwrap(), f);
    }
}
