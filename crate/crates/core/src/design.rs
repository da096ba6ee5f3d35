//! Least-squares filter design.
//!
//! Frequency-domain design fits the filter response to per-eigenvalue targets
//! through a Vandermonde system. Repeated eigenvalues are collapsed into one
//! row each (targets averaged), unless [`DesignOptions::weight_by_multiplicity`]
//! asks for one row per eigenpair. Data-driven fitting stacks shifted copies of
//! training inputs and regresses the outputs on them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::{EdgeFlow, HodgeLaplacians};
use crate::error::{Error, Result};
use crate::filtering::{FirFilter, SvFilter};
use crate::lstsq;
use crate::sparse::CsrMatrix;
use crate::spectral::{FrequencyKind, Spectrum};
use crate::vecops;

/// Relative gap under which eigenvalues are merged into one design node.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Targets closer than this are considered equal when merging a group.
const TARGET_AGREEMENT: f64 = 1e-12;

/// Desired response per eigenpair of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    targets: Vec<f64>,
}

impl DesignSpec {
    pub fn new(spectrum: &Spectrum, targets: Vec<f64>) -> Result<Self> {
        if targets.len() != spectrum.len() {
            return Err(Error::InvalidSpec(format!(
                "{} targets for {} eigenvalues",
                targets.len(),
                spectrum.len()
            )));
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSpec("non-finite target".into()));
        }
        Ok(Self { targets })
    }

    /// One target per frequency kind.
    pub fn by_kind(spectrum: &Spectrum, gradient: f64, curl: f64, harmonic: f64) -> Result<Self> {
        let targets = spectrum
            .labels()
            .iter()
            .map(|k| match k {
                FrequencyKind::Gradient => gradient,
                FrequencyKind::Curl => curl,
                FrequencyKind::Harmonic => harmonic,
            })
            .collect();
        Self::new(spectrum, targets)
    }

    /// Response 1 on one Hodge subspace and 0 on the other two.
    pub fn preserve(spectrum: &Spectrum, kind: FrequencyKind) -> Self {
        let targets = spectrum.labels().iter().map(|&k| if k == kind { 1.0 } else { 0.0 }).collect();
        Self { targets }
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Distinct-eigenvalue groups (consecutive eigenvalues within
    /// `cluster_tol * max(lambda_max, 1)`) with their averaged targets.
    pub fn groups(&self, spectrum: &Spectrum, cluster_tol: f64) -> Vec<DesignGroup> {
        let all: Vec<usize> = (0..spectrum.len()).collect();
        group_indices(spectrum, &self.targets, &all, cluster_tol)
    }
}

/// A set of numerically equal eigenvalues treated as one design node.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignGroup {
    pub eigenvalue: f64,
    pub members: Vec<usize>,
    pub target: f64,
    /// True when the members asked for different responses.
    pub conflict: bool,
}

fn group_indices(spectrum: &Spectrum, targets: &[f64], indices: &[usize], cluster_tol: f64) -> Vec<DesignGroup> {
    let values = spectrum.eigenvalues();
    let lambda_max = values.iter().copied().fold(0.0, f64::max);
    let gap = cluster_tol * lambda_max.max(1.0);

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in indices {
        match groups.last_mut() {
            Some(g) if values[i] - values[*g.last().unwrap()] <= gap => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|members| {
            let n = members.len() as f64;
            let eigenvalue = members.iter().map(|&i| values[i]).sum::<f64>() / n;
            let target = members.iter().map(|&i| targets[i]).sum::<f64>() / n;
            let conflict = members.iter().any(|&i| (targets[i] - target).abs() > TARGET_AGREEMENT);
            DesignGroup {
                eigenvalue,
                members,
                target,
                conflict,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct DesignOptions {
    /// One Vandermonde row per eigenpair instead of per distinct eigenvalue.
    pub weight_by_multiplicity: bool,
    pub cluster_tol: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            weight_by_multiplicity: false,
            cluster_tol: DEFAULT_CLUSTER_TOL,
        }
    }
}

/// Conditions worth surfacing from a design or fit; the returned filter is
/// still the least-squares (minimum-norm) solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignWarning {
    /// Eigenpairs sharing one eigenvalue carried different targets; a
    /// polynomial in `L1` cannot honor both, so the mean was used.
    ConflictingTargets {
        eigenvalue: f64,
        targets: Vec<f64>,
        kinds: Vec<FrequencyKind>,
    },
    /// The Vandermonde system has numerical rank below its smaller dimension.
    SingularDesign { rank: usize, columns: usize },
    /// The stacked data matrix has rank below the number of coefficients.
    RankDeficientData { rank: usize, columns: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub coefficients: Vec<f64>,
    /// `||A x - b||`, recomputed from the assembled system after the solve.
    pub residual: f64,
    /// Singular value ratio of the column-equilibrated system.
    pub condition: f64,
    pub rank: usize,
    pub rows: usize,
    pub columns: usize,
    pub warnings: Vec<DesignWarning>,
}

/// One row of a frequency-domain design system.
struct DesignRow {
    eigenvalue: f64,
    kind: FrequencyKind,
    target: f64,
}

fn conflict_warning(spectrum: &Spectrum, spec: &DesignSpec, group: &DesignGroup) -> DesignWarning {
    DesignWarning::ConflictingTargets {
        eigenvalue: group.eigenvalue,
        targets: group.members.iter().map(|&i| spec.targets[i]).collect(),
        kinds: group.members.iter().map(|&i| spectrum.labels()[i]).collect(),
    }
}

fn solve_report(a: DMatrix<f64>, b: &[f64], mut warnings: Vec<DesignWarning>, data_driven: bool) -> Result<DesignReport> {
    let (rows, columns) = a.shape();
    let ls = lstsq::solve(&a, b)?;
    let fitted = &a * nalgebra::DVector::from_column_slice(&ls.solution);
    let residual = vecops::norm(&vecops::axpby(1.0, fitted.as_slice(), -1.0, b));
    if data_driven {
        if ls.rank < columns {
            warnings.push(DesignWarning::RankDeficientData { rank: ls.rank, columns });
        }
    } else if ls.rank < rows.min(columns) {
        warnings.push(DesignWarning::SingularDesign { rank: ls.rank, columns });
    }
    for w in &warnings {
        log::debug!("{w:?}");
    }
    Ok(DesignReport {
        coefficients: ls.solution,
        residual,
        condition: ls.condition,
        rank: ls.rank,
        rows,
        columns,
        warnings,
    })
}

/// Least-squares FIR design: `min_h ||Phi h - g||` with `Phi[i][j] = lambda_i^j`
/// over the distinct eigenvalues.
pub fn design_fir(spectrum: &Spectrum, spec: &DesignSpec, length: usize, opts: DesignOptions) -> Result<(FirFilter, DesignReport)> {
    if length == 0 {
        return Err(Error::InvalidArgument("filter length must be at least 1".into()));
    }
    if spec.targets.len() != spectrum.len() {
        return Err(Error::InvalidSpec("spec does not match spectrum".into()));
    }
    let mut warnings = Vec::new();
    let rows: Vec<DesignRow> = if opts.weight_by_multiplicity {
        (0..spectrum.len())
            .map(|i| DesignRow {
                eigenvalue: spectrum.eigenvalues()[i],
                kind: spectrum.labels()[i],
                target: spec.targets[i],
            })
            .collect()
    } else {
        spec.groups(spectrum, opts.cluster_tol)
            .into_iter()
            .map(|g| {
                if g.conflict {
                    warnings.push(conflict_warning(spectrum, spec, &g));
                }
                DesignRow {
                    eigenvalue: g.eigenvalue,
                    kind: spectrum.labels()[g.members[0]],
                    target: g.target,
                }
            })
            .collect()
    };

    let a = DMatrix::from_fn(rows.len(), length, |i, j| rows[i].eigenvalue.powi(j as i32));
    let b: Vec<f64> = rows.iter().map(|r| r.target).collect();
    let report = solve_report(a, &b, warnings, false)?;
    Ok((FirFilter::new(report.coefficients.clone())?, report))
}

/// Least-squares subspace-varying design: an all-ones column for `h0`,
/// gradient powers `1..=l1` on gradient rows and curl powers `1..=l2` on curl
/// rows, with a single harmonic row when the harmonic space is nontrivial.
pub fn design_sv(
    spectrum: &Spectrum,
    spec: &DesignSpec,
    l1: usize,
    l2: usize,
    opts: DesignOptions,
) -> Result<(SvFilter, DesignReport)> {
    if spec.targets.len() != spectrum.len() {
        return Err(Error::InvalidSpec("spec does not match spectrum".into()));
    }
    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for kind in FrequencyKind::ALL {
        let members = spectrum.indices(kind);
        if members.is_empty() {
            continue;
        }
        if opts.weight_by_multiplicity {
            rows.extend(members.iter().map(|&i| DesignRow {
                eigenvalue: spectrum.eigenvalues()[i],
                kind,
                target: spec.targets[i],
            }));
            continue;
        }
        let groups = if kind == FrequencyKind::Harmonic {
            // every harmonic frequency is zero; one row regardless of multiplicity
            vec![group_all(spectrum, spec, &members)]
        } else {
            group_indices(spectrum, &spec.targets, &members, opts.cluster_tol)
        };
        for g in groups {
            if g.conflict {
                warnings.push(conflict_warning(spectrum, spec, &g));
            }
            rows.push(DesignRow {
                eigenvalue: if kind == FrequencyKind::Harmonic { 0.0 } else { g.eigenvalue },
                kind,
                target: g.target,
            });
        }
    }

    let columns = 1 + l1 + l2;
    let a = DMatrix::from_fn(rows.len(), columns, |i, j| {
        let row = &rows[i];
        match (j, row.kind) {
            (0, _) => 1.0,
            (j, FrequencyKind::Gradient) if j <= l1 => row.eigenvalue.powi(j as i32),
            (j, FrequencyKind::Curl) if j > l1 => row.eigenvalue.powi((j - l1) as i32),
            _ => 0.0,
        }
    });
    let b: Vec<f64> = rows.iter().map(|r| r.target).collect();
    let report = solve_report(a, &b, warnings, false)?;
    let c = &report.coefficients;
    let filter = SvFilter::new(c[0], c[1..1 + l1].to_vec(), c[1 + l1..].to_vec())?;
    Ok((filter, report))
}

fn group_all(spectrum: &Spectrum, spec: &DesignSpec, members: &[usize]) -> DesignGroup {
    let n = members.len() as f64;
    let target = members.iter().map(|&i| spec.targets[i]).sum::<f64>() / n;
    DesignGroup {
        eigenvalue: members.iter().map(|&i| spectrum.eigenvalues()[i]).sum::<f64>() / n,
        members: members.to_vec(),
        target,
        conflict: members.iter().any(|&i| (spec.targets[i] - target).abs() > TARGET_AGREEMENT),
    }
}

/// A training example: filter input and the output it should produce.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPair {
    pub input: EdgeFlow,
    pub output: EdgeFlow,
}

impl FlowPair {
    pub fn new(input: EdgeFlow, output: EdgeFlow) -> Self {
        Self { input, output }
    }
}

/// Shifted copies `S^1 f, ..., S^count f`.
fn powers(shift: &CsrMatrix<f64>, f: &[f64], count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut cur = f.to_vec();
    for _ in 0..count {
        cur = shift.mul_vec(&cur);
        out.push(cur.clone());
    }
    out
}

fn stack_and_solve(pairs: &[FlowPair], n: usize, columns: usize, build: impl Fn(&[f64]) -> Vec<Vec<f64>>) -> Result<DesignReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut a = DMatrix::zeros(pairs.len() * n, columns);
    let mut b = Vec::with_capacity(pairs.len() * n);
    for (p, pair) in pairs.iter().enumerate() {
        pair.input.check_len(n)?;
        pair.output.check_len(n)?;
        for (j, col) in build(&pair.input).iter().enumerate() {
            a.view_mut((p * n, j), (n, 1)).copy_from_slice(col);
        }
        b.extend_from_slice(&pair.output);
    }
    solve_report(a, &b, Vec::new(), true)
}

/// Fits FIR coefficients to input/output pairs: each pair contributes the
/// block `[f, L1 f, ..., L1^{L-1} f]`, blocks are stacked vertically and the
/// outputs regressed on them.
pub fn fit_fir_from_data(lap: &HodgeLaplacians, pairs: &[FlowPair], length: usize) -> Result<(FirFilter, DesignReport)> {
    if length == 0 {
        return Err(Error::InvalidArgument("filter length must be at least 1".into()));
    }
    let report = stack_and_solve(pairs, lap.dim(), length, |f| {
        let mut cols = vec![f.to_vec()];
        cols.extend(powers(&lap.l1, f, length - 1));
        cols
    })?;
    Ok((FirFilter::new(report.coefficients.clone())?, report))
}

/// Subspace-varying analogue of [`fit_fir_from_data`] with columns
/// `[f | L1_lower f .. L1_lower^{l1} f | L1_upper f .. L1_upper^{l2} f]`.
pub fn fit_sv_from_data(lap: &HodgeLaplacians, pairs: &[FlowPair], l1: usize, l2: usize) -> Result<(SvFilter, DesignReport)> {
    let report = stack_and_solve(pairs, lap.dim(), 1 + l1 + l2, |f| {
        let mut cols = vec![f.to_vec()];
        cols.extend(powers(&lap.l1_lower, f, l1));
        cols.extend(powers(&lap.l1_upper, f, l2));
        cols
    })?;
    let c = &report.coefficients;
    let filter = SvFilter::new(c[0], c[1..1 + l1].to_vec(), c[1 + l1..].to_vec())?;
    Ok((filter, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{HodgeSystem, SimplicialComplex};

    fn triangle() -> (HodgeSystem, Spectrum) {
        let c = SimplicialComplex::from_indices(3, &[[0, 1], [1, 2], [0, 2]], &[[0, 1, 2]]).unwrap();
        let sys = HodgeSystem::new(c);
        let s = Spectrum::new(&sys).unwrap();
        (sys, s)
    }

    #[test]
    fn spec_length_is_validated() {
        let (_, s) = triangle();
        assert!(DesignSpec::new(&s, vec![1.0]).is_err());
        assert!(DesignSpec::new(&s, vec![1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn coincident_gradient_and_curl_targets_conflict() {
        // all three eigenvalues equal 3: one design node, conflicting targets
        let (_, s) = triangle();
        let spec = DesignSpec::preserve(&s, FrequencyKind::Gradient);
        let (fir, report) = design_fir(&s, &spec, 2, DesignOptions::default()).unwrap();
        assert_eq!(report.rows, 1);
        assert!(matches!(report.warnings[0], DesignWarning::ConflictingTargets { .. }));
        assert!((fir.eval(3.0) - 2.0 / 3.0).abs() < 1e-12);

        // the subspace-varying filter separates them
        let (sv, report) = design_sv(&s, &spec, 1, 1, DesignOptions::default()).unwrap();
        assert!(report.warnings.iter().all(|w| !matches!(w, DesignWarning::ConflictingTargets { .. })));
        assert!(report.residual < 1e-12);
        assert!((sv.eval(3.0, FrequencyKind::Gradient) - 1.0).abs() < 1e-12);
        assert!(sv.eval(3.0, FrequencyKind::Curl).abs() < 1e-12);
    }

    #[test]
    fn weight_by_multiplicity_keeps_every_row() {
        let (_, s) = triangle();
        let spec = DesignSpec::by_kind(&s, 1.0, 1.0, 1.0).unwrap();
        let opts = DesignOptions {
            weight_by_multiplicity: true,
            ..Default::default()
        };
        let (_, report) = design_fir(&s, &spec, 1, opts).unwrap();
        assert_eq!(report.rows, 3);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn zero_length_is_rejected() {
        let (sys, s) = triangle();
        let spec = DesignSpec::preserve(&s, FrequencyKind::Curl);
        assert!(design_fir(&s, &spec, 0, DesignOptions::default()).is_err());
        assert!(fit_fir_from_data(&sys.laplacians, &[], 1).is_err());
        assert!(matches!(fit_sv_from_data(&sys.laplacians, &[], 0, 0), Err(Error::EmptyData)));
    }

    #[test]
    fn single_identity_pair_is_rank_deficient() {
        let (sys, _) = triangle();
        // f = (1, 1, -1) is the curl direction: L1 f = 3 f, columns are parallel
        let f = EdgeFlow::new(vec![1.0, -1.0, 1.0]);
        let (fir, report) = fit_fir_from_data(&sys.laplacians, &[FlowPair::new(f.clone(), f.clone())], 3).unwrap();
        assert!(report.residual < 1e-12);
        assert!(matches!(report.warnings[0], DesignWarning::RankDeficientData { rank: 1, columns: 3 }));
        assert!((fir.eval(3.0) - 1.0).abs() < 1e-10);
    }
}
