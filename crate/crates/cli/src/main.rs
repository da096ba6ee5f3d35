//! `hodgefir`: build simplicial complexes, inspect their Hodge spectra, and
//! design, fit and apply edge-flow filters.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hodgefir::design::{design_fir, design_sv, fit_fir_from_data, fit_sv_from_data, DesignOptions, DesignReport};
use hodgefir::experiments::{
    bundled_complex_json, extraction_report, run_denoising, run_prediction, DenoisingConfig, ErrorAggregate,
    ExperimentReport, ExtractionConfig, PredictionConfig,
};
use hodgefir::io;
use hodgefir::spectral::SpectralOptions;
use hodgefir::{Filter, HodgeSystem, SimplicialComplex, Spectrum};

use output::{check_paths, emit, emit_str, ensure_dir};

#[derive(Debug, Parser)]
#[command(name = "hodgefir", version, about = "Linear filters for edge flows on simplicial complexes")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Harmonic threshold, relative to the largest L1 eigenvalue.
    #[arg(long, global = true, value_parser = unit_interval)]
    tol_zero: Option<f64>,

    /// Format of tabular output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Fir,
    Sv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AggregateArg {
    Concatenated,
    PerStepMean,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ComplexSource {
    /// Complex JSON file.
    #[arg(long)]
    complex: Option<PathBuf>,

    /// One of the bundled complexes: `toy` or `sioux-falls`.
    #[arg(long)]
    bundled: Option<String>,
}

#[derive(Debug, Args)]
struct Lengths {
    /// FIR filter length.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
    length: Option<u64>,

    /// Number of lower (gradient) coefficients of a subspace-varying filter.
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=64))]
    l1: Option<u64>,

    /// Number of upper (curl) coefficients of a subspace-varying filter.
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=64))]
    l2: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a complex and print it in canonical form.
    Build {
        #[command(flatten)]
        source: ComplexSource,
        /// Output JSON (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// List the 3-cliques of the edge graph, or emit the complex with all of them filled.
    FillTriangles {
        #[command(flatten)]
        source: ComplexSource,
        /// Emit the complex JSON with every 3-clique added as a triangle.
        #[arg(long)]
        emit_complex: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Eigenvalues of L1 with gradient, curl or harmonic labels.
    Spectrum {
        #[command(flatten)]
        source: ComplexSource,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the eigenvectors as a dense CSV matrix.
        #[arg(long)]
        eigenvectors: Option<PathBuf>,
    },

    /// Least-squares design from a target frequency response.
    Design {
        #[command(flatten)]
        source: ComplexSource,
        /// Target JSON: per-label (`{"gradient": 1.0}`) or per-index (`{"targets": [...]}`).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[command(flatten)]
        lengths: Lengths,
        /// One design row per eigenpair instead of per distinct eigenvalue.
        #[arg(long)]
        weight_by_multiplicity: bool,
        /// Filter JSON (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Design report JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },

    /// Least-squares fit from input/output flow pairs.
    Fit {
        #[command(flatten)]
        source: ComplexSource,
        /// Directory of `<name>_in.csv` / `<name>_out.csv` pairs.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[command(flatten)]
        lengths: Lengths,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },

    /// Filter an edge flow.
    Apply {
        #[command(flatten)]
        source: ComplexSource,
        #[arg(long)]
        filter: PathBuf,
        /// Flow CSV with `u,v,value` rows.
        #[arg(long)]
        flow: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Frequency response of a filter at every eigenvalue.
    Response {
        #[command(flatten)]
        source: ComplexSource,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run one of the bundled experiments.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Debug, Args)]
struct ExperimentOut {
    #[command(flatten)]
    source: ComplexSource,
    /// Output directory for report.csv, report.json and curve_*.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Extract each Hodge component with both filter families.
    Extract {
        #[command(flatten)]
        target: ExperimentOut,
        /// Total filter lengths to sweep.
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..=64))]
        lengths: Option<Vec<u64>>,
        #[arg(long)]
        weight_by_multiplicity: bool,
    },

    /// Denoise a gradient flow under Gaussian noise.
    Denoise {
        #[command(flatten)]
        target: ExperimentOut,
        /// Noise level; calibrated from --target-error when omitted.
        #[arg(long, value_parser = positive)]
        sigma: Option<f64>,
        /// Mean input NRMSE used to calibrate the noise level.
        #[arg(long, value_parser = positive, default_value_t = 0.46)]
        target_error: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1_000_000), default_value_t = 100)]
        trials: u64,
        /// Regularization weight of the Laplacian baselines.
        #[arg(long, value_parser = non_negative, default_value_t = 0.5)]
        mu: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64), default_value_t = 4)]
        fir_length: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(0..=64), default_value_t = 1)]
        sv_l1: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(0..=64), default_value_t = 1)]
        sv_l2: u64,
        #[arg(long)]
        weight_by_multiplicity: bool,
    },

    /// Identify an autoregressive flow model from data and predict one step ahead.
    Predict {
        #[command(flatten)]
        target: ExperimentOut,
        /// Number of consecutive seeds, starting at --seed.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10_000), default_value_t = 1)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..=64))]
        lengths: Option<Vec<u64>>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000), default_value_t = 20)]
        train_pairs: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000), default_value_t = 80)]
        test_len: u64,
        #[arg(long, value_enum, default_value_t = AggregateArg::Concatenated)]
        aggregate: AggregateArg,
    },
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a finite positive number, got {s}"))
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a finite non-negative number, got {s}"))
    }
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    let x = positive(s)?;
    if x < 1.0 {
        Ok(x)
    } else {
        Err(format!("expected a number in (0, 1), got {s}"))
    }
}

struct Globals {
    tol_zero: Option<f64>,
    format: Format,
    seed: u64,
}

impl Globals {
    fn spectrum(&self, system: &HodgeSystem) -> Result<Spectrum> {
        let mut opts = SpectralOptions::default();
        if let Some(t) = self.tol_zero {
            opts.tol_zero = t;
        }
        Ok(Spectrum::with_options(system, opts)?)
    }
}

impl ComplexSource {
    fn input(&self) -> Option<&Path> {
        self.complex.as_deref()
    }

    fn load(&self) -> Result<SimplicialComplex> {
        if let Some(path) = &self.complex {
            return io::read_complex(path).with_context(|| format!("reading {}", path.display()));
        }
        let name = self.bundled.as_deref().unwrap_or_default();
        let json = bundled_complex_json(name)
            .ok_or_else(|| hodgefir::Error::InvalidArgument(format!("no bundled complex named {name:?}")))?;
        Ok(io::parse_complex(json)?)
    }
}

impl Lengths {
    fn fir(&self) -> Result<usize> {
        if self.l1.is_some() || self.l2.is_some() {
            return Err(hodgefir::Error::InvalidArgument("--l1/--l2 apply to the sv family; use --length".into()).into());
        }
        let l = self.length.ok_or_else(|| hodgefir::Error::InvalidArgument("--length is required for fir".into()))?;
        Ok(l as usize)
    }

    fn sv(&self) -> Result<(usize, usize)> {
        if self.length.is_some() {
            return Err(hodgefir::Error::InvalidArgument("--length applies to the fir family; use --l1/--l2".into()).into());
        }
        Ok((self.l1.unwrap_or(0) as usize, self.l2.unwrap_or(0) as usize))
    }
}

fn outputs(paths: &[&Option<PathBuf>]) -> Vec<PathBuf> {
    paths.iter().filter_map(|p| (*p).clone()).collect()
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Globals {
        tol_zero: cli.tol_zero,
        format: cli.format,
        seed: cli.seed,
    };
    match cli.command {
        Command::Build { source, out } => {
            let outs = outputs(&[&out]);
            check(&source, &[], &outs)?;
            let complex = source.load()?;
            log::info!(
                "{} nodes, {} edges, {} triangles",
                complex.num_nodes(),
                complex.num_edges(),
                complex.num_triangles()
            );
            emit_str(out.as_deref(), &io::complex_to_json(&complex, None)?)
        }
        Command::FillTriangles { source, emit_complex, out } => {
            let outs = outputs(&[&out]);
            check(&source, &[], &outs)?;
            let complex = source.load()?;
            let cliques = complex.three_cliques();
            if emit_complex {
                let missing: Vec<[usize; 3]> =
                    cliques.into_iter().filter(|t| !complex.triangles().contains(t)).collect();
                let filled = complex.with_triangles(&missing)?;
                return emit_str(out.as_deref(), &io::complex_to_json(&filled, None)?);
            }
            let label = |i: usize| complex.nodes()[i].to_string();
            let rows: Vec<[String; 3]> = cliques.iter().map(|t| t.map(label)).collect();
            let filled: Vec<bool> = cliques.iter().map(|t| complex.triangles().contains(t)).collect();
            emit(out.as_deref(), |w| match ctx.format {
                Format::Csv => {
                    let mut csv = csv_writer(w);
                    csv.write_record(["u", "v", "w", "filled"])?;
                    for (r, f) in rows.iter().zip(&filled) {
                        csv.write_record([r[0].as_str(), r[1].as_str(), r[2].as_str(), if *f { "true" } else { "false" }])?;
                    }
                    csv.flush()?;
                    Ok(())
                }
                Format::Json => {
                    let v: Vec<_> = rows.iter().zip(&filled).map(|(r, f)| json!({"nodes": r, "filled": f})).collect();
                    write_json(w, &v)
                }
            })
        }
        Command::Spectrum { source, out, eigenvectors } => {
            let outs = outputs(&[&out, &eigenvectors]);
            check(&source, &[], &outs)?;
            let complex = source.load()?;
            let system = HodgeSystem::new(complex);
            let spectrum = ctx.spectrum(&system)?;
            emit(out.as_deref(), |w| match ctx.format {
                Format::Csv => Ok(io::write_spectrum(&spectrum, w)?),
                Format::Json => {
                    let v: Vec<_> = spectrum
                        .eigenvalues()
                        .iter()
                        .zip(spectrum.labels())
                        .enumerate()
                        .map(|(i, (l, k))| json!({"index": i, "eigenvalue": l, "label": k.to_string()}))
                        .collect();
                    write_json(w, &v)
                }
            })?;
            if let Some(path) = &eigenvectors {
                emit(Some(path), |w| Ok(io::write_eigenvectors(&system.complex, &spectrum, w)?))?;
            }
            Ok(())
        }
        Command::Design {
            source,
            spec,
            family,
            lengths,
            weight_by_multiplicity,
            out,
            report,
        } => {
            let outs = outputs(&[&out, &report]);
            check(&source, &[&spec], &outs)?;
            let spec_json = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let system = HodgeSystem::new(source.load()?);
            let spectrum = ctx.spectrum(&system)?;
            let design_spec = io::parse_design_spec(&spec_json, &spectrum)?;
            let opts = DesignOptions {
                weight_by_multiplicity,
                ..Default::default()
            };
            let (filter, rep): (Filter, DesignReport) = match family {
                FamilyArg::Fir => {
                    let (f, r) = design_fir(&spectrum, &design_spec, lengths.fir()?, opts)?;
                    (f.into(), r)
                }
                FamilyArg::Sv => {
                    let (l1, l2) = lengths.sv()?;
                    let (f, r) = design_sv(&spectrum, &design_spec, l1, l2, opts)?;
                    (f.into(), r)
                }
            };
            finish_design(&filter, &rep, out.as_deref(), report.as_deref())
        }
        Command::Fit {
            source,
            pairs,
            family,
            lengths,
            out,
            report,
        } => {
            let outs = outputs(&[&out, &report]);
            check(&source, &[&pairs], &outs)?;
            let system = HodgeSystem::new(source.load()?);
            let data = io::read_pairs_dir(&system.complex, &pairs)?;
            let (filter, rep): (Filter, DesignReport) = match family {
                FamilyArg::Fir => {
                    let (f, r) = fit_fir_from_data(&system.laplacians, &data, lengths.fir()?)?;
                    (f.into(), r)
                }
                FamilyArg::Sv => {
                    let (l1, l2) = lengths.sv()?;
                    let (f, r) = fit_sv_from_data(&system.laplacians, &data, l1, l2)?;
                    (f.into(), r)
                }
            };
            finish_design(&filter, &rep, out.as_deref(), report.as_deref())
        }
        Command::Apply { source, filter, flow, out } => {
            let outs = outputs(&[&out]);
            check(&source, &[&filter, &flow], &outs)?;
            let system = HodgeSystem::new(source.load()?);
            let filter = io::read_filter(&filter)?;
            let input = io::read_flow_file(&system.complex, &flow)?;
            let result = filter.apply(&system.laplacians, &input)?;
            emit(out.as_deref(), |w| match ctx.format {
                Format::Csv => Ok(io::write_flow(&system.complex, &result, w)?),
                Format::Json => {
                    let v: Vec<_> = result
                        .values()
                        .iter()
                        .enumerate()
                        .map(|(k, x)| {
                            let (u, v) = system.complex.edge_labels(k);
                            json!({"u": u.to_string(), "v": v.to_string(), "value": x})
                        })
                        .collect();
                    write_json(w, &v)
                }
            })
        }
        Command::Response { source, filter, out } => {
            let outs = outputs(&[&out]);
            check(&source, &[&filter], &outs)?;
            let system = HodgeSystem::new(source.load()?);
            let filter = io::read_filter(&filter)?;
            let spectrum = ctx.spectrum(&system)?;
            let response = filter.response(&spectrum);
            emit(out.as_deref(), |w| match ctx.format {
                Format::Csv => Ok(io::write_response(&spectrum, &response, w)?),
                Format::Json => {
                    let v: Vec<_> = spectrum
                        .eigenvalues()
                        .iter()
                        .zip(spectrum.labels())
                        .zip(&response.values)
                        .map(|((l, k), r)| json!({"eigenvalue": l, "label": k.to_string(), "response": r}))
                        .collect();
                    write_json(w, &v)
                }
            })
        }
        Command::Experiment(exp) => run_experiment(&ctx, exp),
    }
}

fn check(source: &ComplexSource, inputs: &[&Path], outs: &[PathBuf]) -> Result<()> {
    let mut all: Vec<&Path> = inputs.to_vec();
    all.extend(source.input());
    let outs: Vec<&Path> = outs.iter().map(PathBuf::as_path).collect();
    check_paths(&all, &outs)
}

fn finish_design(filter: &Filter, report: &DesignReport, out: Option<&Path>, report_path: Option<&Path>) -> Result<()> {
    for w in &report.warnings {
        log::warn!("{}", serde_json::to_string(w)?);
    }
    emit_str(out, &io::filter_to_json(filter)?)?;
    if let Some(path) = report_path {
        emit_str(Some(path), &serde_json::to_string_pretty(report)?)?;
    }
    Ok(())
}

fn run_experiment(ctx: &Globals, exp: Experiment) -> Result<()> {
    let (target, report) = match exp {
        Experiment::Extract {
            target,
            lengths,
            weight_by_multiplicity,
        } => {
            check(&target.source, &[], &[])?;
            let system = HodgeSystem::new(target.source.load()?);
            let spectrum = ctx.spectrum(&system)?;
            let mut config = ExtractionConfig::default();
            if let Some(l) = lengths {
                config.lengths = l.into_iter().map(|x| x as usize).collect();
            }
            config.design.weight_by_multiplicity = weight_by_multiplicity;
            let report = extraction_report(&system, &spectrum, &config)?;
            (target, report)
        }
        Experiment::Denoise {
            target,
            sigma,
            target_error,
            trials,
            mu,
            fir_length,
            sv_l1,
            sv_l2,
            weight_by_multiplicity,
        } => {
            check(&target.source, &[], &[])?;
            let system = HodgeSystem::new(target.source.load()?);
            let spectrum = ctx.spectrum(&system)?;
            let mut config = DenoisingConfig {
                sigma,
                target_input_error: target_error,
                trials: trials as usize,
                mu,
                fir_length: fir_length as usize,
                sv_lengths: (sv_l1 as usize, sv_l2 as usize),
                seed: ctx.seed,
                ..Default::default()
            };
            config.design.weight_by_multiplicity = weight_by_multiplicity;
            let result = run_denoising(&system, &spectrum, &config)?;
            (target, result.report(&config)?)
        }
        Experiment::Predict {
            target,
            seeds,
            lengths,
            train_pairs,
            test_len,
            aggregate,
        } => {
            check(&target.source, &[], &[])?;
            let system = HodgeSystem::new(target.source.load()?);
            let mut config = PredictionConfig {
                train_pairs: train_pairs as usize,
                test_len: test_len as usize,
                seeds: (0..seeds).map(|i| ctx.seed.wrapping_add(i)).collect(),
                aggregate: match aggregate {
                    AggregateArg::Concatenated => ErrorAggregate::Concatenated,
                    AggregateArg::PerStepMean => ErrorAggregate::PerStepMean,
                },
                ..Default::default()
            };
            if let Some(l) = lengths {
                config.l_totals = l.into_iter().map(|x| x as usize).collect();
            }
            let result = run_prediction(&system, &config)?;
            (target, result.report(&config)?)
        }
    };
    write_report(&target.out, &report)
}

fn write_report(dir: &Path, report: &ExperimentReport) -> Result<()> {
    ensure_dir(dir)?;
    emit(Some(&dir.join("report.csv")), |w| Ok(report.write_csv(w)?))?;
    emit_str(Some(&dir.join("report.json")), &report.to_json()?)?;
    for (name, curve) in &report.curves {
        emit(Some(&dir.join(format!("curve_{name}.csv"))), |w| Ok(curve.write_csv(w)?))?;
    }
    Ok(())
}

fn csv_writer(w: &mut dyn std::io::Write) -> csv::Writer<&mut dyn std::io::Write> {
    csv::Writer::from_writer(w)
}

fn write_json(w: &mut dyn std::io::Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// 2 for bad input, 3 when the numerics fail.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<hodgefir::Error>()) {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code(&err);
            let kind = if code == 3 { "numerical" } else { "data" };
            let causes: Vec<String> = err.chain().map(|e| e.to_string()).collect();
            eprintln!("{}", json!({"error": kind, "message": err.to_string(), "causes": causes}));
            ExitCode::from(code)
        }
    }
}
