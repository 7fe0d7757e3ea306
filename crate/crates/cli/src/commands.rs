//! Subcommand definitions and implementations.
//!
//! Every command reads daily CSVs or manifests, runs the core routines,
//! and emits a JSON report plus a plot-ready CSV. Manifest cells are
//! processed in parallel; each output file is written atomically, and
//! fixed seeds make reruns byte-identical regardless of thread count.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use gevkit::blocks::{
    annual_maxima, annual_minima, multi_year_extremes, seasonal_stats, BlockExtremes,
    DailySeries, Season, Variable,
};
use gevkit::bootstrap::{bootstrap_fit, paired_bootstrap, BootstrapConfig, Quantity, Scheme};
use gevkit::changes::{change_report, decompose_location_shift, default_period_grid, ENVELOPE_LEVEL};
use gevkit::fit::{fit, FitMethod};
use gevkit::gev::{GevParams, Orientation, ReturnLevelQuery};
use gevkit::math::splitmix64;
use gevkit::qq::qq_pairs;
use gevkit::sensitivity::{block_size_diagnostic, segment_experiment, DIAGNOSTIC_REPLICATES};
use gevkit::synth::{generate_daily, two_state_scenario, SyntheticSpec};

use crate::ingest::{self, ManifestEntry};
use crate::report::{
    self, fmt_float, BlockDiagnosticReport, BootstrapOut, ChangeReportOut, CurvePointOut,
    FitReport, QqPairOut, QqReport, ReturnLevelsReport, SegmentExperimentReport, StateFitOut,
    SCHEMA_VERSION,
};

#[derive(Parser, Debug)]
#[command(
    name = "gevkit",
    version,
    about = "Block-extrema GEV fitting, uncertainty, and change analysis"
)]
pub struct Cli {
    /// Worker threads for manifest processing; default uses every core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    Fit(FitArgs),
    ReturnLevels(ReturnLevelsArgs),
    Change(ChangeArgs),
    Qq(QqArgs),
    BlockDiagnostic(BlockDiagnosticArgs),
    SegmentExperiment(SegmentExperimentArgs),
    Simulate(SimulateArgs),
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Fit(args) => run_fit(args),
        Command::ReturnLevels(args) => run_return_levels(args),
        Command::Change(args) => run_change(args),
        Command::Qq(args) => run_qq(args),
        Command::BlockDiagnostic(args) => run_block_diagnostic(args),
        Command::SegmentExperiment(args) => run_segment_experiment(args),
        Command::Simulate(args) => run_simulate(args),
    }
}

/// Which tail of the year to analyze: warm summer maxima or cold winter
/// minima (on July-aligned blocks).
#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
pub enum Extreme {
    Warm,
    Cold,
}

impl Extreme {
    pub fn name(self) -> &'static str {
        match self {
            Extreme::Warm => "warm",
            Extreme::Cold => "cold",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Extreme::Warm => Orientation::Maxima,
            Extreme::Cold => Orientation::Minima,
        }
    }

    pub fn season(self) -> Season {
        match self {
            Extreme::Warm => Season::Jja,
            Extreme::Cold => Season::Djf,
        }
    }

    pub fn extremes(self, series: &DailySeries<f64>) -> Result<BlockExtremes<f64>> {
        let blocks = match self {
            Extreme::Warm => annual_maxima(series)?,
            Extreme::Cold => annual_minima(series)?,
        };
        Ok(blocks)
    }
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
pub enum Method {
    Ml,
    Pwm,
}

impl Method {
    pub fn core(self) -> FitMethod {
        match self {
            Method::Ml => FitMethod::Ml,
            Method::Pwm => FitMethod::Pwm,
        }
    }
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
pub enum OrientationArg {
    Max,
    Min,
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
pub enum VariableArg {
    Tmax,
    Tmin,
}

/// Comma-separated return periods, e.g. `20,50,100`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periods(pub Vec<f64>);

impl FromStr for Periods {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let v: f64 = part
                .parse()
                .map_err(|_| format!("bad return period {part:?}"))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(format!("return period {part} must be positive"));
            }
            out.push(v);
        }
        if out.is_empty() {
            return Err("no return periods given".to_string());
        }
        Ok(Periods(out))
    }
}

/// `mu,sigma,xi` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected mu,sigma,xi, found {} fields", parts.len()));
        }
        let parse = |field: &str| -> Result<f64, String> {
            field
                .parse::<f64>()
                .map_err(|_| format!("bad number {field:?} in parameter triple"))
        };
        Ok(Triple { mu: parse(parts[0])?, sigma: parse(parts[1])?, xi: parse(parts[2])? })
    }
}

fn parse_block_boot_b(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("bad block length {s:?}"))?;
    if [1, 2, 5, 10].contains(&v) {
        Ok(v)
    } else {
        Err("bootstrap block length must be 1, 2, 5, or 10".to_string())
    }
}

fn parse_segment_length(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("bad segment length {s:?}"))?;
    if [20, 50].contains(&v) {
        Ok(v)
    } else {
        Err("segment length must be 20 or 50".to_string())
    }
}

fn bootstrap_config(n_replicates: usize, block_length_years: u32, seed: u64) -> BootstrapConfig {
    BootstrapConfig {
        n_replicates,
        block_length_years,
        seed,
        scheme: Scheme::CircularBlock,
    }
}

fn announce(paths: &[PathBuf]) {
    for path in paths {
        println!("wrote {}", path.display());
    }
}

/// Fit a GEV to one cell's annual extremes, optionally with bootstrap
/// standard errors.
#[derive(Args, Debug)]
pub struct FitArgs {
    /// Daily CSV for a single cell.
    #[arg(long, required_unless_present = "manifest", conflicts_with = "manifest")]
    pub input: Option<PathBuf>,
    /// Manifest of cells, processed in parallel.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub extreme: Extreme,
    #[arg(long, value_enum, default_value_t = Method::Ml)]
    pub method: Method,
    /// Bootstrap replicates; 0 skips the bootstrap.
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    /// Circular-block length in years for the bootstrap.
    #[arg(long = "block-boot-b", value_parser = parse_block_boot_b, default_value_t = 1)]
    pub block_boot_b: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn fit_one(series: &DailySeries<f64>, args: &FitArgs) -> Result<Vec<PathBuf>> {
    let extremes = args.extreme.extremes(series)?;
    let point = fit(&extremes, args.method.core())?;
    let bootstrap = if args.bootstrap > 0 {
        let config = bootstrap_config(args.bootstrap, args.block_boot_b, args.seed);
        let boot = bootstrap_fit(&extremes, &config, args.method.core())?;
        Some(BootstrapOut::new(&config, &boot))
    } else {
        None
    };
    let fit_out = StateFitOut::from(&point);
    let report = FitReport {
        schema_version: SCHEMA_VERSION.to_string(),
        kind: "fit".to_string(),
        cell_id: series.cell_id.clone(),
        variable: ingest::variable_name(series.variable).to_string(),
        extreme: args.extreme.name().to_string(),
        fit: fit_out,
        bootstrap,
    };
    let json_path = args.out.join(format!("{}.fit.json", series.cell_id));
    let csv_path = args.out.join(format!("{}.fit.csv", series.cell_id));
    report::write_json_atomic(&json_path, &report)?;
    let blank = String::new();
    let se = |pick: fn(&BootstrapOut) -> f64| {
        report.bootstrap.as_ref().map_or(blank.clone(), |b| fmt_float(pick(b)))
    };
    report::write_csv_atomic(
        &csv_path,
        &["cell_id", "variable", "extreme", "method", "mu", "sigma", "xi", "n_obs", "se_mu", "se_sigma", "se_xi"],
        &[vec![
            report.cell_id.clone(),
            report.variable.clone(),
            report.extreme.clone(),
            report.fit.method.clone(),
            fmt_float(report.fit.mu),
            fmt_float(report.fit.sigma),
            fmt_float(report.fit.xi),
            report.fit.n_obs.to_string(),
            se(|b| b.se_mu),
            se(|b| b.se_sigma),
            se(|b| b.se_xi),
        ]],
    )?;
    Ok(vec![json_path, csv_path])
}

pub fn run_fit(args: &FitArgs) -> Result<()> {
    match (&args.input, &args.manifest) {
        (Some(path), None) => {
            let series = ingest::ingest_file(path)?;
            announce(&fit_one(&series, args)?);
        }
        (None, Some(manifest)) => {
            let entries = ingest::read_manifest(manifest)?;
            let outcomes: Vec<Result<Vec<PathBuf>>> = entries
                .par_iter()
                .map(|entry| fit_one(&ingest::ingest_entry(manifest, entry)?, args))
                .collect();
            for (entry, outcome) in entries.iter().zip(outcomes) {
                announce(&outcome.with_context(|| format!("cell {}", entry.cell_id))?);
            }
        }
        _ => bail!("pass exactly one of --input and --manifest"),
    }
    Ok(())
}

/// Return-level curve from explicit parameters or from a fitted cell.
#[derive(Args, Debug)]
pub struct ReturnLevelsArgs {
    /// `mu,sigma,xi`; bypasses fitting.
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "input",
        conflicts_with = "input",
        requires = "orientation"
    )]
    pub params: Option<Triple>,
    /// min or max; required with --params.
    #[arg(long, value_enum)]
    pub orientation: Option<OrientationArg>,
    /// Daily CSV to fit first.
    #[arg(long, requires = "extreme")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub extreme: Option<Extreme>,
    #[arg(long, value_enum, default_value_t = Method::Ml)]
    pub method: Method,
    /// Comma-separated periods in years; default is a 21-point log grid
    /// from 10 to 1000.
    #[arg(long)]
    pub periods: Option<Periods>,
    /// Block length in years: group the extremes (and state the levels)
    /// in b-year blocks.
    #[arg(long = "block-b", default_value_t = 1)]
    pub block_b: u32,
    /// Bootstrap replicates for the 90% envelope; 0 skips it. Needs
    /// --input.
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    #[arg(long = "block-boot-b", value_parser = parse_block_boot_b, default_value_t = 1)]
    pub block_boot_b: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run_return_levels(args: &ReturnLevelsArgs) -> Result<()> {
    let periods = args
        .periods
        .clone()
        .map_or_else(default_period_grid, |p| p.0);
    let report = match (&args.params, &args.input) {
        (Some(triple), None) => {
            if args.bootstrap > 0 {
                bail!("--bootstrap needs --input; explicit parameters carry no data to resample");
            }
            let orientation = match args.orientation {
                Some(OrientationArg::Max) => Orientation::Maxima,
                Some(OrientationArg::Min) => Orientation::Minima,
                None => bail!("--params needs --orientation"),
            };
            let params = GevParams::new(triple.mu, triple.sigma, triple.xi, orientation)?;
            let curve = periods
                .iter()
                .map(|&r| {
                    let query = ReturnLevelQuery::new(r, args.block_b)?;
                    Ok(CurvePointOut {
                        return_period: r,
                        level: params.return_level(&query),
                        lower: None,
                        upper: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ReturnLevelsReport {
                schema_version: SCHEMA_VERSION.to_string(),
                kind: "return_levels".to_string(),
                cell_id: "params".to_string(),
                orientation: report::orientation_name(orientation).to_string(),
                mu: params.mu,
                sigma: params.sigma,
                xi: params.xi,
                block_length_b: args.block_b,
                method: None,
                n_obs: None,
                curve,
            }
        }
        (None, Some(path)) => {
            let series = ingest::ingest_file(path)?;
            let extreme = args.extreme.expect("clap enforces --extreme with --input");
            let mut extremes = extreme.extremes(&series)?;
            if args.block_b > 1 {
                extremes = multi_year_extremes(&extremes, args.block_b)?;
            }
            let point = fit(&extremes, args.method.core())?;
            let boot = if args.bootstrap > 0 {
                let config = bootstrap_config(args.bootstrap, args.block_boot_b, args.seed);
                Some(bootstrap_fit(&extremes, &config, args.method.core())?)
            } else {
                None
            };
            let curve = periods
                .iter()
                .map(|&r| {
                    let query = ReturnLevelQuery::new(r, point.block_length_b)?;
                    let (lower, upper) = match &boot {
                        Some(b) => {
                            let (lo, hi) =
                                b.envelope(&Quantity::ReturnLevel(query), ENVELOPE_LEVEL)?;
                            (Some(lo), Some(hi))
                        }
                        None => (None, None),
                    };
                    Ok(CurvePointOut {
                        return_period: r,
                        level: point.params.return_level(&query),
                        lower,
                        upper,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ReturnLevelsReport {
                schema_version: SCHEMA_VERSION.to_string(),
                kind: "return_levels".to_string(),
                cell_id: series.cell_id.clone(),
                orientation: report::orientation_name(extreme.orientation()).to_string(),
                mu: point.params.mu,
                sigma: point.params.sigma,
                xi: point.params.xi,
                block_length_b: point.block_length_b,
                method: Some(report::method_name(point.method).to_string()),
                n_obs: Some(point.n_obs),
                curve,
            }
        }
        _ => bail!("pass exactly one of --params and --input"),
    };

    let json_path = args.out.join(format!("{}.return_levels.json", report.cell_id));
    let csv_path = args.out.join(format!("{}.return_levels.csv", report.cell_id));
    report::write_json_atomic(&json_path, &report)?;
    let rows: Vec<Vec<String>> = report
        .curve
        .iter()
        .map(|p| {
            vec![
                fmt_float(p.return_period),
                fmt_float(p.level),
                p.lower.map_or_else(String::new, fmt_float),
                p.upper.map_or_else(String::new, fmt_float),
            ]
        })
        .collect();
    report::write_csv_atomic(&csv_path, &["return_period", "level", "lower", "upper"], &rows)?;
    announce(&[json_path, csv_path]);
    Ok(())
}

/// Compare two equilibrated states cell by cell: parameter deltas with
/// significance marks, the return-level-change curve, and the seasonal
/// decomposition of the location shift.
#[derive(Args, Debug)]
pub struct ChangeArgs {
    /// State A manifest.
    #[arg(long)]
    pub a: PathBuf,
    /// State B manifest; must list the same cell ids.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum)]
    pub extreme: Extreme,
    #[arg(long, value_enum, default_value_t = Method::Ml)]
    pub method: Method,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long = "block-boot-b", value_parser = parse_block_boot_b, default_value_t = 1)]
    pub block_boot_b: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub periods: Option<Periods>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

struct ChangeOutcome {
    report: ChangeReportOut,
    files: Vec<PathBuf>,
}

fn change_one(
    args: &ChangeArgs,
    periods: &[f64],
    entry_a: &ManifestEntry,
    entry_b: &ManifestEntry,
) -> Result<ChangeOutcome> {
    let series_a = ingest::ingest_entry(&args.a, entry_a)?;
    let series_b = ingest::ingest_entry(&args.b, entry_b)?;
    let extremes_a = args.extreme.extremes(&series_a)?;
    let extremes_b = args.extreme.extremes(&series_b)?;
    let config = bootstrap_config(args.bootstrap, args.block_boot_b, args.seed);
    let paired = paired_bootstrap(&extremes_a, &extremes_b, &config, args.method.core())?;

    let season = args.extreme.season();
    let stats_a = seasonal_stats(&series_a, season)?;
    let stats_b = seasonal_stats(&series_b, season)?;
    let decomposition =
        decompose_location_shift(&stats_a, &stats_b, &paired.point_a, &paired.point_b)?;

    let core_report =
        change_report(&series_a.cell_id, &paired, periods, Some(decomposition))?;
    let out = ChangeReportOut::new(
        &core_report,
        args.extreme.name(),
        args.method.core(),
        paired.n_requested,
        paired.n_failed,
        &paired.point_a,
        &paired.point_b,
    );

    let json_path = args.out.join(format!("{}.change.json", out.cell_id));
    let csv_path = args.out.join(format!("{}.change.csv", out.cell_id));
    report::write_json_atomic(&json_path, &out)?;
    let rows: Vec<Vec<String>> = out
        .rl_change_curve
        .iter()
        .map(|p| {
            vec![
                fmt_float(p.return_period),
                fmt_float(p.delta),
                fmt_float(p.lower),
                fmt_float(p.upper),
            ]
        })
        .collect();
    report::write_csv_atomic(&csv_path, &["return_period", "delta", "lower", "upper"], &rows)?;
    Ok(ChangeOutcome { report: out, files: vec![json_path, csv_path] })
}

pub fn run_change(args: &ChangeArgs) -> Result<()> {
    let entries_a = ingest::read_manifest(&args.a)?;
    let entries_b = ingest::read_manifest(&args.b)?;
    if entries_a.len() != entries_b.len() {
        bail!(
            "manifests describe different cell counts: {} vs {}",
            entries_a.len(),
            entries_b.len()
        );
    }
    let pairs: Vec<(&ManifestEntry, &ManifestEntry)> = entries_a
        .iter()
        .map(|a| {
            entries_b
                .iter()
                .find(|b| b.cell_id == a.cell_id)
                .map(|b| (a, b))
                .with_context(|| format!("state B manifest is missing cell {}", a.cell_id))
        })
        .collect::<Result<_>>()?;

    let periods = args
        .periods
        .clone()
        .map_or_else(default_period_grid, |p| p.0);
    let outcomes: Vec<Result<ChangeOutcome>> = pairs
        .par_iter()
        .map(|(a, b)| change_one(args, &periods, a, b))
        .collect();

    let mut summary_rows = Vec::with_capacity(outcomes.len());
    let mut written = Vec::new();
    for ((entry, _), outcome) in pairs.iter().zip(outcomes) {
        let outcome = outcome.with_context(|| format!("cell {}", entry.cell_id))?;
        let r = &outcome.report;
        summary_rows.push(vec![
            r.cell_id.clone(),
            fmt_float(r.mu.delta),
            fmt_float(r.mu.pvalue.value),
            r.mu.mark.clone(),
            fmt_float(r.log_sigma.delta),
            fmt_float(r.log_sigma.pvalue.value),
            r.log_sigma.mark.clone(),
            fmt_float(r.xi.delta),
            fmt_float(r.xi.pvalue.value),
            r.xi.mark.clone(),
            r.unreliable.to_string(),
        ]);
        written.extend(outcome.files);
    }
    let summary_path = args.out.join("change_summary.csv");
    report::write_csv_atomic(
        &summary_path,
        &[
            "cell_id",
            "delta_mu",
            "pvalue_mu",
            "mark_mu",
            "delta_log_sigma",
            "pvalue_log_sigma",
            "mark_log_sigma",
            "delta_xi",
            "pvalue_xi",
            "mark_xi",
            "unreliable",
        ],
        &summary_rows,
    )?;
    written.push(summary_path);
    announce(&written);
    Ok(())
}

/// Empirical-versus-fitted quantile pairs for one cell.
#[derive(Args, Debug)]
pub struct QqArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub extreme: Extreme,
    #[arg(long, value_enum, default_value_t = Method::Ml)]
    pub method: Method,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run_qq(args: &QqArgs) -> Result<()> {
    let series = ingest::ingest_file(&args.input)?;
    let extremes = args.extreme.extremes(&series)?;
    let point = fit(&extremes, args.method.core())?;
    let pairs = qq_pairs(&extremes, &point)?;
    let report_out = QqReport {
        schema_version: SCHEMA_VERSION.to_string(),
        kind: "qq".to_string(),
        cell_id: series.cell_id.clone(),
        extreme: args.extreme.name().to_string(),
        method: report::method_name(point.method).to_string(),
        mu: point.params.mu,
        sigma: point.params.sigma,
        xi: point.params.xi,
        n_obs: point.n_obs,
        pairs: pairs
            .iter()
            .map(|&(empirical, fitted)| QqPairOut { empirical, fitted })
            .collect(),
    };
    let json_path = args.out.join(format!("{}.qq.json", report_out.cell_id));
    let csv_path = args.out.join(format!("{}.qq.csv", report_out.cell_id));
    report::write_json_atomic(&json_path, &report_out)?;
    let rows: Vec<Vec<String>> = report_out
        .pairs
        .iter()
        .map(|p| vec![fmt_float(p.empirical), fmt_float(p.fitted)])
        .collect();
    report::write_csv_atomic(&csv_path, &["empirical", "fitted"], &rows)?;
    announce(&[json_path, csv_path]);
    Ok(())
}

/// Shape stability across 1/2/5/10-year blocks for one cell.
#[derive(Args, Debug)]
pub struct BlockDiagnosticArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub extreme: Extreme,
    /// Bootstrap replicates behind the stability p-value.
    #[arg(long, default_value_t = DIAGNOSTIC_REPLICATES)]
    pub bootstrap: usize,
    #[arg(long = "block-boot-b", value_parser = parse_block_boot_b, default_value_t = 1)]
    pub block_boot_b: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run_block_diagnostic(args: &BlockDiagnosticArgs) -> Result<()> {
    let series = ingest::ingest_file(&args.input)?;
    let extremes = args.extreme.extremes(&series)?;
    let config = bootstrap_config(args.bootstrap, args.block_boot_b, args.seed);
    let diagnostic = block_size_diagnostic(&series.cell_id, &extremes, &config)?;
    let report_out = BlockDiagnosticReport::new(&diagnostic, args.extreme.name());
    let json_path = args
        .out
        .join(format!("{}.block_diagnostic.json", report_out.cell_id));
    let csv_path = args
        .out
        .join(format!("{}.block_diagnostic.csv", report_out.cell_id));
    report::write_json_atomic(&json_path, &report_out)?;
    let rows: Vec<Vec<String>> = report_out
        .xi_by_block
        .iter()
        .map(|p| vec![p.block_length_b.to_string(), fmt_float(p.xi)])
        .collect();
    report::write_csv_atomic(&csv_path, &["block_length_b", "xi"], &rows)?;
    announce(&[json_path, csv_path]);
    Ok(())
}

/// Split two aligned series into short segments and measure how well
/// segment fits recover the full-series return-level change.
#[derive(Args, Debug)]
pub struct SegmentExperimentArgs {
    /// State A daily CSV.
    #[arg(long)]
    pub a: PathBuf,
    /// State B daily CSV.
    #[arg(long)]
    pub b: PathBuf,
    /// Segment length in years.
    #[arg(long = "L", value_parser = parse_segment_length)]
    pub l: usize,
    /// Comma-separated periods; default 20,50,100.
    #[arg(long)]
    pub periods: Option<Periods>,
    #[arg(long, value_enum)]
    pub extreme: Extreme,
    #[arg(long, value_enum, default_value_t = Method::Ml)]
    pub method: Method,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run_segment_experiment(args: &SegmentExperimentArgs) -> Result<()> {
    let series_a = ingest::ingest_file(&args.a)?;
    let series_b = ingest::ingest_file(&args.b)?;
    let periods = args
        .periods
        .clone()
        .map_or_else(|| vec![20.0, 50.0, 100.0], |p| p.0);
    let experiment = segment_experiment(
        &series_a,
        &series_b,
        args.l,
        &periods,
        args.extreme.orientation(),
        args.method.core(),
    )?;
    let report_out = SegmentExperimentReport::new(&experiment, args.extreme.name());
    let json_path = args.out.join(format!("segment_L{}.json", args.l));
    let csv_path = args.out.join(format!("segment_L{}.csv", args.l));
    report::write_json_atomic(&json_path, &report_out)?;
    let mut rows = Vec::new();
    for period in &report_out.per_period {
        for (pair, (estimate, error)) in
            period.estimates.iter().zip(&period.errors).enumerate()
        {
            rows.push(vec![
                fmt_float(period.return_period),
                fmt_float(period.truth),
                pair.to_string(),
                fmt_float(*estimate),
                fmt_float(*error),
            ]);
        }
    }
    report::write_csv_atomic(
        &csv_path,
        &["return_period", "truth", "pair", "estimate", "error"],
        &rows,
    )?;
    announce(&[json_path, csv_path]);
    Ok(())
}

/// Generate synthetic daily cells (annual cycle plus AR(1) noise with
/// seasonally scaled innovations) and the manifest(s) describing them.
#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    pub years: usize,
    /// Annual-cycle mean.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub mean: f64,
    /// Annual-cycle amplitude; the cycle peaks in mid July.
    #[arg(long, default_value_t = 13.5, allow_hyphen_values = true)]
    pub amplitude: f64,
    /// AR(1) coefficient of the daily residual.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub phi: f64,
    /// Innovation standard deviation.
    #[arg(long = "noise-sd", default_value_t = 3.0)]
    pub noise_sd: f64,
    /// Multiplier on the innovation SD during DJF.
    #[arg(long = "winter-sd-scale", default_value_t = 1.0)]
    pub winter_sd_scale: f64,
    /// Run seed; per-cell generator seeds derive from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of cells to generate.
    #[arg(long, default_value_t = 1)]
    pub cells: usize,
    /// Also generate a state B per cell: mean shifted by --delta-mean,
    /// winter innovation SD scaled by --winter-sd-ratio.
    #[arg(long = "two-state", default_value_t = false)]
    pub two_state: bool,
    #[arg(long = "delta-mean", default_value_t = 0.0, allow_hyphen_values = true, requires = "two_state")]
    pub delta_mean: f64,
    #[arg(long = "winter-sd-ratio", default_value_t = 1.0, requires = "two_state")]
    pub winter_sd_ratio: f64,
    #[arg(long, value_enum, default_value_t = VariableArg::Tmax)]
    pub variable: VariableArg,
    /// Year label of the first generated year.
    #[arg(long = "start-year", default_value_t = 1, allow_hyphen_values = true)]
    pub start_year: i32,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Cell id prefix; cells are numbered prefix000, prefix001, ...
    #[arg(long, default_value = "cell")]
    pub prefix: String,
}

pub fn run_simulate(args: &SimulateArgs) -> Result<()> {
    if args.cells == 0 {
        bail!("--cells must be at least 1");
    }
    let variable = match args.variable {
        VariableArg::Tmax => Variable::Tmax,
        VariableArg::Tmin => Variable::Tmin,
    };
    let mut chain = args.seed;
    let mut entries_a = Vec::with_capacity(args.cells);
    let mut entries_b = Vec::with_capacity(args.cells);
    let mut written = Vec::new();
    for i in 0..args.cells {
        let cell_id = format!("{}{i:03}", args.prefix);
        let latitude = 40.0 + 0.5 * i as f64;
        let longitude = -110.0 - 0.5 * i as f64;
        let spec: SyntheticSpec<f64> = SyntheticSpec {
            n_years: args.years,
            annual_cycle_mean: args.mean,
            annual_cycle_amplitude: args.amplitude,
            ar1_phi: args.phi,
            noise_sd: args.noise_sd,
            winter_sd_scale: args.winter_sd_scale,
            seed: splitmix64(&mut chain),
        };
        let entry = |path: String| ManifestEntry {
            cell_id: cell_id.clone(),
            latitude,
            longitude,
            variable: ingest::variable_name(variable).to_string(),
            path,
        };
        let with_metadata = |generated: DailySeries<f64>| -> Result<DailySeries<f64>> {
            Ok(DailySeries::new(
                cell_id.clone(),
                latitude,
                longitude,
                args.start_year,
                variable,
                generated.values,
            )?)
        };
        if args.two_state {
            let (a, b) = two_state_scenario(&spec, args.delta_mean, args.winter_sd_ratio)?;
            let name_a = format!("{cell_id}_a.csv");
            let name_b = format!("{cell_id}_b.csv");
            let path_a = args.out.join(&name_a);
            let path_b = args.out.join(&name_b);
            ingest::write_daily_csv(&path_a, &with_metadata(a)?)?;
            ingest::write_daily_csv(&path_b, &with_metadata(b)?)?;
            entries_a.push(entry(name_a));
            entries_b.push(entry(name_b));
            written.push(path_a);
            written.push(path_b);
        } else {
            let series = with_metadata(generate_daily(&spec)?)?;
            let name = format!("{cell_id}.csv");
            let path = args.out.join(&name);
            ingest::write_daily_csv(&path, &series)?;
            entries_a.push(entry(name));
            written.push(path);
        }
    }
    if args.two_state {
        let manifest_a = args.out.join("state_a.manifest.json");
        let manifest_b = args.out.join("state_b.manifest.json");
        ingest::write_manifest(&manifest_a, &entries_a)?;
        ingest::write_manifest(&manifest_b, &entries_b)?;
        written.push(manifest_a);
        written.push(manifest_b);
    } else {
        let manifest = args.out.join("manifest.json");
        ingest::write_manifest(&manifest, &entries_a)?;
        written.push(manifest);
    }
    announce(&written);
    Ok(())
}
