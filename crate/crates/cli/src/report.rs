//! Report structures mirrored into JSON and plot-ready CSV, plus the
//! atomic file writes behind every emitted artifact.
//!
//! Floats in CSV are printed with 17 significant digits so a reader gets
//! the exact bits back; JSON goes through serde_json, whose shortest
//! representation round-trips as well.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gevkit::bootstrap::{BootstrapConfig, BootstrapResult, PValue};
use gevkit::changes::{ChangeReport, Decomposition, ParamChange, RlChangePoint};
use gevkit::fit::{FitMethod, FitResult};
use gevkit::gev::Orientation;
use gevkit::sensitivity::{
    BlockDiagnostic, SegmentExperiment, SegmentPeriodResult, SummaryStats,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "v1";

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn method_name(method: FitMethod) -> &'static str {
    match method {
        FitMethod::Ml => "ml",
        FitMethod::Pwm => "pwm",
    }
}

pub fn orientation_name(orientation: Orientation) -> &'static str {
    match orientation {
        Orientation::Maxima => "max",
        Orientation::Minima => "min",
    }
}

/// Write via a sibling temp file and rename, so readers never see a
/// partial report even while cells are written in parallel.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("moving {} into place", tmp.display()))?;
    Ok(())
}

pub fn write_json_atomic<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    write_atomic(path, format!("{json}\n").as_bytes())
}

/// CSV writer over pre-formatted fields; quoting handled by the csv crate.
pub fn write_csv_atomic(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().context("flushing csv buffer")?;
    write_atomic(path, &bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFitOut {
    pub method: String,
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
    /// Minimized negative log likelihood; null for moment fits.
    pub nll: Option<f64>,
    pub converged: bool,
    pub n_obs: usize,
    pub block_length_b: u32,
    pub iterations: usize,
}

impl From<&FitResult<f64>> for StateFitOut {
    fn from(fit: &FitResult<f64>) -> Self {
        Self {
            method: method_name(fit.method).to_string(),
            mu: fit.params.mu,
            sigma: fit.params.sigma,
            xi: fit.params.xi,
            nll: fit.nll,
            converged: fit.converged,
            n_obs: fit.n_obs,
            block_length_b: fit.block_length_b,
            iterations: fit.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOut {
    pub n_replicates: usize,
    pub block_length_years: u32,
    pub seed: u64,
    pub n_failed: usize,
    pub unreliable: bool,
    pub se_mu: f64,
    pub se_sigma: f64,
    pub se_xi: f64,
}

impl BootstrapOut {
    pub fn new(config: &BootstrapConfig, boot: &BootstrapResult<f64>) -> Self {
        Self {
            n_replicates: boot.n_requested,
            block_length_years: config.block_length_years,
            seed: config.seed,
            n_failed: boot.n_failed,
            unreliable: boot.unreliable,
            se_mu: boot.standard_errors.mu,
            se_sigma: boot.standard_errors.sigma,
            se_xi: boot.standard_errors.xi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: String,
    pub kind: String,
    pub cell_id: String,
    pub variable: String,
    pub extreme: String,
    pub fit: StateFitOut,
    pub bootstrap: Option<BootstrapOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePointOut {
    pub return_period: f64,
    pub level: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnLevelsReport {
    pub schema_version: String,
    pub kind: String,
    pub cell_id: String,
    pub orientation: String,
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
    pub block_length_b: u32,
    /// Fit provenance; null when the parameters were given directly.
    pub method: Option<String>,
    pub n_obs: Option<usize>,
    pub curve: Vec<CurvePointOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueOut {
    pub value: f64,
    pub degenerate: bool,
    pub unreliable: bool,
}

impl From<PValue<f64>> for PValueOut {
    fn from(p: PValue<f64>) -> Self {
        Self { value: p.value, degenerate: p.degenerate, unreliable: p.unreliable }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamChangeOut {
    pub delta: f64,
    pub pvalue: PValueOut,
    pub mark: String,
}

impl From<&ParamChange<f64>> for ParamChangeOut {
    fn from(change: &ParamChange<f64>) -> Self {
        Self {
            delta: change.delta,
            pvalue: change.pvalue.into(),
            mark: change.mark.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlChangePointOut {
    pub return_period: f64,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
}

impl From<&RlChangePoint<f64>> for RlChangePointOut {
    fn from(point: &RlChangePoint<f64>) -> Self {
        Self {
            return_period: point.return_period,
            delta: point.delta,
            lower: point.lower,
            upper: point.upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionOut {
    pub m1: f64,
    pub s1: f64,
    pub m2: f64,
    pub s2: f64,
    pub predicted_delta_mu: f64,
    pub observed_delta_mu: f64,
    pub ratio_mu_over_mean: Option<f64>,
}

impl From<&Decomposition<f64>> for DecompositionOut {
    fn from(d: &Decomposition<f64>) -> Self {
        Self {
            m1: d.m1,
            s1: d.s1,
            m2: d.m2,
            s2: d.s2,
            predicted_delta_mu: d.predicted_delta_mu,
            observed_delta_mu: d.observed_delta_mu,
            ratio_mu_over_mean: d.ratio_mu_over_mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeReportOut {
    pub schema_version: String,
    pub kind: String,
    pub cell_id: String,
    pub extreme: String,
    pub method: String,
    pub n_replicates: usize,
    pub n_failed: usize,
    pub unreliable: bool,
    pub state_a: StateFitOut,
    pub state_b: StateFitOut,
    pub mu: ParamChangeOut,
    pub log_sigma: ParamChangeOut,
    pub xi: ParamChangeOut,
    pub rl_change_curve: Vec<RlChangePointOut>,
    pub decomposition: Option<DecompositionOut>,
}

impl ChangeReportOut {
    pub fn new(
        report: &ChangeReport<f64>,
        extreme: &str,
        method: FitMethod,
        n_replicates: usize,
        n_failed: usize,
        state_a: &FitResult<f64>,
        state_b: &FitResult<f64>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: "change".to_string(),
            cell_id: report.cell_id.clone(),
            extreme: extreme.to_string(),
            method: method_name(method).to_string(),
            n_replicates,
            n_failed,
            unreliable: report.unreliable,
            state_a: state_a.into(),
            state_b: state_b.into(),
            mu: (&report.mu).into(),
            log_sigma: (&report.log_sigma).into(),
            xi: (&report.xi).into(),
            rl_change_curve: report.rl_change_curve.iter().map(Into::into).collect(),
            decomposition: report.decomposition.as_ref().map(Into::into),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqPairOut {
    pub empirical: f64,
    pub fitted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqReport {
    pub schema_version: String,
    pub kind: String,
    pub cell_id: String,
    pub extreme: String,
    pub method: String,
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
    pub n_obs: usize,
    pub pairs: Vec<QqPairOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockXiOut {
    pub block_length_b: u32,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDiagnosticReport {
    pub schema_version: String,
    pub kind: String,
    pub cell_id: String,
    pub extreme: String,
    pub xi_by_block: Vec<BlockXiOut>,
    pub xi_diff_10_1: f64,
    pub pvalue: f64,
    pub flagged: bool,
    pub n_replicates_used: usize,
    pub unreliable: bool,
}

impl BlockDiagnosticReport {
    pub fn new(diagnostic: &BlockDiagnostic<f64>, extreme: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: "block_diagnostic".to_string(),
            cell_id: diagnostic.cell_id.clone(),
            extreme: extreme.to_string(),
            xi_by_block: diagnostic
                .xi_by_block
                .iter()
                .map(|&(b, xi)| BlockXiOut { block_length_b: b, xi })
                .collect(),
            xi_diff_10_1: diagnostic.xi_diff_10_1,
            pvalue: diagnostic.pvalue,
            flagged: diagnostic.flagged,
            n_replicates_used: diagnostic.n_replicates_used,
            unreliable: diagnostic.unreliable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStatsOut {
    pub mean: f64,
    pub sd: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
}

impl From<&SummaryStats<f64>> for SummaryStatsOut {
    fn from(s: &SummaryStats<f64>) -> Self {
        Self {
            mean: s.mean,
            sd: s.sd,
            q25: s.q25,
            median: s.median,
            q75: s.q75,
            min: s.min,
            max: s.max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPeriodOut {
    pub return_period: f64,
    pub truth: f64,
    pub estimates: Vec<f64>,
    pub errors: Vec<f64>,
    pub summary: SummaryStatsOut,
}

impl From<&SegmentPeriodResult<f64>> for SegmentPeriodOut {
    fn from(p: &SegmentPeriodResult<f64>) -> Self {
        Self {
            return_period: p.return_period,
            truth: p.truth,
            estimates: p.estimates.clone(),
            errors: p.errors.clone(),
            summary: (&p.summary).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiPairOut {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentExperimentReport {
    pub schema_version: String,
    pub kind: String,
    pub segment_length_years: usize,
    pub extreme: String,
    pub method: String,
    pub n_pairs: usize,
    pub n_failed_pairs: usize,
    pub xi_pairs: Vec<XiPairOut>,
    pub per_period: Vec<SegmentPeriodOut>,
}

impl SegmentExperimentReport {
    pub fn new(experiment: &SegmentExperiment<f64>, extreme: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: "segment_experiment".to_string(),
            segment_length_years: experiment.segment_length_years,
            extreme: extreme.to_string(),
            method: method_name(experiment.method).to_string(),
            n_pairs: experiment.n_pairs,
            n_failed_pairs: experiment.n_failed_pairs,
            xi_pairs: experiment
                .xi_pairs
                .iter()
                .map(|&(a, b)| XiPairOut { a, b })
                .collect(),
            per_period: experiment.per_period.iter().map(Into::into).collect(),
        }
    }
}
