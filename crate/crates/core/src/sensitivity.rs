//! Sensitivity studies: the block-size max-stability diagnostic and the
//! segment-length sampling-error experiment.
//!
//! The diagnostic refits one cell's annual extremes at block lengths
//! 1, 2, 5, and 10 years; if the annual blocks really are GEV, the shape
//! estimate should not drift with block length. The segment experiment
//! chops two long series into aligned segments and shows how wildly
//! short-record return-level changes scatter around the long-record one.

use crate::blocks::{annual_maxima, annual_minima, multi_year_extremes, BlockExtremes, DailySeries};
use crate::bootstrap::{
    pvalue_from_deltas, resample, BootstrapConfig, MIN_PVALUE_REPLICATES,
};
use crate::error::{Error, Result};
use crate::fit::{self, FitMethod, FitResult};
use crate::gev::{Orientation, ReturnLevelQuery};
use crate::math;
use crate::num::Real;

/// Block lengths the diagnostic refits at.
pub const DIAGNOSTIC_BLOCKS: [u32; 4] = [1, 2, 5, 10];
/// Replicates behind the diagnostic p-value (two fits each, so half the
/// usual count).
pub const DIAGNOSTIC_REPLICATES: usize = 500;
/// Diagnostic significance level.
pub const DIAGNOSTIC_ALPHA: f64 = 0.05;

/// Shape stability across block lengths for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagnostic<T> {
    pub cell_id: String,
    /// (block length in years, fitted shape) at each configured length.
    pub xi_by_block: Vec<(u32, T)>,
    /// Shape at 10-year blocks minus shape at 1-year blocks.
    pub xi_diff_10_1: T,
    pub pvalue: T,
    /// p < 0.05: the shape drifts with block length.
    pub flagged: bool,
    pub n_replicates_used: usize,
    pub unreliable: bool,
}

/// Refit `extremes` (annual, b = 1) at 1/2/5/10-year blocks and test
/// whether the 10-year shape differs from the annual one. The test
/// resamples whole years, rebuilds both block lengths from the same
/// resampled sequence, and refits each; the p-value is the two-sided
/// share of replicate differences on the far side of zero.
pub fn block_size_diagnostic<T: Real>(
    cell_id: impl Into<String>,
    extremes: &BlockExtremes<T>,
    config: &BootstrapConfig,
) -> Result<BlockDiagnostic<T>> {
    if extremes.block_length_b != 1 {
        return Err(Error::InvalidInput("diagnostic expects annual (1-year) blocks"));
    }
    let n_years = extremes.n_blocks();
    let longest = *DIAGNOSTIC_BLOCKS.last().unwrap() as usize;
    if n_years < 10 * longest {
        return Err(Error::SeriesTooShort { need: 10 * longest, got: n_years });
    }
    if config.n_replicates < MIN_PVALUE_REPLICATES {
        return Err(Error::TooFewObservations {
            need: MIN_PVALUE_REPLICATES,
            got: config.n_replicates,
        });
    }

    let mut xi_by_block = Vec::with_capacity(DIAGNOSTIC_BLOCKS.len());
    let mut fit_annual = None;
    let mut fit_decadal = None;
    for &b in &DIAGNOSTIC_BLOCKS {
        let grouped = multi_year_extremes(extremes, b)?;
        let fitted = fit::fit_ml(&grouped)?;
        xi_by_block.push((b, fitted.params.xi));
        if b == 1 {
            fit_annual = Some(fitted);
        } else if b == longest as u32 {
            fit_decadal = Some(fitted);
        }
    }
    let fit_annual = fit_annual.expect("block list contains 1");
    let fit_decadal = fit_decadal.expect("block list contains 10");
    let xi_diff_10_1 = fit_decadal.params.xi - fit_annual.params.xi;

    let mut deltas = Vec::with_capacity(config.n_replicates);
    let mut n_failed = 0usize;
    for k in 0..config.n_replicates {
        let idx = resample(n_years, config, k)?;
        let resampled = extremes.take(&idx);
        let annual = fit::fit_ml_from(&resampled, &fit_annual.params);
        let decadal = multi_year_extremes(&resampled, longest as u32)
            .and_then(|d| fit::fit_ml_from(&d, &fit_decadal.params));
        match (annual, decadal) {
            (Ok(a), Ok(d)) if a.converged && d.converged => {
                deltas.push(d.params.xi - a.params.xi);
            }
            _ => n_failed += 1,
        }
    }
    let pvalue = pvalue_from_deltas(&deltas)?;
    Ok(BlockDiagnostic {
        cell_id: cell_id.into(),
        xi_by_block,
        xi_diff_10_1,
        pvalue: pvalue.value,
        flagged: pvalue.value < T::c(DIAGNOSTIC_ALPHA),
        n_replicates_used: deltas.len(),
        unreliable: n_failed as f64 > 0.05 * config.n_replicates as f64,
    })
}

/// Return level at period `r` using the fit's own block length, so a
/// decadal fit answers with p = 10/r.
pub fn return_level_by_block<T: Real>(fit: &FitResult<T>, r: T) -> Result<T> {
    let query = ReturnLevelQuery::new(r, fit.block_length_b)?;
    Ok(fit.params.return_level(&query))
}

/// One period of the annual-versus-longer-block return level comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRlPoint<T> {
    pub return_period: T,
    pub level_a: T,
    pub level_b: T,
}

/// Return levels from two fits of the same data at different block
/// lengths, over a shared period grid. Periods must exceed both block
/// lengths.
pub fn block_return_level_curves<T: Real>(
    fit_a: &FitResult<T>,
    fit_b: &FitResult<T>,
    periods: &[T],
) -> Result<Vec<BlockRlPoint<T>>> {
    periods
        .iter()
        .map(|&r| {
            Ok(BlockRlPoint {
                return_period: r,
                level_a: return_level_by_block(fit_a, r)?,
                level_b: return_level_by_block(fit_b, r)?,
            })
        })
        .collect()
}

/// Location and spread of an error sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats<T> {
    pub mean: T,
    pub sd: T,
    pub q25: T,
    pub median: T,
    pub q75: T,
    pub min: T,
    pub max: T,
}

impl<T: Real> SummaryStats<T> {
    pub fn of(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let (mean, sd) = math::mean_sd(values);
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Ok(Self {
            mean,
            sd,
            q25: math::empirical_quantile(&sorted, T::c(0.25)),
            median: math::empirical_quantile(&sorted, T::c(0.5)),
            q75: math::empirical_quantile(&sorted, T::c(0.75)),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Per-period outcome of the segment experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPeriodResult<T> {
    pub return_period: T,
    /// Full-series change, the "truth" short segments are judged against.
    pub truth: T,
    /// Per-pair change estimates, one per surviving segment pair.
    pub estimates: Vec<T>,
    /// estimates - truth.
    pub errors: Vec<T>,
    pub summary: SummaryStats<T>,
}

/// Segment-length sampling-error experiment over two aligned series.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentExperiment<T> {
    pub segment_length_years: usize,
    pub orientation: Orientation,
    pub method: FitMethod,
    pub n_pairs: usize,
    pub n_failed_pairs: usize,
    /// Fitted shapes (state A, state B) per surviving pair, for spotting
    /// runaway shape estimates on short records.
    pub xi_pairs: Vec<(T, T)>,
    pub per_period: Vec<SegmentPeriodResult<T>>,
}

/// Split both series into floor(n_years / L) aligned non-overlapping
/// L-year segments, fit each pair, and compare segment return-level
/// changes with the full-series ones at every period in `return_periods`.
/// Pairs where any fit fails are dropped and counted.
pub fn segment_experiment<T: Real>(
    series_a: &DailySeries<T>,
    series_b: &DailySeries<T>,
    segment_length_years: usize,
    return_periods: &[T],
    orientation: Orientation,
    method: FitMethod,
) -> Result<SegmentExperiment<T>> {
    if series_a.n_years() != series_b.n_years() {
        return Err(Error::InvalidInput("the two series must span the same years"));
    }
    if return_periods.is_empty() {
        return Err(Error::Empty);
    }
    let n_years = series_a.n_years();
    let l = segment_length_years;
    if l == 0 || l > n_years {
        return Err(Error::SeriesTooShort { need: l.max(1), got: n_years });
    }
    let extract = |series: &DailySeries<T>| -> Result<BlockExtremes<T>> {
        match orientation {
            Orientation::Maxima => annual_maxima(series),
            Orientation::Minima => annual_minima(series),
        }
    };

    let full_a = fit::fit(&extract(series_a)?, method)?;
    let full_b = fit::fit(&extract(series_b)?, method)?;

    let n_pairs = n_years / l;
    let mut xi_pairs = Vec::new();
    let mut pair_fits = Vec::new();
    let mut n_failed_pairs = 0usize;
    for i in 0..n_pairs {
        let fit_pair = (|| -> Result<(FitResult<T>, FitResult<T>)> {
            let seg_a = series_a.slice_years(i * l, l)?;
            let seg_b = series_b.slice_years(i * l, l)?;
            Ok((fit::fit(&extract(&seg_a)?, method)?, fit::fit(&extract(&seg_b)?, method)?))
        })();
        match fit_pair {
            Ok((fa, fb)) => {
                xi_pairs.push((fa.params.xi, fb.params.xi));
                pair_fits.push((fa, fb));
            }
            Err(_) => n_failed_pairs += 1,
        }
    }
    if pair_fits.is_empty() {
        return Err(Error::FitFailed);
    }

    let per_period = return_periods
        .iter()
        .map(|&r| {
            let truth = return_level_by_block(&full_b, r)? - return_level_by_block(&full_a, r)?;
            let estimates = pair_fits
                .iter()
                .map(|(fa, fb)| Ok(return_level_by_block(fb, r)? - return_level_by_block(fa, r)?))
                .collect::<Result<Vec<T>>>()?;
            let errors: Vec<T> = estimates.iter().map(|&e| e - truth).collect();
            let summary = SummaryStats::of(&errors)?;
            Ok(SegmentPeriodResult { return_period: r, truth, estimates, errors, summary })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SegmentExperiment {
        segment_length_years: l,
        orientation,
        method,
        n_pairs,
        n_failed_pairs,
        xi_pairs,
        per_period,
    })
}
