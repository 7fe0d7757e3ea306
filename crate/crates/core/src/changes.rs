//! Comparison of two climate states: parameter deltas with significance
//! marks, return-level-change curves with bootstrap envelopes, and the
//! decomposition of the location shift into seasonal mean and spread.

use crate::blocks::SeasonalStats;
use crate::bootstrap::{
    envelope_of, pvalue_from_deltas, PairedBootstrap, PValue, Quantity, MIN_PVALUE_REPLICATES,
};
use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::gev::ReturnLevelQuery;
use crate::math;
use crate::num::Real;

/// Envelope level for change curves: the 5th and 95th replicate
/// percentiles.
pub const ENVELOPE_LEVEL: f64 = 0.90;
/// Strong significance threshold ("++" / "--").
pub const STRONG_PVALUE: f64 = 0.02;
/// Weak significance threshold ("+" / "-").
pub const WEAK_PVALUE: f64 = 0.10;

/// 21 log-spaced return periods from 10 to 1000 years.
pub fn default_period_grid<T: Real>() -> Vec<T> {
    math::log_spaced(T::c(10.0), T::c(1000.0), 21)
}

/// Significance mark for a delta: doubled below p = 0.02, single up to
/// p = 0.10, empty beyond; the sign is the sign of the point estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    StrongIncrease,
    Increase,
    NotSignificant,
    Decrease,
    StrongDecrease,
}

impl Mark {
    pub fn from_test<T: Real>(pvalue: T, delta: T) -> Self {
        let strong = pvalue < T::c(STRONG_PVALUE);
        let weak = pvalue <= T::c(WEAK_PVALUE);
        if !weak || delta == T::zero() {
            Mark::NotSignificant
        } else if delta > T::zero() {
            if strong {
                Mark::StrongIncrease
            } else {
                Mark::Increase
            }
        } else if strong {
            Mark::StrongDecrease
        } else {
            Mark::Decrease
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mark::StrongIncrease => "++",
            Mark::Increase => "+",
            Mark::NotSignificant => "",
            Mark::Decrease => "-",
            Mark::StrongDecrease => "--",
        }
    }
}

/// One parameter's change between states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamChange<T> {
    pub delta: T,
    pub pvalue: PValue<T>,
    pub mark: Mark,
}

/// Changes in mu, log sigma, and xi (state B minus state A).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamChanges<T> {
    pub mu: ParamChange<T>,
    pub log_sigma: ParamChange<T>,
    pub xi: ParamChange<T>,
}

/// One point of the return-level-change curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlChangePoint<T> {
    pub return_period: T,
    pub delta: T,
    pub lower: T,
    pub upper: T,
}

/// Seasonal mean/SD decomposition of the location shift. The location
/// sits a fixed number of seasonal standard deviations from the seasonal
/// mean, so the predicted new location is m2 + (mu1 - m1) s2/s1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition<T> {
    pub m1: T,
    pub s1: T,
    pub m2: T,
    pub s2: T,
    pub predicted_delta_mu: T,
    pub observed_delta_mu: T,
    /// Observed delta mu over the seasonal mean change; `None` when the
    /// mean change is too small to divide by.
    pub ratio_mu_over_mean: Option<T>,
}

/// The full two-state comparison for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeReport<T> {
    pub cell_id: String,
    pub mu: ParamChange<T>,
    pub log_sigma: ParamChange<T>,
    pub xi: ParamChange<T>,
    pub rl_change_curve: Vec<RlChangePoint<T>>,
    pub decomposition: Option<Decomposition<T>>,
    /// Too many bootstrap replicates failed behind these numbers.
    pub unreliable: bool,
}

/// Parameter deltas B - A with bootstrap p-values and marks.
pub fn compare_states<T: Real>(paired: &PairedBootstrap<T>) -> Result<ParamChanges<T>> {
    if paired.n_requested < MIN_PVALUE_REPLICATES {
        return Err(Error::TooFewObservations {
            need: MIN_PVALUE_REPLICATES,
            got: paired.n_requested,
        });
    }
    let change = |quantity: Quantity<T>| -> Result<ParamChange<T>> {
        let delta = paired.point_delta(&quantity);
        let mut pvalue = pvalue_from_deltas(&paired.deltas(&quantity))?;
        pvalue.unreliable = pvalue.unreliable || paired.unreliable;
        Ok(ParamChange { delta, pvalue, mark: Mark::from_test(pvalue.value, delta) })
    };
    Ok(ParamChanges {
        mu: change(Quantity::Mu)?,
        log_sigma: change(Quantity::LogSigma)?,
        xi: change(Quantity::Xi)?,
    })
}

/// Return-level change B - A over `periods`, with the 5th/95th replicate
/// percentile envelope at each period. Periods must be strictly
/// increasing and beyond the common block length.
pub fn rl_change_curve<T: Real>(
    paired: &PairedBootstrap<T>,
    periods: &[T],
) -> Result<Vec<RlChangePoint<T>>> {
    if periods.is_empty() {
        return Err(Error::Empty);
    }
    if periods.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("return periods must be strictly increasing"));
    }
    if paired.point_a.block_length_b != paired.point_b.block_length_b {
        return Err(Error::InvalidInput("states have different block lengths"));
    }
    let level = T::c(ENVELOPE_LEVEL);
    periods
        .iter()
        .map(|&r| {
            let query = ReturnLevelQuery::new(r, paired.point_a.block_length_b)?;
            let quantity = Quantity::ReturnLevel(query);
            let (lower, upper) = envelope_of(&paired.deltas(&quantity), level)?;
            Ok(RlChangePoint { return_period: r, delta: paired.point_delta(&quantity), lower, upper })
        })
        .collect()
}

/// Predict the location shift from seasonal statistics and compare with
/// the fitted one. Requires both seasonal records to describe the same
/// season and s1 > 0.
pub fn decompose_location_shift<T: Real>(
    seasonal_a: &SeasonalStats<T>,
    seasonal_b: &SeasonalStats<T>,
    fit_a: &FitResult<T>,
    fit_b: &FitResult<T>,
) -> Result<Decomposition<T>> {
    if seasonal_a.season != seasonal_b.season {
        return Err(Error::InvalidInput("seasonal statistics describe different seasons"));
    }
    if fit_a.params.orientation != fit_b.params.orientation {
        return Err(Error::OrientationMismatch);
    }
    let (m1, s1) = (seasonal_a.mean_m, seasonal_a.sd_s);
    let (m2, s2) = (seasonal_b.mean_m, seasonal_b.sd_s);
    if !(s1 > T::zero()) {
        return Err(Error::DegenerateSeason);
    }
    let mu1 = fit_a.params.mu;
    let mu2 = fit_b.params.mu;
    let delta_m = m2 - m1;
    let predicted_delta_mu = delta_m + (mu1 - m1) * (s2 / s1 - T::one());
    let observed_delta_mu = mu2 - mu1;
    let scale = T::one().max(m1.abs()).max(m2.abs());
    let ratio_mu_over_mean = if delta_m.abs() <= T::epsilon().sqrt() * scale {
        None
    } else {
        Some(observed_delta_mu / delta_m)
    };
    Ok(Decomposition { m1, s1, m2, s2, predicted_delta_mu, observed_delta_mu, ratio_mu_over_mean })
}

/// Assemble the full report for one cell.
pub fn change_report<T: Real>(
    cell_id: impl Into<String>,
    paired: &PairedBootstrap<T>,
    periods: &[T],
    decomposition: Option<Decomposition<T>>,
) -> Result<ChangeReport<T>> {
    let params = compare_states(paired)?;
    let curve = rl_change_curve(paired, periods)?;
    Ok(ChangeReport {
        cell_id: cell_id.into(),
        mu: params.mu,
        log_sigma: params.log_sigma,
        xi: params.xi,
        rl_change_curve: curve,
        decomposition,
        unreliable: paired.unreliable,
    })
}
