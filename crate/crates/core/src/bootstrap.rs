//! Bootstrap uncertainty for fitted extremes.
//!
//! Resampling operates on whole years of block extrema. The circular
//! scheme draws overlapping year-blocks with wraparound to preserve
//! short-range dependence; the bootstrap block length here is a number
//! of years and has nothing to do with the extremal block length.
//!
//! Every replicate derives its random stream from (master seed,
//! replicate index), so serial and parallel execution agree bit for bit.
//! Two-state comparisons give each state its own stream lane, which keeps
//! the states independent even when their data coincide.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::BlockExtremes;
use crate::error::{Error, Result};
use crate::fit::{self, FitMethod, FitResult};
use crate::gev::{GevParams, ReturnLevelQuery};
use crate::math;
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Independent year draws with replacement.
    Simple,
    /// Overlapping wraparound year-blocks of `block_length_years`.
    CircularBlock,
}

/// Replicate count, resampling scheme, and master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BootstrapConfig {
    pub n_replicates: usize,
    /// Bootstrap block length in years; the command-line tools restrict it
    /// to {1, 2, 5, 10}. Ignored by the simple scheme.
    pub block_length_years: u32,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { n_replicates: 1000, block_length_years: 1, seed: 0, scheme: Scheme::CircularBlock }
    }
}

/// Fewest replicates accepted when computing a p-value.
pub const MIN_PVALUE_REPLICATES: usize = 100;
/// Failure fraction beyond which results carry the unreliable flag.
const MAX_FAILED_FRACTION: f64 = 0.05;

fn replicate_rng(seed: u64, replicate: usize, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * replicate as u64 + lane);
    rng
}

/// Year indices for one replicate: length n, every entry in 0..n.
///
/// Circular scheme: draw ceil(n / b) block starts uniformly, emit b
/// consecutive indices mod n from each, truncate to n. With b = 1 this is
/// the simple scheme exactly, draw for draw. A site with several aligned
/// cells must apply one index sequence to all of them so spatial
/// dependence survives resampling.
pub fn resample(n_years: usize, config: &BootstrapConfig, replicate: usize) -> Result<Vec<usize>> {
    let mut rng = replicate_rng(config.seed, replicate, 0);
    draw_indices(n_years, config, &mut rng)
}

fn draw_indices(n: usize, config: &BootstrapConfig, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let b = match config.scheme {
        Scheme::Simple => 1,
        Scheme::CircularBlock => config.block_length_years as usize,
    };
    if b == 0 || b > n {
        return Err(Error::BootstrapBlockTooLong { b, n });
    }
    let mut idx = Vec::with_capacity(n + b - 1);
    while idx.len() < n {
        let start = rng.gen_range(0..n);
        for k in 0..b {
            idx.push((start + k) % n);
        }
    }
    idx.truncate(n);
    Ok(idx)
}

/// A scalar read off a fitted distribution, the thing a bootstrap
/// distribution is collected for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity<T> {
    Mu,
    Sigma,
    LogSigma,
    Xi,
    ReturnLevel(ReturnLevelQuery<T>),
}

impl<T: Real> Quantity<T> {
    pub fn eval(&self, params: &GevParams<T>) -> T {
        match self {
            Quantity::Mu => params.mu,
            Quantity::Sigma => params.sigma,
            Quantity::LogSigma => params.sigma.ln(),
            Quantity::Xi => params.xi,
            Quantity::ReturnLevel(query) => params.return_level(query),
        }
    }
}

/// Per-parameter bootstrap standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamStdErrors<T> {
    pub mu: T,
    pub sigma: T,
    pub xi: T,
}

/// Point fit plus the replicate estimates behind its uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult<T> {
    pub point: FitResult<T>,
    /// Successful replicate fits; failures are dropped and counted.
    pub replicates: Vec<GevParams<T>>,
    pub n_requested: usize,
    pub n_failed: usize,
    pub standard_errors: ParamStdErrors<T>,
    /// More than 5% of replicates failed.
    pub unreliable: bool,
}

impl<T: Real> BootstrapResult<T> {
    pub fn values(&self, quantity: &Quantity<T>) -> Vec<T> {
        self.replicates.iter().map(|p| quantity.eval(p)).collect()
    }

    /// Standard deviation of the replicate distribution of `quantity`.
    pub fn se(&self, quantity: &Quantity<T>) -> T {
        math::mean_sd(&self.values(quantity)).1
    }

    /// Central empirical interval at `level` (0.90 gives the 5th and 95th
    /// replicate percentiles).
    pub fn envelope(&self, quantity: &Quantity<T>, level: T) -> Result<(T, T)> {
        envelope_of(&self.values(quantity), level)
    }
}

/// Central empirical interval of `values` at `level`.
pub fn envelope_of<T: Real>(values: &[T], level: T) -> Result<(T, T)> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::ProbabilityOutOfRange(level.to_f64().unwrap_or(f64::NAN)));
    }
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let half = T::c(0.5);
    let tail = (T::one() - level) * half;
    Ok((
        math::empirical_quantile(&sorted, tail),
        math::empirical_quantile(&sorted, T::one() - tail),
    ))
}

fn refit_replicate<T: Real>(
    extremes: &BlockExtremes<T>,
    point: &FitResult<T>,
    config: &BootstrapConfig,
    replicate: usize,
    lane: u64,
) -> Result<GevParams<T>> {
    let mut rng = replicate_rng(config.seed, replicate, lane);
    let idx = draw_indices(extremes.n_blocks(), config, &mut rng)?;
    let data = extremes.take(&idx);
    let refit = match point.method {
        FitMethod::Ml => fit::fit_ml_from(&data, &point.params)?,
        FitMethod::Pwm => fit::fit_pwm(&data)?,
    };
    if !refit.converged {
        return Err(Error::FitFailed);
    }
    Ok(refit.params)
}

/// Fit, then refit `config.n_replicates` resampled copies.
pub fn bootstrap_fit<T: Real>(
    extremes: &BlockExtremes<T>,
    config: &BootstrapConfig,
    method: FitMethod,
) -> Result<BootstrapResult<T>> {
    let point = fit::fit(extremes, method)?;
    let mut replicates = Vec::with_capacity(config.n_replicates);
    let mut n_failed = 0usize;
    for k in 0..config.n_replicates {
        match refit_replicate(extremes, &point, config, k, 0) {
            Ok(params) => replicates.push(params),
            Err(Error::BootstrapBlockTooLong { b, n }) => {
                return Err(Error::BootstrapBlockTooLong { b, n })
            }
            Err(_) => n_failed += 1,
        }
    }
    if replicates.is_empty() {
        return Err(Error::FitFailed);
    }
    let field = |f: fn(&GevParams<T>) -> T| {
        math::mean_sd(&replicates.iter().map(f).collect::<Vec<_>>()).1
    };
    Ok(BootstrapResult {
        standard_errors: ParamStdErrors {
            mu: field(|p| p.mu),
            sigma: field(|p| p.sigma),
            xi: field(|p| p.xi),
        },
        unreliable: unreliable(n_failed, config.n_replicates),
        point,
        replicates,
        n_requested: config.n_replicates,
        n_failed,
    })
}

fn unreliable(n_failed: usize, n_requested: usize) -> bool {
    n_failed as f64 > MAX_FAILED_FRACTION * n_requested as f64
}

/// Replicate fits of two states, paired by replicate index. State A draws
/// from stream lane 0, state B from lane 1, so the resampling is
/// independent across states; a pair is dropped when either side fails.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedBootstrap<T> {
    pub point_a: FitResult<T>,
    pub point_b: FitResult<T>,
    pub pairs: Vec<(GevParams<T>, GevParams<T>)>,
    pub n_requested: usize,
    pub n_failed: usize,
    pub unreliable: bool,
}

impl<T: Real> PairedBootstrap<T> {
    /// Replicate differences B - A for one quantity.
    pub fn deltas(&self, quantity: &Quantity<T>) -> Vec<T> {
        self.pairs.iter().map(|(a, b)| quantity.eval(b) - quantity.eval(a)).collect()
    }

    /// Point-estimate difference B - A.
    pub fn point_delta(&self, quantity: &Quantity<T>) -> T {
        quantity.eval(&self.point_b.params) - quantity.eval(&self.point_a.params)
    }
}

pub fn paired_bootstrap<T: Real>(
    state_a: &BlockExtremes<T>,
    state_b: &BlockExtremes<T>,
    config: &BootstrapConfig,
    method: FitMethod,
) -> Result<PairedBootstrap<T>> {
    if state_a.orientation != state_b.orientation {
        return Err(Error::OrientationMismatch);
    }
    if state_a.block_length_b != state_b.block_length_b {
        return Err(Error::InvalidInput("states have different block lengths"));
    }
    let point_a = fit::fit(state_a, method)?;
    let point_b = fit::fit(state_b, method)?;
    let mut pairs = Vec::with_capacity(config.n_replicates);
    let mut n_failed = 0usize;
    for k in 0..config.n_replicates {
        let ra = refit_replicate(state_a, &point_a, config, k, 0);
        let rb = refit_replicate(state_b, &point_b, config, k, 1);
        match (ra, rb) {
            (Ok(a), Ok(b)) => pairs.push((a, b)),
            (Err(Error::BootstrapBlockTooLong { b, n }), _)
            | (_, Err(Error::BootstrapBlockTooLong { b, n })) => {
                return Err(Error::BootstrapBlockTooLong { b, n })
            }
            _ => n_failed += 1,
        }
    }
    Ok(PairedBootstrap {
        point_a,
        point_b,
        pairs,
        n_requested: config.n_replicates,
        n_failed,
        unreliable: unreliable(n_failed, config.n_replicates),
    })
}

/// Two-sided bootstrap p-value with its flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue<T> {
    pub value: T,
    /// Replicate differences had no spread; the value is the 2/K floor.
    pub degenerate: bool,
    /// Too many replicate failures behind this number.
    pub unreliable: bool,
}

/// p = 2 min(#{d <= 0}, #{d >= 0}) / K, floored at 2/K and capped at 1.
/// The floor keeps a finite replicate count from claiming p = 0.
pub fn pvalue_from_deltas<T: Real>(deltas: &[T]) -> Result<PValue<T>> {
    let k = deltas.len();
    if k == 0 {
        return Err(Error::Empty);
    }
    let kf = T::c(k as f64);
    let floor = T::c(2.0) / kf;
    let first = deltas[0];
    if deltas.iter().all(|&d| d == first) {
        return Ok(PValue { value: floor, degenerate: true, unreliable: false });
    }
    let le = deltas.iter().filter(|&&d| d <= T::zero()).count();
    let ge = deltas.iter().filter(|&&d| d >= T::zero()).count();
    let p = T::c(2.0) * T::c(le.min(ge) as f64) / kf;
    Ok(PValue { value: p.max(floor).min(T::one()), degenerate: false, unreliable: false })
}

/// Bootstrap both states and test whether `quantity` differs, two-sided.
pub fn two_state_pvalue<T: Real>(
    state_a: &BlockExtremes<T>,
    state_b: &BlockExtremes<T>,
    quantity: &Quantity<T>,
    config: &BootstrapConfig,
    method: FitMethod,
) -> Result<PValue<T>> {
    if config.n_replicates < MIN_PVALUE_REPLICATES {
        return Err(Error::TooFewObservations {
            need: MIN_PVALUE_REPLICATES,
            got: config.n_replicates,
        });
    }
    let paired = paired_bootstrap(state_a, state_b, config, method)?;
    let mut p = pvalue_from_deltas(&paired.deltas(quantity))?;
    p.unreliable = p.unreliable || paired.unreliable;
    Ok(p)
}
