//! Climate-like synthetic daily series: an annual cosine cycle over AR(1)
//! noise whose innovation scale can shrink in winter, mimicking reduced
//! cold-season variability. Used for end-to-end checks and calibration
//! experiments; every series is a deterministic function of its spec.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::{in_season, DailySeries, Season, Variable, DAYS_PER_YEAR};
use crate::error::{Error, Result};
use crate::math::splitmix64;
use crate::num::Real;

/// Day of year (1-based) where the annual cycle peaks: mid July.
pub const WARM_PEAK_DAY: u32 = 196;

/// Everything that determines one synthetic series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec<T> {
    pub n_years: usize,
    pub annual_cycle_mean: T,
    pub annual_cycle_amplitude: T,
    /// AR(1) coefficient of the daily residual, |phi| < 1.
    pub ar1_phi: T,
    /// Innovation standard deviation, > 0.
    pub noise_sd: T,
    /// Multiplier on the innovation SD during DJF days, > 0.
    pub winter_sd_scale: T,
    pub seed: u64,
}

impl<T: Real> SyntheticSpec<T> {
    fn validate(&self) -> Result<()> {
        if self.n_years == 0 {
            return Err(Error::InvalidInput("n_years must be at least 1"));
        }
        for v in [self.annual_cycle_mean, self.annual_cycle_amplitude] {
            if !v.is_finite() {
                return Err(Error::InvalidInput("cycle parameters must be finite"));
            }
        }
        if !(self.ar1_phi.abs() < T::one()) {
            return Err(Error::InvalidInput("ar1_phi must satisfy |phi| < 1"));
        }
        if !(self.noise_sd > T::zero() && self.noise_sd.is_finite()) {
            return Err(Error::InvalidInput("noise_sd must be positive"));
        }
        if !(self.winter_sd_scale > T::zero() && self.winter_sd_scale.is_finite()) {
            return Err(Error::InvalidInput("winter_sd_scale must be positive"));
        }
        Ok(())
    }
}

/// Standard normal draws by Box-Muller, one uniform pair per two normals.
struct NormalSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSource {
    fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// Generate the daily series described by `spec`.
///
/// value(day) = mean + amplitude cos(2 pi (doy - 196)/365) + e(day), with
/// e an AR(1) whose innovation SD is noise_sd, scaled by winter_sd_scale
/// on DJF days. The residual starts from the unscaled stationary marginal
/// (SD noise_sd / sqrt(1 - phi^2)); the transient this ignores decays
/// within days.
pub fn generate_daily<T: Real>(spec: &SyntheticSpec<T>) -> Result<DailySeries<T>> {
    spec.validate()?;
    let mut normals = NormalSource::new(spec.seed);
    let phi = spec.ar1_phi;
    let marginal = spec.noise_sd / (T::one() - phi * phi).sqrt();
    let mut residual = T::c(normals.next()) * marginal;

    let n_days = spec.n_years * DAYS_PER_YEAR;
    let two_pi = T::PI() + T::PI();
    let days_per_year = T::c(DAYS_PER_YEAR as f64);
    let mut values = Vec::with_capacity(n_days);
    for day in 0..n_days {
        let doy = (day % DAYS_PER_YEAR) as u32 + 1;
        let scale = if in_season(doy, Season::Djf) { spec.winter_sd_scale } else { T::one() };
        let innovation = T::c(normals.next()) * spec.noise_sd * scale;
        residual = phi * residual + innovation;
        let phase = two_pi * (T::c(doy as f64) - T::c(WARM_PEAK_DAY as f64)) / days_per_year;
        values.push(spec.annual_cycle_mean + spec.annual_cycle_amplitude * phase.cos() + residual);
    }
    DailySeries::new("synthetic", 0.0, 0.0, 1, Variable::Tmax, values)
}

/// Two states from one base spec: B shifts the mean by `delta_mean` and
/// multiplies the winter innovation scale by `winter_sd_ratio`, with an
/// independent (but seed-derived) noise stream.
pub fn two_state_scenario<T: Real>(
    base: &SyntheticSpec<T>,
    delta_mean: T,
    winter_sd_ratio: T,
) -> Result<(DailySeries<T>, DailySeries<T>)> {
    let state_a = generate_daily(base)?;
    let mut derived = *base;
    derived.annual_cycle_mean = base.annual_cycle_mean + delta_mean;
    derived.winter_sd_scale = base.winter_sd_scale * winter_sd_ratio;
    let mut state = base.seed;
    derived.seed = splitmix64(&mut state);
    let state_b = generate_daily(&derived)?;
    Ok((state_a, state_b))
}
