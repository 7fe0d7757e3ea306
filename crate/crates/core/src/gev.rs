//! Generalized extreme value distribution for block maxima and block minima.
//!
//! The maxima convention is the usual three-parameter family
//! `G(y) = exp(-(1 + xi (y - mu) / sigma)^(-1/xi))`. The minima convention is
//! its exact mirror: evaluating the minima survival function at
//! `(mu, sigma, xi, y)` equals evaluating the maxima CDF at `(-mu, sigma, xi, -y)`,
//! and every minima operation here is computed through that identity, so the
//! two orientations can never drift apart numerically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::BlockExtremes;
use crate::error::{Error, Result};
use crate::num::Real;

/// Shape magnitude below which the xi -> 0 (Gumbel) branch is used.
/// Avoids catastrophic cancellation in `{...}^(-1/xi)`.
pub fn gumbel_switch<T: Real>() -> T {
    T::c(1e-8)
}

/// Which tail of the block a series of extremes comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Maxima,
    Minima,
}

/// Location / scale / shape triple with a tail orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevParams<T> {
    pub mu: T,
    pub sigma: T,
    pub xi: T,
    pub orientation: Orientation,
}

impl<T: Real> GevParams<T> {
    pub fn new(mu: T, sigma: T, xi: T, orientation: Orientation) -> Result<Self> {
        if !(mu.is_finite() && xi.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(Error::InvalidScale);
        }
        Ok(Self { mu, sigma, xi, orientation })
    }

    pub fn maxima(mu: T, sigma: T, xi: T) -> Result<Self> {
        Self::new(mu, sigma, xi, Orientation::Maxima)
    }

    pub fn minima(mu: T, sigma: T, xi: T) -> Result<Self> {
        Self::new(mu, sigma, xi, Orientation::Minima)
    }

    /// Parameters of the negated variable in the maxima convention.
    /// For maxima input this is the identity.
    pub(crate) fn as_maxima_triple(&self) -> (T, T, T) {
        match self.orientation {
            Orientation::Maxima => (self.mu, self.sigma, self.xi),
            Orientation::Minima => (-self.mu, self.sigma, self.xi),
        }
    }

    /// Support interval (lower, upper); unbounded sides are infinite.
    pub fn support(&self) -> (T, T) {
        let eps = gumbel_switch::<T>();
        let (mu, sigma, xi) = (self.mu, self.sigma, self.xi);
        let (lo, hi) = if xi.abs() < eps {
            (T::neg_infinity(), T::infinity())
        } else {
            match self.orientation {
                Orientation::Maxima if xi > T::zero() => (mu - sigma / xi, T::infinity()),
                Orientation::Maxima => (T::neg_infinity(), mu - sigma / xi),
                Orientation::Minima if xi > T::zero() => (T::neg_infinity(), mu + sigma / xi),
                Orientation::Minima => (mu + sigma / xi, T::infinity()),
            }
        };
        (lo, hi)
    }

    /// P(block extreme <= y).
    ///
    /// For minima orientation this is the complement of [`Self::survival`].
    /// Outside the support it clamps to 0 or 1.
    pub fn cdf(&self, y: T) -> Result<T> {
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(match self.orientation {
            Orientation::Maxima => kernel_cdf(self.mu, self.sigma, self.xi, y),
            Orientation::Minima => T::one() - kernel_cdf(-self.mu, self.sigma, self.xi, -y),
        })
    }

    /// P(block extreme > y).
    ///
    /// For minima orientation this is the primary decreasing-in-y form; its
    /// value at the location `mu` is `exp(-1)`, mirroring the maxima CDF.
    pub fn survival(&self, y: T) -> Result<T> {
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(match self.orientation {
            Orientation::Maxima => T::one() - kernel_cdf(self.mu, self.sigma, self.xi, y),
            Orientation::Minima => kernel_cdf(-self.mu, self.sigma, self.xi, -y),
        })
    }

    /// Inverse CDF: the y with `cdf(y) = p`, for p in (0, 1).
    pub fn quantile(&self, p: T) -> Result<T> {
        check_probability(p)?;
        Ok(match self.orientation {
            Orientation::Maxima => kernel_quantile(self.mu, self.sigma, self.xi, p),
            Orientation::Minima => -kernel_quantile(-self.mu, self.sigma, self.xi, T::one() - p),
        })
    }

    /// The level exceeded (maxima) or undercut (minima) once per `r` years on
    /// average: the `1 - p` quantile of the block distribution with `p = b/r`,
    /// where `b` is the block length in years. Strictly increasing in `r` for
    /// maxima, strictly decreasing for minima.
    pub fn return_level(&self, query: &ReturnLevelQuery<T>) -> T {
        let p = query.exceedance_probability();
        match self.orientation {
            Orientation::Maxima => kernel_quantile(self.mu, self.sigma, self.xi, T::one() - p),
            Orientation::Minima => {
                -kernel_quantile(-self.mu, self.sigma, self.xi, T::one() - p)
            }
        }
    }

    /// Sum of per-observation negative log densities.
    ///
    /// Returns `+inf` when any observation lies outside the support. (The
    /// optimizer in the fitting module uses a finite penalty instead; this
    /// accessor reports the honest likelihood.)
    pub fn neg_log_likelihood(&self, extremes: &BlockExtremes<T>) -> Result<T> {
        if extremes.values.is_empty() {
            return Err(Error::Empty);
        }
        if extremes.orientation != self.orientation {
            return Err(Error::OrientationMismatch);
        }
        let (mu, sigma, xi) = self.as_maxima_triple();
        let mut total = T::zero();
        for &y in &extremes.values {
            let y = match self.orientation {
                Orientation::Maxima => y,
                Orientation::Minima => -y,
            };
            match kernel_neg_log_density(mu, sigma, xi, y) {
                Some(v) => total += v,
                None => return Ok(T::infinity()),
            }
        }
        Ok(total)
    }

    /// `n` independent draws by inverse-CDF over a seeded generator.
    /// Reproducible: the same seed yields the same sequence.
    pub fn sample(&self, n: usize, seed: u64) -> Result<BlockExtremes<T>> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            let mut u: f64 = rng.gen();
            while u == 0.0 {
                u = rng.gen();
            }
            values.push(self.quantile(T::c(u)).expect("u in (0,1)"));
        }
        Ok(BlockExtremes { orientation: self.orientation, block_length_b: 1, values })
    }
}

/// Return period / block length pair; the exceedance probability is `b / r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnLevelQuery<T> {
    return_period_r: T,
    block_length_b: u32,
}

impl<T: Real> ReturnLevelQuery<T> {
    pub fn new(return_period_r: T, block_length_b: u32) -> Result<Self> {
        if !return_period_r.is_finite() {
            return Err(Error::NonFinite);
        }
        if block_length_b == 0 || return_period_r <= T::c(block_length_b as f64) {
            return Err(Error::PeriodNotBeyondBlock {
                r: return_period_r.to_f64().unwrap_or(f64::NAN),
                b: block_length_b,
            });
        }
        Ok(Self { return_period_r, block_length_b })
    }

    /// One-year blocks.
    pub fn annual(return_period_r: T) -> Result<Self> {
        Self::new(return_period_r, 1)
    }

    pub fn return_period(&self) -> T {
        self.return_period_r
    }

    pub fn block_length(&self) -> u32 {
        self.block_length_b
    }

    /// p = b / r, guaranteed inside (0, 1).
    pub fn exceedance_probability(&self) -> T {
        T::c(self.block_length_b as f64) / self.return_period_r
    }
}

fn check_probability<T: Real>(p: T) -> Result<()> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::ProbabilityOutOfRange(p.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Maxima-convention CDF, clamped to [0, 1] outside the support.
fn kernel_cdf<T: Real>(mu: T, sigma: T, xi: T, y: T) -> T {
    let s = (y - mu) / sigma;
    if xi.abs() < gumbel_switch::<T>() {
        return (-(-s).exp()).exp();
    }
    let arg = T::one() + xi * s;
    if arg <= T::zero() {
        return if xi > T::zero() { T::zero() } else { T::one() };
    }
    // arg^(-1/xi) through logs: one ln + one exp, stable for tiny arg
    (-(-arg.ln() / xi).exp()).exp()
}

/// Maxima-convention quantile for p in (0, 1).
fn kernel_quantile<T: Real>(mu: T, sigma: T, xi: T, p: T) -> T {
    let w = -p.ln(); // w = -ln p > 0
    if xi.abs() < gumbel_switch::<T>() {
        return mu - sigma * w.ln();
    }
    mu + sigma / xi * ((-xi * w.ln()).exp() - T::one())
}

/// Per-observation negative log density in the maxima convention;
/// `None` outside the support.
pub(crate) fn kernel_neg_log_density<T: Real>(mu: T, sigma: T, xi: T, y: T) -> Option<T> {
    let s = (y - mu) / sigma;
    if xi.abs() < gumbel_switch::<T>() {
        return Some(sigma.ln() + s + (-s).exp());
    }
    let arg = T::one() + xi * s;
    if arg <= T::zero() {
        return None;
    }
    let ln_t = -arg.ln() / xi; // ln of the inner term t = arg^(-1/xi)
    Some(sigma.ln() - (xi + T::one()) * ln_t + ln_t.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn q(r: f64) -> ReturnLevelQuery<f64> {
        ReturnLevelQuery::annual(r).unwrap()
    }

    #[test]
    fn cdf_at_location_is_exp_minus_one() {
        let p = GevParams::maxima(0.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(p.cdf(0.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        let m = GevParams::minima(0.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(m.survival(0.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn cdf_clamps_outside_support() {
        // upper endpoint mu - sigma/xi = 2 for xi = -0.5
        let p = GevParams::maxima(0.0, 1.0, -0.5).unwrap();
        assert_eq!(p.cdf(2.0).unwrap(), 1.0);
        assert_eq!(p.cdf(5.0).unwrap(), 1.0);
        let heavy = GevParams::maxima(0.0, 1.0, 0.5).unwrap();
        assert_eq!(heavy.cdf(-3.0).unwrap(), 0.0);
        // minima lower endpoint mu + sigma/xi with xi < 0
        let m = GevParams::minima(0.0, 1.0, -0.5).unwrap();
        assert_eq!(m.survival(-2.0).unwrap(), 1.0);
    }

    #[test]
    fn frozen_cdf_values() {
        let p = GevParams::maxima(26.4, 2.1, -0.32).unwrap();
        assert_relative_eq!(p.cdf(30.43).unwrap(), 0.950_258_551_495_319_74, max_relative = 1e-12);
        let m = GevParams::minima(-41.9, 7.2, -0.37).unwrap();
        assert_relative_eq!(
            m.survival(-54.88).unwrap(),
            0.950_095_257_296_834_81,
            max_relative = 1e-12
        );
    }

    #[test]
    fn survival_minima_is_decreasing_and_complementary() {
        let m = GevParams::minima(-5.0, 3.0, -0.2).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..60 {
            let y = -25.0 + i as f64;
            let s = m.survival(y).unwrap();
            assert!(s <= last);
            last = s;
            assert_abs_diff_eq!(s + m.cdf(y).unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn duality_is_bit_exact() {
        let m = GevParams::minima(-41.9, 7.2, -0.37).unwrap();
        let dual = GevParams::maxima(41.9, 7.2, -0.37).unwrap();
        for y in [-60.0, -55.0, -48.0, -41.9, -30.0, -20.0] {
            assert_eq!(m.survival(y).unwrap(), dual.cdf(-y).unwrap());
        }
    }

    #[test]
    fn frozen_return_levels() {
        let cases: [(f64, f64, f64, bool, [f64; 3]); 3] = [
            (26.4, 2.1, -0.32, true, [30.425_685_530_096_563, 31.079_716_518_045_570, 31.456_700_667_196_716]),
            (-41.9, 7.2, -0.37, false, [-54.875_307_386_175_203, -56.766_080_105_232_810, -57.811_835_452_987_631]),
            (-6.9, 4.1, -0.10, false, [-17.435_790_309_743_548, -20.146_049_208_855_646, -22.017_756_769_470_655]),
        ];
        for (mu, sigma, xi, is_max, want) in cases {
            let p = if is_max {
                GevParams::maxima(mu, sigma, xi).unwrap()
            } else {
                GevParams::minima(mu, sigma, xi).unwrap()
            };
            for (r, w) in [20.0, 50.0, 100.0].iter().zip(want) {
                assert_relative_eq!(p.return_level(&q(*r)), w, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn gumbel_two_year_level() {
        let p = GevParams::maxima(0.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(p.return_level(&q(2.0)), 0.366_512_920_581_664_33, max_relative = 1e-12);
    }

    #[test]
    fn return_level_inverts_cdf() {
        let p = GevParams::maxima(26.4, 2.1, -0.32).unwrap();
        let y = p.return_level(&q(20.0));
        assert_relative_eq!(p.cdf(y).unwrap(), 1.0 - 1.0 / 20.0, max_relative = 1e-9);
        let m = GevParams::minima(-41.9, 7.2, -0.37).unwrap();
        let y = m.return_level(&q(100.0));
        assert_relative_eq!(m.survival(y).unwrap(), 1.0 - 1.0 / 100.0, max_relative = 1e-9);
    }

    #[test]
    fn block_length_enters_exceedance() {
        let p = GevParams::maxima(0.0, 1.0, -0.1).unwrap();
        let decadal = ReturnLevelQuery::new(100.0, 10).unwrap();
        assert_relative_eq!(decadal.exceedance_probability(), 0.1);
        // same as the 1 - 0.1 quantile
        assert_relative_eq!(p.return_level(&decadal), p.quantile(0.9).unwrap());
    }

    #[test]
    fn frozen_nll_values() {
        let data = BlockExtremes {
            orientation: Orientation::Maxima,
            block_length_b: 1,
            values: vec![0.0, 1.0, 2.0],
        };
        let gumbel = GevParams::maxima(0.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(
            gumbel.neg_log_likelihood(&data).unwrap(),
            4.503_214_724_408_055_0,
            max_relative = 1e-12
        );
        let frechet_ish = GevParams::maxima(0.0, 1.0, 0.1).unwrap();
        assert_relative_eq!(
            frechet_ish.neg_log_likelihood(&data).unwrap(),
            4.600_997_974_900_451_8,
            max_relative = 1e-12
        );
        let single = BlockExtremes {
            orientation: Orientation::Maxima,
            block_length_b: 1,
            values: vec![0.0],
        };
        assert_relative_eq!(gumbel.neg_log_likelihood(&single).unwrap(), 1.0, max_relative = 1e-15);
        let five = BlockExtremes {
            orientation: Orientation::Maxima,
            block_length_b: 1,
            values: vec![0.5, 1.0, 1.6, 2.2, 2.9],
        };
        let p = GevParams::maxima(1.5, 0.8, -0.25).unwrap();
        assert_relative_eq!(
            p.neg_log_likelihood(&five).unwrap(),
            6.303_117_800_314_922_8,
            max_relative = 1e-12
        );
    }

    #[test]
    fn nll_outside_support_is_infinite() {
        let p = GevParams::maxima(0.0, 1.0, -0.5).unwrap();
        let data = BlockExtremes {
            orientation: Orientation::Maxima,
            block_length_b: 1,
            values: vec![3.0_f64],
        };
        assert!(p.neg_log_likelihood(&data).unwrap().is_infinite());
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let p = GevParams::maxima(5.0, 2.0, -0.3).unwrap();
        let a = p.sample(2000, 99).unwrap();
        let b = p.sample(2000, 99).unwrap();
        assert_eq!(a.values, b.values);
        let hi = 5.0 + 2.0 / 0.3;
        assert!(a.values.iter().all(|&v| v < hi));
    }

    #[test]
    fn gumbel_sample_mean_near_euler_gamma() {
        let p = GevParams::maxima(0.0, 1.0, 0.0).unwrap();
        let s = p.sample(100_000, 7).unwrap();
        let mean = s.values.iter().sum::<f64>() / s.values.len() as f64;
        assert_abs_diff_eq!(mean, 0.577_215_664_901_532_9, epsilon = 0.02);
    }

    #[test]
    fn invalid_construction_rejected() {
        assert!(GevParams::maxima(0.0, 0.0, 0.1).is_err());
        assert!(GevParams::maxima(0.0, -1.0, 0.1).is_err());
        assert!(GevParams::maxima(f64::NAN, 1.0, 0.1).is_err());
        assert!(ReturnLevelQuery::new(5.0, 10).is_err());
        assert!(ReturnLevelQuery::annual(1.0).is_err());
    }
}
