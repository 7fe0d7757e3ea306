//! Parameter estimation for block extrema.
//!
//! Two estimators: maximum likelihood through a Nelder-Mead search over
//! (mu, log sigma, xi), and the Hosking probability-weighted-moments
//! closed form. Minima are fitted by negating the data, fitting in the
//! maxima convention, and negating the fitted location back; scale and
//! shape carry over unchanged.

use crate::blocks::BlockExtremes;
use crate::error::{Error, Result};
use crate::gev::{gumbel_switch, GevParams, Orientation};
use crate::math;
use crate::num::Real;

/// Minimum number of blocks either estimator accepts. Fits this small are
/// numerically legal but statistically meaningless; callers wanting stable
/// shape estimates should bring dozens of blocks, not three.
pub const MIN_OBSERVATIONS: usize = 3;

const MAX_ITERATIONS: usize = 10_000;
/// Objective value standing in for an inadmissible parameter point.
const PENALTY_FLOOR: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitMethod {
    /// Maximum likelihood via Nelder-Mead.
    Ml,
    /// Probability-weighted moments, Hosking's closed form.
    Pwm,
}

/// A fitted distribution plus bookkeeping about how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub params: GevParams<T>,
    pub method: FitMethod,
    /// Minimized negative log likelihood; `None` for moment fits.
    pub nll: Option<T>,
    /// False when the search stopped at the iteration cap.
    pub converged: bool,
    pub n_obs: usize,
    /// Block length in years of the extremes that were fitted.
    pub block_length_b: u32,
    pub iterations: usize,
}

pub fn fit<T: Real>(extremes: &BlockExtremes<T>, method: FitMethod) -> Result<FitResult<T>> {
    match method {
        FitMethod::Ml => fit_ml(extremes),
        FitMethod::Pwm => fit_pwm(extremes),
    }
}

/// Maximum likelihood fit started from moment estimates
/// (sigma0 = s sqrt(6)/pi, mu0 = mean - gamma_E sigma0, xi0 = 0.1).
pub fn fit_ml<T: Real>(extremes: &BlockExtremes<T>) -> Result<FitResult<T>> {
    let ys = oriented_values(extremes)?;
    let (mean, sd) = math::mean_sd(&ys);
    if !(sd > T::zero()) {
        return Err(Error::DegenerateMoments);
    }
    let sigma0 = sd * T::c(6.0).sqrt() / T::PI();
    let theta0 = [mean - T::euler_gamma() * sigma0, sigma0.ln(), T::c(0.1)];
    let steps = [T::c(0.5) * sigma0, T::c(0.25), T::c(0.15)];
    finish_ml(extremes, ys, theta0, steps)
}

/// Maximum likelihood fit started from known-good parameters, for
/// re-fitting resampled data where the answer is near the original fit.
pub fn fit_ml_from<T: Real>(
    extremes: &BlockExtremes<T>,
    start: &GevParams<T>,
) -> Result<FitResult<T>> {
    if start.orientation != extremes.orientation {
        return Err(Error::OrientationMismatch);
    }
    let ys = oriented_values(extremes)?;
    let (mu, sigma, xi) = start.as_maxima_triple();
    let theta0 = [mu, sigma.ln(), xi];
    let steps = [T::c(0.05) * sigma, T::c(0.02), T::c(0.02)];
    finish_ml(extremes, ys, theta0, steps)
}

fn finish_ml<T: Real>(
    extremes: &BlockExtremes<T>,
    ys: Vec<T>,
    theta0: [T; 3],
    steps: [T; 3],
) -> Result<FitResult<T>> {
    let (theta, fval, iterations, converged) =
        nelder_mead(|t| penalized_nll(&ys, t[0], t[1], t[2]), theta0, steps);
    if fval >= T::c(PENALTY_FLOOR) {
        return Err(Error::FitFailed);
    }
    let (mu, sigma, xi) = (theta[0], theta[1].exp(), theta[2]);
    let params = match extremes.orientation {
        Orientation::Maxima => GevParams::maxima(mu, sigma, xi)?,
        Orientation::Minima => GevParams::minima(-mu, sigma, xi)?,
    };
    Ok(FitResult {
        params,
        method: FitMethod::Ml,
        nll: Some(fval),
        converged,
        n_obs: ys.len(),
        block_length_b: extremes.block_length_b,
        iterations,
    })
}

/// Hosking's probability-weighted-moments estimator.
pub fn fit_pwm<T: Real>(extremes: &BlockExtremes<T>) -> Result<FitResult<T>> {
    let mut ys = oriented_values(extremes)?;
    ys.sort_by(|a, b| a.partial_cmp(b).expect("finite by construction"));
    let [b0, b1, b2] = pwm_moments(&ys);

    let two = T::c(2.0);
    let spread = two * b1 - b0;
    let denom = T::c(3.0) * b2 - b0;
    if denom == T::zero() {
        return Err(Error::DegenerateMoments);
    }
    let c = spread / denom - two.ln() / T::c(3.0).ln();
    let k = T::c(7.8590) * c + T::c(2.9554) * c * c;

    let (mu, sigma) = if k.abs() < gumbel_switch::<T>() {
        let sigma = spread / two.ln();
        (b0 - T::euler_gamma() * sigma, sigma)
    } else {
        let g = math::gamma(T::one() + k);
        let sigma = spread * k / (g * (T::one() - two.powf(-k)));
        (b0 + sigma * (g - T::one()) / k, sigma)
    };
    if !(sigma > T::zero() && sigma.is_finite() && mu.is_finite()) {
        return Err(Error::DegenerateMoments);
    }
    let xi = -k;

    let params = match extremes.orientation {
        Orientation::Maxima => GevParams::maxima(mu, sigma, xi)?,
        Orientation::Minima => GevParams::minima(-mu, sigma, xi)?,
    };
    Ok(FitResult {
        params,
        method: FitMethod::Pwm,
        nll: None,
        converged: true,
        n_obs: ys.len(),
        block_length_b: extremes.block_length_b,
        iterations: 0,
    })
}

/// Data in the maxima convention: minima series come back negated.
fn oriented_values<T: Real>(extremes: &BlockExtremes<T>) -> Result<Vec<T>> {
    let n = extremes.values.len();
    if n < MIN_OBSERVATIONS {
        return Err(Error::TooFewObservations { need: MIN_OBSERVATIONS, got: n });
    }
    Ok(match extremes.orientation {
        Orientation::Maxima => extremes.values.clone(),
        Orientation::Minima => extremes.values.iter().map(|&v| -v).collect(),
    })
}

/// First three probability-weighted moments b0, b1, b2 of sorted data:
/// b_r = n^-1 sum_j y_(j) prod_{l=1..r} (j - l) / (n - l), j 1-based.
pub fn pwm_moments<T: Real>(sorted: &[T]) -> [T; 3] {
    let n = sorted.len();
    let nf = T::c(n as f64);
    let d1 = nf - T::one();
    let d2 = nf - T::c(2.0);
    let mut b = [T::zero(); 3];
    for (j0, &y) in sorted.iter().enumerate() {
        let w1 = T::c(j0 as f64) / d1;
        let w2 = w1 * (T::c(j0 as f64) - T::one()) / d2;
        b[0] += y;
        b[1] += y * w1;
        b[2] += y * w2;
    }
    b.map(|v| v / nf)
}

/// Negative log likelihood in (mu, log sigma, xi) coordinates with a
/// penalty plateau outside the support, so the simplex can walk back in.
fn penalized_nll<T: Real>(ys: &[T], mu: T, log_sigma: T, xi: T) -> T {
    let big = T::c(PENALTY_FLOOR);
    let sigma = log_sigma.exp();
    if !sigma.is_finite() || !(sigma > T::zero()) {
        return big + big;
    }
    let mut nll = T::zero();
    let mut violation = T::zero();
    if xi.abs() < gumbel_switch::<T>() {
        for &y in ys {
            let s = (y - mu) / sigma;
            nll += log_sigma + s + (-s).exp();
        }
    } else {
        let shape_coeff = T::one() + xi.recip();
        for &y in ys {
            let arg = T::one() + xi * (y - mu) / sigma;
            if arg <= T::zero() {
                violation += arg * arg;
            } else {
                let ln_arg = arg.ln();
                nll += log_sigma + shape_coeff * ln_arg + (-ln_arg / xi).exp();
            }
        }
    }
    if violation > T::zero() {
        return big + violation;
    }
    if !nll.is_finite() {
        return big;
    }
    nll
}

/// Nelder-Mead with standard coefficients (reflect 1, expand 2,
/// contract 1/2, shrink 1/2). Stops when both the objective spread and
/// the simplex extent are small relative to the best vertex.
fn nelder_mead<T: Real, F: Fn(&[T; 3]) -> T>(
    f: F,
    x0: [T; 3],
    steps: [T; 3],
) -> ([T; 3], T, usize, bool) {
    let tol_f = T::c(1e-10).max(T::epsilon() * T::c(100.0));
    let tol_x = T::c(1e-8).max(T::epsilon() * T::c(1000.0));

    let mut pts = [x0; 4];
    for i in 0..3 {
        pts[i + 1][i] += steps[i];
    }
    let mut fv = [T::zero(); 4];
    for (p, v) in pts.iter().zip(fv.iter_mut()) {
        *v = f(p);
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        // order so fv[0] is best, fv[3] worst
        for i in 1..4 {
            let mut j = i;
            while j > 0 && fv[j] < fv[j - 1] {
                fv.swap(j, j - 1);
                pts.swap(j, j - 1);
                j -= 1;
            }
        }

        let f_spread = fv[3] - fv[0];
        let mut x_spread = T::zero();
        let mut x_scale = T::one();
        for i in 0..3 {
            for p in &pts[1..] {
                x_spread = x_spread.max((p[i] - pts[0][i]).abs());
            }
            x_scale = x_scale.max(pts[0][i].abs());
        }
        if f_spread <= tol_f * (fv[0].abs() + tol_f) && x_spread <= tol_x * x_scale {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = [T::zero(); 3];
        for p in &pts[..3] {
            for i in 0..3 {
                centroid[i] += p[i] / T::c(3.0);
            }
        }
        let shifted = |coeff: T| {
            let mut x = [T::zero(); 3];
            for i in 0..3 {
                x[i] = centroid[i] + coeff * (pts[3][i] - centroid[i]);
            }
            x
        };

        let xr = shifted(-T::one());
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = shifted(-T::c(2.0));
            let fe = f(&xe);
            if fe < fr {
                pts[3] = xe;
                fv[3] = fe;
            } else {
                pts[3] = xr;
                fv[3] = fr;
            }
        } else if fr < fv[2] {
            pts[3] = xr;
            fv[3] = fr;
        } else {
            let (xc, fc) = if fr < fv[3] {
                let x = shifted(-T::c(0.5));
                let v = f(&x);
                (x, v)
            } else {
                let x = shifted(T::c(0.5));
                let v = f(&x);
                (x, v)
            };
            if fc < fv[3].min(fr) {
                pts[3] = xc;
                fv[3] = fc;
            } else {
                for i in 1..4 {
                    for d in 0..3 {
                        pts[i][d] = pts[0][d] + T::c(0.5) * (pts[i][d] - pts[0][d]);
                    }
                    fv[i] = f(&pts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..4 {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    (pts[best], fv[best], iterations, converged)
}
