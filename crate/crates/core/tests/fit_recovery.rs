//! Parameter recovery and equivariance checks running the public fitting
//! API on samples drawn from known distributions.

use approx::assert_relative_eq;
use gevkit::blocks::{annual_maxima, BlockExtremes};
use gevkit::fit::{fit_ml, fit_pwm};
use gevkit::gev::{GevParams, Orientation, ReturnLevelQuery};
use gevkit::synth::{generate_daily, SyntheticSpec};

#[test]
fn ml_recovers_maxima_parameters_from_large_sample() {
    let truth = GevParams::maxima(30.0_f64, 2.0, -0.2).unwrap();
    let data = truth.sample(4000, 11).unwrap();
    let fit = fit_ml(&data).unwrap();
    assert!(fit.converged);
    assert!((fit.params.mu - 30.0).abs() < 0.2, "mu {}", fit.params.mu);
    assert!((fit.params.sigma - 2.0).abs() < 0.15, "sigma {}", fit.params.sigma);
    assert!((fit.params.xi + 0.2).abs() < 0.05, "xi {}", fit.params.xi);
    assert_eq!(fit.n_obs, 4000);
    assert_eq!(fit.params.orientation, Orientation::Maxima);
}

#[test]
fn pwm_recovers_minima_parameters_from_large_sample() {
    let truth = GevParams::minima(-10.0_f64, 3.0, -0.15).unwrap();
    let data = truth.sample(4000, 17).unwrap();
    let fit = fit_pwm(&data).unwrap();
    assert!((fit.params.mu + 10.0).abs() < 0.3, "mu {}", fit.params.mu);
    assert!((fit.params.sigma - 3.0).abs() < 0.2, "sigma {}", fit.params.sigma);
    assert!((fit.params.xi + 0.15).abs() < 0.06, "xi {}", fit.params.xi);
    assert_eq!(fit.params.orientation, Orientation::Minima);
}

#[test]
fn gumbel_data_fits_near_zero_shape() {
    let truth = GevParams::maxima(0.0_f64, 1.0, 0.0).unwrap();
    let data = truth.sample(4000, 23).unwrap();
    let ml = fit_ml(&data).unwrap();
    let pwm = fit_pwm(&data).unwrap();
    assert!(ml.params.xi.abs() < 0.04, "ml xi {}", ml.params.xi);
    assert!(pwm.params.xi.abs() < 0.04, "pwm xi {}", pwm.params.xi);
}

#[test]
fn ml_and_pwm_agree_on_large_sample() {
    let truth = GevParams::maxima(30.0_f64, 2.0, -0.2).unwrap();
    let data = truth.sample(4000, 11).unwrap();
    let ml = fit_ml(&data).unwrap();
    let pwm = fit_pwm(&data).unwrap();
    assert!((ml.params.mu - pwm.params.mu).abs() < 0.1);
    assert!((ml.params.sigma - pwm.params.sigma).abs() < 0.1);
    assert!((ml.params.xi - pwm.params.xi).abs() < 0.04);
}

#[test]
fn pwm_location_shift_equivariance() {
    let truth = GevParams::maxima(5.0_f64, 1.5, -0.25).unwrap();
    let data = truth.sample(300, 41).unwrap();
    let shifted = BlockExtremes {
        orientation: data.orientation,
        block_length_b: data.block_length_b,
        values: data.values.iter().map(|v| v + 100.0).collect(),
    };
    let base = fit_pwm(&data).unwrap();
    let moved = fit_pwm(&shifted).unwrap();
    assert_relative_eq!(moved.params.mu, base.params.mu + 100.0, max_relative = 1e-12);
    assert_relative_eq!(moved.params.sigma, base.params.sigma, max_relative = 1e-10);
    assert_relative_eq!(moved.params.xi, base.params.xi, max_relative = 1e-9);
}

#[test]
fn pwm_scale_equivariance() {
    let truth = GevParams::maxima(5.0_f64, 1.5, -0.25).unwrap();
    let data = truth.sample(300, 41).unwrap();
    let scaled = BlockExtremes {
        orientation: data.orientation,
        block_length_b: data.block_length_b,
        values: data.values.iter().map(|v| v * 7.0).collect(),
    };
    let base = fit_pwm(&data).unwrap();
    let wide = fit_pwm(&scaled).unwrap();
    assert_relative_eq!(wide.params.mu, base.params.mu * 7.0, max_relative = 1e-12);
    assert_relative_eq!(wide.params.sigma, base.params.sigma * 7.0, max_relative = 1e-12);
    assert_relative_eq!(wide.params.xi, base.params.xi, max_relative = 1e-10);
}

#[test]
fn ml_location_shift_equivariance() {
    let truth = GevParams::maxima(5.0_f64, 1.5, -0.25).unwrap();
    let data = truth.sample(300, 43).unwrap();
    let shifted = BlockExtremes {
        orientation: data.orientation,
        block_length_b: data.block_length_b,
        values: data.values.iter().map(|v| v + 100.0).collect(),
    };
    let base = fit_ml(&data).unwrap();
    let moved = fit_ml(&shifted).unwrap();
    // the likelihood surface translates, so the optimizer lands in the
    // same place up to its own tolerance
    assert!((moved.params.mu - base.params.mu - 100.0).abs() < 1e-3);
    assert!((moved.params.sigma - base.params.sigma).abs() < 1e-3);
    assert!((moved.params.xi - base.params.xi).abs() < 1e-3);
    assert_relative_eq!(
        moved.nll.unwrap(),
        base.nll.unwrap(),
        max_relative = 1e-8
    );
}

#[test]
fn ml_fit_is_a_local_minimum() {
    let truth = GevParams::maxima(0.0_f64, 1.0, -0.2).unwrap();
    let data = truth.sample(500, 47).unwrap();
    let fit = fit_ml(&data).unwrap();
    let at = fit.nll.unwrap();
    let scale = [fit.params.sigma * 1e-3, fit.params.sigma * 1e-3, 1e-3];
    for dim in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut p = [fit.params.mu, fit.params.sigma, fit.params.xi];
            p[dim] += sign * scale[dim];
            let nearby = GevParams::maxima(p[0], p[1], p[2]).unwrap();
            let nll = nearby.neg_log_likelihood(&data).unwrap();
            assert!(
                nll >= at - 1e-7,
                "dim {dim} sign {sign}: {nll} < {at}"
            );
        }
    }
}

#[test]
fn return_level_curve_from_fit_is_ordered() {
    let truth = GevParams::minima(-41.9_f64, 7.2, -0.37).unwrap();
    let data = truth.sample(1000, 29).unwrap();
    let fit = fit_ml(&data).unwrap();
    let levels: Vec<f64> = [10.0, 20.0, 50.0, 100.0, 500.0]
        .iter()
        .map(|&r| fit.params.return_level(&ReturnLevelQuery::annual(r).unwrap()))
        .collect();
    for w in levels.windows(2) {
        assert!(w[1] < w[0], "cold levels must fall with period: {levels:?}");
    }
    // 20-year level from a 1000-block fit lands close to the population value
    assert!((levels[1] - -54.875307386175203).abs() < 0.8, "{}", levels[1]);
}

#[test]
fn synthetic_daily_pipeline_recovers_mean_shift() {
    let base: SyntheticSpec<f64> = SyntheticSpec {
        n_years: 120,
        annual_cycle_mean: 10.0,
        annual_cycle_amplitude: 13.5,
        ar1_phi: 0.5,
        noise_sd: 3.0,
        winter_sd_scale: 1.0,
        seed: 5,
    };
    let mut lifted = base;
    lifted.annual_cycle_mean += 5.0;

    let warm_a = annual_maxima(&generate_daily(&base).unwrap()).unwrap();
    let warm_b = annual_maxima(&generate_daily(&lifted).unwrap()).unwrap();
    let fit_a = fit_pwm(&warm_a).unwrap();
    let fit_b = fit_pwm(&warm_b).unwrap();

    // identical noise stream, so the whole summer shifts by exactly +5
    assert_relative_eq!(fit_b.params.mu, fit_a.params.mu + 5.0, max_relative = 1e-9);
    assert_relative_eq!(fit_b.params.sigma, fit_a.params.sigma, max_relative = 1e-9);
    assert_relative_eq!(fit_b.params.xi, fit_a.params.xi, max_relative = 1e-8);

    // summer peak sits near mean + amplitude plus a positive excursion
    assert!(fit_a.params.mu > 23.5 && fit_a.params.mu < 35.0, "mu {}", fit_a.params.mu);
}
