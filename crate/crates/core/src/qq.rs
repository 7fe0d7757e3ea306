//! Quantile-quantile goodness-of-fit pairs.

use crate::blocks::BlockExtremes;
use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::num::Real;

/// Sorted observations paired with fitted quantiles at plotting positions
/// p_i = i / (n + 1). A good fit puts every pair near the diagonal.
pub fn qq_pairs<T: Real>(
    extremes: &BlockExtremes<T>,
    fit: &FitResult<T>,
) -> Result<Vec<(T, T)>> {
    if extremes.orientation != fit.params.orientation {
        return Err(Error::OrientationMismatch);
    }
    if extremes.values.is_empty() {
        return Err(Error::Empty);
    }
    let mut sorted = extremes.values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite extremes"));
    let denom = T::c(sorted.len() as f64) + T::one();
    sorted
        .into_iter()
        .enumerate()
        .map(|(i0, empirical)| {
            let p = T::c((i0 + 1) as f64) / denom;
            Ok((empirical, fit.params.quantile(p)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::{fit_pwm, FitMethod};
    use crate::gev::{GevParams, Orientation};
    use approx::assert_relative_eq;

    fn fabricated_fit(params: GevParams<f64>) -> FitResult<f64> {
        FitResult {
            params,
            method: FitMethod::Ml,
            nll: None,
            converged: true,
            n_obs: 0,
            block_length_b: 1,
            iterations: 0,
        }
    }

    #[test]
    fn gumbel_three_point_positions() {
        let fit = fabricated_fit(GevParams::maxima(0.0, 1.0, 0.0).unwrap());
        let data = BlockExtremes {
            orientation: Orientation::Maxima,
            block_length_b: 1,
            values: vec![0.5, -0.2, 1.1],
        };
        let pairs = qq_pairs(&data, &fit).unwrap();
        assert_eq!(pairs.iter().map(|p| p.0).collect::<Vec<_>>(), vec![-0.2, 0.5, 1.1]);
        // fitted quantiles at p = 1/4, 1/2, 3/4 of the standard Gumbel
        assert_relative_eq!(pairs[0].1, -0.326_634_259_978_280_98, max_relative = 1e-12);
        assert_relative_eq!(pairs[1].1, 0.366_512_920_581_664_33, max_relative = 1e-12);
        assert_relative_eq!(pairs[2].1, 1.245_899_323_707_238_2, max_relative = 1e-12);
    }

    #[test]
    fn perfect_data_sits_on_the_diagonal() {
        let params = GevParams::maxima(26.4, 2.1, -0.32).unwrap();
        let n = 40;
        let values: Vec<f64> =
            (1..=n).map(|i| params.quantile(i as f64 / (n + 1) as f64).unwrap()).collect();
        let data = BlockExtremes { orientation: Orientation::Maxima, block_length_b: 1, values };
        for (empirical, fitted) in qq_pairs(&data, &fabricated_fit(params)).unwrap() {
            assert_relative_eq!(empirical, fitted, max_relative = 1e-13);
        }
    }

    #[test]
    fn departure_shrinks_with_sample_size() {
        // mean gap, not the sup: the largest order statistic is too noisy
        // to shrink monotonically at these sizes
        let params = GevParams::maxima(0.0, 1.0, -0.2).unwrap();
        let mean_distance = |n: usize| {
            let data = params.sample(n, 31).unwrap();
            let fit = fit_pwm(&data).unwrap();
            let pairs = qq_pairs(&data, &fit).unwrap();
            pairs.iter().map(|(e, f): &(f64, f64)| (e - f).abs()).sum::<f64>()
                / pairs.len() as f64
        };
        let d_small = mean_distance(150);
        let d_large = mean_distance(3000);
        assert!(d_large < d_small, "mean gap {d_small} -> {d_large}");
        assert!(d_large < 0.02, "mean gap {d_large}");
    }

    #[test]
    fn minima_pairs_mirror_maxima_pairs() {
        let params_max = GevParams::maxima(2.0, 1.5, -0.25).unwrap();
        let data_max = params_max.sample(20, 9).unwrap();
        let fit_max = fabricated_fit(params_max);

        let data_min = BlockExtremes {
            orientation: Orientation::Minima,
            block_length_b: 1,
            values: data_max.values.iter().map(|&v| -v).collect(),
        };
        let fit_min = fabricated_fit(GevParams::minima(-2.0, 1.5, -0.25).unwrap());

        let pairs_max = qq_pairs(&data_max, &fit_max).unwrap();
        let mut mirrored: Vec<(f64, f64)> =
            qq_pairs(&data_min, &fit_min).unwrap().iter().map(|&(e, f)| (-e, -f)).collect();
        mirrored.reverse();
        // observations mirror exactly; fitted values only up to rounding in
        // the complemented plotting position
        for (p, m) in pairs_max.iter().zip(&mirrored) {
            assert_eq!(p.0, m.0);
            assert_relative_eq!(p.1, m.1, max_relative = 1e-13);
        }
    }

    #[test]
    fn orientation_must_agree() {
        let fit = fabricated_fit(GevParams::minima(0.0, 1.0, 0.0).unwrap());
        let data = BlockExtremes {
            orientation: Orientation::Maxima,
            block_length_b: 1,
            values: vec![1.0_f64, 2.0],
        };
        assert!(matches!(qq_pairs(&data, &fit), Err(Error::OrientationMismatch)));
    }
}
