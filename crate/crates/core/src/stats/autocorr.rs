//! Autocorrelation-corrected standard errors from block series.

use serde::{Deserialize, Serialize};

use crate::occupation::{pair_index, OccupationStats};

/// Integrated autocorrelation time of `series` in units of its spacing,
/// by Geyer's initial positive sequence estimator. Clamped below at 1.
pub fn integrated_autocorr_time(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return 1.0;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let gamma0 = autocov(0);
    if gamma0 <= 0.0 {
        return 1.0;
    }
    let mut sum = -gamma0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = autocov(2 * m) + autocov(2 * m + 1);
        if pair <= 0.0 {
            break;
        }
        // initial monotone sequence
        let pair = pair.min(prev);
        sum += 2.0 * pair;
        prev = pair;
        m += 1;
    }
    (sum / gamma0).max(1.0)
}

/// Time average with its autocorrelation-corrected standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Largest integrated autocorrelation time across replicas, in blocks.
    pub tau_blocks: f64,
}

/// Variance of the time average of one quantity, combining replicas by
/// their observed time. `blocks` yields `(block_len, block_means)` per replica.
fn combined_variance<'a>(blocks: impl Iterator<Item = (f64, Vec<f64>)>, total_time: f64) -> (f64, f64) {
    let mut var = 0.0;
    let mut tau_max: f64 = 0.0;
    for (block_len, means) in blocks {
        let nb = means.len();
        if nb == 0 {
            continue;
        }
        let weight = block_len * nb as f64 / total_time;
        let mean = means.iter().sum::<f64>() / nb as f64;
        let s2 = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nb as f64;
        let tau = integrated_autocorr_time(&means);
        tau_max = tau_max.max(tau);
        var += weight * weight * s2 * tau / nb as f64;
    }
    (var, tau_max)
}

/// Time average of site `x`.
pub fn site_mean(stats: &OccupationStats, x: usize) -> MeanEstimate {
    let (var, tau) = combined_variance(
        stats.series.iter().map(|s| (s.block_len, s.site_means(x))),
        stats.observed_time,
    );
    MeanEstimate {
        value: stats.mean(x),
        std_error: var.sqrt(),
        tau_blocks: tau,
    }
}

/// Effective number of independent samples behind the mean of site `x`.
pub fn effective_sample_size(stats: &OccupationStats, x: usize) -> f64 {
    let est = site_mean(stats, x);
    if est.std_error == 0.0 {
        return 0.0;
    }
    stats.variance(x) / (est.std_error * est.std_error)
}

/// Time-averaged covariance of sites `x < y`, with a delta-method error
/// from the blocks of `xy - mean_y x - mean_x y`. `None` without pair tracking.
pub fn pair_covariance(stats: &OccupationStats, x: usize, y: usize) -> Option<MeanEstimate> {
    let value = stats.covariance(x, y)?;
    let (a, b) = if x < y { (x, y) } else { (y, x) };
    let p = pair_index(stats.n_sites, a, b);
    let (ma, mb) = (stats.mean(a), stats.mean(b));
    let (var, tau) = combined_variance(
        stats.series.iter().map(|s| {
            let (sa, sb, sp) = (s.site_means(a), s.site_means(b), s.pair_means(p));
            let psi = sp
                .iter()
                .zip(sa.iter().zip(&sb))
                .map(|(xy, (xa, xb))| xy - mb * xa - ma * xb)
                .collect();
            (s.block_len, psi)
        }),
        stats.observed_time,
    );
    Some(MeanEstimate {
        value,
        std_error: var.sqrt(),
        tau_blocks: tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngContract;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngContract::new(seed).stream(0);
        let mut v = 0.0;
        (0..n)
            .map(|_| {
                v = phi * v + rng.sample::<f64, _>(StandardNormal);
                v
            })
            .collect()
    }

    #[test]
    fn white_noise_has_unit_time() {
        let tau = integrated_autocorr_time(&ar1(0.0, 20_000, 1));
        assert!((tau - 1.0).abs() < 0.1, "tau {tau}");
    }

    #[test]
    fn ar1_matches_closed_form() {
        // tau = (1 + phi) / (1 - phi)
        for (phi, seed) in [(0.5, 2), (0.8, 3)] {
            let tau = integrated_autocorr_time(&ar1(phi, 200_000, seed));
            let exact = (1.0 + phi) / (1.0 - phi);
            assert!((tau / exact - 1.0).abs() < 0.1, "phi {phi}: {tau} vs {exact}");
        }
    }

    #[test]
    fn constant_series() {
        assert_eq!(integrated_autocorr_time(&[2.0; 100]), 1.0);
    }
}
