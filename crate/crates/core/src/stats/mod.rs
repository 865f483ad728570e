//! Comparison of simulated statistics with the exact stationary law.

pub mod autocorr;
pub mod gof;
pub mod marginals;
pub mod profile;

pub use autocorr::{effective_sample_size, integrated_autocorr_time, pair_covariance, site_mean, MeanEstimate};
pub use gof::{
    bonferroni, chi_square_discrete, kolmogorov_sf, ks_binned, ks_p_value, ks_samples, GofResult, GofTest,
    MIN_EFFECTIVE_SAMPLES,
};
pub use marginals::{family_passes, marginal_gof, SiteGof};
pub use profile::{profile_report, PairRow, ProfileReport, SiteRow};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{sample_exact_discrete, MixtureSpec};
    use crate::occupation::{stats_from_samples, Binning};
    use crate::params::ChainParams;
    use crate::rng::RngContract;

    fn exact_draws(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let spec = MixtureSpec::discrete(ChainParams::from_densities(n, 1.0, 3.0).unwrap());
        let mut rng = RngContract::new(seed).stream(0);
        (0..count)
            .map(|_| {
                sample_exact_discrete(&spec, &mut rng)
                    .unwrap()
                    .eta
                    .iter()
                    .map(|v| *v as f64)
                    .collect()
            })
            .collect()
    }

    #[test]
    fn exact_samples_give_small_z_scores() {
        let n = 4;
        let draws = exact_draws(n, 100_000, 1);
        let stats = stats_from_samples(n, Binning::Integer, draws.iter().map(|v| v.as_slice()), draws.len(), 1000).unwrap();
        let spec = MixtureSpec::discrete(ChainParams::from_densities(n, 1.0, 3.0).unwrap());
        let report = profile_report(&stats, &spec);
        assert!(report.max_abs_site_z() < 4.0, "{}", report.sites_csv());
        assert!(report.max_abs_pair_z() < 4.0, "{}", report.pairs_csv());
        // i.i.d. rows: effective size close to the sample count
        for r in &report.sites {
            assert!(r.effective_samples > 50_000.0 && r.effective_samples < 200_000.0);
        }
    }

    #[test]
    fn merge_matches_concatenation_for_moments() {
        let n = 3;
        let draws = exact_draws(n, 4000, 2);
        let whole = stats_from_samples(n, Binning::Integer, draws.iter().map(|v| v.as_slice()), 4000, 40).unwrap();
        let mut first = stats_from_samples(n, Binning::Integer, draws[..2000].iter().map(|v| v.as_slice()), 2000, 20).unwrap();
        let mut second = stats_from_samples(n, Binning::Integer, draws[2000..].iter().map(|v| v.as_slice()), 2000, 20).unwrap();
        second.series[0].stream = 1;
        first.merge(&second).unwrap();
        assert_eq!(first.observed_time, whole.observed_time);
        for x in 0..n {
            assert!((first.mean(x) - whole.mean(x)).abs() < 1e-12);
            assert!((first.variance(x) - whole.variance(x)).abs() < 1e-10);
            for y in x + 1..n {
                let (a, b) = (first.covariance(x, y).unwrap(), whole.covariance(x, y).unwrap());
                assert!((a - b).abs() < 1e-10);
            }
            let (ha, hb) = (&first.histograms[x], &whole.histograms[x]);
            for k in 0..ha.len().max(hb.len()) {
                assert_eq!(ha.get(k).unwrap_or(&0.0), hb.get(k).unwrap_or(&0.0));
            }
        }
    }
}
