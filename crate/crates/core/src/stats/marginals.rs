//! Site-by-site goodness of fit of simulated histograms against the exact marginals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{marginal_cdf_continuous, marginal_pmf_table, MixtureSpec, Model};
use crate::occupation::{Binning, OccupationStats};
use crate::stats::autocorr::effective_sample_size;
use crate::stats::gof::{bonferroni, chi_square_discrete, ks_binned, GofResult};

/// Accuracy of each marginal probability fed to the tests.
pub const MARGINAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteGof {
    /// 1-based site index.
    pub site: usize,
    pub result: GofResult,
}

/// Chi-square (integer histograms) or binned KS (log histograms) per site,
/// with the effective sample size of the site mean.
pub fn marginal_gof(stats: &OccupationStats, spec: &MixtureSpec) -> Result<Vec<SiteGof>> {
    if stats.n_sites != spec.n() {
        return Err(Error::invalid("stats", format!("{} sites, law has {}", stats.n_sites, spec.n())));
    }
    (0..stats.n_sites)
        .map(|x| {
            let n_eff = effective_sample_size(stats, x);
            let result = match (&stats.binning, spec.model) {
                (Binning::Integer, Model::Discrete) => {
                    let observed = &stats.histograms[x];
                    let k_max = observed.len().max(1) as u64 - 1;
                    let expected = marginal_pmf_table(spec, x + 1, k_max, MARGINAL_TOL)?;
                    chi_square_discrete(observed, &expected, n_eff)
                }
                (binning @ Binning::Log { .. }, Model::Continuous) => {
                    // the cdf is needed at every bin edge; evaluate once per edge
                    let edges: Vec<f64> = (0..stats.histograms[x].len()).map(|i| binning.edges(i).1).collect();
                    let cdf_values = edges
                        .iter()
                        .map(|t| if t.is_finite() { marginal_cdf_continuous(spec, x + 1, *t, MARGINAL_TOL) } else { Ok(1.0) })
                        .collect::<Result<Vec<f64>>>()?;
                    let lookup = |t: f64| {
                        let i = edges.iter().position(|e| *e == t).expect("cdf queried at bin edges only");
                        cdf_values[i]
                    };
                    ks_binned(&stats.histograms[x], binning, lookup, n_eff)
                }
                (binning, model) => {
                    return Err(Error::invalid("binning", format!("{binning:?} does not fit the {model:?} law")));
                }
            };
            Ok(SiteGof { site: x + 1, result })
        })
        .collect()
}

/// Family verdict at level `alpha` with Bonferroni correction across sites:
/// `None` if any test is inconclusive.
pub fn family_passes(results: &[SiteGof], alpha: f64) -> Option<bool> {
    let level = bonferroni(alpha, results.len());
    let mut all = true;
    for r in results {
        all &= r.result.passes(level)?;
    }
    Some(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{sample_exact_continuous, sample_exact_discrete};
    use crate::occupation::stats_from_samples;
    use crate::params::ChainParams;
    use crate::rng::RngContract;

    #[test]
    fn exact_draws_pass_both_tests() {
        let mut rng = RngContract::new(11).stream(0);
        let spec = MixtureSpec::discrete(ChainParams::from_densities(3, 1.0, 3.0).unwrap());
        let draws: Vec<Vec<f64>> = (0..50_000)
            .map(|_| sample_exact_discrete(&spec, &mut rng).unwrap().eta.iter().map(|v| *v as f64).collect())
            .collect();
        let stats = stats_from_samples(3, Binning::Integer, draws.iter().map(|d| d.as_slice()), draws.len(), 256).unwrap();
        let res = marginal_gof(&stats, &spec).unwrap();
        assert_eq!(family_passes(&res, 0.01), Some(true), "{res:?}");

        let spec = MixtureSpec::continuous(ChainParams::continuous(3, 1.0, 2.0).unwrap());
        let draws: Vec<Vec<f64>> = (0..50_000).map(|_| sample_exact_continuous(&spec, &mut rng).unwrap().z).collect();
        let binning = Binning::Log { lo: 1e-4, hi: 100.0, bins: 120 };
        let stats = stats_from_samples(3, binning, draws.iter().map(|d| d.as_slice()), draws.len(), 256).unwrap();
        let res = marginal_gof(&stats, &spec).unwrap();
        assert_eq!(family_passes(&res, 0.01), Some(true), "{res:?}");
    }

    #[test]
    fn wrong_law_is_rejected() {
        let mut rng = RngContract::new(12).stream(0);
        let spec = MixtureSpec::discrete(ChainParams::from_densities(2, 1.0, 3.0).unwrap());
        let draws: Vec<Vec<f64>> = (0..50_000)
            .map(|_| sample_exact_discrete(&spec, &mut rng).unwrap().eta.iter().map(|v| *v as f64).collect())
            .collect();
        let stats = stats_from_samples(2, Binning::Integer, draws.iter().map(|d| d.as_slice()), draws.len(), 256).unwrap();
        let other = MixtureSpec::discrete(ChainParams::from_densities(2, 1.2, 3.0).unwrap());
        assert_eq!(family_passes(&marginal_gof(&stats, &other).unwrap(), 0.01), Some(false));
    }
}
