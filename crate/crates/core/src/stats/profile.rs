//! Empirical density profile and covariances against the exact moments.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::measure::{moment_profile, MixtureSpec};
use crate::occupation::OccupationStats;
use crate::stats::autocorr::{pair_covariance, site_mean};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteRow {
    /// 1-based site index.
    pub site: usize,
    pub mean: f64,
    pub std_error: f64,
    pub exact: f64,
    pub z: f64,
    pub variance: f64,
    pub exact_variance: f64,
    pub effective_samples: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    /// 1-based sites, `x < y`.
    pub x: usize,
    pub y: usize,
    pub covariance: f64,
    pub std_error: f64,
    pub exact: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub sites: Vec<SiteRow>,
    /// Empty when pair products were not tracked.
    pub pairs: Vec<PairRow>,
    pub observed_time: f64,
}

fn z_score(value: f64, exact: f64, se: f64) -> f64 {
    if se > 0.0 {
        (value - exact) / se
    } else if value == exact {
        0.0
    } else {
        f64::INFINITY.copysign(value - exact)
    }
}

/// Compares the empirical moments of `stats` with the exact mixture moments.
pub fn profile_report(stats: &OccupationStats, spec: &MixtureSpec) -> ProfileReport {
    let exact = moment_profile(spec);
    let n = stats.n_sites;
    let sites = (0..n)
        .map(|x| {
            let est = site_mean(stats, x);
            let variance = stats.variance(x);
            SiteRow {
                site: x + 1,
                mean: est.value,
                std_error: est.std_error,
                exact: exact.means[x],
                z: z_score(est.value, exact.means[x], est.std_error),
                variance,
                exact_variance: exact.covariances[x][x],
                effective_samples: if est.std_error > 0.0 {
                    variance / (est.std_error * est.std_error)
                } else {
                    0.0
                },
            }
        })
        .collect();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if let Some(est) = pair_covariance(stats, x, y) {
                let e = exact.covariances[x][y];
                pairs.push(PairRow {
                    x: x + 1,
                    y: y + 1,
                    covariance: est.value,
                    std_error: est.std_error,
                    exact: e,
                    z: z_score(est.value, e, est.std_error),
                });
            }
        }
    }
    ProfileReport {
        sites,
        pairs,
        observed_time: stats.observed_time,
    }
}

impl ProfileReport {
    pub fn max_abs_site_z(&self) -> f64 {
        self.sites.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_pair_z(&self) -> f64 {
        self.pairs.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }

    /// Site table as CSV.
    pub fn sites_csv(&self) -> String {
        let mut out = String::from("site,mean,std_error,exact_mean,z,variance,exact_variance,effective_samples\n");
        for r in &self.sites {
            let _ = writeln!(
                out,
                "{},{:.10e},{:.6e},{:.10e},{:.4},{:.10e},{:.10e},{:.1}",
                r.site, r.mean, r.std_error, r.exact, r.z, r.variance, r.exact_variance, r.effective_samples
            );
        }
        out
    }

    /// Pair table as CSV.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("x,y,covariance,std_error,exact_covariance,z\n");
        for r in &self.pairs {
            let _ = writeln!(
                out,
                "{},{},{:.10e},{:.6e},{:.10e},{:.4}",
                r.x, r.y, r.covariance, r.std_error, r.exact, r.z
            );
        }
        out
    }
}
