//! Goodness-of-fit tests for time-weighted and i.i.d. data.
//!
//! Time-weighted histograms are not i.i.d. samples; they enter the tests as
//! fractions scaled by an effective sample size supplied by the caller.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::occupation::Binning;

/// Below this effective size a test reports no p-value.
pub const MIN_EFFECTIVE_SAMPLES: f64 = 100.0;

/// Minimum expected count per chi-square bin after merging.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GofTest {
    ChiSquare,
    KolmogorovSmirnov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub test: GofTest,
    pub statistic: f64,
    /// Degrees of freedom (chi-square only).
    pub dof: Option<usize>,
    pub sample_size: f64,
    /// `None` when the effective sample size is below [`MIN_EFFECTIVE_SAMPLES`].
    pub p_value: Option<f64>,
    pub binning: String,
}

impl GofResult {
    pub fn is_inconclusive(&self) -> bool {
        self.p_value.is_none()
    }

    /// `Some(true)` if not rejected at level `alpha`.
    pub fn passes(&self, alpha: f64) -> Option<bool> {
        self.p_value.map(|p| p > alpha)
    }

    fn inconclusive(test: GofTest, sample_size: f64, binning: String) -> Self {
        Self {
            test,
            statistic: f64::NAN,
            dof: None,
            sample_size,
            p_value: None,
            binning,
        }
    }
}

/// Per-test level for `tests` simultaneous tests at family level `alpha`.
pub fn bonferroni(alpha: f64, tests: usize) -> f64 {
    alpha / tests.max(1) as f64
}

/// Chi-square test of observed fractions over `0, 1, 2, ...` against `expected`
/// (the same support; mass beyond `expected.len()` forms one tail bin).
/// Adjacent bins are merged until each expects at least 5 counts.
pub fn chi_square_discrete(observed: &[f64], expected: &[f64], effective_size: f64) -> GofResult {
    let obs_total: f64 = observed.iter().sum();
    let len = expected.len();
    if effective_size < MIN_EFFECTIVE_SAMPLES || obs_total <= 0.0 {
        return GofResult::inconclusive(GofTest::ChiSquare, effective_size, format!("integer values 0..{len}"));
    }
    let obs = |k: usize| observed.get(k).copied().unwrap_or(0.0) / obs_total;
    let mut cells: Vec<(f64, f64, usize, usize)> = Vec::new();
    let (mut o, mut e, mut from) = (0.0, 0.0, 0usize);
    for (k, p) in expected.iter().enumerate() {
        o += obs(k);
        e += p;
        if e * effective_size >= MIN_EXPECTED_COUNT {
            cells.push((o, e, from, k));
            o = 0.0;
            e = 0.0;
            from = k + 1;
        }
    }
    let tail_obs: f64 = observed.iter().skip(len).sum::<f64>() / obs_total;
    let tail_exp = (1.0 - expected.iter().sum::<f64>()).max(0.0);
    o += tail_obs;
    e += tail_exp;
    // the leftover merges into the last complete cell
    if e * effective_size >= MIN_EXPECTED_COUNT || cells.is_empty() {
        cells.push((o, e, from, usize::MAX));
    } else if let Some(last) = cells.last_mut() {
        last.0 += o;
        last.1 += e;
        last.3 = usize::MAX;
    }
    let binning = cells
        .iter()
        .map(|(_, _, a, b)| match *b {
            usize::MAX => format!("{a}+"),
            b if b == *a => format!("{a}"),
            b => format!("{a}-{b}"),
        })
        .collect::<Vec<_>>()
        .join(",");
    if cells.len() < 2 {
        return GofResult::inconclusive(GofTest::ChiSquare, effective_size, binning);
    }
    let statistic: f64 = cells
        .iter()
        .map(|(o, e, _, _)| effective_size * (o - e).powi(2) / e)
        .sum();
    let dof = cells.len() - 1;
    let p = ChiSquared::new(dof as f64).expect("positive dof").sf(statistic);
    GofResult {
        test: GofTest::ChiSquare,
        statistic,
        dof: Some(dof),
        sample_size: effective_size,
        p_value: Some(p.clamp(0.0, 1.0)),
        binning,
    }
}

/// Asymptotic Kolmogorov tail `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // series below converges slowly; the tail is 1 to double precision here
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// p-value of the KS distance `d` at sample size `n`, with Stephens' correction.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let sn = n.sqrt();
    kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)
}

/// KS test of a binned weighted sample: the empirical CDF is compared with
/// `cdf` at every finite bin edge. Conservative relative to the unbinned test.
pub fn ks_binned(histogram: &[f64], binning: &Binning, cdf: impl Fn(f64) -> f64, effective_size: f64) -> GofResult {
    let description = format!("{binning:?}");
    let total: f64 = histogram.iter().sum();
    if effective_size < MIN_EFFECTIVE_SAMPLES || total <= 0.0 {
        return GofResult::inconclusive(GofTest::KolmogorovSmirnov, effective_size, description);
    }
    let mut acc = 0.0;
    let mut d: f64 = 0.0;
    for (i, w) in histogram.iter().enumerate() {
        acc += w / total;
        let upper = binning.edges(i).1;
        if upper.is_finite() {
            d = d.max((acc - cdf(upper)).abs());
        }
    }
    GofResult {
        test: GofTest::KolmogorovSmirnov,
        statistic: d,
        dof: None,
        sample_size: effective_size,
        p_value: Some(ks_p_value(d, effective_size)),
        binning: description,
    }
}

/// One-sample KS test of i.i.d. draws against a continuous `cdf`.
pub fn ks_samples(samples: &[f64], cdf: impl Fn(f64) -> f64) -> GofResult {
    let n = samples.len();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut d: f64 = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        let f = cdf(*v);
        d = d.max(f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f);
    }
    GofResult {
        test: GofTest::KolmogorovSmirnov,
        statistic: d,
        dof: None,
        sample_size: n as f64,
        p_value: (n > 0).then(|| ks_p_value(d, n as f64)),
        binning: "unbinned".into(),
    }
}
