//! Closed-form means and covariances of the stationary mixtures.

use crate::measure::{MixtureSpec, Model};
use crate::real::Real;

/// Site means and the full covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProfile<T = f64> {
    pub means: Vec<T>,
    pub covariances: Vec<Vec<T>>,
}

/// Moments implied by the order-statistic mixture.
///
/// Conditionally on the profile the sites are independent, so off-diagonal
/// covariances equal those of the order statistics,
/// `Cov(m_x, m_y) = (hi-lo)^2 x (N+1-y) / ((N+1)^2 (N+2))` for `x <= y`.
/// The diagonal adds the conditional variance: `m + m^2` for geometric,
/// `m^2` for exponential sites.
pub fn moment_profile<T: Real>(spec: &MixtureSpec<T>) -> MomentProfile<T> {
    let n = spec.n();
    let (lo, hi) = spec.interval();
    let width = hi - lo;
    let np1 = T::from_count(n + 1);
    let np2 = T::from_count(n + 2);
    let order_cov = |x: usize, y: usize| {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        width * width * T::from_count(a) * T::from_count(n + 1 - b) / (np1 * np1 * np2)
    };
    let means: Vec<T> = (1..=n).map(|x| lo + width * T::from_count(x) / np1).collect();
    let covariances = (1..=n)
        .map(|x| {
            (1..=n)
                .map(|y| {
                    if x != y {
                        return order_cov(x, y);
                    }
                    let mean = means[x - 1];
                    let second = order_cov(x, x) + mean * mean;
                    match spec.model {
                        Model::Discrete => mean + T::lit(2.0) * second - mean * mean,
                        Model::Continuous => T::lit(2.0) * second - mean * mean,
                    }
                })
                .collect()
        })
        .collect();
    MomentProfile { means, covariances }
}
