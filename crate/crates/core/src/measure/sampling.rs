//! Exact samplers for the stationary mixtures.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};

use crate::error::Result;
use crate::measure::{MixtureSpec, Model};
use crate::params::{ContinuousConfig, DiscreteConfig, OrderedProfile};
use crate::real::Real;

/// Sorted i.i.d. uniforms on the reservoir interval: a uniform point of the
/// ordered simplex.
pub fn sample_ordered_profile<T: Real, R: Rng + ?Sized>(spec: &MixtureSpec<T>, rng: &mut R) -> OrderedProfile<T> {
    let (lo, hi) = spec.interval();
    let width = hi - lo;
    let m = (0..spec.n())
        .map(|_| {
            let u = T::lit(rng.random::<f64>());
            (lo + width * u).min(hi)
        })
        .collect();
    OrderedProfile::from_unsorted(m)
}

/// Profile, then independent geometric occupations with means `m_x`.
pub fn sample_exact_discrete<T: Real, R: Rng + ?Sized>(spec: &MixtureSpec<T>, rng: &mut R) -> Result<DiscreteConfig> {
    spec.require(Model::Discrete)?;
    let profile = sample_ordered_profile(spec, rng);
    let eta = profile
        .as_slice()
        .iter()
        .map(|m| {
            let m = m.as_f64();
            // failures before the first success, success probability 1/(1+m)
            Geometric::new(1.0 / (1.0 + m))
                .expect("success probability in (0, 1]")
                .sample(rng)
        })
        .collect();
    Ok(DiscreteConfig::new(eta))
}

/// Profile, then independent exponential energies with means `m_x`.
pub fn sample_exact_continuous<T: Real, R: Rng + ?Sized>(
    spec: &MixtureSpec<T>,
    rng: &mut R,
) -> Result<ContinuousConfig<T>> {
    spec.require(Model::Continuous)?;
    let profile = sample_ordered_profile(spec, rng);
    let z = profile
        .as_slice()
        .iter()
        .map(|m| {
            let e: f64 = Exp1.sample(rng);
            *m * T::lit(e)
        })
        .collect();
    Ok(ContinuousConfig { z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ChainParams;
    use crate::rng::RngContract;

    #[test]
    fn degenerate_interval_gives_constant_profile() {
        let spec = MixtureSpec::discrete(ChainParams::discrete(4, 0.6f64, 0.6).unwrap());
        let mut rng = RngContract::new(1).stream(0);
        let p = sample_ordered_profile(&spec, &mut rng);
        let rho = spec.params.rho_a();
        assert!(p.as_slice().iter().all(|m| *m == rho));
    }

    #[test]
    fn profile_is_sorted_and_bounded() {
        let spec = MixtureSpec::continuous(ChainParams::continuous(7, 1.0f64, 2.0).unwrap());
        let mut rng = RngContract::new(2).stream(0);
        for _ in 0..1000 {
            let p = sample_ordered_profile(&spec, &mut rng);
            assert!(OrderedProfile::new(p.as_slice().to_vec(), 1.0, 2.0).is_ok());
        }
    }

    #[test]
    fn order_statistic_means_by_monte_carlo() {
        // E[m_x] = lo + (hi - lo) x / (N + 1)
        let spec = MixtureSpec::discrete(ChainParams::from_densities(4, 1.0f64, 3.0).unwrap());
        let mut rng = RngContract::new(3).stream(0);
        let draws = 200_000;
        let mut sums = [0.0f64; 4];
        for _ in 0..draws {
            let p = sample_ordered_profile(&spec, &mut rng);
            for (s, m) in sums.iter_mut().zip(p.as_slice()) {
                *s += m;
            }
        }
        for (x, s) in sums.iter().enumerate() {
            let exact = 1.0 + 2.0 * (x + 1) as f64 / 5.0;
            // sd of an order statistic of 4 uniforms on [1,3] is below 0.4
            assert!((s / draws as f64 - exact).abs() < 4.0 * 0.4 / (draws as f64).sqrt());
        }
    }

    #[test]
    fn model_mismatch_is_rejected() {
        let spec = MixtureSpec::continuous(ChainParams::continuous(2, 1.0f64, 2.0).unwrap());
        let mut rng = RngContract::new(4).stream(0);
        assert!(sample_exact_discrete(&spec, &mut rng).is_err());
        let spec = MixtureSpec::discrete(ChainParams::discrete(2, 0.2f64, 0.4).unwrap());
        assert!(sample_exact_continuous(&spec, &mut rng).is_err());
    }

    #[test]
    fn zero_probability_matches_geometric() {
        // degenerate profile: P(eta_x = 0) = 1/(1+m)
        let spec = MixtureSpec::discrete(ChainParams::from_densities(1, 2.0f64, 2.0).unwrap());
        let mut rng = RngContract::new(5).stream(0);
        let draws = 200_000;
        let zeros = (0..draws)
            .filter(|_| sample_exact_discrete(&spec, &mut rng).unwrap().eta[0] == 0)
            .count();
        let p = zeros as f64 / draws as f64;
        let sd = (1.0f64 / 3.0 * 2.0 / 3.0 / draws as f64).sqrt();
        assert!((p - 1.0 / 3.0).abs() < 4.0 * sd);
    }
}
