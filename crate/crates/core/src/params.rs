//! Chain parameters and configuration types.
//!
//! The discrete chain is parameterized by the reservoir activities
//! `beta_a <= beta_b` in `(0, 1)`; the reservoir densities are derived as
//! `rho = beta / (1 - beta)` and never stored independently. The continuous
//! chain uses reservoir temperatures `t_a <= t_b`. Equal reservoir values are
//! admitted and describe the equilibrium chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Lattice size and reservoir parameters for both models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams<T = f64> {
    n: usize,
    beta_a: T,
    beta_b: T,
    t_a: T,
    t_b: T,
}

impl<T: Real> ChainParams<T> {
    pub fn new(n: usize, beta_a: T, beta_b: T, t_a: T, t_b: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "lattice must have at least one site"));
        }
        let zero = T::zero();
        let one = T::one();
        if !(beta_a > zero && beta_a < one) {
            return Err(Error::invalid("beta_a", format!("{beta_a} not in (0, 1)")));
        }
        if !(beta_b > zero && beta_b < one) {
            return Err(Error::invalid("beta_b", format!("{beta_b} not in (0, 1)")));
        }
        if beta_a > beta_b {
            return Err(Error::invalid(
                "beta_a",
                format!("beta_a = {beta_a} exceeds beta_b = {beta_b}"),
            ));
        }
        if !(t_a > zero && t_a.is_finite()) {
            return Err(Error::invalid("t_a", format!("{t_a} is not a positive finite temperature")));
        }
        if !(t_b > zero && t_b.is_finite()) {
            return Err(Error::invalid("t_b", format!("{t_b} is not a positive finite temperature")));
        }
        if t_a > t_b {
            return Err(Error::invalid("t_a", format!("t_a = {t_a} exceeds t_b = {t_b}")));
        }
        Ok(Self {
            n,
            beta_a,
            beta_b,
            t_a,
            t_b,
        })
    }

    /// Discrete chain; temperatures are set to 1.
    pub fn discrete(n: usize, beta_a: T, beta_b: T) -> Result<Self> {
        Self::new(n, beta_a, beta_b, T::one(), T::one())
    }

    /// Continuous chain; reservoir activities are set to 1/2.
    pub fn continuous(n: usize, t_a: T, t_b: T) -> Result<Self> {
        let half = T::lit(0.5);
        Self::new(n, half, half, t_a, t_b)
    }

    /// Discrete chain from reservoir densities, via `beta = rho / (1 + rho)`.
    pub fn from_densities(n: usize, rho_a: T, rho_b: T) -> Result<Self> {
        if !(rho_a > T::zero() && rho_a.is_finite()) {
            return Err(Error::invalid("rho_a", format!("{rho_a} is not a positive density")));
        }
        if !(rho_b > T::zero() && rho_b.is_finite()) {
            return Err(Error::invalid("rho_b", format!("{rho_b} is not a positive density")));
        }
        let beta = |rho: T| rho / (T::one() + rho);
        Self::discrete(n, beta(rho_a), beta(rho_b))
    }

    pub fn with_temperatures(self, t_a: T, t_b: T) -> Result<Self> {
        Self::new(self.n, self.beta_a, self.beta_b, t_a, t_b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta_a(&self) -> T {
        self.beta_a
    }

    pub fn beta_b(&self) -> T {
        self.beta_b
    }

    pub fn rho_a(&self) -> T {
        self.beta_a / (T::one() - self.beta_a)
    }

    pub fn rho_b(&self) -> T {
        self.beta_b / (T::one() - self.beta_b)
    }

    pub fn t_a(&self) -> T {
        self.t_a
    }

    pub fn t_b(&self) -> T {
        self.t_b
    }

    /// Total injection rate of reservoir A, `sum_k beta_a^k / k = -ln(1 - beta_a)`.
    pub fn injection_rate_a(&self) -> T {
        -(-self.beta_a).ln_1p()
    }

    pub fn injection_rate_b(&self) -> T {
        -(-self.beta_b).ln_1p()
    }

    pub fn is_discrete_equilibrium(&self) -> bool {
        self.beta_a == self.beta_b
    }

    pub fn is_continuous_equilibrium(&self) -> bool {
        self.t_a == self.t_b
    }
}

/// Particle configuration of the discrete chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteConfig {
    pub eta: Vec<u64>,
}

impl DiscreteConfig {
    pub fn new(eta: Vec<u64>) -> Self {
        Self { eta }
    }

    pub fn empty(n: usize) -> Self {
        Self { eta: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.eta.iter().sum()
    }
}

/// Energy configuration of the continuous chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousConfig<T = f64> {
    pub z: Vec<T>,
}

impl<T: Real> ContinuousConfig<T> {
    pub fn new(z: Vec<T>) -> Result<Self> {
        if let Some(bad) = z.iter().find(|v| !(**v >= T::zero() && v.is_finite())) {
            return Err(Error::invalid("z", format!("energy {bad} is not a finite non-negative value")));
        }
        Ok(Self { z })
    }

    pub fn empty(n: usize) -> Self {
        Self { z: vec![T::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn total(&self) -> T {
        self.z.iter().copied().sum()
    }
}

/// A point of the ordered simplex `lo <= m_1 <= ... <= m_N <= hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedProfile<T = f64> {
    m: Vec<T>,
}

impl<T: Real> OrderedProfile<T> {
    /// Validates ordering and bounds.
    pub fn new(m: Vec<T>, lo: T, hi: T) -> Result<Self> {
        if m.iter().any(|v| *v < lo || *v > hi) {
            return Err(Error::invalid("m", format!("profile leaves [{lo}, {hi}]")));
        }
        if m.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("m", "profile is not sorted ascending"));
        }
        Ok(Self { m })
    }

    /// Sorts `m` ascending; caller guarantees the bounds.
    pub(crate) fn from_unsorted(mut m: Vec<T>) -> Self {
        m.sort_by(|a, b| a.partial_cmp(b).expect("profile entries are not NaN"));
        Self { m }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.m
    }

    pub fn into_vec(self) -> Vec<T> {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }
}

/// Lebesgue volume of the ordered simplex, `(hi - lo)^n / n!`.
pub fn ordered_simplex_volume<T: Real>(n: usize, lo: T, hi: T) -> T {
    let width = hi - lo;
    (1..=n).fold(T::one(), |acc, k| acc * width / T::from_count(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_follow_activities() {
        let p = ChainParams::discrete(3, 0.5f64, 0.75).unwrap();
        assert_eq!(p.rho_a(), 1.0);
        assert_eq!(p.rho_b(), 3.0);
        assert!((p.injection_rate_a() - 2f64.ln()).abs() < 1e-15);
        assert!((p.injection_rate_b() - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_is_admitted() {
        let p = ChainParams::discrete(2, 0.4f64, 0.4).unwrap();
        assert!(p.is_discrete_equilibrium());
        assert_eq!(p.rho_a(), p.rho_b());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            ChainParams::discrete(0, 0.5f64, 0.6),
            Err(Error::InvalidParameter { field: "n", .. })
        ));
        assert!(matches!(
            ChainParams::discrete(1, 0.7f64, 0.6),
            Err(Error::InvalidParameter { field: "beta_a", .. })
        ));
        assert!(matches!(
            ChainParams::discrete(1, 0.5f64, 1.0),
            Err(Error::InvalidParameter { field: "beta_b", .. })
        ));
        assert!(matches!(
            ChainParams::continuous(1, 2.0f64, 1.0),
            Err(Error::InvalidParameter { field: "t_a", .. })
        ));
        assert!(ChainParams::continuous(1, 0.0f64, 1.0).is_err());
    }

    #[test]
    fn from_densities_round_trips() {
        let p = ChainParams::from_densities(1, 1.0f64, 3.0).unwrap();
        assert!((p.rho_a() - 1.0).abs() < 1e-15);
        assert!((p.rho_b() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn profile_validation() {
        assert!(OrderedProfile::new(vec![1.0, 2.0, 2.0], 1.0, 3.0).is_ok());
        assert!(OrderedProfile::new(vec![2.0, 1.5], 1.0, 3.0).is_err());
        assert!(OrderedProfile::new(vec![0.5], 1.0, 3.0).is_err());
    }

    #[test]
    fn simplex_volume() {
        assert!((ordered_simplex_volume(3, 1.0f64, 3.0) - 8.0 / 6.0).abs() < 1e-15);
        assert_eq!(ordered_simplex_volume(0, 1.0f32, 3.0), 1.0);
    }
}
