//! Jump-size samplers of the energy chain under the small-jump cutoff `eps`.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::numerics::exp_integral_e1;

/// Removed amount with density `1 / (alpha ln(z/eps))` on `[eps, z]`.
#[inline]
pub fn sample_alpha_removal<R: Rng + ?Sized>(z: f64, eps: f64, rng: &mut R) -> f64 {
    assert!(z > eps, "removal from z = {z} at or below the cutoff {eps}");
    let u = rng.random::<f64>();
    (eps * (z / eps).powf(u)).clamp(eps, z)
}

/// Injected amount with density `exp(-alpha/T) / (alpha E1(eps/T))` on `[eps, inf)`.
///
/// Mixture of two rejection samplers split at `s = max(eps, T)`: below `s`
/// the proposal is `1/alpha` (accepted with `exp(-alpha/T) >= 1/e`), above it
/// a shifted exponential (accepted with `s/alpha`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectionSampler {
    t: f64,
    eps: f64,
    split: f64,
    p_low: f64,
    rate: f64,
}

impl InjectionSampler {
    pub fn new(t: f64, eps: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid("temperature", format!("{t} is not positive")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid("epsilon", format!("{eps} is not positive")));
        }
        let split = eps.max(t);
        let rate: f64 = exp_integral_e1(eps / t)?;
        let high: f64 = exp_integral_e1(split / t)?;
        Ok(Self {
            t,
            eps,
            split,
            p_low: ((rate - high) / rate).max(0.0),
            rate,
        })
    }

    /// Total injection rate `E1(eps/T)`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Draw together with the number of proposals it took.
    #[inline]
    pub fn sample_counted<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u32) {
        let low = rng.random::<f64>() < self.p_low;
        let mut tries = 0;
        loop {
            tries += 1;
            if low {
                let alpha = self.eps * (self.split / self.eps).powf(rng.random::<f64>());
                if rng.random::<f64>() < (-alpha / self.t).exp() {
                    return (alpha, tries);
                }
            } else {
                let alpha = self.split + self.t * rng.sample::<f64, _>(Exp1);
                if rng.random::<f64>() * alpha < self.split {
                    return (alpha, tries);
                }
            }
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_counted(rng).0
    }
}

/// One injection draw at temperature `t`; builds the sampler each call.
pub fn sample_alpha_injection<R: Rng + ?Sized>(t: f64, eps: f64, rng: &mut R) -> Result<f64> {
    Ok(InjectionSampler::new(t, eps)?.sample(rng))
}
