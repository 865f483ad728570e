//! Point evaluation of the mixture laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::distributions::geometric_ln_pmf;
use crate::measure::{MixtureSpec, Model};
use crate::numerics::quadrature::QuadOptions;
use crate::numerics::simplex::{integrate_ordered_simplex, mc_ordered_simplex, MAX_QUADRATURE_DIM};
use crate::params::{ordered_simplex_volume, ContinuousConfig, DiscreteConfig};
use crate::real::Real;
use crate::rng::RngContract;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityMethod {
    /// Degenerate interval: the product law itself.
    Exact,
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate<T = f64> {
    pub value: T,
    /// Quadrature error estimate, or one Monte Carlo standard error.
    pub error: T,
    pub method: DensityMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions<T = f64> {
    /// Absolute tolerance on the density value.
    pub tol: T,
    /// Relative tolerance applied at every quadrature level.
    pub rel_tol: T,
    pub mc_samples: usize,
    pub mc_seed: u64,
}

impl<T: Real> DensityOptions<T> {
    pub fn new(tol: T) -> Self {
        Self {
            tol,
            rel_tol: T::lit(1e3) * T::epsilon(),
            mc_samples: 1_000_000,
            mc_seed: 0x5eed,
        }
    }
}

/// `N!/(hi-lo)^N int_{O_N} prod_x G_{m_x}(eta_x) dm`.
pub fn mixture_density_discrete<T: Real>(
    spec: &MixtureSpec<T>,
    eta: &DiscreteConfig,
    tol: T,
) -> Result<DensityEstimate<T>> {
    mixture_density_discrete_with(spec, eta, &DensityOptions::new(tol))
}

pub fn mixture_density_discrete_with<T: Real>(
    spec: &MixtureSpec<T>,
    eta: &DiscreteConfig,
    opts: &DensityOptions<T>,
) -> Result<DensityEstimate<T>> {
    spec.require(Model::Discrete)?;
    check_len(spec.n(), eta.len())?;
    let eta = &eta.eta;
    mixture(spec, opts, |m: &[T]| {
        m.iter()
            .zip(eta)
            .fold(T::zero(), |acc, (m, k)| acc + geometric_ln_pmf(*m, *k))
            .exp()
    })
}

/// `N!/(hi-lo)^N int_{O_N} prod_x E_{m_x}(z_x) dm`.
pub fn mixture_density_continuous<T: Real>(
    spec: &MixtureSpec<T>,
    z: &ContinuousConfig<T>,
    tol: T,
) -> Result<DensityEstimate<T>> {
    mixture_density_continuous_with(spec, z, &DensityOptions::new(tol))
}

pub fn mixture_density_continuous_with<T: Real>(
    spec: &MixtureSpec<T>,
    z: &ContinuousConfig<T>,
    opts: &DensityOptions<T>,
) -> Result<DensityEstimate<T>> {
    spec.require(Model::Continuous)?;
    check_len(spec.n(), z.len())?;
    let z = &z.z;
    mixture(spec, opts, |m: &[T]| {
        m.iter()
            .zip(z)
            .fold(T::zero(), |acc, (m, z)| acc - *z / *m - m.ln())
            .exp()
    })
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n == len {
        Ok(())
    } else {
        Err(Error::invalid("config", format!("configuration has {len} sites, chain has {n}")))
    }
}

fn mixture<T: Real, F: Fn(&[T]) -> T>(spec: &MixtureSpec<T>, opts: &DensityOptions<T>, product: F) -> Result<DensityEstimate<T>> {
    let n = spec.n();
    let (lo, hi) = spec.interval();
    if lo == hi {
        return Ok(DensityEstimate {
            value: product(&vec![lo; n]),
            error: T::zero(),
            method: DensityMethod::Exact,
        });
    }
    let volume = ordered_simplex_volume(n, lo, hi);
    if n <= MAX_QUADRATURE_DIM {
        let qopts = QuadOptions::new(opts.tol * volume, opts.rel_tol).max_subdivisions(2000);
        let r = integrate_ordered_simplex(n, lo, hi, |m| product(m), &qopts)?;
        return Ok(DensityEstimate {
            value: r.value / volume,
            error: r.error / volume,
            method: DensityMethod::Quadrature,
        });
    }
    let mut rng = RngContract::new(opts.mc_seed).stream(0);
    let (lo64, hi64) = (lo.as_f64(), hi.as_f64());
    let est = mc_ordered_simplex(n, lo64, hi64, 1, opts.mc_samples, &mut rng, |m, out| {
        let mt: Vec<T> = m.iter().map(|v| T::lit(*v)).collect();
        out[0] = product(&mt).as_f64();
    });
    let vol64 = volume.as_f64();
    Ok(DensityEstimate {
        value: T::lit(est.values[0] / vol64),
        error: T::lit(est.std_errors[0] / vol64),
        method: DensityMethod::MonteCarlo {
            samples: opts.mc_samples,
            seed: opts.mc_seed,
        },
    })
}
