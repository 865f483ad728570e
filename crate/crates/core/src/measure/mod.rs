//! The stationary laws as mixtures over ordered profiles.
//!
//! Both stationary measures are mixtures of inhomogeneous product laws
//! (geometric for the particle chain, exponential for the energy chain)
//! whose means `m` are uniform on the ordered simplex between the two
//! reservoir values.

pub mod density;
pub mod distributions;
pub mod marginal;
pub mod moments;
pub mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ChainParams;
use crate::real::Real;

pub use density::{
    mixture_density_continuous, mixture_density_continuous_with, mixture_density_discrete,
    mixture_density_discrete_with, DensityEstimate, DensityMethod, DensityOptions,
};
pub use distributions::{exponential_density, geometric_ln_pmf, geometric_pmf, mgf_exponential, mgf_geometric};
pub use marginal::{
    marginal_cdf_continuous, marginal_density_continuous, marginal_pmf_discrete, marginal_pmf_table,
    order_statistic_density,
};
pub use moments::{moment_profile, MomentProfile};
pub use sampling::{sample_exact_continuous, sample_exact_discrete, sample_ordered_profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Discrete,
    Continuous,
}

/// Chain parameters together with the model they are read for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec<T = f64> {
    pub params: ChainParams<T>,
    pub model: Model,
}

impl<T: Real> MixtureSpec<T> {
    pub fn discrete(params: ChainParams<T>) -> Self {
        Self {
            params,
            model: Model::Discrete,
        }
    }

    pub fn continuous(params: ChainParams<T>) -> Self {
        Self {
            params,
            model: Model::Continuous,
        }
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    /// `(rho_a, rho_b)` or `(t_a, t_b)`.
    pub fn interval(&self) -> (T, T) {
        match self.model {
            Model::Discrete => (self.params.rho_a(), self.params.rho_b()),
            Model::Continuous => (self.params.t_a(), self.params.t_b()),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        let (lo, hi) = self.interval();
        lo == hi
    }

    pub(crate) fn require(&self, model: Model) -> Result<()> {
        if self.model == model {
            Ok(())
        } else {
            Err(Error::invalid("model", format!("expected {model:?} spec, got {:?}", self.model)))
        }
    }
}
