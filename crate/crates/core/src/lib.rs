//! Boundary-driven harmonic chain (discrete) and integrable heat-conduction
//! chain (continuous): event-driven simulation, exact sampling of the
//! stationary mixture laws, and numerical checks of the identities that
//! characterize them.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! simulators and statistics work in `f64`. Concrete aliases for the
//! single-precision variants live at the crate root.

pub mod continuous;
pub mod discrete;
pub mod error;
pub mod events;
pub mod measure;
pub mod numerics;
pub mod occupation;
pub mod params;
pub mod rates;
pub mod real;
pub mod rng;
pub mod run;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use params::{ChainParams, ContinuousConfig, DiscreteConfig, OrderedProfile};
pub use real::Real;
pub use rng::{RngContract, SimRng};

pub type ChainParamsF32 = ChainParams<f32>;
pub type ContinuousConfigF32 = ContinuousConfig<f32>;
pub type OrderedProfileF32 = OrderedProfile<f32>;
