//! Shared numerical utilities: harmonic numbers, the exponential integral,
//! adaptive quadrature and ordered-simplex integration.

pub mod expint;
pub mod harmonic;
pub mod quadrature;
pub mod simplex;

pub use expint::exp_integral_e1;
pub use harmonic::{harmonic_number, HarmonicTable};
pub use quadrature::{integrate, quadrature_1d, QuadOptions, QuadResult};
pub use simplex::{integrate_nested, integrate_ordered_simplex, mc_ordered_simplex, Domain, McEstimate};
