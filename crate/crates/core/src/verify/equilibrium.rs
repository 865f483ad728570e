//! Degeneration of the mixture to a product law when both reservoirs agree.

use serde_json::json;

use crate::error::{Error, Result};
use crate::measure::distributions::{exponential_density, geometric_ln_pmf};
use crate::measure::{mixture_density_continuous, mixture_density_discrete, MixtureSpec, Model};
use crate::params::{ContinuousConfig, DiscreteConfig};
use crate::verify::report::{params, Residual, VerificationReport};
use crate::verify::telescoping::grid_points;

/// Largest relative gap between the reservoir parameters still accepted.
pub const NEAR_EQUILIBRIUM_GAP: f64 = 1e-6;

const DISCRETE_GRID: [f64; 5] = [0.0, 1.0, 2.0, 5.0, 10.0];
const CONTINUOUS_GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

/// Largest relative deviation `|mu / pi - 1|` of the mixture from the product
/// law built on the left reservoir, over a grid of configurations.
///
/// Accepts reservoirs that differ by at most [`NEAR_EQUILIBRIUM_GAP`] in
/// relative terms, so that continuity at the degenerate point can be tested.
pub fn check_equilibrium_limit(spec: &MixtureSpec, tol: f64) -> Result<VerificationReport> {
    let (lo, hi) = spec.interval();
    if (hi - lo).abs() > NEAR_EQUILIBRIUM_GAP * lo.max(1.0) {
        return Err(Error::invalid("params", format!("reservoirs differ: {lo} vs {hi}")));
    }
    let n = spec.n();
    let density_tol = (tol * 1e-3).max(1e-15);
    let mut worst = 0.0f64;
    let mut at = Vec::new();
    match spec.model {
        Model::Discrete => {
            for point in grid_points(&DISCRETE_GRID, n) {
                let eta: Vec<u64> = point.iter().map(|v| *v as u64).collect();
                let product = eta.iter().map(|k| geometric_ln_pmf(lo, *k)).sum::<f64>().exp();
                let mu = mixture_density_discrete(spec, &DiscreteConfig::new(eta), density_tol)?.value;
                let dev = (mu / product - 1.0).abs();
                if dev > worst {
                    (worst, at) = (dev, point);
                }
            }
        }
        Model::Continuous => {
            for point in grid_points(&CONTINUOUS_GRID, n) {
                let z: Vec<f64> = point.iter().map(|v| v * lo).collect();
                let product: f64 = z.iter().map(|z| exponential_density(lo, *z)).product();
                let mu = mixture_density_continuous(spec, &ContinuousConfig::new(z.clone())?, density_tol)?.value;
                let dev = (mu / product - 1.0).abs();
                if dev > worst {
                    (worst, at) = (dev, z);
                }
            }
        }
    }
    let mut notes = vec![format!("{} grid configurations", grid_points(&DISCRETE_GRID, n).len())];
    if !at.is_empty() {
        notes.push(format!("largest deviation at {at:?}"));
    }
    Ok(VerificationReport::new(
        "equilibrium_limit",
        params([
            ("model", json!(format!("{:?}", spec.model).to_lowercase())),
            ("n", json!(n)),
            ("lo", json!(lo)),
            ("hi", json!(hi)),
        ]),
        vec![Residual::new("max |mixture / product - 1|", worst, tol)],
        notes,
    ))
}
