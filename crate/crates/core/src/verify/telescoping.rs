//! Generating-function form of stationarity: for every site `x`,
//!
//! `E[(ln F_{m_{x-1}}(l_x) - 2 ln F_{m_x}(l_x) + ln F_{m_{x+1}}(l_x)) prod_y F_{m_y}(l_y)] = 0`
//!
//! with `m` uniform on the ordered simplex, `m_0 = lo` and `m_{N+1} = hi`.
//! Residuals are reported as expectations (simplex integrals divided by the
//! simplex volume), one per site plus their sum.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::measure::distributions::{ln_mgf_exponential, ln_mgf_geometric};
use crate::measure::{moment_profile, MixtureSpec, Model};
use crate::numerics::simplex::{integrate_ordered_simplex, mc_ordered_simplex, MAX_QUADRATURE_DIM};
use crate::numerics::QuadOptions;
use crate::params::{ordered_simplex_volume, ChainParams};
use crate::rng::RngContract;
use crate::verify::report::{params, Residual, VerificationReport};

/// Monte Carlo checks pass when every residual is within this many standard errors.
pub const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TelescopingMethod {
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

impl TelescopingMethod {
    /// Quadrature up to the supported dimension, Monte Carlo above.
    pub fn for_dimension(n: usize, samples: usize, seed: u64) -> Self {
        if n <= MAX_QUADRATURE_DIM {
            TelescopingMethod::Quadrature
        } else {
            TelescopingMethod::MonteCarlo { samples, seed }
        }
    }
}

/// `{0.1, ..., 0.9}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// `{-1, -0.3, 0.1, 0.3, 0.6/T_B}`, keeping only distinct points inside `t < 1/T_B`.
pub fn default_t_grid(t_b: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = Vec::new();
    for t in [-1.0, -0.3, 0.1, 0.3, 0.6 / t_b] {
        if t * t_b < 1.0 && !grid.contains(&t) {
            grid.push(t);
        }
    }
    grid
}

/// Test points in dimension `n`: every grid value on the diagonal, plus for
/// `n > 1` the same values cycled across sites so that neighbours differ.
pub fn grid_points(grid: &[f64], n: usize) -> Vec<Vec<f64>> {
    let len = grid.len();
    let mut points: Vec<Vec<f64>> = grid.iter().map(|v| vec![*v; n]).collect();
    if n > 1 && len > 1 {
        for i in 0..len {
            points.push((0..n).map(|x| grid[(i + 2 * x + 1) % len]).collect());
        }
    }
    points
}

struct Kernel {
    model: Model,
    lo: f64,
    hi: f64,
}

impl Kernel {
    #[inline]
    fn ln_f(&self, m: f64, s: f64) -> f64 {
        match self.model {
            Model::Discrete => ln_mgf_geometric(m, s),
            Model::Continuous => ln_mgf_exponential(m, s),
        }
    }

    /// Writes the per-site integrands at `m` into `out[..n]` and their sum into `out[n]`.
    #[inline]
    fn terms(&self, m: &[f64], point: &[f64], out: &mut [f64]) {
        let n = m.len();
        let product = m.iter().zip(point).map(|(m, s)| self.ln_f(*m, *s)).sum::<f64>().exp();
        let mut total = 0.0;
        for x in 0..n {
            let left = if x == 0 { self.lo } else { m[x - 1] };
            let right = if x + 1 == n { self.hi } else { m[x + 1] };
            let s = point[x];
            let v = (self.ln_f(left, s) - 2.0 * self.ln_f(m[x], s) + self.ln_f(right, s)) * product;
            out[x] = v;
            total += v;
        }
        out[n] = total;
    }
}

fn validate_point(spec: &MixtureSpec, point: &[f64]) -> Result<()> {
    if point.len() != spec.n() {
        return Err(Error::invalid("point", format!("need {} components, got {}", spec.n(), point.len())));
    }
    let (_, hi) = spec.interval();
    for s in point {
        let ok = match spec.model {
            Model::Discrete => *s >= 0.0 && *s < (1.0 + hi) / hi,
            Model::Continuous => s * hi < 1.0,
        };
        if !ok {
            return Err(Error::Domain {
                function: "telescoping",
                value: *s,
                domain: match spec.model {
                    Model::Discrete => "0 <= lambda < (1 + rho_B)/rho_B",
                    Model::Continuous => "t < 1/T_B",
                },
            });
        }
    }
    Ok(())
}

/// Per-site residuals and their sum, with the error of each.
fn telescoping_terms(spec: &MixtureSpec, point: &[f64], tol: f64, method: TelescopingMethod) -> Result<(Vec<f64>, Vec<f64>, String)> {
    let n = spec.n();
    let (lo, hi) = spec.interval();
    let kernel = Kernel { model: spec.model, lo, hi };
    let volume = ordered_simplex_volume(n, lo, hi);
    match method {
        TelescopingMethod::Quadrature => {
            if n > MAX_QUADRATURE_DIM {
                return Err(Error::Unsupported(format!("quadrature telescoping limited to N <= {MAX_QUADRATURE_DIM}")));
            }
            let opts = QuadOptions::new(0.01 * tol * volume, 0.0).max_subdivisions(2000);
            let mut values = Vec::with_capacity(n + 1);
            let mut errors = Vec::with_capacity(n + 1);
            let mut buf = vec![0.0; n + 1];
            let mut evaluations = 0;
            for x in 0..n {
                let r = integrate_ordered_simplex(
                    n,
                    lo,
                    hi,
                    |m: &[f64]| {
                        kernel.terms(m, point, &mut buf);
                        buf[x]
                    },
                    &opts,
                )?;
                evaluations += r.evaluations;
                values.push(r.value / volume);
                errors.push(r.error / volume);
            }
            values.push(values.iter().sum());
            errors.push(errors.iter().sum());
            Ok((values, errors, format!("iterated Gauss-Kronrod on the ordered simplex, {evaluations} evaluations")))
        }
        TelescopingMethod::MonteCarlo { samples, seed } => {
            let mut rng = RngContract::new(seed).stream(0);
            let est = mc_ordered_simplex(n, lo, hi, n + 1, samples, &mut rng, |m, out| kernel.terms(m, point, out));
            Ok((
                est.values.iter().map(|v| v / volume).collect(),
                est.std_errors.iter().map(|e| e / volume).collect(),
                format!("Monte Carlo, {samples} uniform simplex points, seed {seed}"),
            ))
        }
    }
}

/// Residual of the same identity for the product law with the mixture's
/// site means (the profile frozen at its mean); nonzero in general.
pub fn telescoping_impostor(spec: &MixtureSpec, point: &[f64]) -> Result<f64> {
    validate_point(spec, point)?;
    let (lo, hi) = spec.interval();
    let kernel = Kernel { model: spec.model, lo, hi };
    let means = moment_profile(spec).means;
    let mut out = vec![0.0; spec.n() + 1];
    kernel.terms(&means, point, &mut out);
    Ok(out[spec.n()])
}

fn check(spec: &MixtureSpec, point: &[f64], tol: f64, method: TelescopingMethod, name: &str, var: &str) -> Result<VerificationReport> {
    validate_point(spec, point)?;
    let n = spec.n();
    let (values, errors, how) = telescoping_terms(spec, point, tol, method)?;
    let residuals = values
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (v, e))| {
            let label = if i < n { format!("site {}", i + 1) } else { "sum".to_string() };
            let bound = match method {
                TelescopingMethod::Quadrature => tol,
                TelescopingMethod::MonteCarlo { .. } => MC_SIGMAS * e,
            };
            Residual::new(label, *v, bound)
        })
        .collect();
    let impostor = telescoping_impostor(spec, point)?;
    let (lo, hi) = spec.interval();
    let max_err = errors.iter().cloned().fold(0.0, f64::max);
    Ok(VerificationReport::new(
        name,
        params([("n", json!(n)), ("lo", json!(lo)), ("hi", json!(hi)), (var, json!(point))]),
        residuals,
        vec![
            how,
            format!("largest error estimate {max_err:.2e}"),
            format!("mean-profile product law gives {impostor:.3e}"),
        ],
    ))
}

/// Per-site telescoping residuals of the particle-chain mixture at `lambdas`.
pub fn check_telescoping_discrete(
    params: &ChainParams,
    lambdas: &[f64],
    tol: f64,
    method: TelescopingMethod,
) -> Result<VerificationReport> {
    check(&MixtureSpec::discrete(*params), lambdas, tol, method, "telescoping_discrete", "lambda")
}

/// Per-site telescoping residuals of the energy-chain mixture at `ts`.
pub fn check_telescoping_continuous(
    params: &ChainParams,
    ts: &[f64],
    tol: f64,
    method: TelescopingMethod,
) -> Result<VerificationReport> {
    check(&MixtureSpec::continuous(*params), ts, tol, method, "telescoping_continuous", "t")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn discrete(n: usize) -> ChainParams {
        ChainParams::from_densities(n, 1.0, 3.0).unwrap()
    }

    #[test]
    fn single_site_closed_form() {
        // E over m of the bracket times F_m equals the closed-form antiderivative algebra: zero
        let r = check_telescoping_discrete(&discrete(1), &[0.4], 1e-10, TelescopingMethod::Quadrature).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn two_sites_mixed_point() {
        let r = check_telescoping_discrete(&discrete(2), &[0.3, 0.7], 1e-8, TelescopingMethod::Quadrature).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.residuals.len(), 3);
    }

    #[test]
    fn continuous_examples() {
        let p1 = ChainParams::continuous(1, 1.0, 2.0).unwrap();
        assert!(check_telescoping_continuous(&p1, &[0.3], 1e-10, TelescopingMethod::Quadrature).unwrap().passed());
        let p3 = ChainParams::continuous(3, 1.0, 2.0).unwrap();
        let r = check_telescoping_continuous(&p3, &[-0.5, 0.1, 0.4], 1e-8, TelescopingMethod::Quadrature).unwrap();
        assert!(r.passed(), "{r:?}");
        let zero = check_telescoping_continuous(&p3, &[0.0; 3], 1e-8, TelescopingMethod::Quadrature).unwrap();
        assert_eq!(zero.max_residual, 0.0);
    }

    #[test]
    fn impostor_is_rejected() {
        for n in 1..=3 {
            for point in grid_points(&default_lambda_grid(), n) {
                let bad = telescoping_impostor(&MixtureSpec::discrete(discrete(n)), &point).unwrap();
                assert!(bad.abs() > 100.0 * 1e-8, "n={n} {point:?}: {bad}");
            }
        }
    }

    #[test]
    fn monte_carlo_five_sites() {
        let r = check_telescoping_discrete(
            &discrete(5),
            &[0.5; 5],
            0.0,
            TelescopingMethod::MonteCarlo { samples: 200_000, seed: 3 },
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn domain_is_checked() {
        assert!(check_telescoping_discrete(&discrete(1), &[1.5], 1e-8, TelescopingMethod::Quadrature).is_err());
        let p = ChainParams::continuous(1, 1.0, 2.0).unwrap();
        assert!(check_telescoping_continuous(&p, &[0.5], 1e-8, TelescopingMethod::Quadrature).is_err());
        assert!(check_telescoping_continuous(&p, &[0.1, 0.1], 1e-8, TelescopingMethod::Quadrature).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(default_t_grid(2.0), vec![-1.0, -0.3, 0.1, 0.3]);
        assert_eq!(default_t_grid(1.0).len(), 5);
        assert_eq!(grid_points(&[0.1, 0.2, 0.3], 2).len(), 6);
        assert_eq!(grid_points(&[0.1, 0.2], 1).len(), 2);
    }
}
