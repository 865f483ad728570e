//! One-dimensional identities behind the telescoping argument.

use serde_json::json;

use crate::error::{Error, Result};
use crate::measure::distributions::{ln_mgf_exponential, ln_mgf_geometric};
use crate::numerics::{integrate, QuadOptions};
use crate::verify::report::{params, Residual, VerificationReport};

/// Switch from quadrature to the power series of the Frullani integrand below this point.
pub const FRULLANI_SERIES_CUTOFF: f64 = 1e-4;

fn quad_opts(tol: f64) -> QuadOptions {
    // well inside the tolerance under test
    QuadOptions::new(tol * 1e-3, 0.0).max_subdivisions(4000)
}

/// `int_0^m F_{m'}(lambda) dm'` against `ln F_m(lambda) / (lambda - 1)` for the geometric MGF.
pub fn check_antiderivative_discrete(m: f64, lambda: f64, tol: f64) -> Result<VerificationReport> {
    if !(m > 0.0) {
        return Err(Error::invalid("m", format!("{m} is not positive")));
    }
    if !(lambda >= 0.0 && lambda < (1.0 + m) / m) || lambda == 1.0 {
        return Err(Error::Domain {
            function: "check_antiderivative_discrete",
            value: lambda,
            domain: "[0, 1) or (1, (1+m)/m)",
        });
    }
    let q = integrate(|mp: f64| 1.0 / (1.0 + (1.0 - lambda) * mp), 0.0, m, &quad_opts(tol))?;
    let closed = ln_mgf_geometric(m, lambda) / (lambda - 1.0);
    Ok(VerificationReport::new(
        "antiderivative_discrete",
        params([("m", json!(m)), ("lambda", json!(lambda))]),
        vec![Residual::new("quadrature - closed form", q.value - closed, tol)],
        vec![format!("adaptive Gauss-Kronrod, error estimate {:.1e}, {} subintervals", q.error, q.subdivisions)],
    ))
}

/// `int_0^m F_{m'}(t) dm'` against `ln F_m(t) / t` for the exponential MGF.
pub fn check_antiderivative_continuous(m: f64, t: f64, tol: f64) -> Result<VerificationReport> {
    if !(m > 0.0) {
        return Err(Error::invalid("m", format!("{m} is not positive")));
    }
    if !(t * m < 1.0) || t == 0.0 {
        return Err(Error::Domain {
            function: "check_antiderivative_continuous",
            value: t,
            domain: "t < 1/m, t != 0",
        });
    }
    let q = integrate(|mp: f64| 1.0 / (1.0 - t * mp), 0.0, m, &quad_opts(tol))?;
    let closed = ln_mgf_exponential(m, t) / t;
    Ok(VerificationReport::new(
        "antiderivative_continuous",
        params([("m", json!(m)), ("t", json!(t))]),
        vec![Residual::new("quadrature - closed form", q.value - closed, tol)],
        vec![format!("adaptive Gauss-Kronrod, error estimate {:.1e}, {} subintervals", q.error, q.subdivisions)],
    ))
}

/// `int_0^d (e^{-ax} - e^{-bx}) / x dx` by its power series.
fn frullani_head(a: f64, b: f64, d: f64) -> f64 {
    // sum_j ((-a)^j - (-b)^j) d^j / (j j!)
    let mut sum = 0.0;
    let (mut pa, mut pb, mut fact) = (1.0, 1.0, 1.0);
    for j in 1..60 {
        pa *= -a * d;
        pb *= -b * d;
        fact *= j as f64;
        let term = (pa - pb) / (j as f64 * fact);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// `int_0^inf (e^{-ax} - e^{-bx}) / x dx = ln(b/a)`.
///
/// Series on `[0, 1e-4]`, adaptive quadrature up to `X`, and the tail beyond
/// `X` bounded by `e^{-cX} / (cX)`, `c = min(a, b)`, with `X` chosen so the
/// bound is below `tol / 100`.
pub fn check_frullani(a: f64, b: f64, tol: f64) -> Result<VerificationReport> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::invalid("a, b", format!("({a}, {b}) must be positive")));
    }
    let c = a.min(b);
    let budget = tol / 100.0;
    let mut x_max = 10.0 / c;
    while (-c * x_max).exp() / (c * x_max) > budget {
        x_max *= 1.5;
    }
    let tail_bound = (-c * x_max).exp() / (c * x_max);
    let d = FRULLANI_SERIES_CUTOFF;
    let head = frullani_head(a, b, d);
    let body = integrate(
        |x: f64| ((-a * x).exp_m1() - (-b * x).exp_m1()) / x,
        d,
        x_max,
        &QuadOptions::new(budget, 0.0).max_subdivisions(4000),
    )?;
    let value = head + body.value;
    Ok(VerificationReport::new(
        "frullani",
        params([("a", json!(a)), ("b", json!(b))]),
        vec![Residual::new("integral - ln(b/a)", value - (b / a).ln(), tol)],
        vec![format!(
            "series on [0, {d:e}], quadrature on [{d:e}, {x_max:.3}] (error {:.1e}), tail bound {tail_bound:.1e}",
            body.error
        )],
    ))
}
