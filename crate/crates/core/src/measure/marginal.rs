//! One-site marginals of the mixtures.
//!
//! The `x`-th order statistic of `N` uniforms on `[lo, hi]` is a shifted and
//! scaled Beta(x, N - x + 1) variable; each marginal is a one-dimensional
//! mixture against that density.

use crate::error::{Error, Result};
use crate::measure::distributions::geometric_ln_pmf;
use crate::measure::{MixtureSpec, Model};
use crate::numerics::quadrature::{integrate, QuadOptions};
use crate::real::Real;

/// Density of the `x`-th (1-based) order statistic of `n` uniforms on `[lo, hi]`.
pub fn order_statistic_density<T: Real>(n: usize, x: usize, lo: T, hi: T) -> impl Fn(T) -> T {
    let width = hi - lo;
    // ln( n! / ((x-1)! (n-x)!) )
    let ln_coef = (1..=n).map(|k| T::from_count(k).ln()).sum::<T>()
        - (1..x).map(|k| T::from_count(k).ln()).sum::<T>()
        - (1..=n - x).map(|k| T::from_count(k).ln()).sum::<T>();
    let a = T::from_count(x - 1);
    let b = T::from_count(n - x);
    move |m: T| {
        let s = (m - lo) / width;
        if s < T::zero() || s > T::one() {
            return T::zero();
        }
        let mut ln = ln_coef - width.ln();
        if a > T::zero() {
            ln = ln + a * s.ln();
        }
        if b > T::zero() {
            ln = ln + b * (T::one() - s).ln();
        }
        ln.exp()
    }
}

fn check_site(n: usize, x: usize) -> Result<()> {
    if (1..=n).contains(&x) {
        Ok(())
    } else {
        Err(Error::invalid("x", format!("site {x} outside 1..={n}")))
    }
}

fn mix<T: Real, G: Fn(T) -> T>(spec: &MixtureSpec<T>, x: usize, tol: T, g: G) -> Result<T> {
    check_site(spec.n(), x)?;
    let (lo, hi) = spec.interval();
    if lo == hi {
        return Ok(g(lo));
    }
    let f = order_statistic_density(spec.n(), x, lo, hi);
    let opts = QuadOptions::new(tol, T::lit(1e3) * T::epsilon()).max_subdivisions(2000);
    Ok(integrate(|m| g(m) * f(m), lo, hi, &opts)?.value)
}

/// `P(eta_x = k) = int G_m(k) f_x(m) dm`.
pub fn marginal_pmf_discrete<T: Real>(spec: &MixtureSpec<T>, x: usize, k: u64, tol: T) -> Result<T> {
    spec.require(Model::Discrete)?;
    mix(spec, x, tol, |m| geometric_ln_pmf(m, k).exp())
}

/// Marginal pmf of site `x` on `0..=k_max`.
pub fn marginal_pmf_table<T: Real>(spec: &MixtureSpec<T>, x: usize, k_max: u64, tol: T) -> Result<Vec<T>> {
    (0..=k_max).map(|k| marginal_pmf_discrete(spec, x, k, tol)).collect()
}

/// `P(z_x <= t) = int (1 - e^{-t/m}) f_x(m) dm`.
pub fn marginal_cdf_continuous<T: Real>(spec: &MixtureSpec<T>, x: usize, t: T, tol: T) -> Result<T> {
    spec.require(Model::Continuous)?;
    if t <= T::zero() {
        check_site(spec.n(), x)?;
        return Ok(T::zero());
    }
    mix(spec, x, tol, |m| -(-t / m).exp_m1())
}

/// Marginal density of `z_x` at `t`.
pub fn marginal_density_continuous<T: Real>(spec: &MixtureSpec<T>, x: usize, t: T, tol: T) -> Result<T> {
    spec.require(Model::Continuous)?;
    if t < T::zero() {
        check_site(spec.n(), x)?;
        return Ok(T::zero());
    }
    mix(spec, x, tol, |m| (-t / m).exp() / m)
}
