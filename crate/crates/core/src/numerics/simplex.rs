//! Integration over the ordered simplex `lo <= m_1 <= ... <= m_n <= hi`.
//!
//! Iterated adaptive quadrature keeps the ordering constraints exact: the
//! variable `m_{j+1}` is integrated over `[m_j, hi]` inside the integral over
//! `m_j`. Monte Carlo draws sorted uniforms, which are uniform on the simplex.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate, QuadOptions, QuadResult};
use crate::params::ordered_simplex_volume;
use crate::real::Real;

/// Largest dimension accepted by the iterated quadrature.
pub const MAX_QUADRATURE_DIM: usize = 4;

/// Integration domain for [`integrate_nested`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `lo <= m_1 <= ... <= m_n <= hi`.
    OrderedSimplex,
    /// `[lo, hi]^n`.
    Cube,
}

struct Nest<'a, T, F> {
    f: &'a mut F,
    hi: T,
    lo: T,
    domain: Domain,
    levels: Vec<QuadOptions<T>>,
}

fn nest<T: Real, F: FnMut(&[T]) -> T>(
    depth: usize,
    point: &mut [T],
    lower: T,
    ctx: &mut Nest<'_, T, F>,
) -> Result<QuadResult<T>> {
    let n = point.len();
    let opts = ctx.levels[depth];
    let hi = ctx.hi;
    let mut inner_err = T::zero();
    let mut inner_evals = 0usize;
    let mut failure: Option<Error> = None;
    let outer = integrate(
        |v| {
            point[depth] = v;
            if depth + 1 == n {
                inner_evals += 1;
                return (ctx.f)(point);
            }
            if failure.is_some() {
                return T::zero();
            }
            let next_lower = match ctx.domain {
                Domain::OrderedSimplex => v,
                Domain::Cube => ctx.lo,
            };
            match nest(depth + 1, point, next_lower, ctx) {
                Ok(r) => {
                    inner_err = inner_err.max(r.error);
                    inner_evals += r.evaluations;
                    r.value
                }
                Err(e) => {
                    failure = Some(e);
                    T::zero()
                }
            }
        },
        lower,
        hi,
        &opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(QuadResult {
        value: outer.value,
        error: outer.error + (hi - lower).abs() * inner_err,
        evaluations: if depth + 1 == n { outer.evaluations } else { inner_evals },
        subdivisions: outer.subdivisions,
    })
}

/// Iterated adaptive quadrature of `f` over an `n`-dimensional domain.
///
/// `opts.abs_tol` is the budget for the whole integral; it is split across
/// levels so that the propagated inner errors stay within it.
pub fn integrate_nested<T: Real, F: FnMut(&[T]) -> T>(
    n: usize,
    lo: T,
    hi: T,
    domain: Domain,
    mut f: F,
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    if n == 0 {
        return Ok(QuadResult {
            value: f(&[]),
            error: T::zero(),
            evaluations: 1,
            subdivisions: 0,
        });
    }
    if n > MAX_QUADRATURE_DIM {
        return Err(Error::Unsupported(format!(
            "iterated quadrature supports at most {MAX_QUADRATURE_DIM} dimensions, got {n}"
        )));
    }
    let width = (hi - lo).abs().max(T::one());
    let levels = (0..n)
        .map(|d| {
            let scale = T::lit(2f64.powi(d as i32 + 1)) * width.powi(d as i32);
            QuadOptions {
                abs_tol: opts.abs_tol / scale,
                ..*opts
            }
        })
        .collect();
    let mut ctx = Nest {
        f: &mut f,
        hi,
        lo,
        domain,
        levels,
    };
    let mut point = vec![lo; n];
    nest(0, &mut point, lo, &mut ctx)
}

/// Iterated quadrature over the ordered simplex.
pub fn integrate_ordered_simplex<T: Real, F: FnMut(&[T]) -> T>(
    n: usize,
    lo: T,
    hi: T,
    f: F,
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    integrate_nested(n, lo, hi, Domain::OrderedSimplex, f, opts)
}

/// Monte Carlo estimate of a vector of simplex integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub samples: usize,
}

/// Draws a uniform point of the ordered simplex into `out`.
pub fn sample_simplex_point<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = lo + (hi - lo) * rng.random::<f64>();
    }
    out.sort_unstable_by(|a, b| a.partial_cmp(b).expect("uniform draws are finite"));
}

/// Monte Carlo integration of `outputs` integrands over the ordered simplex.
///
/// `f` writes the integrand values at a sampled point into its second argument.
/// Results include the simplex volume factor.
pub fn mc_ordered_simplex<R, F>(
    n: usize,
    lo: f64,
    hi: f64,
    outputs: usize,
    samples: usize,
    rng: &mut R,
    mut f: F,
) -> McEstimate
where
    R: Rng + ?Sized,
    F: FnMut(&[f64], &mut [f64]),
{
    let volume = ordered_simplex_volume(n, lo, hi);
    let mut point = vec![0.0; n];
    let mut buf = vec![0.0; outputs];
    let mut mean = vec![0.0; outputs];
    let mut m2 = vec![0.0; outputs];
    for i in 0..samples {
        sample_simplex_point(rng, lo, hi, &mut point);
        f(&point, &mut buf);
        let count = (i + 1) as f64;
        for j in 0..outputs {
            let delta = buf[j] - mean[j];
            mean[j] += delta / count;
            m2[j] += delta * (buf[j] - mean[j]);
        }
    }
    let denom = (samples.max(2) - 1) as f64;
    let std_errors = m2
        .iter()
        .map(|s| volume * (s / denom / samples.max(1) as f64).sqrt())
        .collect();
    McEstimate {
        values: mean.iter().map(|v| v * volume).collect(),
        std_errors,
        samples,
    }
}
