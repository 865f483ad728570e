//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions<T = f64> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> QuadOptions<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_subdivisions: 1000,
        }
    }

    /// Absolute tolerance only.
    pub fn absolute(abs_tol: T) -> Self {
        Self::new(abs_tol, T::zero())
    }

    pub fn max_subdivisions(mut self, limit: usize) -> Self {
        self.max_subdivisions = limit;
        self
    }
}

/// Estimate of an integral with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T = f64> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub subdivisions: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    abs: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T: Real> Eq for Segment<T> {}

impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod rule on `[a, b]` with the QUADPACK error heuristic.
fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        res_k = res_k + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half_len;
    res_abs = res_abs * abs_half;
    res_asc = res_asc * abs_half;
    let mut error = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        let scale = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
        error = res_asc * scale.min(T::one());
    }
    let round_floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(round_floor);
    }
    (value, error, res_abs)
}

/// Adaptive estimate of `int_a^b f` to within `max(abs_tol, rel_tol * |I|)`.
///
/// Tolerances tighter than the floating-point roundoff floor
/// (`50 eps int_a^b |f|`) are clamped to that floor.
/// Exceeding the subdivision budget returns [`Error::NoConvergence`] carrying
/// the best estimate; the result is never silently truncated.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain {
            function: "integrate",
            value: f64::NAN,
            domain: "finite limits",
        });
    }
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
            subdivisions: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }

    let (value, error, abs) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, abs });
    let mut total = value;
    let mut total_err = error;
    let mut total_abs = abs;
    let mut frozen_value = T::zero();
    let mut frozen_err = T::zero();

    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Domain {
                function: "integrate",
                value: total.as_f64(),
                domain: "integrand finite on the interval",
            });
        }
        // tolerances below the roundoff floor of int |f| are clamped to it
        let floor = T::lit(50.0) * T::epsilon() * total_abs;
        let target = opts.abs_tol.max(opts.rel_tol * total.abs()).max(floor);
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_subdivisions || heap.is_empty() {
            return Err(Error::NoConvergence {
                value: total.as_f64(),
                error: total_err.as_f64(),
                subdivisions: heap.len(),
            });
        }
        let seg = heap.pop().expect("non-empty heap");
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // interval exhausted at machine precision; keep its contribution
            frozen_value = frozen_value + seg.value;
            frozen_err = frozen_err + seg.error;
            continue;
        }
        let (v1, e1, a1) = gk15(&mut f, seg.a, mid);
        let (v2, e2, a2) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        total = total + (v1 + v2 - seg.value);
        total_err = total_err + (e1 + e2 - seg.error);
        total_abs = total_abs + (a1 + a2 - seg.abs);
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1, abs: a1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2, abs: a2 });
    }

    // resum to shed incremental drift
    let subdivisions = heap.len();
    let (mut value, mut error) = (frozen_value, frozen_err);
    for s in heap.iter() {
        value = value + s.value;
        error = error + s.error;
    }
    Ok(QuadResult {
        value,
        error,
        evaluations,
        subdivisions,
    })
}

/// Adaptive estimate of `int_a^b f` with absolute error `<= tol`.
pub fn quadrature_1d<T: Real, F: FnMut(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<QuadResult<T>> {
    integrate(f, a, b, &QuadOptions::absolute(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant() {
        let r = quadrature_1d(|_| 1.0f64, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_closed_form() {
        let r = quadrature_1d(|m: f64| 1.0 / (1.0 + m), 1.0, 3.0, 1e-13).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-13);
        assert!(r.error <= 1e-13);
    }

    #[test]
    fn geometric_mgf_integral() {
        let lam = 0.5;
        let r = quadrature_1d(|m: f64| 1.0 / (1.0 + (1.0 - lam) * m), 1.0, 3.0, 1e-13).unwrap();
        let exact = 2.0 * (2.5f64.ln() - 1.5f64.ln());
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_negate() {
        let r = quadrature_1d(|x: f64| x * x, 2.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sharp_peak_needs_subdivision() {
        let f = |x: f64| 1.0 / (1e-4 + (x - 0.3) * (x - 0.3));
        let exact = (0.7f64 / 1e-2).atan() / 1e-2 + (0.3f64 / 1e-2).atan() / 1e-2;
        let r = integrate(f, 0.0, 1.0, &QuadOptions::new(1e-10, 1e-12)).unwrap();
        assert!(r.subdivisions > 1);
        assert!((r.value - exact).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f = |x: f64| (1.0 / x).sin();
        let err = integrate(f, 1e-6, 1.0, &QuadOptions::new(1e-14, 0.0).max_subdivisions(8)).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }

    #[test]
    fn single_precision() {
        let r = integrate(|x: f32| x.exp(), 0.0, 1.0, &QuadOptions::new(1e-5, 1e-5)).unwrap();
        assert!((r.value - (1f32.exp() - 1.0)).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn quintic_polynomials_exact(
            c in proptest::collection::vec(-5.0f64..5.0, 6),
            a in -3.0f64..3.0,
            w in 0.0f64..4.0,
        ) {
            let b = a + w;
            let p = |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
            let anti = |x: f64| c.iter().enumerate().rev()
                .fold(0.0, |acc, (i, ci)| acc * x + ci / (i as f64 + 1.0)) * x;
            let r = quadrature_1d(p, a, b, 1e-10).unwrap();
            let exact = anti(b) - anti(a);
            prop_assert!((r.value - exact).abs() <= 1e-10 + 1e-12 * exact.abs());
        }
    }
}
