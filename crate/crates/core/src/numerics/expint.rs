//! Exponential integral `E1(x) = int_x^inf e^{-t}/t dt`.

use crate::error::{Error, Result};
use crate::real::Real;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E1(x)` for `x > 0`: power series for `x <= 1`, Lentz continued fraction above.
pub fn exp_integral_e1<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || x.is_nan() {
        return Err(Error::Domain {
            function: "exp_integral_e1",
            value: x.as_f64(),
            domain: "x > 0",
        });
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    let eps = T::epsilon();
    if x <= T::one() {
        // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        let mut sum = T::zero();
        let mut term = T::one();
        let mut k = 1usize;
        loop {
            let kf = T::from_count(k);
            term = term * (-x) / kf;
            let contrib = term / kf;
            sum = sum + contrib;
            if contrib.abs() <= eps * sum.abs() || k > 200 {
                break;
            }
            k += 1;
        }
        Ok(-T::lit(EULER_GAMMA) - x.ln() - sum)
    } else {
        // E1(x) = e^{-x} / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
        let tiny = T::min_positive_value() / eps;
        let mut b = x + T::one();
        let mut c = T::one() / tiny;
        let mut d = T::one() / b;
        let mut h = d;
        for i in 1..=1000usize {
            let fi = T::from_count(i);
            let a = -fi * fi;
            b = b + T::lit(2.0);
            d = T::one() / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h = h * del;
            if (del - T::one()).abs() <= eps {
                break;
            }
        }
        Ok(h * (-x).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate, QuadOptions};

    /// E1(x) = int_0^1 e^{-x/u} / u du, a finite-interval form for quadrature.
    fn e1_by_quadrature(x: f64) -> f64 {
        let opts = QuadOptions::new(0.0, 1e-13).max_subdivisions(2000);
        integrate(|u: f64| if u == 0.0 { 0.0 } else { (-x / u).exp() / u }, 0.0, 1.0, &opts)
            .unwrap()
            .value
    }

    #[test]
    fn matches_quadrature_oracle() {
        for x in [0.01, 0.1, 0.5, 0.999, 1.0, 1.001, 2.0, 5.0, 13.0, 30.0] {
            let oracle = e1_by_quadrature(x);
            let value = exp_integral_e1(x).unwrap();
            assert!(((value - oracle) / oracle).abs() < 1e-10, "x = {x}: {value} vs {oracle}");
        }
    }

    #[test]
    fn reference_values() {
        // frozen from the quadrature oracle above
        assert!((exp_integral_e1(1.0f64).unwrap() - 0.219_383_934_395_520_3).abs() < 1e-12);
        assert!((exp_integral_e1(0.5f64).unwrap() - 0.559_773_594_776_160_8).abs() < 1e-12);
        assert!((exp_integral_e1(1e-6f64).unwrap() - 13.238_295_893_062_49).abs() < 1e-9);
    }

    #[test]
    fn monotone_and_vanishing() {
        let mut prev = f64::INFINITY;
        for i in 1..400 {
            let x = i as f64 * 0.25;
            let v = exp_integral_e1(x).unwrap();
            assert!(v < prev);
            assert!(v > 0.0);
            prev = v;
        }
        assert!(prev < 1e-40);
        assert_eq!(exp_integral_e1(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(exp_integral_e1(0.0f64).is_err());
        assert!(exp_integral_e1(-1.0f64).is_err());
        assert!(exp_integral_e1(f64::NAN).is_err());
    }

    #[test]
    fn single_precision() {
        let v: f32 = exp_integral_e1(1.0f32).unwrap();
        assert!((v - 0.219_383_93).abs() < 1e-6);
    }
}
