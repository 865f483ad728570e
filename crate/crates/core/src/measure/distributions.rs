//! Geometric and exponential building blocks and their generating functions.

use crate::error::{Error, Result};
use crate::real::Real;

fn check_mean<T: Real>(function: &'static str, m: T) -> Result<()> {
    if m > T::zero() && m.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: m.as_f64(),
            domain: "mean m > 0",
        })
    }
}

/// `ln G_m(k) = -ln(1+m) + k ln(m/(1+m))`.
#[inline]
pub fn geometric_ln_pmf<T: Real>(m: T, k: u64) -> T {
    let l1p = m.ln_1p();
    if k == 0 {
        return -l1p;
    }
    -l1p + T::lit(k as f64) * (m.ln() - l1p)
}

/// Geometric law of mean `m` on `{0, 1, ...}`: `(1/(1+m)) (m/(1+m))^k`.
pub fn geometric_pmf<T: Real>(m: T, k: u64) -> Result<T> {
    check_mean("geometric_pmf", m)?;
    Ok(geometric_ln_pmf(m, k).exp())
}

/// Exponential density of mean `m`, `(1/m) e^{-z/m}` on `z >= 0`.
#[inline]
pub fn exponential_density<T: Real>(m: T, z: T) -> T {
    if z < T::zero() {
        T::zero()
    } else {
        (-z / m).exp() / m
    }
}

/// `sum_k G_m(k) lambda^k = 1 / (1 + (1 - lambda) m)` for `0 <= lambda < (1+m)/m`.
pub fn mgf_geometric<T: Real>(m: T, lambda: T) -> Result<T> {
    check_mean("mgf_geometric", m)?;
    let denom = T::one() + (T::one() - lambda) * m;
    if !(lambda >= T::zero()) || !(denom > T::zero()) {
        return Err(Error::Domain {
            function: "mgf_geometric",
            value: lambda.as_f64(),
            domain: "0 <= lambda < (1+m)/m",
        });
    }
    Ok(denom.recip())
}

/// `int_0^inf E_m(z) e^{tz} dz = 1 / (1 - t m)` for `t < 1/m`.
pub fn mgf_exponential<T: Real>(m: T, t: T) -> Result<T> {
    check_mean("mgf_exponential", m)?;
    let denom = T::one() - t * m;
    if !(denom > T::zero()) {
        return Err(Error::Domain {
            function: "mgf_exponential",
            value: t.as_f64(),
            domain: "t < 1/m",
        });
    }
    Ok(denom.recip())
}

/// Unchecked `ln F_m(lambda)` for the geometric law.
#[inline]
pub(crate) fn ln_mgf_geometric<T: Real>(m: T, lambda: T) -> T {
    -((T::one() - lambda) * m).ln_1p()
}

/// Unchecked `ln F_m(t)` for the exponential law.
#[inline]
pub(crate) fn ln_mgf_exponential<T: Real>(m: T, t: T) -> T {
    -(-(t * m)).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::quadrature_1d;

    #[test]
    fn pmf_values() {
        assert_eq!(geometric_pmf(1.0, 0).unwrap(), 0.5);
        assert!((geometric_pmf(2.0f64, 3).unwrap() - (1.0 / 3.0) * (8.0 / 27.0)).abs() < 1e-15);
        assert!(geometric_pmf(0.0, 1).is_err());
        assert!(geometric_pmf(-1.0, 1).is_err());
        // deep tail stays finite and positive
        let deep = geometric_pmf(3.0, 2000).unwrap();
        assert!(deep > 0.0 && deep < 1e-240);
    }

    #[test]
    fn pmf_normalization_and_mean() {
        for m in [0.1, 1.0, 3.0, 7.5] {
            let r: f64 = m / (1.0 + m);
            let k_max = ((1e-16f64).ln() / r.ln()).ceil() as u64 + 50;
            let mass: f64 = (0..=k_max).map(|k| geometric_pmf(m, k).unwrap()).sum();
            let mean: f64 = (0..=k_max).map(|k| k as f64 * geometric_pmf(m, k).unwrap()).sum();
            // tail mass beyond k_max is r^(k_max+1)
            assert!((mass - 1.0).abs() < 1e-12 + r.powi(k_max as i32 + 1), "m = {m}");
            assert!((mean - m).abs() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn geometric_mgf() {
        for m in [0.5f64, 2.0, 4.0] {
            assert!((mgf_geometric(m, 1.0).unwrap() - 1.0).abs() < 1e-15);
            assert!((mgf_geometric(m, 0.0).unwrap() - geometric_pmf(m, 0).unwrap()).abs() < 1e-15);
        }
        // truncated series oracle at m = 2, lambda = 0.5
        let series: f64 = (0..400).map(|k| geometric_pmf(2.0, k).unwrap() * 0.5f64.powi(k as i32)).sum();
        assert!((series - 0.5).abs() < 1e-14);
        assert!((mgf_geometric(2.0f64, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(mgf_geometric(2.0, 1.5).is_err());
        assert!(mgf_geometric(2.0, 1.6).is_err());
        assert!(mgf_geometric(2.0, -0.1).is_err());
        assert!(mgf_geometric(2.0, 1.49).is_ok());
    }

    #[test]
    fn exponential_mgf() {
        assert_eq!(mgf_exponential(3.0, 0.0).unwrap(), 1.0);
        assert_eq!(mgf_exponential(1.0, 0.5).unwrap(), 2.0);
        let oracle = quadrature_1d(|z: f64| 0.5 * (-z / 2.0).exp() * (-z).exp(), 0.0, 80.0, 1e-14)
            .unwrap()
            .value;
        assert!((oracle - 1.0 / 3.0).abs() < 1e-13);
        assert!((mgf_exponential(2.0, -1.0).unwrap() - oracle).abs() < 1e-13);
        assert!(mgf_exponential(2.0, 0.5).is_err());
        assert!(mgf_exponential(2.0, 0.6).is_err());
    }

    #[test]
    fn log_mgfs_agree() {
        assert!((ln_mgf_geometric(2.0f64, 0.3) - mgf_geometric(2.0f64, 0.3).unwrap().ln()).abs() < 1e-15);
        assert!((ln_mgf_exponential(2.0f64, -0.7) - mgf_exponential(2.0f64, -0.7).unwrap().ln()).abs() < 1e-15);
    }
}
