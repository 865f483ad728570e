//! Jump-size samplers of the particle chain.

use rand::Rng;

use crate::numerics::HarmonicTable;

/// `k` in `1..=n` with probability `(1/k) / H(n)`.
#[inline]
pub fn sample_k_harmonic<R: Rng + ?Sized>(n: u64, rng: &mut R) -> u64 {
    assert!(n >= 1, "removal from an empty site");
    if n == 1 {
        return 1;
    }
    let table = HarmonicTable::global();
    let target = rng.random::<f64>() * table.get(n);
    table.search(n, target)
}

/// Logarithmic law `P(k) = beta^k / (k (-ln(1 - beta)))`, by chop-down inversion.
#[inline]
pub fn sample_k_logarithmic<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> u64 {
    debug_assert!(beta > 0.0 && beta < 1.0);
    let mut u = rng.random::<f64>();
    let mut p = beta / -(-beta).ln_1p();
    let mut k = 1u64;
    while u > p && p > 0.0 {
        u -= p;
        k += 1;
        p *= beta * (k - 1) as f64 / k as f64;
    }
    k
}
