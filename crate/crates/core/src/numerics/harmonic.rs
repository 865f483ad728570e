//! Harmonic numbers `H(n) = sum_{k=1}^n 1/k`.

use std::sync::OnceLock;

use crate::real::Real;

/// Default number of tabulated values.
pub const DEFAULT_CACHE_BOUND: usize = 1_000_000;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Tabulated harmonic numbers up to a bound, asymptotic expansion beyond.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    values: Vec<f64>,
}

impl HarmonicTable {
    /// Tabulates `H(0..=bound)` with compensated summation.
    pub fn new(bound: usize) -> Self {
        let mut values = Vec::with_capacity(bound + 1);
        values.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=bound {
            let y = 1.0 / k as f64 - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            values.push(sum);
        }
        Self { values }
    }

    /// Process-wide table with [`DEFAULT_CACHE_BOUND`] entries.
    pub fn global() -> &'static HarmonicTable {
        static TABLE: OnceLock<HarmonicTable> = OnceLock::new();
        TABLE.get_or_init(|| HarmonicTable::new(DEFAULT_CACHE_BOUND))
    }

    pub fn bound(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    #[inline]
    pub fn get(&self, n: u64) -> f64 {
        match self.values.get(n as usize) {
            Some(v) => *v,
            None => harmonic_asymptotic(n),
        }
    }

    /// Smallest `k` in `1..=n` with `H(k) >= target`, for `0 <= target <= H(n)`.
    pub fn search(&self, n: u64, target: f64) -> u64 {
        debug_assert!(n >= 1);
        if (n as usize) < self.values.len() {
            let slice = &self.values[1..=n as usize];
            let idx = slice.partition_point(|h| *h < target);
            return (idx as u64 + 1).min(n);
        }
        let (mut lo, mut hi) = (1u64, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.get(mid) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// `ln n + gamma + 1/(2n) - 1/(12 n^2) + 1/(120 n^4) - 1/(252 n^6)`.
pub fn harmonic_asymptotic(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let x = n as f64;
    let inv2 = 1.0 / (x * x);
    (x).ln() + EULER_GAMMA + 0.5 / x - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0))
}

/// `H(n)`, served from the global table.
pub fn harmonic_number<T: Real>(n: u64) -> T {
    T::lit(HarmonicTable::global().get(n))
}
