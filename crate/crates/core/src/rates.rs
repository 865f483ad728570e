//! Per-site rate catalog with weighted selection.
//!
//! Small chains scan a flat array; larger ones use a binary-indexed tree so
//! that both updates and selection stay logarithmic.

/// Chains up to this many sites use the linear catalog.
pub const LINEAR_MAX_SITES: usize = 64;

#[derive(Debug, Clone)]
pub enum RateIndex {
    Linear(LinearRates),
    Fenwick(FenwickRates),
}

impl RateIndex {
    pub fn new(rates: Vec<f64>) -> Self {
        if rates.len() <= LINEAR_MAX_SITES {
            RateIndex::Linear(LinearRates::new(rates))
        } else {
            RateIndex::Fenwick(FenwickRates::new(rates))
        }
    }

    #[inline]
    pub fn rate(&self, i: usize) -> f64 {
        match self {
            RateIndex::Linear(l) => l.rates[i],
            RateIndex::Fenwick(f) => f.rates[i],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, rate: f64) {
        match self {
            RateIndex::Linear(l) => l.set(i, rate),
            RateIndex::Fenwick(f) => f.set(i, rate),
        }
    }

    /// Incrementally maintained sum of all rates.
    #[inline]
    pub fn total(&self) -> f64 {
        match self {
            RateIndex::Linear(l) => l.total,
            RateIndex::Fenwick(f) => f.total(),
        }
    }

    /// Sum recomputed from the individual rates.
    pub fn exact_total(&self) -> f64 {
        let rates = match self {
            RateIndex::Linear(l) => &l.rates,
            RateIndex::Fenwick(f) => &f.rates,
        };
        rates.iter().sum()
    }

    /// Index `i` such that the cumulative rate before `i` is `<= target` and
    /// through `i` exceeds it. Never returns a zero-rate entry while some rate is
    /// positive.
    #[inline]
    pub fn select(&self, target: f64) -> usize {
        match self {
            RateIndex::Linear(l) => l.select(target),
            RateIndex::Fenwick(f) => f.select(target),
        }
    }

    /// Rebuilds the running sums from the stored rates.
    pub fn refresh(&mut self) {
        match self {
            RateIndex::Linear(l) => l.total = l.rates.iter().sum(),
            RateIndex::Fenwick(f) => *f = FenwickRates::new(std::mem::take(&mut f.rates)),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RateIndex::Linear(l) => l.rates.len(),
            RateIndex::Fenwick(f) => f.rates.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct LinearRates {
    rates: Vec<f64>,
    total: f64,
}

impl LinearRates {
    pub fn new(rates: Vec<f64>) -> Self {
        let total = rates.iter().sum();
        Self { rates, total }
    }

    #[inline]
    fn set(&mut self, i: usize, rate: f64) {
        self.total += rate - self.rates[i];
        self.rates[i] = rate;
    }

    #[inline]
    fn select(&self, target: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, r) in self.rates.iter().enumerate() {
            if *r > 0.0 {
                acc += r;
                last_positive = i;
                if target < acc {
                    return i;
                }
            }
        }
        last_positive
    }
}

#[derive(Debug, Clone)]
pub struct FenwickRates {
    rates: Vec<f64>,
    // 1-based implicit tree
    tree: Vec<f64>,
    top_bit: usize,
}

impl FenwickRates {
    pub fn new(rates: Vec<f64>) -> Self {
        let n = rates.len();
        let mut tree = vec![0.0; n + 1];
        for i in 1..=n {
            tree[i] += rates[i - 1];
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        let top_bit = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self { rates, tree, top_bit }
    }

    fn set(&mut self, i: usize, rate: f64) {
        let delta = rate - self.rates[i];
        self.rates[i] = rate;
        let mut idx = i + 1;
        while idx < self.tree.len() {
            self.tree[idx] += delta;
            idx += idx & idx.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut idx = self.rates.len();
        let mut sum = 0.0;
        while idx > 0 {
            sum += self.tree[idx];
            idx -= idx & idx.wrapping_neg();
        }
        sum
    }

    fn select(&self, target: f64) -> usize {
        let n = self.rates.len();
        let mut pos = 0usize;
        let mut remaining = target;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= remaining {
                pos = next;
                remaining -= self.tree[next];
            }
            step >>= 1;
        }
        let i = pos.min(n - 1);
        if self.rates[i] > 0.0 {
            return i;
        }
        // rounding put us on an empty entry: take the nearest positive one
        (0..i)
            .rev()
            .chain(i + 1..n)
            .find(|j| self.rates[*j] > 0.0)
            .unwrap_or(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_select(rates: &[f64], target: f64) -> usize {
        let mut acc = 0.0;
        for (i, r) in rates.iter().enumerate() {
            acc += r;
            if target < acc && *r > 0.0 {
                return i;
            }
        }
        rates.iter().rposition(|r| *r > 0.0).unwrap()
    }

    #[test]
    fn linear_skips_empty_sites() {
        let idx = RateIndex::new(vec![0.0, 1.0, 0.0, 2.0]);
        assert_eq!(idx.select(0.0), 1);
        assert_eq!(idx.select(0.999), 1);
        assert_eq!(idx.select(1.0), 3);
        assert_eq!(idx.select(3.0), 3);
    }

    #[test]
    fn fenwick_for_large_chains() {
        let rates: Vec<f64> = (0..200).map(|i| (i % 7) as f64 * 0.5).collect();
        let idx = RateIndex::new(rates.clone());
        assert!(matches!(idx, RateIndex::Fenwick(_)));
        let total: f64 = rates.iter().sum();
        assert!((idx.total() - total).abs() < 1e-9);
        for t in 0..1000 {
            let target = total * t as f64 / 1000.0;
            assert_eq!(idx.select(target), reference_select(&rates, target), "target {target}");
        }
    }

    proptest! {
        #[test]
        fn fenwick_matches_linear_after_updates(
            init in proptest::collection::vec(0.0f64..5.0, 65..150),
            updates in proptest::collection::vec((0usize..150, 0.0f64..5.0), 0..200),
            frac in 0.0f64..1.0,
        ) {
            let mut fen = RateIndex::new(init.clone());
            let mut lin = RateIndex::Linear(LinearRates::new(init.clone()));
            for (i, r) in updates {
                let i = i % init.len();
                fen.set(i, r);
                lin.set(i, r);
            }
            prop_assert!((fen.total() - lin.exact_total()).abs() < 1e-9);
            let target = frac * lin.exact_total();
            let (a, b) = (fen.select(target), lin.select(target));
            if a != b {
                // only allowed at a cumulative-sum boundary within rounding
                let cum: f64 = (0..a.max(b)).map(|j| lin.rate(j)).sum();
                prop_assert!((cum - target).abs() < 1e-9);
            }
        }
    }
}
