//! Time-weighted occupation statistics of a trajectory.
//!
//! Every site keeps a histogram of holding time per value (or per bin), time
//! integrals of the value and its square, and time integrals of the pairwise
//! products. The recording window `[start, end]` is split into equal blocks
//! whose integrals feed the autocorrelation-corrected error estimates.
//!
//! Accumulation is lazy: a site is flushed only when its value changes, so an
//! event costs `O(N)` (pair flushes) instead of `O(N^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairs are tracked by default up to this many sites.
pub const DEFAULT_PAIR_TRACKING_MAX_SITES: usize = 32;

/// Default number of blocks in the recording window.
pub const DEFAULT_BLOCKS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Binning {
    /// One bin per non-negative integer value.
    Integer,
    /// Underflow `[0, lo)`, `bins` log-spaced bins on `[lo, hi)`, overflow `[hi, inf)`.
    Log { lo: f64, hi: f64, bins: usize },
}

impl Binning {
    #[inline]
    pub fn index(&self, value: f64) -> usize {
        match *self {
            Binning::Integer => value as usize,
            Binning::Log { lo, hi, bins } => {
                if value < lo {
                    0
                } else if value >= hi {
                    bins + 1
                } else {
                    let i = ((value / lo).ln() / (hi / lo).ln() * bins as f64) as usize;
                    1 + i.min(bins - 1)
                }
            }
        }
    }

    /// `[lower, upper)` of bin `i`.
    pub fn edges(&self, i: usize) -> (f64, f64) {
        match *self {
            Binning::Integer => (i as f64, i as f64 + 1.0),
            Binning::Log { lo, hi, bins } => {
                let edge = |j: usize| lo * (hi / lo).powf(j as f64 / bins as f64);
                match i {
                    0 => (0.0, lo),
                    i if i > bins => (hi, f64::INFINITY),
                    i => (edge(i - 1), if i == bins { hi } else { edge(i) }),
                }
            }
        }
    }

    fn initial_len(&self) -> usize {
        match *self {
            Binning::Integer => 16,
            Binning::Log { bins, .. } => bins + 2,
        }
    }
}

/// Block integrals of one replica.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSeries {
    pub stream: u64,
    pub block_len: f64,
    /// `sites[x][b]`: time integral of the value of site `x` over block `b`.
    pub sites: Vec<Vec<f64>>,
    /// Packed upper triangle, same layout as [`OccupationStats::pair_sums`].
    pub pairs: Vec<Vec<f64>>,
}

impl BlockSeries {
    pub fn n_blocks(&self) -> usize {
        self.sites.first().map_or(0, Vec::len)
    }

    /// Block means of site `x`.
    pub fn site_means(&self, x: usize) -> Vec<f64> {
        self.sites[x].iter().map(|v| v / self.block_len).collect()
    }

    pub fn pair_means(&self, p: usize) -> Vec<f64> {
        self.pairs[p].iter().map(|v| v / self.block_len).collect()
    }

    pub fn observed_time(&self) -> f64 {
        self.block_len * self.n_blocks() as f64
    }
}

/// Index of the pair `(x, y)`, `x < y`, in the packed upper triangle.
#[inline]
pub fn pair_index(n: usize, x: usize, y: usize) -> usize {
    debug_assert!(x < y && y < n);
    x * n - x * (x + 1) / 2 + (y - x - 1)
}

/// Time-weighted statistics, mergeable across replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationStats {
    pub n_sites: usize,
    pub binning: Binning,
    pub observed_time: f64,
    pub events: u64,
    /// `histograms[x][bin]`: holding time.
    pub histograms: Vec<Vec<f64>>,
    pub sums: Vec<f64>,
    pub sq_sums: Vec<f64>,
    /// Empty when pairs are not tracked.
    pub pair_sums: Vec<f64>,
    pub series: Vec<BlockSeries>,
}

impl OccupationStats {
    pub fn tracks_pairs(&self) -> bool {
        self.n_sites < 2 || !self.pair_sums.is_empty()
    }

    pub fn mean(&self, x: usize) -> f64 {
        self.sums[x] / self.observed_time
    }

    pub fn second_moment(&self, x: usize) -> f64 {
        self.sq_sums[x] / self.observed_time
    }

    pub fn variance(&self, x: usize) -> f64 {
        let m = self.mean(x);
        self.second_moment(x) - m * m
    }

    /// Time-averaged covariance of sites `x != y`; `None` without pair tracking.
    pub fn covariance(&self, x: usize, y: usize) -> Option<f64> {
        if x == y {
            return Some(self.variance(x));
        }
        if self.pair_sums.is_empty() {
            return None;
        }
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        let p = self.pair_sums[pair_index(self.n_sites, a, b)] / self.observed_time;
        Some(p - self.mean(x) * self.mean(y))
    }

    /// Total holding time recorded for site `x`.
    pub fn histogram_mass(&self, x: usize) -> f64 {
        self.histograms[x].iter().sum()
    }

    /// Holding-time fractions of site `x`.
    pub fn histogram_fractions(&self, x: usize) -> Vec<f64> {
        let mass = self.histogram_mass(x);
        self.histograms[x].iter().map(|w| w / mass).collect()
    }

    /// Combines statistics of independent replicas. Commutative; associative up
    /// to floating-point rounding of the sums.
    pub fn merge(&mut self, other: &OccupationStats) -> Result<()> {
        if self.n_sites != other.n_sites || self.binning != other.binning {
            return Err(Error::invalid("stats", "cannot merge statistics of different chains or binnings"));
        }
        if self.pair_sums.len() != other.pair_sums.len() {
            return Err(Error::invalid("stats", "cannot merge statistics with different pair tracking"));
        }
        if other
            .series
            .iter()
            .any(|s| self.series.iter().any(|t| t.stream == s.stream))
        {
            return Err(Error::invalid("stats", "replica stream ids must be distinct"));
        }
        self.observed_time += other.observed_time;
        self.events += other.events;
        for (h, g) in self.histograms.iter_mut().zip(&other.histograms) {
            if h.len() < g.len() {
                h.resize(g.len(), 0.0);
            }
            for (a, b) in h.iter_mut().zip(g) {
                *a += b;
            }
        }
        add_into(&mut self.sums, &other.sums);
        add_into(&mut self.sq_sums, &other.sq_sums);
        add_into(&mut self.pair_sums, &other.pair_sums);
        self.series.extend(other.series.iter().cloned());
        self.series.sort_by_key(|s| s.stream);
        Ok(())
    }
}

fn add_into(a: &mut [f64], b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// Options for an [`OccupationRecorder`].
#[derive(Debug, Clone, PartialEq)]
pub struct RecorderOptions {
    pub binning: Binning,
    pub start: f64,
    pub end: f64,
    pub n_blocks: usize,
    pub stream: u64,
    pub track_pairs: bool,
}

/// Lazy accumulator producing [`OccupationStats`].
#[derive(Debug, Clone)]
pub struct OccupationRecorder {
    n: usize,
    binning: Binning,
    start: f64,
    end: f64,
    block_len: f64,
    stream: u64,
    track_pairs: bool,
    values: Vec<f64>,
    site_last: Vec<f64>,
    pair_last: Vec<f64>,
    histograms: Vec<Vec<f64>>,
    sums: Vec<f64>,
    sq_sums: Vec<f64>,
    pair_sums: Vec<f64>,
    site_blocks: Vec<Vec<f64>>,
    pair_blocks: Vec<Vec<f64>>,
}

impl OccupationRecorder {
    pub fn new(initial: &[f64], opts: RecorderOptions) -> Result<Self> {
        if !(opts.end > opts.start) {
            return Err(Error::invalid("t_max", "recording window must have positive length"));
        }
        if opts.n_blocks == 0 {
            return Err(Error::invalid("n_blocks", "need at least one block"));
        }
        let n = initial.len();
        let n_pairs = if opts.track_pairs { n * n.saturating_sub(1) / 2 } else { 0 };
        let len = opts.binning.initial_len();
        Ok(Self {
            n,
            block_len: (opts.end - opts.start) / opts.n_blocks as f64,
            binning: opts.binning,
            start: opts.start,
            end: opts.end,
            stream: opts.stream,
            track_pairs: opts.track_pairs,
            values: initial.to_vec(),
            site_last: vec![opts.start; n],
            pair_last: vec![opts.start; n_pairs],
            histograms: vec![vec![0.0; len]; n],
            sums: vec![0.0; n],
            sq_sums: vec![0.0; n],
            pair_sums: vec![0.0; n_pairs],
            site_blocks: vec![vec![0.0; opts.n_blocks]; n],
            pair_blocks: vec![vec![0.0; opts.n_blocks]; n_pairs],
        })
    }

    /// Clips `[from, to]` to the window; returns `None` when empty.
    #[inline]
    fn clip(&self, from: f64, to: f64) -> Option<(f64, f64)> {
        let a = from.max(self.start);
        let b = to.min(self.end);
        (b > a).then_some((a, b))
    }

    #[inline]
    fn spread(blocks: &mut [f64], start: f64, block_len: f64, a: f64, b: f64, value: f64) {
        if value == 0.0 {
            return;
        }
        let last = blocks.len() - 1;
        let mut i = (((a - start) / block_len) as usize).min(last);
        let mut lo = a;
        loop {
            let block_end = if i == last { b } else { start + (i + 1) as f64 * block_len };
            let hi = b.min(block_end);
            if hi > lo {
                blocks[i] += value * (hi - lo);
            }
            if hi >= b || i == last {
                break;
            }
            lo = hi;
            i += 1;
        }
    }

    fn flush_site(&mut self, x: usize, t: f64) {
        if let Some((a, b)) = self.clip(self.site_last[x], t) {
            let v = self.values[x];
            let dur = b - a;
            let bin = self.binning.index(v);
            let h = &mut self.histograms[x];
            if bin >= h.len() {
                h.resize((bin + 1).max(2 * h.len()), 0.0);
            }
            h[bin] += dur;
            self.sums[x] += v * dur;
            self.sq_sums[x] += v * v * dur;
            Self::spread(&mut self.site_blocks[x], self.start, self.block_len, a, b, v);
        }
        self.site_last[x] = t;
    }

    fn flush_pair(&mut self, x: usize, y: usize, t: f64) {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        let p = pair_index(self.n, a, b);
        if let Some((lo, hi)) = self.clip(self.pair_last[p], t) {
            let v = self.values[a] * self.values[b];
            self.pair_sums[p] += v * (hi - lo);
            Self::spread(&mut self.pair_blocks[p], self.start, self.block_len, lo, hi, v);
        }
        self.pair_last[p] = t;
    }

    /// Site `x` takes `value` at time `t` (non-decreasing across calls).
    pub fn update(&mut self, t: f64, x: usize, value: f64) {
        if self.values[x] == value {
            return;
        }
        self.flush_site(x, t);
        if self.track_pairs {
            for y in 0..self.n {
                if y != x {
                    self.flush_pair(x, y, t);
                }
            }
        }
        self.values[x] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flushes everything up to the end of the window.
    pub fn finish(mut self, events: u64) -> OccupationStats {
        let end = self.end;
        for x in 0..self.n {
            self.flush_site(x, end);
            if self.track_pairs {
                for y in x + 1..self.n {
                    self.flush_pair(x, y, end);
                }
            }
        }
        if let Binning::Integer = self.binning {
            for h in &mut self.histograms {
                let used = h.iter().rposition(|w| *w > 0.0).map_or(0, |i| i + 1);
                h.truncate(used);
            }
        }
        OccupationStats {
            n_sites: self.n,
            binning: self.binning,
            observed_time: self.end - self.start,
            events,
            histograms: self.histograms,
            sums: self.sums,
            sq_sums: self.sq_sums,
            pair_sums: self.pair_sums,
            series: vec![BlockSeries {
                stream: self.stream,
                block_len: self.block_len,
                sites: self.site_blocks,
                pairs: self.pair_blocks,
            }],
        }
    }
}

/// Statistics of i.i.d. samples, each held for unit time.
pub fn stats_from_samples<'a, I>(n: usize, binning: Binning, samples: I, count: usize, n_blocks: usize) -> Result<OccupationStats>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = samples.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::invalid("samples", "need at least one sample"))?;
    if first.len() != n {
        return Err(Error::invalid("samples", "sample length differs from site count"));
    }
    let mut rec = OccupationRecorder::new(
        first,
        RecorderOptions {
            binning,
            start: 0.0,
            end: count as f64,
            n_blocks: n_blocks.min(count).max(1),
            stream: 0,
            track_pairs: true,
        },
    )?;
    for (i, s) in iter.enumerate() {
        let t = (i + 1) as f64;
        for (x, v) in s.iter().enumerate() {
            rec.update(t, x, *v);
        }
    }
    Ok(rec.finish(count as u64))
}
