//! Run-length options and results shared by both simulators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::occupation::{OccupationStats, DEFAULT_BLOCKS, DEFAULT_PAIR_TRACKING_MAX_SITES};

/// Fraction of `t_max` discarded when no burn-in is given.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.1;

/// Full recomputation of the total rate after this many events.
pub const REFRESH_INTERVAL: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub t_max: f64,
    /// Defaults to `DEFAULT_BURN_IN_FRACTION * t_max`.
    pub burn_in: Option<f64>,
    pub n_blocks: usize,
    /// Defaults to tracking pairs for chains of at most 32 sites.
    pub track_pairs: Option<bool>,
    /// Replica id, carried into the block series.
    pub stream: u64,
}

impl RunOptions {
    pub fn new(t_max: f64) -> Self {
        Self {
            t_max,
            burn_in: None,
            n_blocks: DEFAULT_BLOCKS,
            track_pairs: None,
            stream: 0,
        }
    }

    pub fn burn_in(mut self, burn_in: f64) -> Self {
        self.burn_in = Some(burn_in);
        self
    }

    pub fn n_blocks(mut self, n_blocks: usize) -> Self {
        self.n_blocks = n_blocks;
        self
    }

    pub fn track_pairs(mut self, track: bool) -> Self {
        self.track_pairs = Some(track);
        self
    }

    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn resolved_burn_in(&self) -> f64 {
        self.burn_in.unwrap_or(DEFAULT_BURN_IN_FRACTION * self.t_max)
    }

    pub fn resolved_track_pairs(&self, n: usize) -> bool {
        self.track_pairs.unwrap_or(n <= DEFAULT_PAIR_TRACKING_MAX_SITES)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let burn_in = self.resolved_burn_in();
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::invalid("t_max", format!("{} is not a positive finite time", self.t_max)));
        }
        if !(burn_in >= 0.0 && burn_in < self.t_max) {
            return Err(Error::invalid("burn_in", format!("{burn_in} not in [0, t_max)")));
        }
        if self.n_blocks == 0 {
            return Err(Error::invalid("n_blocks", "need at least one block"));
        }
        Ok(())
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun<C> {
    pub stats: OccupationStats,
    pub events: u64,
    pub final_config: C,
    /// Not part of the deterministic output.
    #[serde(skip)]
    pub wall_seconds: f64,
}

impl<C> SimulationRun<C> {
    pub fn events_per_second(&self) -> f64 {
        self.events as f64 / self.wall_seconds.max(1e-9)
    }
}
