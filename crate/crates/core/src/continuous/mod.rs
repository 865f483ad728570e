//! Event-driven simulation of the energy chain with a small-jump cutoff.
//!
//! The exact dynamics has infinitely many jumps per unit time. Jumps smaller
//! than `eps` are dropped from both the removal measure `d alpha / alpha` on
//! `(0, z_x]` and the injection measure `exp(-alpha/T) d alpha / alpha`. The
//! dropped injected mass (about `eps` per reservoir and unit time) is largely
//! offset by the dropped removals; the remaining bias is `O(eps)` and is
//! checked empirically by refining the cutoff.

pub mod kernels;

use std::time::Instant;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{Observer, Reservoir, Transition};
use crate::occupation::{Binning, OccupationRecorder, RecorderOptions};
use crate::params::{ChainParams, ContinuousConfig};
use crate::rates::RateIndex;
use crate::run::{RunOptions, SimulationRun, REFRESH_INTERVAL};

pub use kernels::{sample_alpha_injection, sample_alpha_removal, InjectionSampler};

/// Number of log-spaced histogram bins between `10 eps` and `50 T_B`.
pub const DEFAULT_LOG_BINS: usize = 240;

/// Cutoff used when none is given: `1e-6 min(T_A, 1)`.
pub fn default_epsilon(params: &ChainParams) -> f64 {
    1e-6 * params.t_a().min(1.0)
}

/// Histogram layout for energies: underflow below `10 eps`, log bins up to `50 T_B`, overflow.
pub fn default_binning(params: &ChainParams, eps: f64) -> Binning {
    Binning::Log {
        lo: 10.0 * eps,
        hi: 50.0 * params.t_b(),
        bins: DEFAULT_LOG_BINS,
    }
}

/// Statement of the truncation bias attached to every continuous run.
pub fn bias_note(eps: f64) -> String {
    format!(
        "jumps below eps = {eps:e} are discarded; site means carry an O(eps) bias, checked by refining eps"
    )
}

/// Rejection-sampler bookkeeping for the injection channels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InjectionCounts {
    pub draws: u64,
    pub proposals: u64,
}

impl InjectionCounts {
    pub fn acceptance(&self) -> f64 {
        if self.proposals == 0 {
            1.0
        } else {
            self.draws as f64 / self.proposals as f64
        }
    }
}

#[inline]
fn removal_rate(z: f64, eps: f64) -> f64 {
    if z > eps {
        2.0 * (z / eps).ln()
    } else {
        0.0
    }
}

/// Simulator state of the truncated energy chain.
#[derive(Debug, Clone)]
pub struct ContinuousSim {
    z: Vec<f64>,
    time: f64,
    eps: f64,
    inject_a: InjectionSampler,
    inject_b: InjectionSampler,
    // per site: both exit channels together, 2 ln(z_x / eps)
    exits: RateIndex,
    events: u64,
    counts: InjectionCounts,
}

impl ContinuousSim {
    pub fn new(params: &ChainParams, eps: f64, initial: ContinuousConfig) -> Result<Self> {
        if initial.len() != params.n() {
            return Err(Error::invalid(
                "initial",
                format!("configuration has {} sites, chain has {}", initial.len(), params.n()),
            ));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid("epsilon", format!("{eps} is not a positive cutoff")));
        }
        let exits = RateIndex::new(initial.z.iter().map(|z| removal_rate(*z, eps)).collect());
        Ok(Self {
            inject_a: InjectionSampler::new(params.t_a(), eps)?,
            inject_b: InjectionSampler::new(params.t_b(), eps)?,
            z: initial.z,
            time: 0.0,
            eps,
            exits,
            events: 0,
            counts: InjectionCounts::default(),
        })
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn injection_counts(&self) -> InjectionCounts {
        self.counts
    }

    /// Rate of one exit channel of site `x`, `max(0, ln(z_x / eps))`.
    pub fn channel_rate(&self, x: usize) -> f64 {
        0.5 * self.exits.rate(x)
    }

    pub fn total_rate(&self) -> f64 {
        self.exits.total() + self.inject_a.rate() + self.inject_b.rate()
    }

    pub fn exact_total_rate(&self) -> f64 {
        self.z.iter().map(|z| removal_rate(*z, self.eps)).sum::<f64>() + self.inject_a.rate() + self.inject_b.rate()
    }

    fn set_site(&mut self, x: usize, value: f64) {
        assert!(value >= 0.0, "negative energy {value} at site {x}");
        self.z[x] = value;
        self.exits.set(x, removal_rate(value, self.eps));
    }

    fn inject<R: Rng + ?Sized>(&mut self, reservoir: Reservoir, rng: &mut R) -> Transition<f64> {
        let (sampler, site) = match reservoir {
            Reservoir::A => (self.inject_a, 0),
            Reservoir::B => (self.inject_b, self.z.len() - 1),
        };
        let (alpha, tries) = sampler.sample_counted(rng);
        self.counts.draws += 1;
        self.counts.proposals += tries as u64;
        self.set_site(site, self.z[site] + alpha);
        Transition::Inject { site, reservoir, amount: alpha }
    }

    /// Draws and applies the next transition without advancing the clock.
    pub fn sample_transition<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Transition<f64> {
        let n = self.z.len();
        let mut u = rng.random::<f64>() * self.total_rate();
        if u < self.inject_a.rate() {
            return self.inject(Reservoir::A, rng);
        }
        u -= self.inject_a.rate();
        if u < self.inject_b.rate() || self.exits.total() <= 0.0 {
            return self.inject(Reservoir::B, rng);
        }
        u -= self.inject_b.rate();
        let x = self.exits.select(u);
        let alpha = sample_alpha_removal(self.z[x], self.eps, rng);
        self.set_site(x, (self.z[x] - alpha).max(0.0));
        let rightward = rng.random::<bool>();
        match (rightward, x) {
            (false, 0) => Transition::Extract { site: 0, reservoir: Reservoir::A, amount: alpha },
            (true, x) if x == n - 1 => Transition::Extract { site: x, reservoir: Reservoir::B, amount: alpha },
            (false, x) => {
                self.set_site(x - 1, self.z[x - 1] + alpha);
                Transition::Bulk { from: x, to: x - 1, amount: alpha }
            }
            (true, x) => {
                self.set_site(x + 1, self.z[x + 1] + alpha);
                Transition::Bulk { from: x, to: x + 1, amount: alpha }
            }
        }
    }

    /// One Gillespie step; returns the transition and the holding time before it.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Transition<f64>, f64) {
        let dt = rng.sample::<f64, _>(Exp1) / self.total_rate();
        self.time += dt;
        let tr = self.sample_transition(rng);
        self.after_event();
        (tr, dt)
    }

    fn after_event(&mut self) {
        self.events += 1;
        if self.events.is_multiple_of(REFRESH_INTERVAL) {
            self.exits.refresh();
        }
    }
}

/// Summary of a continuous run beyond the occupation statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousRunInfo {
    pub epsilon: f64,
    pub injections: InjectionCounts,
    pub bias_note: String,
}

/// Simulates one trajectory from `initial` (zero energies when `None`) and
/// returns time-weighted statistics over `[burn_in, t_max]`.
pub fn simulate_continuous<R: Rng + ?Sized>(
    params: &ChainParams,
    eps: f64,
    initial: Option<ContinuousConfig>,
    options: &RunOptions,
    rng: &mut R,
    observers: &mut [&mut dyn Observer<f64>],
) -> Result<(SimulationRun<ContinuousConfig>, ContinuousRunInfo)> {
    options.validate()?;
    let n = params.n();
    let start = Instant::now();
    let initial = initial.unwrap_or_else(|| ContinuousConfig::empty(n));
    let mut sim = ContinuousSim::new(params, eps, initial)?;
    let mut recorder = OccupationRecorder::new(
        &sim.z,
        RecorderOptions {
            binning: default_binning(params, eps),
            start: options.resolved_burn_in(),
            end: options.t_max,
            n_blocks: options.n_blocks,
            stream: options.stream,
            track_pairs: options.resolved_track_pairs(n),
        },
    )?;
    loop {
        let dt = rng.sample::<f64, _>(Exp1) / sim.total_rate();
        if sim.time + dt >= options.t_max {
            break;
        }
        sim.time += dt;
        let tr = sim.sample_transition(rng);
        sim.after_event();
        let t = sim.time;
        match tr {
            Transition::Bulk { from, to, .. } => {
                recorder.update(t, from, sim.z[from]);
                recorder.update(t, to, sim.z[to]);
            }
            Transition::Extract { site, .. } | Transition::Inject { site, .. } => {
                recorder.update(t, site, sim.z[site]);
            }
        }
        for obs in observers.iter_mut() {
            obs.observe(t, &tr);
        }
    }
    let events = sim.events;
    let info = ContinuousRunInfo {
        epsilon: eps,
        injections: sim.counts,
        bias_note: bias_note(eps),
    };
    let run = SimulationRun {
        stats: recorder.finish(events),
        events,
        final_config: ContinuousConfig { z: sim.z },
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((run, info))
}
