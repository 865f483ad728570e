//! Exact event-driven simulation of the particle chain.
//!
//! Every site has two exit channels (to its left and right neighbours, or to
//! the adjacent reservoir at the ends), each firing at rate `H(eta_x)` and
//! moving `k` particles with probability proportional to `1/k`. Reservoir A
//! injects at the first site and B at the last, at total rate
//! `-ln(1 - beta)` with logarithmically distributed batch sizes.

pub mod kernels;

use std::time::Instant;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::events::{Observer, Reservoir, Transition};
use crate::numerics::HarmonicTable;
use crate::occupation::{Binning, OccupationRecorder, RecorderOptions};
use crate::params::{ChainParams, DiscreteConfig};
use crate::rates::RateIndex;
use crate::run::{RunOptions, SimulationRun, REFRESH_INTERVAL};

pub use kernels::{sample_k_harmonic, sample_k_logarithmic};

/// Simulator state: configuration, clock and rate cache.
#[derive(Debug, Clone)]
pub struct DiscreteSim {
    eta: Vec<u64>,
    time: f64,
    beta_a: f64,
    beta_b: f64,
    lambda_a: f64,
    lambda_b: f64,
    // per site: both exit channels together, 2 H(eta_x)
    exits: RateIndex,
    events: u64,
}

impl DiscreteSim {
    pub fn new(params: &ChainParams, initial: DiscreteConfig) -> Result<Self> {
        if initial.len() != params.n() {
            return Err(Error::invalid(
                "initial",
                format!("configuration has {} sites, chain has {}", initial.len(), params.n()),
            ));
        }
        let table = HarmonicTable::global();
        let exits = RateIndex::new(initial.eta.iter().map(|e| 2.0 * table.get(*e)).collect());
        Ok(Self {
            eta: initial.eta,
            time: 0.0,
            beta_a: params.beta_a(),
            beta_b: params.beta_b(),
            lambda_a: params.injection_rate_a(),
            lambda_b: params.injection_rate_b(),
            exits,
            events: 0,
        })
    }

    pub fn eta(&self) -> &[u64] {
        &self.eta
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    /// Rate of one exit channel of site `x`, `H(eta_x)`.
    pub fn channel_rate(&self, x: usize) -> f64 {
        0.5 * self.exits.rate(x)
    }

    /// Incrementally maintained total rate.
    pub fn total_rate(&self) -> f64 {
        self.exits.total() + self.lambda_a + self.lambda_b
    }

    /// Total rate recomputed from the configuration.
    pub fn exact_total_rate(&self) -> f64 {
        let table = HarmonicTable::global();
        2.0 * self.eta.iter().map(|e| table.get(*e)).sum::<f64>() + self.lambda_a + self.lambda_b
    }

    fn set_site(&mut self, x: usize, value: u64) {
        self.eta[x] = value;
        self.exits.set(x, 2.0 * HarmonicTable::global().get(value));
    }

    /// Draws and applies the next transition without advancing the clock.
    pub fn sample_transition<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Transition<u64> {
        let n = self.eta.len();
        let mut u = rng.random::<f64>() * self.total_rate();
        if u < self.lambda_a {
            let k = sample_k_logarithmic(self.beta_a, rng);
            self.set_site(0, self.eta[0] + k);
            return Transition::Inject { site: 0, reservoir: Reservoir::A, amount: k };
        }
        u -= self.lambda_a;
        if u < self.lambda_b || self.exits.total() <= 0.0 {
            let k = sample_k_logarithmic(self.beta_b, rng);
            self.set_site(n - 1, self.eta[n - 1] + k);
            return Transition::Inject { site: n - 1, reservoir: Reservoir::B, amount: k };
        }
        u -= self.lambda_b;
        let x = self.exits.select(u);
        let occupancy = self.eta[x];
        assert!(occupancy >= 1, "selected removal channel at empty site {x}");
        let k = sample_k_harmonic(occupancy, rng);
        self.set_site(x, occupancy - k);
        let rightward = rng.random::<bool>();
        match (rightward, x) {
            (false, 0) => Transition::Extract { site: 0, reservoir: Reservoir::A, amount: k },
            (true, x) if x == n - 1 => Transition::Extract { site: x, reservoir: Reservoir::B, amount: k },
            (false, x) => {
                self.set_site(x - 1, self.eta[x - 1] + k);
                Transition::Bulk { from: x, to: x - 1, amount: k }
            }
            (true, x) => {
                self.set_site(x + 1, self.eta[x + 1] + k);
                Transition::Bulk { from: x, to: x + 1, amount: k }
            }
        }
    }

    /// One Gillespie step; returns the transition and the holding time before it.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Transition<u64>, f64) {
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

/// Simulates one trajectory from `initial` (empty chain when `None`) and
/// returns time-weighted statistics over `[burn_in, t_max]`.
pub fn simulate<R: Rng + ?Sized>(
    params: &ChainParams,
    initial: Option<DiscreteConfig>,
    options: &RunOptions,
    rng: &mut R,
    observers: &mut [&mut dyn Observer<u64>],
) -> Result<SimulationRun<DiscreteConfig>> {
    options.validate()?;
    let n = params.n();
    let start = Instant::now();
    let initial = initial.unwrap_or_else(|| DiscreteConfig::empty(n));
    let mut sim = DiscreteSim::new(params, initial)?;
    let values: Vec<f64> = sim.eta.iter().map(|e| *e as f64).collect();
    let mut recorder = OccupationRecorder::new(
        &values,
        RecorderOptions {
            binning: Binning::Integer,
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
                recorder.update(t, from, sim.eta[from] as f64);
                recorder.update(t, to, sim.eta[to] as f64);
            }
            Transition::Extract { site, .. } | Transition::Inject { site, .. } => {
                recorder.update(t, site, sim.eta[site] as f64);
            }
        }
        for obs in observers.iter_mut() {
            obs.observe(t, &tr);
        }
    }
    let events = sim.events;
    Ok(SimulationRun {
        stats: recorder.finish(events),
        events,
        final_config: DiscreteConfig::new(sim.eta),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::FluxCounter;
    use crate::rng::RngContract;

    fn params(n: usize, a: f64, b: f64) -> ChainParams {
        ChainParams::discrete(n, a, b).unwrap()
    }

    #[test]
    fn empty_single_site_only_injects() {
        let p = params(1, 0.3, 0.6);
        let mut sim = DiscreteSim::new(&p, DiscreteConfig::empty(1)).unwrap();
        let expected = -(0.7f64).ln() - (0.4f64).ln();
        assert!((sim.total_rate() - expected).abs() < 1e-15);
        let mut rng = RngContract::new(1).stream(0);
        assert!(matches!(sim.step(&mut rng).0, Transition::Inject { .. }));
    }

    #[test]
    fn two_sites_rates() {
        let p = params(2, 0.3, 0.6);
        let sim = DiscreteSim::new(&p, DiscreteConfig::new(vec![3, 0])).unwrap();
        assert!((sim.channel_rate(0) - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(sim.channel_rate(1), 0.0);
        let expected = 2.0 * 11.0 / 6.0 + p.injection_rate_a() + p.injection_rate_b();
        assert!((sim.total_rate() - expected).abs() < 1e-14);
    }

    #[test]
    fn particles_are_conserved_in_the_bulk() {
        let p = params(4, 0.4, 0.7);
        let mut sim = DiscreteSim::new(&p, DiscreteConfig::new(vec![2, 5, 1, 0])).unwrap();
        let mut rng = RngContract::new(2).stream(0);
        let mut total = 8i64;
        for _ in 0..10_000 {
            match sim.step(&mut rng).0 {
                Transition::Bulk { from, to, .. } => assert_eq!(from.abs_diff(to), 1),
                Transition::Inject { amount, site, reservoir } => {
                    assert_eq!(site, if reservoir == Reservoir::A { 0 } else { 3 });
                    total += amount as i64;
                }
                Transition::Extract { amount, site, reservoir } => {
                    assert_eq!(site, if reservoir == Reservoir::A { 0 } else { 3 });
                    total -= amount as i64;
                }
            }
            assert_eq!(sim.eta().iter().sum::<u64>() as i64, total);
        }
    }

    #[test]
    fn rate_cache_does_not_drift() {
        let p = params(8, 0.5, 0.8);
        let mut sim = DiscreteSim::new(&p, DiscreteConfig::empty(8)).unwrap();
        let mut rng = RngContract::new(3).stream(0);
        for _ in 0..1_000_000 {
            sim.step(&mut rng);
            assert!(sim.exits.total() >= 0.0);
        }
        let rel = (sim.total_rate() - sim.exact_total_rate()).abs() / sim.exact_total_rate();
        assert!(rel < 1e-9, "relative drift {rel}");
    }

    #[test]
    fn injection_flux_matches_density() {
        let p = params(2, 0.5, 0.6);
        let opts = RunOptions::new(100_000.0).burn_in(0.0).n_blocks(16);
        let mut flux = FluxCounter::new(2, 0.0);
        let mut rng = RngContract::new(4).stream(0);
        simulate(&p, None, &opts, &mut rng, &mut [&mut flux]).unwrap();
        let rate = flux.injected_a / opts.t_max;
        // batches: Poisson count at rate lambda times i.i.d. logarithmic sizes
        let lam = p.injection_rate_a();
        let second = 0.5 / (0.25 * lam);
        let se = (lam * second / opts.t_max).sqrt();
        assert!((rate - p.rho_a()).abs() < 4.0 * se, "rate {rate}");
    }

    #[test]
    fn same_seed_same_statistics() {
        let p = params(3, 0.2, 0.7);
        let opts = RunOptions::new(500.0).n_blocks(32);
        let run = |seed| {
            let mut rng = RngContract::new(seed).stream(0);
            simulate(&p, None, &opts, &mut rng, &mut []).unwrap()
        };
        let (a, b) = (run(9), run(9));
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.final_config, b.final_config);
        assert_ne!(a.stats, run(10).stats);
    }

    #[test]
    fn histogram_mass_equals_window() {
        let p = params(3, 0.2, 0.7);
        let opts = RunOptions::new(300.0).burn_in(50.0).n_blocks(8);
        let mut rng = RngContract::new(5).stream(0);
        let run = simulate(&p, Some(DiscreteConfig::new(vec![10, 0, 4])), &opts, &mut rng, &mut []).unwrap();
        for x in 0..3 {
            assert!((run.stats.histogram_mass(x) - 250.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_options() {
        let p = params(2, 0.2, 0.7);
        let mut rng = RngContract::new(5).stream(0);
        let bad = RunOptions::new(10.0).burn_in(10.0);
        assert!(simulate(&p, None, &bad, &mut rng, &mut []).is_err());
        assert!(simulate(&p, Some(DiscreteConfig::empty(3)), &RunOptions::new(1.0), &mut rng, &mut []).is_err());
    }
}
