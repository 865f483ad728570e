//! Machine-checked residuals for the identities behind the stationary laws.
//!
//! Every check returns a [`VerificationReport`]; suites run their checks on
//! the rayon pool and return reports in a fixed order.

pub mod equilibrium;
pub mod identities;
pub mod report;
pub mod stationarity;
pub mod telescoping;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MixtureSpec;
use crate::params::ChainParams;

pub use equilibrium::check_equilibrium_limit;
pub use identities::{check_antiderivative_continuous, check_antiderivative_discrete, check_frullani};
pub use report::{overall, Residual, Verdict, VerificationReport};
pub use stationarity::{check_stationarity_direct_discrete, stationarity_impostor_residual};
pub use telescoping::{
    check_telescoping_continuous, check_telescoping_discrete, default_lambda_grid, default_t_grid, grid_points,
    telescoping_impostor, TelescopingMethod,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Telescoping,
    Stationarity,
    Equilibrium,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "telescoping" => Ok(Suite::Telescoping),
            "stationarity" => Ok(Suite::Stationarity),
            "equilibrium" => Ok(Suite::Equilibrium),
            "all" => Ok(Suite::All),
            other => Err(Error::invalid("suite", format!("unknown suite `{other}`"))),
        }
    }
}

pub const ANTIDERIVATIVE_TOL: f64 = 1e-10;
pub const FRULLANI_TOL: f64 = 1e-9;
pub const TELESCOPING_TOL: f64 = 1e-8;
pub const EQUILIBRIUM_TOL: f64 = 1e-12;
pub const DEFAULT_MC_SAMPLES: usize = 10_000_000;
pub const FRULLANI_PAIRS: [(f64, f64); 4] = [(1.0, 2.0), (0.5, 3.0), (2.0, 2.0), (3.0, 0.5)];

const ANTIDERIVATIVE_MEANS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

/// Truncation level used when none is given: 200 for one site, 60 for two.
pub fn default_truncation(n: usize) -> usize {
    if n <= 1 {
        200
    } else {
        60
    }
}

/// Balance tolerance used when none is given: `1e-8` for one site, `1e-6` for two.
pub fn default_stationarity_tol(n: usize) -> f64 {
    if n <= 1 {
        1e-8
    } else {
        1e-6
    }
}

/// What a suite runs on. Chain sizes above two are skipped by the direct
/// stationarity check, and sizes above three use Monte Carlo for telescoping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub beta_a: f64,
    pub beta_b: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub sizes: Vec<usize>,
    pub k: Option<usize>,
    /// Overrides the per-check default tolerance.
    pub tol: Option<f64>,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            beta_a: 0.5,
            beta_b: 0.75,
            t_a: 1.0,
            t_b: 2.0,
            sizes: vec![1, 2, 3],
            k: None,
            tol: None,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
enum Job {
    AntiDiscrete { m: f64, lambda: f64 },
    AntiContinuous { m: f64, t: f64 },
    Frullani { a: f64, b: f64 },
    TeleDiscrete { params: ChainParams, point: Vec<f64>, method: TelescopingMethod },
    TeleContinuous { params: ChainParams, point: Vec<f64>, method: TelescopingMethod },
    Stationarity { params: ChainParams, k: usize, tol: f64 },
    Equilibrium { spec: MixtureSpec },
}

impl Job {
    fn run(&self, tol: Option<f64>) -> Result<VerificationReport> {
        match self {
            Job::AntiDiscrete { m, lambda } => check_antiderivative_discrete(*m, *lambda, tol.unwrap_or(ANTIDERIVATIVE_TOL)),
            Job::AntiContinuous { m, t } => check_antiderivative_continuous(*m, *t, tol.unwrap_or(ANTIDERIVATIVE_TOL)),
            Job::Frullani { a, b } => check_frullani(*a, *b, tol.unwrap_or(FRULLANI_TOL)),
            Job::TeleDiscrete { params, point, method } => {
                check_telescoping_discrete(params, point, tol.unwrap_or(TELESCOPING_TOL), *method)
            }
            Job::TeleContinuous { params, point, method } => {
                check_telescoping_continuous(params, point, tol.unwrap_or(TELESCOPING_TOL), *method)
            }
            Job::Stationarity { params, k, tol } => check_stationarity_direct_discrete(params, *k, *tol),
            Job::Equilibrium { spec } => check_equilibrium_limit(spec, tol.unwrap_or(EQUILIBRIUM_TOL)),
        }
    }
}

fn identity_jobs() -> Vec<Job> {
    let mut jobs = Vec::new();
    for m in ANTIDERIVATIVE_MEANS {
        for lambda in default_lambda_grid().into_iter().chain([1.1, 1.5]) {
            if lambda < (1.0 + m) / m {
                jobs.push(Job::AntiDiscrete { m, lambda });
            }
        }
        for t in default_t_grid(m) {
            jobs.push(Job::AntiContinuous { m, t });
        }
    }
    for (a, b) in FRULLANI_PAIRS {
        jobs.push(Job::Frullani { a, b });
    }
    jobs
}

fn telescoping_jobs(cfg: &SuiteConfig) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for &n in &cfg.sizes {
        let pd = ChainParams::discrete(n, cfg.beta_a, cfg.beta_b)?;
        let pc = ChainParams::continuous(n, cfg.t_a, cfg.t_b)?;
        for point in grid_points(&default_lambda_grid(), n) {
            let seed = cfg.seed.wrapping_add(jobs.len() as u64);
            let method = TelescopingMethod::for_dimension(n, cfg.mc_samples, seed);
            jobs.push(Job::TeleDiscrete { params: pd, point, method });
        }
        for point in grid_points(&default_t_grid(cfg.t_b), n) {
            let seed = cfg.seed.wrapping_add(jobs.len() as u64);
            let method = TelescopingMethod::for_dimension(n, cfg.mc_samples, seed);
            jobs.push(Job::TeleContinuous { params: pc, point, method });
        }
    }
    Ok(jobs)
}

fn stationarity_jobs(cfg: &SuiteConfig) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for &n in cfg.sizes.iter().filter(|n| **n <= stationarity::MAX_DIRECT_SITES) {
        jobs.push(Job::Stationarity {
            params: ChainParams::discrete(n, cfg.beta_a, cfg.beta_b)?,
            k: cfg.k.unwrap_or_else(|| default_truncation(n)),
            tol: cfg.tol.unwrap_or_else(|| default_stationarity_tol(n)),
        });
    }
    Ok(jobs)
}

fn equilibrium_jobs(cfg: &SuiteConfig) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for &n in cfg.sizes.iter().filter(|n| **n <= 3) {
        let pd = ChainParams::discrete(n, cfg.beta_a, cfg.beta_a)?;
        let pc = ChainParams::continuous(n, cfg.t_a, cfg.t_a)?;
        jobs.push(Job::Equilibrium { spec: MixtureSpec::discrete(pd) });
        jobs.push(Job::Equilibrium { spec: MixtureSpec::continuous(pc) });
    }
    Ok(jobs)
}

/// Runs every check of `suite` in parallel; reports come back in job order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    if cfg.sizes.iter().any(|n| *n == 0) {
        return Err(Error::invalid("n", "chain size must be positive"));
    }
    let mut jobs = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        jobs.extend(identity_jobs());
    }
    if matches!(suite, Suite::Telescoping | Suite::All) {
        jobs.extend(telescoping_jobs(cfg)?);
    }
    if matches!(suite, Suite::Stationarity | Suite::All) {
        jobs.extend(stationarity_jobs(cfg)?);
    }
    if matches!(suite, Suite::Equilibrium | Suite::All) {
        jobs.extend(equilibrium_jobs(cfg)?);
    }
    // the stationarity tolerance is resolved per job
    let tol = cfg.tol;
    jobs.par_iter()
        .map(|job| match job {
            Job::Stationarity { .. } => job.run(None),
            _ => job.run(tol),
        })
        .collect()
}
