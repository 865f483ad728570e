//! Resolution of command-line flags, the optional key=value file and defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sns_core::measure::{MixtureSpec, Model};
use sns_core::occupation::DEFAULT_BLOCKS;
use sns_core::verify::{Suite, SuiteConfig};
use sns_core::ChainParams;

use crate::args::{CommonArgs, CompareArgs, ModelArgs, SampleArgs, SimulateArgs, VerifyArgs};

pub const OUTPUT_DIR_ENV: &str = "SNS_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "sns-out";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_Z_MAX: f64 = 4.0;

const KNOWN_KEYS: &[&str] = &[
    "model", "n", "beta-a", "beta-b", "t-a", "t-b", "epsilon", "t-max", "burn-in", "replicas", "blocks", "seed",
    "samples", "output-dir", "threads", "suite", "k", "tol", "mc-samples", "input", "alpha", "z-max",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<sns_core::Error> for CliError {
    fn from(e: sns_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

/// Values read from a key=value file. Blank lines and `#` comments are skipped.
#[derive(Debug, Default)]
pub struct FileValues {
    map: BTreeMap<String, String>,
}

impl FileValues {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key=value", i + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(config_err(format!("line {}: unknown key `{key}`", i + 1)));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self { map })
    }

    /// The flag if given, else the file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| config_err(format!("`{key}` = `{raw}`: {e}"))),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(flag, key)?.ok_or_else(|| config_err(format!("missing `{key}`")))
    }
}

/// Settings shared by every command that are not part of the recorded configuration.
#[derive(Debug, Clone)]
pub struct Environment {
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
}

fn environment(common: &CommonArgs, file: &FileValues, fallback: Option<&Path>) -> Result<Environment, CliError> {
    let output_dir = match file.pick(common.output_dir.clone(), "output-dir")? {
        Some(dir) => dir,
        None => match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) => PathBuf::from(dir),
            None => fallback.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        },
    };
    let threads = file.pick(common.threads, "threads")?;
    if threads == Some(0) {
        return Err(config_err("`threads` must be positive"));
    }
    Ok(Environment { output_dir, threads })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub model: Model,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_b: Option<f64>,
}

impl ModelConfig {
    pub fn params(&self) -> Result<ChainParams, CliError> {
        let p = match self.model {
            Model::Discrete => ChainParams::discrete(self.n, self.beta_a.unwrap_or(f64::NAN), self.beta_b.unwrap_or(f64::NAN)),
            Model::Continuous => ChainParams::continuous(self.n, self.t_a.unwrap_or(f64::NAN), self.t_b.unwrap_or(f64::NAN)),
        };
        p.map_err(config_err)
    }

    pub fn spec(&self) -> Result<MixtureSpec, CliError> {
        let p = self.params()?;
        Ok(match self.model {
            Model::Discrete => MixtureSpec::discrete(p),
            Model::Continuous => MixtureSpec::continuous(p),
        })
    }
}

fn parse_model(raw: &str) -> Result<Model, CliError> {
    match raw {
        "discrete" => Ok(Model::Discrete),
        "continuous" => Ok(Model::Continuous),
        other => Err(config_err(format!("`model` = `{other}`: expected discrete or continuous"))),
    }
}

fn resolve_model(args: &ModelArgs, file: &FileValues) -> Result<ModelConfig, CliError> {
    let model = parse_model(&file.require(args.model.clone(), "model")?)?;
    let n = file.require(args.n, "n")?;
    let cfg = match model {
        Model::Discrete => ModelConfig {
            model,
            n,
            beta_a: Some(file.require(args.beta_a, "beta-a")?),
            beta_b: Some(file.require(args.beta_b, "beta-b")?),
            t_a: None,
            t_b: None,
        },
        Model::Continuous => ModelConfig {
            model,
            n,
            beta_a: None,
            beta_b: None,
            t_a: Some(file.require(args.t_a, "t-a")?),
            t_b: Some(file.require(args.t_b, "t-b")?),
        },
    };
    cfg.params()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub t_max: f64,
    pub burn_in: f64,
    pub replicas: usize,
    pub blocks: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    pub seed: u64,
}

pub fn resolve_simulate(args: &SimulateArgs) -> Result<(SimulateConfig, Environment), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let model = resolve_model(&args.model, &file)?;
    let t_max: f64 = file.require(args.t_max, "t-max")?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(config_err(format!("`t-max` = {t_max}: must be positive")));
    }
    let burn_in = file.pick(args.burn_in, "burn-in")?.unwrap_or(t_max * sns_core::run::DEFAULT_BURN_IN_FRACTION);
    if !(burn_in >= 0.0 && burn_in < t_max) {
        return Err(config_err(format!("`burn-in` = {burn_in}: must lie in [0, t-max)")));
    }
    let replicas = file.pick(args.replicas, "replicas")?.unwrap_or(1);
    if replicas == 0 {
        return Err(config_err("`replicas` must be at least 1"));
    }
    let blocks = file.pick(args.blocks, "blocks")?.unwrap_or(DEFAULT_BLOCKS);
    if blocks == 0 {
        return Err(config_err("`blocks` must be at least 1"));
    }
    let epsilon = match model.model {
        Model::Discrete => None,
        Model::Continuous => {
            let eps = file
                .pick(args.epsilon, "epsilon")?
                .unwrap_or_else(|| sns_core::continuous::default_epsilon(&model.params().expect("validated")));
            if !(eps > 0.0 && eps < model.t_a.unwrap_or(0.0)) {
                return Err(config_err(format!("`epsilon` = {eps}: must lie in (0, t-a)")));
            }
            Some(eps)
        }
    };
    let seed = file.pick(args.common.seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let env = environment(&args.common, &file, None)?;
    Ok((
        SimulateConfig {
            model,
            t_max,
            burn_in,
            replicas,
            blocks,
            epsilon,
            seed,
        },
        env,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub samples: usize,
    pub seed: u64,
}

pub fn resolve_sample(args: &SampleArgs) -> Result<(SampleConfig, Environment), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let model = resolve_model(&args.model, &file)?;
    let samples = file.pick(args.samples, "samples")?.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(config_err("`samples` must be positive"));
    }
    let seed = file.pick(args.common.seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let env = environment(&args.common, &file, None)?;
    Ok((SampleConfig { model, samples, seed }, env))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    #[serde(flatten)]
    pub checks: SuiteConfig,
}

pub fn resolve_verify(args: &VerifyArgs) -> Result<(VerifyConfig, Environment), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let defaults = SuiteConfig::default();
    let suite: Suite = file.require(args.suite.clone(), "suite")?.parse().map_err(config_err)?;
    let sizes = match &args.n {
        Some(n) => n.clone(),
        None => match file.pick::<String>(None, "n")? {
            Some(raw) => raw
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|e| config_err(format!("`n` = `{raw}`: {e}"))))
                .collect::<Result<_, _>>()?,
            None => defaults.sizes.clone(),
        },
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(config_err("`n` must list positive chain sizes"));
    }
    let checks = SuiteConfig {
        beta_a: file.pick(args.beta_a, "beta-a")?.unwrap_or(defaults.beta_a),
        beta_b: file.pick(args.beta_b, "beta-b")?.unwrap_or(defaults.beta_b),
        t_a: file.pick(args.t_a, "t-a")?.unwrap_or(defaults.t_a),
        t_b: file.pick(args.t_b, "t-b")?.unwrap_or(defaults.t_b),
        sizes,
        k: file.pick(args.k, "k")?,
        tol: file.pick(args.tol, "tol")?,
        mc_samples: file.pick(args.mc_samples, "mc-samples")?.unwrap_or(defaults.mc_samples),
        seed: file.pick(args.common.seed, "seed")?.unwrap_or(defaults.seed),
    };
    ChainParams::discrete(1, checks.beta_a, checks.beta_b).map_err(config_err)?;
    ChainParams::continuous(1, checks.t_a, checks.t_b).map_err(config_err)?;
    if let Some(tol) = checks.tol {
        if !(tol > 0.0) {
            return Err(config_err(format!("`tol` = {tol}: must be positive")));
        }
    }
    if checks.k == Some(0) || checks.mc_samples < 2 {
        return Err(config_err("`k` and `mc-samples` must be positive"));
    }
    let env = environment(&args.common, &file, None)?;
    Ok((VerifyConfig { suite, checks }, env))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub input: PathBuf,
    pub alpha: f64,
    pub z_max: f64,
}

pub fn resolve_compare(args: &CompareArgs) -> Result<(CompareConfig, Environment), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let input: PathBuf = file.require(args.input.clone(), "input")?;
    let alpha = file.pick(args.alpha, "alpha")?.unwrap_or(DEFAULT_ALPHA);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(config_err(format!("`alpha` = {alpha}: must lie in (0, 1)")));
    }
    let z_max = file.pick(args.z_max, "z-max")?.unwrap_or(DEFAULT_Z_MAX);
    if !(z_max > 0.0) {
        return Err(config_err(format!("`z-max` = {z_max}: must be positive")));
    }
    // results land next to the inputs unless told otherwise
    let env = environment(&args.common, &file, Some(&input))?;
    Ok((CompareConfig { input, alpha, z_max }, env))
}
