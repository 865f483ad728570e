use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sns_core::continuous::{default_binning, default_epsilon, simulate_continuous};
use sns_core::discrete::simulate;
use sns_core::measure::{sample_exact_continuous, sample_exact_discrete, Model};
use sns_core::occupation::{stats_from_samples, Binning, OccupationStats, DEFAULT_BLOCKS};
use sns_core::run::RunOptions;
use sns_core::stats::{family_passes, marginal_gof, profile_report, ProfileReport, SiteGof};
use sns_core::verify::{overall, run_suite, Verdict};
use sns_core::RngContract;

use crate::args::{CompareArgs, SampleArgs, SimulateArgs, VerifyArgs};
use crate::config::{
    resolve_compare, resolve_sample, resolve_simulate, resolve_verify, CliError, CompareConfig, SimulateConfig,
};
use crate::output::{gof_csv, histograms_csv, Output};

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn verdict_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(3),
        Verdict::Inconclusive => ExitCode::from(4),
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn print_profile(report: &ProfileReport) {
    for r in &report.sites {
        println!(
            "site {:>3}  mean {:.6} +- {:.6}  exact {:.6}  z {:+.2}",
            r.site, r.mean, r.std_error, r.exact, r.z
        );
    }
    if !report.pairs.is_empty() {
        println!(
            "covariances: {} pairs, max |z| {:.2}",
            report.pairs.len(),
            report.max_abs_pair_z()
        );
    }
}

#[derive(Serialize)]
struct ReplicaMeta<C: Serialize> {
    stream: u64,
    events: u64,
    observed_time: f64,
    final_config: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    injection_acceptance: Option<f64>,
}

fn merge(mut all: Vec<OccupationStats>) -> Result<OccupationStats, CliError> {
    let mut merged = all.remove(0);
    for s in &all {
        merged.merge(s)?;
    }
    Ok(merged)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<ExitCode, CliError> {
    let (cfg, env) = resolve_simulate(args)?;
    let params = cfg.model.params()?;
    let out = Output::new(&env.output_dir, &cfg)?;
    let contract = RngContract::new(cfg.seed);
    let options = |i: usize| {
        RunOptions::new(cfg.t_max)
            .burn_in(cfg.burn_in)
            .n_blocks(cfg.blocks)
            .stream(i as u64)
    };
    let started = Instant::now();
    let streams: Vec<usize> = (0..cfg.replicas).collect();
    let (stats, replicas, events, extra) = match cfg.model.model {
        Model::Discrete => {
            let runs = pool(env.threads)?.install(|| {
                streams
                    .par_iter()
                    .map(|&i| simulate(&params, None, &options(i), &mut contract.stream(i as u64), &mut []))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            let meta: Vec<_> = runs
                .iter()
                .zip(&streams)
                .map(|(r, i)| ReplicaMeta {
                    stream: *i as u64,
                    events: r.events,
                    observed_time: r.stats.observed_time,
                    final_config: r.final_config.eta.clone(),
                    injection_acceptance: None,
                })
                .collect();
            let events: u64 = runs.iter().map(|r| r.events).sum();
            (merge(runs.into_iter().map(|r| r.stats).collect())?, serde_json::to_value(meta)?, events, json!({}))
        }
        Model::Continuous => {
            let eps = cfg.epsilon.expect("resolved for the continuous model");
            let runs = pool(env.threads)?.install(|| {
                streams
                    .par_iter()
                    .map(|&i| simulate_continuous(&params, eps, None, &options(i), &mut contract.stream(i as u64), &mut []))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            let meta: Vec<_> = runs
                .iter()
                .zip(&streams)
                .map(|((r, info), i)| ReplicaMeta {
                    stream: *i as u64,
                    events: r.events,
                    observed_time: r.stats.observed_time,
                    final_config: r.final_config.z.clone(),
                    injection_acceptance: Some(info.injections.acceptance()),
                })
                .collect();
            let events: u64 = runs.iter().map(|(r, _)| r.events).sum();
            let note = runs[0].1.bias_note.clone();
            let stats = merge(runs.into_iter().map(|(r, _)| r.stats).collect())?;
            (stats, serde_json::to_value(meta)?, events, json!({ "epsilon": eps, "bias_note": note }))
        }
    };
    let wall = started.elapsed().as_secs_f64();
    let report = profile_report(&stats, &cfg.model.spec()?);
    out.csv("histograms.csv", &histograms_csv(&stats))?;
    out.csv("profile.csv", &report.sites_csv())?;
    out.csv("covariance.csv", &report.pairs_csv())?;
    out.json("stats.json", json!({ "stats": stats }))?;
    out.json(
        "meta.json",
        json!({
            "version": VERSION,
            "streams": streams,
            "replicas": replicas,
            "events": events,
            "observed_time": stats.observed_time,
            "continuous": extra,
        }),
    )?;
    print_profile(&report);
    eprintln!(
        "{events} events in {wall:.1} s ({:.2e} events/s), output in {}",
        events as f64 / wall.max(1e-9),
        env.output_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn cmd_sample_exact(args: &SampleArgs) -> Result<ExitCode, CliError> {
    let (cfg, env) = resolve_sample(args)?;
    let params = cfg.model.params()?;
    let spec = cfg.model.spec()?;
    let out = Output::new(&env.output_dir, &cfg)?;
    let n = params.n();
    let mut rng = RngContract::new(cfg.seed).stream(0);
    let mut flat = Vec::with_capacity(cfg.samples * n);
    let mut text = (1..=n).map(|x| format!("x{x}")).collect::<Vec<_>>().join(",");
    text.push('\n');
    for _ in 0..cfg.samples {
        let row: Vec<String> = match cfg.model.model {
            Model::Discrete => {
                let eta = sample_exact_discrete(&spec, &mut rng)?.eta;
                flat.extend(eta.iter().map(|v| *v as f64));
                eta.iter().map(u64::to_string).collect()
            }
            Model::Continuous => {
                let z = sample_exact_continuous(&spec, &mut rng)?.z;
                flat.extend(&z);
                z.iter().map(f64::to_string).collect()
            }
        };
        let _ = writeln!(text, "{}", row.join(","));
    }
    let binning = match cfg.model.model {
        Model::Discrete => Binning::Integer,
        Model::Continuous => default_binning(&params, default_epsilon(&params)),
    };
    let stats = stats_from_samples(n, binning, flat.chunks(n), cfg.samples, DEFAULT_BLOCKS)?;
    let report = profile_report(&stats, &spec);
    let gof = marginal_gof(&stats, &spec)?;
    out.csv("samples.csv", &text)?;
    out.csv("histograms.csv", &histograms_csv(&stats))?;
    out.csv("profile.csv", &report.sites_csv())?;
    out.csv("covariance.csv", &report.pairs_csv())?;
    out.csv("gof.csv", &gof_csv(&gof))?;
    out.json(
        "meta.json",
        json!({
            "version": VERSION,
            "streams": [0],
            "max_abs_mean_z": report.max_abs_site_z(),
            "max_abs_covariance_z": report.max_abs_pair_z(),
            "gof_passes": family_passes(&gof, crate::config::DEFAULT_ALPHA),
        }),
    )?;
    print_profile(&report);
    Ok(ExitCode::SUCCESS)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let (cfg, env) = resolve_verify(args)?;
    let out = Output::new(&env.output_dir, &cfg)?;
    let started = Instant::now();
    let reports = pool(env.threads)?.install(|| run_suite(cfg.suite, &cfg.checks))?;
    let lines: Vec<String> = reports.iter().map(|r| r.to_json_line()).collect();
    out.jsonl("reports.jsonl", &lines)?;
    for r in &reports {
        println!(
            "{:<12} {:<28} {:.3e}  {}",
            format!("{:?}", r.verdict).to_lowercase(),
            r.check,
            r.max_residual,
            serde_json::to_string(&r.params)?
        );
    }
    let verdict = overall(&reports);
    println!("{} checks, overall {:?}", reports.len(), verdict);
    eprintln!("verification took {:.1} s", started.elapsed().as_secs_f64());
    Ok(verdict_code(verdict))
}

#[derive(Serialize)]
struct CompareHeader<'a> {
    compare: &'a CompareConfig,
    source: &'a SimulateConfig,
}

fn compare_verdict(report: &ProfileReport, gof: &[SiteGof], cfg: &CompareConfig) -> Verdict {
    let moments_ok = report.max_abs_site_z() <= cfg.z_max && report.max_abs_pair_z() <= cfg.z_max;
    match (moments_ok, family_passes(gof, cfg.alpha)) {
        (false, _) | (true, Some(false)) => Verdict::Fail,
        (true, None) => Verdict::Inconclusive,
        (true, Some(true)) => Verdict::Pass,
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<ExitCode, CliError> {
    let (cfg, env) = resolve_compare(args)?;
    let path = cfg.input.join("stats.json");
    let text = fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    let source: SimulateConfig = serde_json::from_value(value["config"].take())
        .map_err(|e| CliError::Config(format!("{}: config record: {e}", path.display())))?;
    let stats: OccupationStats = serde_json::from_value(value["stats"].take())?;
    let spec = source.model.spec()?;
    let report = profile_report(&stats, &spec);
    let gof = marginal_gof(&stats, &spec)?;
    let verdict = compare_verdict(&report, &gof, &cfg);
    let out = Output::new(&env.output_dir, &CompareHeader { compare: &cfg, source: &source })?;
    out.csv("gof.csv", &gof_csv(&gof))?;
    out.json(
        "compare.json",
        json!({
            "verdict": verdict,
            "profile": report,
            "gof": gof,
        }),
    )?;
    print_profile(&report);
    for g in &gof {
        println!(
            "site {:>3}  {:?}  p = {}",
            g.site,
            g.result.test,
            g.result.p_value.map(|p| format!("{p:.4}")).unwrap_or_else(|| "inconclusive".into())
        );
    }
    println!("overall {verdict:?}");
    Ok(verdict_code(verdict))
}
