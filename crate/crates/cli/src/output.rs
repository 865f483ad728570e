//! Output files. Every file carries the configuration that produced it: CSV
//! files on a leading `# config:` line, JSON files under a `config` key.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sns_core::occupation::OccupationStats;
use sns_core::stats::SiteGof;

use crate::config::CliError;

pub struct Output {
    dir: PathBuf,
    config: Value,
}

impl Output {
    pub fn new(dir: &Path, config: &impl Serialize) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config: serde_json::to_value(config)?,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, name: &str, body: &str) -> Result<(), CliError> {
        let text = format!("# config: {}\n{body}", serde_json::to_string(&self.config)?);
        fs::write(self.path(name), text)?;
        Ok(())
    }

    /// `fields` plus the configuration, pretty-printed with sorted keys.
    pub fn json(&self, name: &str, fields: Value) -> Result<(), CliError> {
        let mut map = match fields {
            Value::Object(map) => map,
            other => {
                let mut m = serde_json::Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        map.insert("config".into(), self.config.clone());
        let mut text = serde_json::to_string_pretty(&Value::Object(map))?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    /// A `{"config": ...}` record followed by one record per line.
    pub fn jsonl(&self, name: &str, records: &[String]) -> Result<(), CliError> {
        let mut text = serde_json::to_string(&serde_json::json!({ "config": self.config }))?;
        text.push('\n');
        for r in records {
            text.push_str(r);
            text.push('\n');
        }
        fs::write(self.path(name), text)?;
        Ok(())
    }
}

/// `site,bin,lower,upper,fraction`, one row per non-empty bin.
pub fn histograms_csv(stats: &OccupationStats) -> String {
    let mut out = String::from("site,bin,lower,upper,fraction\n");
    for x in 0..stats.n_sites {
        for (i, f) in stats.histogram_fractions(x).iter().enumerate() {
            if *f > 0.0 {
                let (lo, hi) = stats.binning.edges(i);
                let _ = writeln!(out, "{},{i},{lo},{hi},{f:.12e}", x + 1);
            }
        }
    }
    out
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn gof_csv(results: &[SiteGof]) -> String {
    let mut out = String::from("site,test,statistic,dof,effective_samples,p_value,bins\n");
    for r in results {
        let g = &r.result;
        let _ = writeln!(
            out,
            "{},{},{:.6e},{},{:.1},{},{}",
            r.site,
            serde_json::to_value(g.test).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            g.statistic,
            g.dof.map(|d| d.to_string()).unwrap_or_default(),
            g.sample_size,
            g.p_value.map(|p| format!("{p:.6e}")).unwrap_or_else(|| "inconclusive".into()),
            quoted(&g.binning),
        );
    }
    out
}
