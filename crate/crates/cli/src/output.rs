//! Artifact envelope and destination handling.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use crate::commands::{Body, Outcome};
use crate::config::{Format, RunConfig};

pub const SCHEMA: &str = "twistdisc/1";

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    command: &'a str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
    params: &'a RunConfig,
    ok: bool,
    failures: &'a [String],
    result: &'a Value,
}

pub fn unix_time() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// `--output` (relative to `out_dir` when set), else `out_dir/<command>-<seed>.<ext>`,
/// else stdout (`None`).
pub fn destination(cfg: &RunConfig, out_dir: Option<&Path>) -> Option<PathBuf> {
    let ext = match cfg.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    match (&cfg.output, out_dir) {
        (Some(o), Some(dir)) if o.is_relative() => Some(dir.join(o)),
        (Some(o), _) => Some(o.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}-{}.{ext}", cfg.command, cfg.seed))),
        (None, None) => None,
    }
}

pub fn render(cfg: &RunConfig, outcome: &Outcome, timestamp: Option<u64>) -> anyhow::Result<Vec<u8>> {
    match &outcome.body {
        Body::Json(result) => {
            let env = Envelope {
                schema: SCHEMA,
                command: &cfg.command,
                seed: cfg.seed,
                timestamp_unix: timestamp,
                params: cfg,
                ok: outcome.ok,
                failures: &outcome.failures,
                result,
            };
            let mut out = serde_json::to_vec_pretty(&env)?;
            out.push(b'\n');
            Ok(out)
        }
        Body::Csv { header, rows } => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            Ok(w.into_inner().context("flushing csv")?)
        }
    }
}

pub fn write(cfg: &RunConfig, outcome: &Outcome, dest: Option<&Path>, timestamp: Option<u64>) -> anyhow::Result<()> {
    let bytes = render(cfg, outcome, timestamp)?;
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(&bytes).context("writing stdout")?,
    }
    Ok(())
}
