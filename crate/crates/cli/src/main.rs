//! Batch front-end: parse a system/equation config, run the selected
//! analyses, and emit a JSON report plus CSV trajectory data.
//!
//! Exit codes: 0 on completed analyses, 2 when hypothesis gates failed and
//! analyses were skipped (the report lists them), 1 on hard errors.

mod analyses;
mod config;
mod portrait;

use analyses::RunError;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "planode", about = "Qualitative analysis of planar linear ODE systems", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the TOML analysis config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the run horizon
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Override the solver tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory for the report and CSV data
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized property probes
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = library default)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Oscillation classification over the phase-offset family
    Classify,
    /// Scalar Riccati analysis: roles, boundary, sign patterns, envelope
    Riccati,
    /// Lyapunov stability through the weighted criterion functions
    Stability,
    /// Solution envelopes and containment checks
    Bounds,
    /// Non-conjugation verification and the sign-case report
    Nonconj,
    /// System regularity taxonomy and the minimal solution
    Regularity,
    /// Trajectory family data as CSV
    Portrait,
    /// Run the full acceptance suite
    Check,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Riccati => "riccati",
            Command::Stability => "stability",
            Command::Bounds => "bounds",
            Command::Nonconj => "nonconj",
            Command::Regularity => "regularity",
            Command::Portrait => "portrait",
            Command::Check => "check",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    if cli.command == Command::Check {
        let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("planode-out"));
        std::fs::create_dir_all(&out_dir)?;
        let (value, all) = analyses::check();
        let report = json!({
            "subcommand": "check",
            "results": value,
            "timestamp": timestamp(),
        });
        std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        return Ok(if all { 0 } else { 1 });
    }

    let config_path = cli
        .config
        .clone()
        .context("--config PATH is required for this subcommand")?;
    let text = std::fs::read_to_string(&config_path)
        .with_context(|| format!("reading {config_path:?}"))?;
    let mut cfg = config::load(&text)?;
    if let Some(h) = cli.horizon {
        cfg.run.horizon = h;
    }
    if let Some(t) = cli.tol {
        cfg.run.tol = t;
    }
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("planode-out"));
    std::fs::create_dir_all(&out_dir)?;

    let mut skipped: Vec<serde_json::Value> = Vec::new();
    let mut results = serde_json::Map::new();
    let name = cli.command.name();

    let outcome: Option<Result<serde_json::Value, RunError>> = match cli.command {
        Command::Classify => Some(analyses::classify(&cfg)),
        Command::Riccati => Some(analyses::riccati(&cfg)),
        Command::Stability => Some(analyses::stability(&cfg)),
        Command::Bounds => Some(analyses::bounds(&cfg)),
        Command::Nonconj => Some(analyses::nonconj(&cfg)),
        Command::Regularity => Some(analyses::regularity(&cfg)),
        Command::Portrait => {
            let out = portrait::emit(&cfg, &out_dir)?;
            Some(Ok(json!({ "files": out.files, "columns": out.columns })))
        }
        Command::Check => unreachable!(),
    };

    match outcome.unwrap() {
        Ok(v) => {
            summarize(name, &v);
            results.insert(name.to_string(), v);
        }
        Err(RunError::Gate(reason)) => {
            println!("{name}: skipped — {reason}");
            skipped.push(json!({ "analysis": name, "reason": reason }));
        }
        Err(RunError::Hard(e)) => return Err(e),
    }

    let report = json!({
        "subcommand": name,
        "config": config_path.display().to_string(),
        "horizon": cfg.run.horizon,
        "tol": cfg.run.tol,
        "seed": cfg.run.seed,
        "results": serde_json::Value::Object(results),
        "skipped": skipped,
        "timestamp": timestamp(),
    });
    let report_path = out_dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    println!("report written to {}", report_path.display());
    Ok(if skipped.is_empty() { 0 } else { 2 })
}

fn timestamp() -> String {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{now}")
}

fn summarize(name: &str, v: &serde_json::Value) {
    match name {
        "classify" => {
            if let Some(c) = v.get("oscillation_class").and_then(|x| x.as_str()) {
                println!("oscillation class: {c}");
            }
            if let Some(l) = v.pointer("/leighton/verdict").and_then(|x| x.as_str()) {
                println!("divergence test: {l}");
            }
        }
        "stability" => {
            if let Some(c) = v.get("verdict").and_then(|x| x.as_str()) {
                println!("stability: {c}");
            }
        }
        "regularity" => {
            if let Some(c) = v.get("class").and_then(|x| x.as_str()) {
                println!("regularity class: {c}");
            }
        }
        "nonconj" => {
            if let Some(c) = v.pointer("/nonconjugation/verdict").and_then(|x| x.as_str()) {
                println!("non-conjugation: {c}");
            }
            if let Some(c) = v.pointer("/case_report/clause").and_then(|x| x.as_str()) {
                println!("clause: {c}");
            }
        }
        _ => {}
    }
}
