//! `qbh`: runs one experiment family from a flat config file and writes
//! deterministic CSV/JSON tables plus a `manifest.json`.

// `!(x > 0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser};

use config::{Command, ConfigError, Format, RawConfig, RunConfig};
use output::{Manifest, Tolerance};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;

/// Numerical laboratory for a Hermitian quadratic bosonic chain.
///
/// Exit codes: 0 success, 1 usage, 2 computation error, 3 tolerance failure in check.
#[derive(Debug, Parser)]
#[command(name = "qbh", version)]
struct Cli {
    /// Config file (key=value lines under [section] headers)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides [run] command
    #[arg(long, value_enum, value_name = "NAME")]
    command: Option<Command>,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "qbh-out")]
    out: PathBuf,
    /// Overrides [run] format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides [run] threads (0 = all cores)
    #[arg(long, value_name = "INT")]
    threads: Option<usize>,
    /// Overrides [run] seed; reserved, nothing is random
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
}

fn resolve(cli: &Cli) -> Result<RawConfig, ConfigError> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    if let Some(c) = cli.command {
        raw.set("run", "command", c.name());
    }
    if let Some(f) = cli.format {
        raw.set("run", "format", if f == Format::Csv { "csv" } else { "json" });
    }
    if let Some(t) = cli.threads {
        raw.set("run", "threads", &t.to_string());
    }
    if let Some(s) = cli.seed {
        raw.set("run", "seed", &s.to_string());
    }
    Ok(raw)
}

struct Report {
    command: String,
    config: std::collections::BTreeMap<String, std::collections::BTreeMap<String, String>>,
    started: Instant,
}

impl Report {
    fn finish(
        &self,
        out: &std::path::Path,
        code: u8,
        error: Option<String>,
        files: Vec<output::FileEntry>,
        tolerances: Vec<Tolerance>,
    ) -> ExitCode {
        let status = match code {
            0 => "ok",
            EXIT_USAGE => "usage_error",
            EXIT_COMPUTATION => "computation_error",
            _ => "tolerance_failure",
        };
        let m = Manifest {
            tool: "qbh",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            status,
            exit_code: i32::from(code),
            error,
            config: self.config.clone(),
            files,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            tolerances,
        };
        if let Err(e) = output::write_manifest(out, &m) {
            eprintln!("qbh: {e:#}");
            return ExitCode::from(EXIT_COMPUTATION.max(code));
        }
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let matches = match Cli::command().after_help(config::schema_text()).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let mut echo = RawConfig::default().echo();
    let validated = resolve(&cli).and_then(|raw| {
        echo = raw.echo();
        RunConfig::validate(raw, cli.out.clone())
    });
    let cfg = match validated {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qbh: {e}");
            if e.wants_schema() {
                eprintln!("\n{}", config::schema_text());
            }
            let command = echo["run"]["command"].clone();
            let report = Report { command, config: echo, started };
            return report.finish(&cli.out, EXIT_USAGE, Some(e.to_string()), Vec::new(), Vec::new());
        }
    };

    let report = Report { command: cfg.command.name().to_string(), config: cfg.echo(), started };
    if cfg.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global() {
            return report.finish(&cfg.out, EXIT_COMPUTATION, Some(e.to_string()), Vec::new(), Vec::new());
        }
    }

    let outcome = match commands::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("qbh: {e}");
            return report.finish(&cfg.out, EXIT_COMPUTATION, Some(e.to_string()), Vec::new(), Vec::new());
        }
    };
    let files = match output::write_tables(&cfg.out, &outcome.tables, cfg.format) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("qbh: {e:#}");
            return report.finish(&cfg.out, EXIT_COMPUTATION, Some(format!("{e:#}")), Vec::new(), outcome.tolerances);
        }
    };
    let failed: Vec<&Tolerance> = outcome.tolerances.iter().filter(|t| !t.pass).collect();
    for t in &outcome.tolerances {
        let verdict = if t.pass { "pass" } else { "FAIL" };
        match t.limit {
            Some(l) => println!("{verdict} {:<40} {:.3e} (limit {l:.1e})", t.name, t.observed),
            None => println!("info {:<40} {:.6e}", t.name, t.observed),
        }
    }
    let code = if cfg.command == Command::Check && !failed.is_empty() { EXIT_TOLERANCE } else { 0 };
    let error = (!failed.is_empty()).then(|| {
        format!("tolerance failures: {}", failed.iter().map(|t| t.name.as_str()).collect::<Vec<_>>().join(", "))
    });
    report.finish(&cfg.out, code, error, files, outcome.tolerances)
}
