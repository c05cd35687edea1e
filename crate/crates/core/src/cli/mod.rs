//! Command-line front end: `table2`, `verify`, `decay`, `boltzmann` and `eigen`.
//!
//! Exit codes are 0 when every check passes, 1 when a check fails and 2 for
//! usage, configuration or I/O errors.

mod commands;
mod config;
mod report;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use commands::DecayArgs;
pub use config::{GridConfig, OutputFormat, RunConfig, Tolerances, CONFIG_ENV};
pub use report::{Check, VerificationReport};
pub use verify::{equivalence_dx_grid, equivalence_gap, run_suites, solver_identity_gap, Suite};

use crate::error::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Six significant digits, fixed notation where it stays short.
pub fn fmt6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..5).contains(&exp) {
        format!("{:.*}", (5 - exp).max(0) as usize, v)
    } else {
        format!("{v:.5e}")
    }
}

/// A command's result in both output formats.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub json: String,
    pub csv: String,
    pub exit: i32,
}

impl Rendered {
    fn new<T: Serialize>(
        value: &T,
        preamble: Option<String>,
        header: &[&str],
        rows: Vec<Vec<String>>,
        exit: i32,
    ) -> Result<Self> {
        let mut buf = Vec::new();
        if let Some(p) = preamble {
            writeln!(buf, "# {p}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        let csv = String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))?;
        let mut json = serde_json::to_string_pretty(value)?;
        json.push('\n');
        Ok(Self { json, csv, exit })
    }

    pub fn body(&self, format: OutputFormat) -> &str {
        match format {
            OutputFormat::Csv => &self.csv,
            OutputFormat::Json => &self.json,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "madelung-lab", version, about = "Ensemble-thermodynamic Schrödinger laboratory")]
pub struct Cli {
    /// JSON config file (falls back to $MADELUNG_LAB_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Spatial window `A,B`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_window)]
    pub window: Option<[f64; 2]>,
    /// Override a tolerance, `NAME=VALUE`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gibbs entropies of oscillator levels against the reference table.
    Table2 {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Run invariant and residual checks.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Norm of a decaying oscillator level over time.
    Decay {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        tau: Option<f64>,
        /// Defaults to 5τ.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Transition rates out of the level, comma separated; sets τ.
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
    },
    /// Canonical oscillator ensemble at the factorization temperature.
    Boltzmann {
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long, default_value_t = 1)]
        dof: usize,
    },
    /// Oscillator eigenpairs from the finite-difference solver.
    Eigen {
        #[arg(long, default_value_t = 6)]
        k: usize,
        /// Also write each eigenfunction as `state_<n>.csv` in this directory.
        #[arg(long)]
        wavefunctions: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    Ok([a, b])
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad number {v:?}"))?;
    Ok((name.trim().to_string(), v))
}

impl Cli {
    /// Config file (or defaults) with command-line flags applied on top.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::discover(self.config.as_deref())?;
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(n) = self.grid_points {
            cfg.grid.points = Some(n);
        }
        if let Some(w) = self.window {
            cfg.grid.window = Some(w);
        }
        for (name, v) in &self.tol {
            cfg.tolerances.set(name, *v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one command and returns its rendering.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Rendered> {
    match command {
        Command::Table2 { n_max } => commands::table2(*n_max, cfg),
        Command::Verify { suite } => {
            let start = Instant::now();
            let checks = run_suites(*suite, &cfg.tolerances)?;
            let report = VerificationReport::new(checks, start.elapsed());
            let (header, rows) = report.csv_rows();
            Rendered::new(&report, None, &header, rows, if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Decay { n, tau, t_max, steps, rates } => commands::decay(
            &DecayArgs {
                n: *n,
                tau: *tau,
                t_max: *t_max,
                steps: *steps,
                rates: rates.clone(),
            },
            cfg,
        ),
        Command::Boltzmann { omega, mass, dof } => commands::boltzmann(*omega, *mass, *dof, cfg),
        Command::Eigen { k, wavefunctions } => commands::eigen(*k, wavefunctions.as_deref(), cfg),
    }
}

fn emit(rendered: &Rendered, cfg: &RunConfig) -> Result<()> {
    let body = rendered.body(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Diagnostics and timing go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let result = cli
        .resolve_config()
        .and_then(|cfg| execute(&cli.command, &cfg).and_then(|r| emit(&r, &cfg).map(|_| r.exit)));
    match result {
        Ok(code) => {
            eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
