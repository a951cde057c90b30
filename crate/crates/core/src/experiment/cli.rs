use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::{ExperimentConfig, OutputFormat};
use super::ini::ConfigError;
use super::runner::{plan_experiment, run_experiment, ExitStatus, ExperimentError};
use crate::evaluation::GAP_FEASIBILITY_TOL;

#[derive(Debug, Parser)]
#[command(
    name = "mpsvi",
    about = "Gradient sliding experiments for variational inequalities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every (N, seed) cell of a config and write traces and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        format: Option<OutputFormat>,
    },
    /// Build and check the schedules of a config without running them.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Certified sup-gap of one point read from a CSV file.
    Gap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        point: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|e| {
        ExperimentError::Config(ConfigError::general(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })?;
    ExperimentConfig::parse(&text).map_err(|e| {
        ExperimentError::Config(ConfigError {
            message: format!("{}: {}", path.display(), e.message),
            ..e
        })
    })
}

/// Numbers separated by commas, whitespace or newlines; a non-numeric first
/// line is treated as a header.
pub fn parse_point(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let parsed: Result<Vec<f64>, _> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse::<f64>)
            .collect();
        match parsed {
            Ok(v) => values.extend(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(format!("line {}: not a list of numbers", i + 1)),
        }
    }
    Ok(values)
}

/// Runs the command-line interface and returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                ExitStatus::UsageError.code()
            } else {
                0
            };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_status().code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<ExitStatus, ExperimentError> {
    match command {
        Command::Run {
            config,
            out,
            seed_override,
            jobs,
            format,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed_override {
                cfg.seeds = vec![seed];
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            let out = out.or_else(|| cfg.out_dir.clone()).ok_or_else(|| {
                ExperimentError::Config(ConfigError::general(
                    "no output directory: pass --out or set 'dir' in [output]",
                ))
            })?;
            let summary = run_experiment(&cfg, &out, jobs.max(1))?;
            for p in &summary.per_n {
                let _ = writeln!(
                    stdout,
                    "N={:<6} gap={:.6e} bound={:.6e} {}",
                    p.n,
                    p.mean_gap,
                    p.bound,
                    if p.passed { "ok" } else { "FAIL" }
                );
            }
            if let Some(s) = summary.slope {
                let _ = writeln!(stdout, "log-log slope {s:.4}");
            }
            let _ = writeln!(stdout, "verdict: {}", summary.verdict);
            Ok(if summary.passed() {
                ExitStatus::Pass
            } else {
                ExitStatus::BoundFail
            })
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let plan = plan_experiment(&cfg)?;
            let mut ok = true;
            for (n, s, report) in &plan.schedules {
                let (Some(s), Some(r)) = (s, report) else {
                    let _ = writeln!(
                        stdout,
                        "N={n}: mirror_prox has no sliding schedule to check"
                    );
                    continue;
                };
                let _ = writeln!(
                    stdout,
                    "N={n}: {} (total inner steps {})",
                    if r.passed() {
                        "all conditions hold"
                    } else {
                        "FAILED"
                    },
                    s.total_inner_steps()
                );
                for c in &r.conditions {
                    let _ = writeln!(
                        stdout,
                        "  {:<20} worst margin {:+.3e}  {}",
                        c.name,
                        c.worst_margin,
                        c.violated_at.first().map(String::as_str).unwrap_or("ok")
                    );
                }
                ok &= r.passed();
            }
            Ok(if ok {
                ExitStatus::Pass
            } else {
                ExitStatus::BoundFail
            })
        }
        Command::Gap { config, point } => {
            let cfg = load_config(&config)?;
            let built = cfg.problem.build()?;
            let text = fs::read_to_string(&point).map_err(|e| {
                ExperimentError::Config(ConfigError::general(format!(
                    "cannot read {}: {e}",
                    point.display()
                )))
            })?;
            let z = parse_point(&text).map_err(|m| {
                ExperimentError::Config(ConfigError::general(format!("{}: {m}", point.display())))
            })?;
            let report = match &built.saddle {
                Some(sp) => crate::evaluation::sup_gap_saddle(sp, &built.spec, &z),
                None => crate::evaluation::sup_gap_ascent(&built.spec, &z, 2000, 4),
            };
            let report = report.map_err(|e| match e {
                crate::Error::Infeasible { .. } | crate::Error::DimensionMismatch { .. } => {
                    ExperimentError::Config(ConfigError::general(format!(
                        "{}: {e} (tolerance {GAP_FEASIBILITY_TOL:e})",
                        point.display()
                    )))
                }
                other => ExperimentError::Runtime(other),
            })?;
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(ExitStatus::Pass)
        }
    }
}
