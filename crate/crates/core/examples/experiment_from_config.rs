//! Runs an experiment described by an INI config, as the `mpsvi run`
//! subcommand does, and prints the summary.
//!
//! Run with `cargo run --release --example experiment_from_config [config.ini]`.
//! Without an argument a small built-in config is used.

use std::fs;

use mpsvi::experiment::{run_experiment, ExperimentConfig};

const DEFAULT: &str = "
[problem]
family = reference
lipschitz_l = 4
lipschitz_m = 2

[solver]
method = mps

[sweep]
n = 4, 8, 16
seeds = 42

[output]
format = both
timing = none
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let cfg = ExperimentConfig::parse(&text)?;
    let out = std::env::temp_dir().join("mpsvi_example_run");
    let summary = run_experiment(&cfg, &out, 1)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    println!("traces written to {}", out.display());
    Ok(())
}
