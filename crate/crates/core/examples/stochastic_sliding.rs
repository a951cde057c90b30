//! Stochastic sliding with a noisy operator: the gap averaged over seeds
//! against the expected-gap guarantee.
//!
//! Run with `cargo run --release --example stochastic_sliding`.

use mpsvi::algorithms::{run_smps, schedule_stochastic};
use mpsvi::evaluation::{sup_gap_saddle, theoretical_bound, BoundKind};
use mpsvi::problems::{reference_instance, NoiseKind, StochasticOracle};
use mpsvi::space::{stream_id_for, RngStream};

fn main() -> mpsvi::Result<()> {
    let (problem, saddle) = reference_instance()?;
    let z0 = problem.setup().set().center();
    let omega = problem.setup().omega(&z0)?;
    let (l, m) = (problem.lipschitz_l(), problem.lipschitz_m());

    for sigma in [0.0, 0.5, 2.0] {
        for n in [8, 16] {
            let schedule = schedule_stochastic(n, l, m, sigma, omega)?;
            let seeds = 0..10u64;
            let mut total = 0.0;
            let mut samples = 0;
            for seed in seeds.clone() {
                let rng = RngStream::new(seed, stream_id_for(&[n as u64, seed]));
                let mut oracle = StochasticOracle::new(
                    problem.clone(),
                    NoiseKind::GaussianAdditive,
                    sigma,
                    rng,
                )?;
                let trace = run_smps(&mut oracle, &schedule, &z0)?;
                total +=
                    sup_gap_saddle(&saddle, &problem, trace.output().unwrap().values())?.sup_gap;
                samples = trace.counters().h_samples;
            }
            println!(
                "sigma {sigma:<4} N {n:>3}: mean gap {:.4e} (bound {:.4e}), {samples} operator samples per run",
                total / seeds.count() as f64,
                theoretical_bound(BoundKind::Stochastic, l, omega, n),
            );
        }
    }
    Ok(())
}
