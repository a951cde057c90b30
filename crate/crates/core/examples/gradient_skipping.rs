//! When the operator is far less smooth than the gradient (M >> L), sliding
//! needs only N gradient evaluations while mirror-prox spends two per
//! iteration. This example counts both to reach the same gap.
//!
//! Run with `cargo run --release --example gradient_skipping`.

use mpsvi::algorithms::{
    default_mirror_prox_step, run_mirror_prox, run_mps, schedule_deterministic,
};
use mpsvi::evaluation::sup_gap_saddle;
use mpsvi::geometry::{FeasibleSet, ProxKind};
use mpsvi::problems::{build_saddle_problem, estimate_operator_norm, DiagonalQuadratic, Matrix};
use mpsvi::space::RngStream;

fn main() -> mpsvi::Result<()> {
    let (rows, cols) = (15, 10);
    let mut rng = RngStream::new(11, 0);
    let raw = Matrix::random_uniform(rows, cols, &mut rng);
    let k = raw.scaled(20.0 / estimate_operator_norm(&raw, 1e-12)?);
    let (problem, saddle) = build_saddle_problem(
        k,
        DiagonalQuadratic::new(vec![1.0; cols], vec![0.3; cols])?,
        DiagonalQuadratic::new(vec![1.0; rows], vec![0.6; rows])?,
        FeasibleSet::uniform_box(cols, 0.0, 1.0)?,
        FeasibleSet::uniform_box(rows, 0.0, 1.0)?,
        ProxKind::Euclidean,
    )?;
    let (l, m) = (problem.lipschitz_l(), problem.lipschitz_m());
    let z0 = problem.setup().set().center();
    println!("L = {l}, M = {m:.3}");

    for target in [1e-1, 1e-2, 1e-3] {
        let mut n = 1;
        let (gap, counters) = loop {
            let tr = run_mps(&problem, &schedule_deterministic(n, l, m)?, &z0)?;
            let gap = sup_gap_saddle(&saddle, &problem, tr.output().unwrap().values())?.sup_gap;
            if gap <= target {
                break (gap, tr.counters());
            }
            n *= 2;
        };
        println!(
            "sliding     gap {gap:.2e} <= {target:.0e}: {:>6} gradients, {:>7} operator calls",
            counters.grad_g_evals, counters.h_evals
        );

        let step = default_mirror_prox_step(&problem);
        let tr = run_mirror_prox(&problem, step, 20_000, &z0)?;
        let hit = tr.records.iter().find(|r| {
            sup_gap_saddle(&saddle, &problem, r.z_bar.values())
                .map(|g| g.sup_gap <= target)
                .unwrap_or(false)
        });
        match hit {
            Some(r) => println!(
                "mirror-prox gap <= {target:.0e}: {:>6} gradients, {:>7} operator calls",
                r.counters.grad_g_evals, r.counters.h_evals
            ),
            None => println!("mirror-prox did not reach {target:.0e} in 20000 iterations"),
        }
    }
    Ok(())
}
