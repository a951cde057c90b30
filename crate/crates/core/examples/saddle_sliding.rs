//! Deterministic sliding on the shipped reference saddle problem.
//!
//! Run with `cargo run --release --example saddle_sliding`.

use mpsvi::algorithms::{run_mps, schedule_deterministic};
use mpsvi::evaluation::{fit_loglog_slope, sup_gap_saddle, theoretical_bound, BoundKind};
use mpsvi::problems::reference_instance;

fn main() -> mpsvi::Result<()> {
    let (problem, saddle) = reference_instance()?;
    let z0 = problem.setup().set().center();
    let omega = problem.setup().omega(&z0)?;
    let (l, m) = (problem.lipschitz_l(), problem.lipschitz_m());
    println!(
        "reference saddle: dim {}, L = {l}, M = {m}, Omega = {omega}",
        problem.dim()
    );

    let mut pairs = Vec::new();
    println!(
        "{:>4} {:>12} {:>12} {:>8} {:>8}",
        "N", "gap", "bound", "grad", "H"
    );
    for n in [8, 16, 32, 64] {
        let schedule = schedule_deterministic(n, l, m)?;
        let trace = run_mps(&problem, &schedule, &z0)?;
        let gap = sup_gap_saddle(&saddle, &problem, trace.output().unwrap().values())?;
        let c = trace.counters();
        println!(
            "{n:>4} {:>12.4e} {:>12.4e} {:>8} {:>8}",
            gap.sup_gap,
            theoretical_bound(BoundKind::Deterministic, l, omega, n),
            c.grad_g_evals,
            c.h_evals
        );
        pairs.push((n, gap.sup_gap));
    }
    println!("log-log slope {:.3}", fit_loglog_slope(&pairs)?.slope);
    Ok(())
}
