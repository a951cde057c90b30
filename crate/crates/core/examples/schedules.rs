//! Parameter schedules of the sliding methods and their validation.
//!
//! Run with `cargo run --example schedules`.

use mpsvi::algorithms::{
    schedule_deterministic, schedule_stochastic, validate_schedule, ValidationMode,
};

fn main() -> mpsvi::Result<()> {
    let (l, m) = (4.0, 2.0);
    let s = schedule_deterministic(6, l, m)?;
    println!("deterministic schedule, L = {l}, M = {m}");
    println!(
        "{:>3} {:>8} {:>8} {:>4} {:>9} {:>9}",
        "k", "gamma", "beta", "T", "eta^1", "eta^T"
    );
    for k in 1..=s.n_outer() {
        let t = s.inner_steps(k);
        println!(
            "{k:>3} {:>8.4} {:>8.4} {t:>4} {:>9.4} {:>9.4}",
            s.gamma(k),
            s.beta(k),
            s.eta(k, 1),
            s.eta(k, t)
        );
    }

    let report = validate_schedule(&s, l, m, ValidationMode::Deterministic);
    for c in &report.conditions {
        println!(
            "  {:<20} checked {:>3}, worst margin {:+.2e}",
            c.name, c.checked, c.worst_margin
        );
    }

    let noisy = schedule_stochastic(6, l, m, 1.0, 5.0)?;
    println!(
        "stochastic schedule (sigma = 1, Omega = 5): inner steps {:?}, passes: {}",
        (1..=6).map(|k| noisy.inner_steps(k)).collect::<Vec<_>>(),
        validate_schedule(&noisy, l, m, ValidationMode::Stochastic).passed()
    );

    let shrunk = s.with_scaled_eta(0.5);
    let report = validate_schedule(&shrunk, l, m, ValidationMode::Deterministic);
    println!(
        "halving eta: passes {}, first violation {:?}",
        report.passed(),
        report.first_violation()
    );
    Ok(())
}
