//! Mirror-prox with the entropy prox on bilinear matrix games.
//!
//! Run with `cargo run --release --example matrix_game_baseline`.

use mpsvi::algorithms::{default_mirror_prox_step, run_mirror_prox};
use mpsvi::evaluation::{fit_loglog_slope, sup_gap_saddle};
use mpsvi::problems::{build_matrix_game, Matrix};
use mpsvi::space::RngStream;

fn main() -> mpsvi::Result<()> {
    let rps = Matrix::from_rows(&[
        vec![0.0, -1.0, 1.0],
        vec![1.0, 0.0, -1.0],
        vec![-1.0, 1.0, 0.0],
    ])?;
    let mut rng = RngStream::new(3, 0);
    let games = [
        (
            "rock-paper-scissors",
            rps,
            Some(vec![0.6, 0.3, 0.1, 0.2, 0.2, 0.6]),
        ),
        ("random 8 x 5", Matrix::random_uniform(8, 5, &mut rng), None),
    ];

    for (name, k, start) in games {
        let (problem, saddle) = build_matrix_game(k)?;
        let z0 = start.unwrap_or_else(|| problem.setup().set().center());
        let step = default_mirror_prox_step(&problem);
        let trace = run_mirror_prox(&problem, step, 2000, &z0)?;
        println!("{name}: M = {:.4}, step = {step:.4}", problem.lipschitz_m());
        let mut pairs = Vec::new();
        for t in [250, 500, 1000, 2000] {
            let gap = sup_gap_saddle(&saddle, &problem, trace.records[t - 1].z_bar.values())?;
            println!("  t = {t:>4}: gap {:.4e}", gap.sup_gap);
            pairs.push((t, gap.sup_gap));
        }
        if let Ok(fit) = fit_loglog_slope(&pairs) {
            println!("  slope {:.3}", fit.slope);
        }
        let out = trace.output().unwrap();
        let (x, y) = saddle.split(out.values());
        println!("  x = {x:.3?}\n  y = {y:.3?}");
    }
    Ok(())
}
