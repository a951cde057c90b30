//! The gap function and the two ways of maximizing it: the exact saddle
//! formula and projected ascent.
//!
//! Run with `cargo run --release --example gap_oracles`.

use mpsvi::evaluation::{gap_q, sup_gap_ascent, sup_gap_saddle};
use mpsvi::problems::reference_instance;
use mpsvi::space::RngStream;

fn main() -> mpsvi::Result<()> {
    let (problem, saddle) = reference_instance()?;
    let mut rng = RngStream::new(1, 0);
    let set = problem.setup().set();

    let z_tilde = set.sample(&mut rng);
    let z = set.sample(&mut rng);
    println!(
        "Q(z~, z) at two random points: {:.6}",
        gap_q(&problem, &z_tilde, &z)?
    );

    let exact = sup_gap_saddle(&saddle, &problem, &z_tilde)?;
    println!(
        "sup_z Q(z~, z): {:.6} ({:?}, certified {})",
        exact.sup_gap, exact.method, exact.certified
    );
    for (iters, restarts) in [(10, 1), (100, 1), (1000, 3)] {
        let est = sup_gap_ascent(&problem, &z_tilde, iters, restarts)?;
        println!(
            "ascent with {iters:>4} iterations, {restarts} starts: {:.6} (certified {})",
            est.sup_gap, est.certified
        );
    }

    let center = set.center();
    println!(
        "gap at the box center: {:.6}",
        sup_gap_saddle(&saddle, &problem, &center)?.sup_gap
    );
    Ok(())
}
