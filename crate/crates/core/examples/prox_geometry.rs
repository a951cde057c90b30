//! Prox-mappings, Bregman divergences and set diameters for the supported
//! geometries.
//!
//! Run with `cargo run --example prox_geometry`.

use mpsvi::geometry::{FeasibleSet, ProxKind, ProxSetup, SimpleTerm};

fn show(name: &str, setup: &ProxSetup, g: &[f64], z0: &[f64], z1: &[f64]) -> mpsvi::Result<()> {
    let (beta, eta) = (2.0, 1.0);
    let p = setup.prox_map(g, z0, z1, beta, eta)?;
    let resid = setup.prox_optimality_residual(g, z0, z1, beta, eta, &p);
    println!("{name}");
    println!("  prox      {p:.4?}");
    println!("  residual  {resid:.1e}");
    println!("  V(z0, p)  {:.4}", setup.bregman(z0, &p)?);
    println!("  Omega(z0) {:.4}", setup.omega(z0)?);
    Ok(())
}

fn main() -> mpsvi::Result<()> {
    let boxed = ProxSetup::new(
        ProxKind::Euclidean,
        FeasibleSet::uniform_box(3, -1.0, 1.0)?,
        SimpleTerm::L1 { weight: 0.5 },
    )?;
    show(
        "box with l1 term",
        &boxed,
        &[1.0, -0.2, -3.0],
        &[0.0; 3],
        &[0.5, 0.5, 0.5],
    )?;

    let ball = ProxSetup::euclidean(FeasibleSet::new_ball(vec![0.0, 0.0], 1.0)?)?;
    show("unit ball", &ball, &[-4.0, 3.0], &[0.0, 0.0], &[0.2, 0.1])?;

    let simplex = ProxSetup::euclidean(FeasibleSet::new_simplex(4)?)?;
    let u = [0.25; 4];
    show(
        "simplex, Euclidean",
        &simplex,
        &[1.0, 0.0, -1.0, 0.5],
        &u,
        &u,
    )?;

    let entropy = ProxSetup::entropy(FeasibleSet::new_product(vec![
        FeasibleSet::new_simplex(2)?,
        FeasibleSet::new_simplex(3)?,
    ])?)?;
    let z0 = [0.5, 0.5, 0.2, 0.3, 0.5];
    show(
        "two simplices, entropy",
        &entropy,
        &[1.0, -1.0, 0.0, 2.0, -2.0],
        &z0,
        &z0,
    )?;
    Ok(())
}
