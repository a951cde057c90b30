mod common;

use common::{builtin_problems, check_problem, l2, sub};
use mpsvi::geometry::{FeasibleSet, ProxKind, ProxSetup, SimpleTerm};
use mpsvi::problems::{
    estimate_operator_norm, reference_instance, Matrix, NoiseKind, StochasticOracle,
};
use mpsvi::space::{dual_pairing, euclidean_norm, OracleCounters, RngStream};
use num::{BigRational, Signed, ToPrimitive};
use proptest::prelude::*;

#[test]
fn builtin_problems_pass_property_suite() {
    for (i, (name, p, _)) in builtin_problems().into_iter().enumerate() {
        let report = check_problem(&p, 1000, 500 + i as u64);
        report
            .passes(true)
            .unwrap_or_else(|e| panic!("{name}: {e}\n{report:?}"));
    }
}

#[test]
fn saddle_operator_matches_lagrangian_partials() {
    for (name, p, sp) in builtin_problems() {
        let Some(sp) = sp else { continue };
        let mut rng = RngStream::new(77, 0);
        let z = p.setup().set().sample(&mut rng);
        let (x, y) = sp.split(&z);
        let h = 1e-6;
        let grad = p.grad_g(&z);
        let op = p.h(&z);
        let f: Vec<f64> = grad.iter().zip(&op).map(|(a, b)| a + b).collect();
        for i in 0..sp.nx() {
            let (mut a, mut b) = (x.to_vec(), x.to_vec());
            a[i] += h;
            b[i] -= h;
            let fd = (sp.lagrangian(&a, y) - sp.lagrangian(&b, y)) / (2.0 * h);
            assert!((fd - f[i]).abs() <= 1e-6 * (1.0 + fd.abs()), "{name} x_{i}");
        }
        for j in 0..sp.ny() {
            let (mut a, mut b) = (y.to_vec(), y.to_vec());
            a[j] += h;
            b[j] -= h;
            let fd = (sp.lagrangian(x, &a) - sp.lagrangian(x, &b)) / (2.0 * h);
            let fj = f[sp.nx() + j];
            assert!((fd + fj).abs() <= 1e-6 * (1.0 + fd.abs()), "{name} y_{j}");
        }
    }
}

#[test]
fn stochastic_oracle_is_unbiased_with_stated_variance() {
    let (p, _) = reference_instance().unwrap();
    let mut rng = RngStream::new(5, 5);
    let z = p.setup().set().sample(&mut rng);
    let exact = p.h(&z);
    let d = exact.len();
    let sigma = 0.5;
    for kind in [NoiseKind::GaussianAdditive, NoiseKind::CoordinateSparsified] {
        let mut o = StochasticOracle::new(p.clone(), kind, sigma, RngStream::new(3, 9)).unwrap();
        let mut counters = OracleCounters::default();
        let samples = 100_000;
        let mut sum = vec![0.0; d];
        let mut sum_sq = vec![0.0; d];
        let mut norm_sq = 0.0;
        for _ in 0..samples {
            let s = o.sample_h(&z, &mut counters);
            let noise = sub(&s, &exact);
            for i in 0..d {
                sum[i] += noise[i];
                sum_sq[i] += noise[i] * noise[i];
            }
            norm_sq += noise.iter().map(|v| v * v).sum::<f64>();
        }
        assert_eq!(counters.h_samples, samples as u64);
        assert_eq!(counters.h_evals, 0);
        let n = samples as f64;
        for i in 0..d {
            let mean = sum[i] / n;
            let var = sum_sq[i] / n - mean * mean;
            let se = (var / n).sqrt();
            assert!(
                mean.abs() <= 5.0 * se + 1e-15,
                "{kind:?} coordinate {i}: mean {mean:e}, se {se:e}"
            );
        }
        let mean_norm_sq = norm_sq / n;
        assert!(
            (mean_norm_sq - sigma * sigma).abs() <= 0.05 * sigma * sigma,
            "{kind:?}: E||noise||^2 = {mean_norm_sq}"
        );
    }
}

#[test]
fn operator_norm_matches_svd() {
    let mut rng = RngStream::new(2024, 0);
    for _ in 0..10 {
        for (r, c) in [(20, 30), (30, 20)] {
            let k = Matrix::random_uniform(r, c, &mut rng);
            let dense = nalgebra::DMatrix::from_fn(r, c, |i, j| k.get(i, j));
            let svd_max = dense.singular_values().max();
            let est = estimate_operator_norm(&k, 1e-12).unwrap();
            assert!(
                (est - svd_max).abs() <= 1e-8 * svd_max,
                "{r}x{c}: power {est}, svd {svd_max}"
            );
        }
    }
}

fn exact_pairing(a: &[f64], b: &[f64]) -> (BigRational, BigRational) {
    let mut sum = BigRational::from_integer(0.into());
    let mut abs = BigRational::from_integer(0.into());
    for (x, y) in a.iter().zip(b) {
        let t = BigRational::from_float(*x).unwrap() * BigRational::from_float(*y).unwrap();
        abs += t.abs();
        sum += t;
    }
    (sum, abs)
}

#[test]
fn dual_pairing_matches_exact_rational_sum() {
    let mut rng = RngStream::new(31, 0);
    for trial in 0..200 {
        let n = 1 + rng.index(60);
        let scale = 10f64.powi(rng.index(9) as i32 - 4);
        let a: Vec<f64> = (0..n).map(|_| scale * rng.standard_normal()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.standard_normal() / scale).collect();
        let got = dual_pairing(&a, &b).unwrap();
        let (exact, abs) = exact_pairing(&a, &b);
        let err = (BigRational::from_float(got).unwrap() - exact).abs();
        let err = err.to_f64().unwrap();
        let tol = 1e-12 * abs.to_f64().unwrap();
        assert!(err <= tol, "trial {trial}: error {err:e} > {tol:e}");
    }
    assert!(dual_pairing(&[1.0], &[1.0, 2.0]).is_err());
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, n)
}

fn entropy_setup() -> ProxSetup {
    ProxSetup::entropy(
        FeasibleSet::new_product(vec![
            FeasibleSet::new_simplex(3).unwrap(),
            FeasibleSet::new_simplex(4).unwrap(),
        ])
        .unwrap(),
    )
    .unwrap()
}

fn euclidean_setup() -> ProxSetup {
    ProxSetup::new(
        ProxKind::Euclidean,
        FeasibleSet::new_product(vec![
            FeasibleSet::uniform_box(3, -1.0, 1.0).unwrap(),
            FeasibleSet::new_ball(vec![0.0; 4], 2.0).unwrap(),
        ])
        .unwrap(),
        SimpleTerm::Zero,
    )
    .unwrap()
}

fn simplex_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    let pos = prop::collection::vec(0.001f64..1.0, 7);
    (pos.clone(), pos).prop_map(|(a, b)| {
        let norm = |v: Vec<f64>| {
            let s3: f64 = v[..3].iter().sum();
            let s4: f64 = v[3..].iter().sum();
            v.iter()
                .enumerate()
                .map(|(i, x)| if i < 3 { x / s3 } else { x / s4 })
                .collect::<Vec<f64>>()
        };
        (norm(a), norm(b))
    })
}

proptest! {
    #[test]
    fn norms_obey_triangle_inequality_and_homogeneity(a in vec_strategy(7), b in vec_strategy(7), c in -10.0f64..10.0) {
        for setup in [euclidean_setup(), entropy_setup()] {
            let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let ca: Vec<f64> = a.iter().map(|x| c * x).collect();
            for norm in [ProxSetup::primal_norm, ProxSetup::dual_norm] {
                let (na, nb, ns) = (norm(&setup, &a), norm(&setup, &b), norm(&setup, &s));
                prop_assert!(ns <= (na + nb) * (1.0 + 1e-12));
                let nca = norm(&setup, &ca);
                prop_assert!((nca - c.abs() * na).abs() <= 1e-12 * (1.0 + nca));
                prop_assert!(na >= 0.0);
            }
        }
    }

    #[test]
    fn pairing_is_bounded_by_norm_product(a in vec_strategy(7), b in vec_strategy(7)) {
        for setup in [euclidean_setup(), entropy_setup()] {
            let pairing = dual_pairing(&a, &b).unwrap();
            let bound = setup.primal_norm(&a) * setup.dual_norm(&b);
            prop_assert!(pairing.abs() <= bound * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn euclidean_bregman_is_half_squared_distance(
        a in prop::collection::vec(-1.0f64..1.0, 3),
        b in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let setup = ProxSetup::euclidean(FeasibleSet::uniform_box(3, -1.0, 1.0).unwrap()).unwrap();
        let v = setup.bregman(&a, &b).unwrap();
        let d = euclidean_norm(&sub(&a, &b));
        prop_assert!((v - 0.5 * d * d).abs() <= 1e-12 * (1.0 + v));
    }

    #[test]
    fn entropy_bregman_is_strongly_convex((a, b) in simplex_pair()) {
        let setup = entropy_setup();
        let v = setup.bregman(&a, &b).unwrap();
        let n = setup.primal_norm(&sub(&a, &b));
        prop_assert!(v >= 0.5 * n * n * (1.0 - 1e-9) - 1e-12, "V = {v}, norm {n}");
        prop_assert!(setup.bregman(&a, &a).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn sampled_points_are_feasible() {
    let mut rng = RngStream::new(40, 0);
    for (name, p, _) in builtin_problems() {
        for _ in 0..200 {
            let z = p.setup().set().sample(&mut rng);
            assert!(p.setup().set().violation(&z) <= 1e-12, "{name}");
            assert!(l2(&z).is_finite());
        }
    }
}
