mod common;

use common::{brute_force_prox, l2, linf_distance, random_prox_instance, sub};
use mpsvi::geometry::ProxKind;
use mpsvi::space::RngStream;

#[test]
fn prox_matches_brute_force_on_random_instances() {
    let mut rng = RngStream::new(8, 0);
    let mut worst_dist = 0.0f64;
    let mut worst_resid = 0.0f64;
    for case in 0..1000 {
        let inst = random_prox_instance(&mut rng, case);
        let got = inst
            .setup
            .prox_map(&inst.g, &inst.z0, &inst.z1, inst.beta, inst.eta)
            .unwrap();
        let want = brute_force_prox(&inst);
        let dist = linf_distance(&got, &want);
        assert!(
            dist <= 1e-6,
            "case {case} ({:?}, {:?}): l-inf distance {dist:e}\n got  {got:?}\n want {want:?}",
            inst.kind,
            inst.leaves
        );
        let resid = inst
            .setup
            .prox_optimality_residual(&inst.g, &inst.z0, &inst.z1, inst.beta, inst.eta, &got);
        assert!(resid <= 1e-8, "case {case}: residual {resid:e}");
        worst_dist = worst_dist.max(dist);
        worst_resid = worst_resid.max(resid);
    }
    println!("worst l-inf distance {worst_dist:e}, worst residual {worst_resid:e}");
}

#[test]
fn brute_force_solution_is_not_accepted_when_perturbed() {
    let mut rng = RngStream::new(9, 0);
    for case in [0usize, 2, 3, 5] {
        let inst = random_prox_instance(&mut rng, case);
        let want = brute_force_prox(&inst);
        let mut moved = inst.setup.set().sample(&mut rng);
        if linf_distance(&moved, &want) < 1e-3 {
            moved = inst.setup.set().center();
        }
        if linf_distance(&moved, &want) < 1e-3 {
            continue;
        }
        let resid = inst
            .setup
            .prox_optimality_residual(&inst.g, &inst.z0, &inst.z1, inst.beta, inst.eta, &moved);
        assert!(
            resid > 1e-8,
            "case {case}: residual {resid:e} at a non-solution"
        );
    }
}

/// Two Bregman terms collapse into one around a combined center.
#[test]
fn two_center_prox_collapses_to_one_center() {
    let mut rng = RngStream::new(10, 0);
    for case in 0..700 {
        let inst = random_prox_instance(&mut rng, case);
        let s = inst.beta + inst.eta;
        let (wb, we) = (inst.beta / s, inst.eta / s);
        let center: Vec<f64> = match inst.kind {
            ProxKind::Euclidean => (0..inst.g.len())
                .map(|i| wb * inst.z0[i] + we * inst.z1[i])
                .collect(),
            ProxKind::Entropy => {
                let mut c = Vec::new();
                let mut offset = 0;
                for leaf in &inst.leaves {
                    let r = offset..offset + leaf.dim();
                    offset += leaf.dim();
                    let raw: Vec<f64> = r
                        .map(|i| (wb * inst.z0[i].ln() + we * inst.z1[i].ln()).exp())
                        .collect();
                    let total: f64 = raw.iter().sum();
                    c.extend(raw.iter().map(|v| v / total));
                }
                c
            }
        };
        let two = inst
            .setup
            .prox_map(&inst.g, &inst.z0, &inst.z1, inst.beta, inst.eta)
            .unwrap();
        let one = inst
            .setup
            .prox_map(&inst.g, &center, &center, s, 0.0)
            .unwrap();
        let d = linf_distance(&two, &one);
        assert!(d <= 1e-10, "case {case}: {d:e}");
    }
}

#[test]
fn euclidean_prox_is_nonexpansive_in_the_linear_term() {
    let mut rng = RngStream::new(11, 0);
    for case in 0..1000 {
        let inst = random_prox_instance(&mut rng, case % 5);
        let g2: Vec<f64> = inst.g.iter().map(|v| v + rng.standard_normal()).collect();
        let s = inst.beta + inst.eta;
        let p1 = inst
            .setup
            .prox_map(&inst.g, &inst.z0, &inst.z1, inst.beta, inst.eta)
            .unwrap();
        let p2 = inst
            .setup
            .prox_map(&g2, &inst.z0, &inst.z1, inst.beta, inst.eta)
            .unwrap();
        let lhs = l2(&sub(&p1, &p2));
        let rhs = l2(&sub(&inst.g, &g2)) / s;
        assert!(
            lhs <= rhs * (1.0 + 1e-12) + 1e-15,
            "case {case}: {lhs} > {rhs}"
        );
    }
}

#[test]
fn prox_output_is_feasible() {
    let mut rng = RngStream::new(12, 0);
    for case in 0..500 {
        let inst = random_prox_instance(&mut rng, case);
        let p = inst
            .setup
            .prox_map(&inst.g, &inst.z0, &inst.z1, inst.beta, inst.eta)
            .unwrap();
        assert!(inst.setup.set().violation(&p) <= 1e-12, "case {case}");
    }
}
