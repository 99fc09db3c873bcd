mod common;

use common::*;
use dmz::dmz::{integrability_residuals, is_involutive};
use dmz::gauge::{gauge_invariants, gauge_transform, GaugeOperator};
use dmz::geometry::{lie_bracket, Chart, VectorField};
use dmz::hydro::{commuting_flow_residuals, induced_dmz, semihamiltonian_residuals, three_component_flow, HydroSystem};
use dmz::symkernel::{canonicalize, is_zero, parse, Expr, Verdict};
use dmz::ZeroTest;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn provable(e: &Expr) -> bool {
    is_zero(e) == Verdict::ProvablyZero
}

fn vanishes(e: &Expr) -> bool {
    is_zero(e).is_zero()
}

fn operator(r: &mut ChaCha8Rng) -> GaugeOperator {
    let mut d = GaugeOperator::new(&XYZ);
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                d.set_gamma(i, j, ratfun(r, &XYZ));
            }
            if i < j {
                d.set_c(i, j, poly(r, &XYZ, 2, 2));
            }
        }
    }
    d
}

fn same_operator(a: &GaugeOperator, b: &GaugeOperator) -> bool {
    (0..3).all(|i| {
        (0..3).filter(|&j| j != i).all(|j| provable(&(a.gamma(i, j) - b.gamma(i, j))) && provable(&(a.c(i, j) - b.c(i, j))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (tree(&mut r, &XYZ, 3), tree(&mut r, &XYZ, 3), tree(&mut r, &XYZ, 2));
        prop_assert!(provable(&(canonicalize(&(a.clone() + b.clone())) - canonicalize(&(b.clone() + a.clone())))));
        prop_assert!(provable(&((a.clone() * b.clone()) * c.clone() - a.clone() * (b.clone() * c.clone()))));
        prop_assert!(provable(&(a.clone() * (b.clone() + c.clone()) - a.clone() * b.clone() - a.clone() * c.clone())));
        prop_assert!(provable(&(a.clone() - a.clone())));
    }

    #[test]
    fn canonical_form_is_idempotent_and_renders_back(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = canonicalize(&tree(&mut r, &XYZ, 3));
        prop_assert_eq!(canonicalize(&a), a.clone());
        let back = parse(&a.to_string()).unwrap();
        prop_assert!(provable(&(back - a)));
    }

    #[test]
    fn derivative_rules(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (tree(&mut r, &XYZ, 3), tree(&mut r, &XYZ, 3));
        let product = (a.clone() * b.clone()).diff("y") - a.diff("y") * b.clone() - a.clone() * b.diff("y");
        prop_assert!(provable(&product));
        let e = Expr::exp(a.clone()) * b.clone();
        prop_assert!(vanishes(&(e.diff("x").diff("z") - e.diff("z").diff("x"))));
    }

    #[test]
    fn gauge_group_law(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = operator(&mut r);
        let (l, m) = (poly(&mut r, &XYZ, 2, 3), ratfun(&mut r, &XYZ));
        let two = gauge_transform(&gauge_transform(&d, &l), &m);
        let one = gauge_transform(&d, &(l.clone() + m));
        prop_assert!(same_operator(&one, &two));
        prop_assert!(same_operator(&gauge_transform(&gauge_transform(&d, &l), &-l), &d));
    }

    #[test]
    fn invariants_are_gauge_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = operator(&mut r);
        let l = ratfun(&mut r, &XYZ);
        let (h0, h1) = (gauge_invariants(&d), gauge_invariants(&gauge_transform(&d, &l)));
        for (k, v) in &h0 {
            prop_assert!(provable(&(v.clone() - h1[k].clone())));
        }
    }

    #[test]
    fn tsarev_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = ["u1", "u2", "u3"];
        let v = vec![poly(&mut r, &u, 2, 3), poly(&mut r, &u, 2, 3), poly(&mut r, &u, 2, 3)];
        if let Ok(s) = HydroSystem::new(&u, v) {
            let semi = semihamiltonian_residuals(&s).iter().all(|x| vanishes(&x.expr));
            let inv = integrability_residuals(&induced_dmz(&s)).iter().all(|x| vanishes(&x.expr));
            prop_assert_eq!(semi, inv);
        }
    }

    #[test]
    fn commuting_flows_commute_both_ways(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = ["u1", "u2", "u3"];
        let f = |r: &mut ChaCha8Rng| [cubic(r, "s"), cubic(r, "s"), cubic(r, "s")];
        let (fv, fw) = (f(&mut r), f(&mut r));
        let v = HydroSystem::new(&u, three_component_flow(&u, &fv, "s")).unwrap();
        let w = HydroSystem::new(&u, three_component_flow(&u, &fw, "s")).unwrap();
        prop_assert!(commuting_flow_residuals(&v, &w.v).iter().all(|x| provable(&x.expr)));
        prop_assert!(commuting_flow_residuals(&w, &v.v).iter().all(|x| provable(&x.expr)));
        prop_assert!(semihamiltonian_residuals(&v).iter().all(|x| provable(&x.expr)));
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let chart = Chart::new(&XYZ).unwrap();
        let field = |r: &mut ChaCha8Rng| {
            VectorField::new(&chart, (0..3).map(|_| poly(r, &XYZ, 2, 2)).collect()).unwrap()
        };
        let (a, b, c) = (field(&mut r), field(&mut r), field(&mut r));
        let br = |x: &VectorField, y: &VectorField| lie_bracket(x, y).unwrap();
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        prop_assert!(sum.coeffs().iter().all(provable));
        let anti = br(&a, &b).add(&br(&b, &a));
        prop_assert!(anti.coeffs().iter().all(provable));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn gauge_orbit_stays_involutive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = corpus("new_dmz.dmz").dmz().unwrap();
        let d = GaugeOperator::from_dmz(&s).unwrap();
        let l = poly(&mut r, &XYZ, 2, 3);
        let g = gauge_transform(&d, &l).to_dmz();
        prop_assert!(is_involutive(&g, &ZeroTest::default()).passed());
    }
}
