use proptest::prelude::*;
use rodrigues_core::curves::{saddle_curve, symbol_curve, to_symbol_coords};
use rodrigues_core::exactpoly::{int, rat, rodrigues_descendant};
use rodrigues_core::odes::{build_ode_poly, verify_ode, OdeInput};
use rodrigues_core::parse::parse_poly;
use rodrigues_core::quadratic::quadratic_cauchy;
use rodrigues_core::rootfind::{empirical_measure, find_descendant_roots, hull_containment, RootFinderConfig};
use rodrigues_core::saddleflow::PhaseField;
use rodrigues_core::trace::{cauchy_pred, curve_residual, predict};
use rodrigues_core::{Complex64, ExactPoly};

#[test]
fn parsed_descendant_satisfies_its_operator_and_hull() {
    let p = parse_poly("z^3 - 2*z + 1/2").unwrap();
    for (n, m) in [(4u32, 3usize), (5, 9), (6, 17)] {
        let r = rodrigues_descendant(&p, n, m).poly;
        assert!(verify_ode(&build_ode_poly(&p, n, m), OdeInput::Poly(&r)).unwrap().exact);
        let roots = find_descendant_roots(&p, n, m, &RootFinderConfig::default()).unwrap();
        assert_eq!(roots.roots.len(), 3 * n as usize - m);
        assert!(hull_containment(&roots, &p, 1e-6));
        let mu = empirical_measure(&roots).unwrap();
        assert!((mu.total_mass - 1.0).abs() < 1e-12);
    }
}

#[test]
fn predicted_cauchy_lies_on_both_curves() {
    let p = ExactPoly::from_i64s(&[1, -3, 1, 2]);
    let a = rat(2, 3);
    let pf = PhaseField::new(&p, &a).unwrap();
    let sym = symbol_curve(&p, &a).unwrap();
    let sad = saddle_curve(&p, &a).unwrap();
    for z in [Complex64::new(2.5, 0.7), Complex64::new(-1.0, 2.0), Complex64::new(0.3, -3.1)] {
        let pr = predict(&pf, z).unwrap();
        assert!(curve_residual(&sad, z, pr.u) < 1e-12);
        assert!(curve_residual(&sym, z, pr.cauchy) < 1e-10);
        let c = to_symbol_coords(z, pr.u, 2.0 / 3.0, 3).unwrap();
        assert!((c - pr.cauchy).norm() < 1e-10 * (1.0 + c.norm()));
    }
}

#[test]
fn trace_agrees_with_quadratic_closed_form() {
    let p = ExactPoly::from_i64s(&[-1, 0, 1]);
    for (a, af) in [(rat(1, 3), 1.0 / 3.0), (int(1), 1.0), (rat(5, 3), 5.0 / 3.0)] {
        for z in [Complex64::new(0.4, 0.9), Complex64::new(-2.0, 0.1), Complex64::new(0.0, -1.5)] {
            let c = cauchy_pred(&p, &a, z).unwrap();
            let q = quadratic_cauchy(af, z).unwrap();
            assert!((c - q).norm() < 1e-10, "{} {} {}", z, c, q);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn descendant_roots_stay_in_hull(c in proptest::collection::vec(-6i64..7, 3..6), n in 1u32..6, k in 0usize..40) {
        let mut c = c;
        let d = c.len() - 1;
        if c[d] == 0 {
            c[d] = 1;
        }
        let p = ExactPoly::from_i64s(&c);
        let m = k % (n as usize * d);
        let roots = find_descendant_roots(&p, n, m, &RootFinderConfig::default()).unwrap();
        prop_assert_eq!(roots.roots.len(), n as usize * d - m);
        prop_assert!(hull_containment(&roots, &p, 1e-6));
    }
}
