mod common;

use common::*;
use gct::courant::{b_transform, bracket_axiom_residuals, courant_bracket, pairing, Twist};
use gct::frame::{FrameModel, PForm};
use num_complex::Complex64;
use proptest::prelude::*;

fn xyz() -> Vec<String> {
    ["x", "y", "t"].map(String::from).to_vec()
}

fn point(name: &str) -> Option<f64> {
    match name {
        "x" => Some(0.37),
        "y" => Some(-1.21),
        "t" => Some(0.813),
        _ => None,
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scalar_sum_commutes_and_product_distributes(a in raw_scalar(), b in raw_scalar(), c in raw_scalar()) {
        let v = xyz();
        let (a, b, c) = (scalar(&a, &v), scalar(&b, &v), scalar(&c, &v));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn differentiate_is_a_derivation(a in raw_scalar(), b in raw_scalar()) {
        let v = xyz();
        let (a, b) = (scalar(&a, &v), scalar(&b, &v));
        for var in &v {
            let lhs = (&a * &b).differentiate(var);
            let rhs = &(&a.differentiate(var) * &b) + &(&a * &b.differentiate(var));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn evaluate_commutes_with_arithmetic(a in raw_scalar(), b in raw_scalar()) {
        let v = xyz();
        let (a, b) = (scalar(&a, &v), scalar(&b, &v));
        let (ea, eb) = (a.evaluate(point).unwrap(), b.evaluate(point).unwrap());
        prop_assert!(close((&a * &b).evaluate(point).unwrap(), ea * eb));
        prop_assert!(close((&a + &b).evaluate(point).unwrap(), ea + eb));
    }

    #[test]
    fn derivative_along_a_period_integrates_to_zero(a in raw_scalar()) {
        let a = scalar_split(&a, &["x".into(), "y".into()], "t");
        prop_assert!(a.differentiate("t").integrate_unit_period("t").is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn d_squared_vanishes(f in raw_scalar(), a in raw_components(5)) {
        for m in models() {
            let df = m.differential(&scalar(&f, &vars(&m)));
            prop_assert!(m.exterior_derivative(&df).unwrap().is_zero(), "{}", m.name);
            let one = form(&m, 1, &a);
            let dd = m.exterior_derivative(&m.exterior_derivative(&one).unwrap()).unwrap();
            prop_assert!(dd.is_zero(), "{}", m.name);
        }
    }

    #[test]
    fn lie_bracket_satisfies_jacobi(x in raw_components(5), y in raw_components(5), z in raw_components(5)) {
        for m in models() {
            let (x, y, z) = (vfield(&m, &x), vfield(&m, &y), vfield(&m, &z));
            let br = |a, b| m.lie_bracket(a, b).unwrap();
            let sum = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).add(&br(&z, &br(&x, &y)));
            prop_assert!(sum.is_zero(), "{}", m.name);
        }
    }

    #[test]
    fn lie_derivative_is_a_derivation_of_wedge(x in raw_components(5), a in raw_components(5), b in raw_components(5)) {
        for m in models() {
            let x = vfield(&m, &x);
            let (a, b) = (form(&m, 1, &a), form(&m, 1, &b));
            let lhs = m.lie_derivative(&x, &m.wedge(&a, &b).unwrap()).unwrap();
            let rhs = m
                .wedge(&m.lie_derivative(&x, &a).unwrap(), &b)
                .unwrap()
                .add(&m.wedge(&a, &m.lie_derivative(&x, &b).unwrap()).unwrap());
            prop_assert_eq!(lhs, rhs, "{}", m.name);
        }
    }

    #[test]
    fn double_contraction_vanishes(x in raw_components(5), a in raw_components(10)) {
        for m in models() {
            let x = vfield(&m, &x);
            let a = form(&m, 2, &a);
            let twice = m.interior_product(&x, &m.interior_product(&x, &a).unwrap()).unwrap();
            prop_assert!(twice.is_zero(), "{}", m.name);
        }
    }

    #[test]
    fn pairing_is_symmetric_and_bilinear(s in raw_components(10), t in raw_components(10), u in raw_components(10), f in raw_scalar()) {
        for m in models() {
            let (s, t, u) = (section(&m, &s), section(&m, &t), section(&m, &u));
            let f = scalar(&f, &vars(&m));
            prop_assert_eq!(pairing(&s, &t).unwrap(), pairing(&t, &s).unwrap());
            let lhs = pairing(&s.scale(&f).add(&u), &t).unwrap();
            let rhs = &(&f * &pairing(&s, &t).unwrap()) + &pairing(&u, &t).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bracket_is_antisymmetric(s in raw_components(10), t in raw_components(10), h in raw_components(10)) {
        for m in models() {
            let (s, t) = (section(&m, &s), section(&m, &t));
            let h = closed_three_form(&m, &h);
            for twist in [None, h.as_ref()] {
                let st = courant_bracket(&m, &s, &t, twist).unwrap();
                let ts = courant_bracket(&m, &t, &s, twist).unwrap();
                prop_assert!(st.add(&ts).is_zero(), "{}", m.name);
            }
        }
    }

    #[test]
    fn b_transform_preserves_pairing(s in raw_components(10), t in raw_components(10), b in raw_components(10)) {
        for m in models() {
            let (s, t) = (section(&m, &s), section(&m, &t));
            let b = form(&m, 2, &b);
            let es = b_transform(&m, &b, &s).unwrap();
            let et = b_transform(&m, &b, &t).unwrap();
            prop_assert_eq!(pairing(&es, &et).unwrap(), pairing(&s, &t).unwrap());
        }
    }

    #[test]
    fn b_transform_intertwines_twisted_bracket(s in raw_components(10), t in raw_components(10), b in raw_components(10)) {
        for m in models() {
            let (s, t) = (section(&m, &s), section(&m, &t));
            let b = form(&m, 2, &b);
            let twist = Twist::from_b_field(&m, &b).unwrap();
            let lhs = courant_bracket(
                &m,
                &b_transform(&m, &b, &s).unwrap(),
                &b_transform(&m, &b, &t).unwrap(),
                None,
            )
            .unwrap();
            let rhs = b_transform(&m, &b, &courant_bracket(&m, &s, &t, Some(&twist)).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs, "{}", m.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn courant_axioms_hold_on_random_triples(s in raw_components(10), t in raw_components(10), u in raw_components(10), h in raw_components(10)) {
        for m in models() {
            let (s, t, u) = (section(&m, &s), section(&m, &t), section(&m, &u));
            let h = closed_three_form(&m, &h);
            let r = bracket_axiom_residuals(&m, &s, &t, &u, h.as_ref()).unwrap();
            prop_assert!(r.is_zero(), "{}: {:?}", m.name, r);
        }
    }
}

/// A closed 3-form: `d` of a random 2-form, which is closed on every model.
fn closed_three_form(m: &FrameModel, raw: &[RawScalar]) -> Option<Twist> {
    if m.dim() < 3 {
        return None;
    }
    let b: PForm = form(m, 2, raw);
    let h = m.exterior_derivative(&b).unwrap();
    Some(Twist::new(m, h).unwrap())
}
