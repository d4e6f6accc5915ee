use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::calculus::*;
use super::*;
use crate::scalar::{ParamValues, Scalar};

fn f(id: FieldId) -> FieldAtom {
    FieldAtom::field(id)
}
fn a(x: FieldAtom) -> SymExpr {
    SymExpr::atom(x)
}
fn p(s: &str) -> SymExpr {
    parse_expr(s).unwrap()
}

#[test]
fn odd_merge_and_nilpotency() {
    let psi1 = f(FieldId::Psi1);
    let psi1d = psi1.dag();
    let e = &(&a(psi1d) * &a(psi1)) + &(&a(psi1d) * &a(psi1));
    assert_eq!(e, (&a(psi1d) * &a(psi1)).scale_ratio(2, 1));
    assert!((&a(psi1) * &a(psi1)).is_zero());
    let psi2 = f(FieldId::Psi2);
    assert_eq!(&a(psi2) * &a(psi1), -(&a(psi1) * &a(psi2)));
}

#[test]
fn leibniz_examples() {
    let r = RuleSet::new();
    let phi1 = f(FieldId::Phi1);
    let phi2 = f(FieldId::Phi2);
    let got = d_x(&(&a(phi1) * &a(phi2)), &r);
    let want = &(&a(phi1.dx(1)) * &a(phi2)) + &(&a(phi1) * &a(phi2.dx(1)));
    assert_eq!(got, want);

    let phi = f(FieldId::Phi);
    let ex = SymExpr::exp_iv(phi, 1, 2);
    assert_eq!(d_x(&ex, &r), &SymExpr::imag(1, 2) * &(&a(phi.dx(1)) * &ex));

    let psi1 = f(FieldId::Psi1);
    let bil = &a(psi1.dag()) * &a(psi1);
    let want = &(&a(psi1.dag().dx(1)) * &a(psi1)) + &(&a(psi1.dag()) * &a(psi1.dx(1)));
    assert_eq!(d_x(&bil, &r), want);
}

#[test]
fn laurent_examples() {
    let e = p("lam^2*phi1 + lam^-2*phi2");
    assert_eq!(e.laurent_coeff(2), p("phi1"));
    let m = p("m*(lam^2 - lam^-2)");
    assert!(m.laurent_coeff(0).is_zero());
}

#[test]
fn formal_time_derivative_resolves() {
    let phi1 = f(FieldId::Phi1);
    let rules = RuleSet::new().with_dt(phi1, p("phi1_x - i*m*phi2"));
    let e = p("phi1_x");
    assert_eq!(d_t(&e, &rules).unwrap(), p("phi1_xx - i*m*phi2_x"));
    assert!(d_t(&SymExpr::zero(), &rules).unwrap().is_zero());
    assert!(matches!(d_t(&p("phi2"), &rules), Err(crate::Error::UnresolvedSymbol(_))));
}

#[test]
fn text_round_trip() {
    let cases = [
        "1/2*i*m^(1/2)*g^(-1/2)*lam^-3*exp(i*(1/2*phi - 1/2*~phi))*phi_x",
        "(1/2 - 3*i)*sqrt2*X'*phi1",
        "dt(~psi2'_xx)*G21_1 + slot1_2^2",
        "-sec2a*exp(i*(2*alpha))",
    ];
    for c in cases {
        let e = p(c);
        assert_eq!(p(&e.to_string()), e, "{}", c);
    }
    let e = parse_expr_with("X*psi1 + psi1*X", true).unwrap();
    assert!(e.is_zero());
}

#[test]
fn json_round_trip() {
    let e = p("1/2*i*m^(1/2)*lam^-1*exp(i*(phi))*phi_x - 3*X'*X");
    let j = serde_json::to_string(&e.to_json()).unwrap();
    let back: JsonExpr = serde_json::from_str(&j).unwrap();
    assert_eq!(SymExpr::from_json(&back, false).unwrap(), e);
}

#[test]
fn total_derivatives() {
    assert!(calculus::is_total_derivative(&p("phi1'_x*phi1 + phi1'*phi1_x")));
    assert!(!calculus::is_total_derivative(&p("phi1'*phi1_x")));
    assert!(calculus::equal_mod_total_derivative(&p("psi1*psi1'_x"), &p("-psi1_x*psi1'")));
    assert_eq!(calculus::ibp_normal(&p("phi1*phi1'_x")), p("-phi1_x*phi1'"));
    assert_eq!(calculus::ibp_normal(&p("phi*phi_xx")), p("-phi_x^2"));
}

#[test]
fn unit_inverse_and_sqrt() {
    let e = p("-4*m^2*lam^2*exp(i*(phi))");
    let r = e.sqrt_unit().unwrap();
    assert_eq!(&r * &r, e);
    let inv = e.invert_unit().unwrap();
    assert!((&inv * &e).is_scalar_one());
}

fn random_expr(rng: &mut StdRng, atoms: &[FieldAtom], terms: usize) -> SymExpr {
    let mut e = SymExpr::zero();
    for _ in 0..terms {
        let mut t =
            SymExpr::scalar(Scalar::gauss((rng.gen_range(-3..4), rng.gen_range(1..4)), (rng.gen_range(-3..4), 1)));
        for _ in 0..rng.gen_range(0..4) {
            t = &t * &a(atoms[rng.gen_range(0..atoms.len())]);
        }
        if rng.gen_bool(0.3) {
            t = &t * &SymExpr::exp_iv(f(FieldId::Phi), rng.gen_range(-2..3), 2);
        }
        e += &t.times_lambda(rng.gen_range(-2..3));
    }
    e
}

fn pool() -> Vec<FieldAtom> {
    let psi1 = f(FieldId::Psi1);
    let psi2 = f(FieldId::Psi2);
    vec![
        psi1,
        psi1.dag(),
        psi2.dx(1),
        psi2.dag(),
        f(FieldId::Phi1),
        f(FieldId::Phi1).dag().dx(2),
        f(FieldId::Phi),
        FieldAtom::new(FieldId::X, true).til(),
    ]
}

fn close(x: &crate::GradedElement, y: &crate::GradedElement) -> bool {
    (x - y).max_abs() < 1e-12 * (1.0 + x.max_abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalize_idempotent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_expr(&mut rng, &pool(), 6);
        prop_assert_eq!(e.normalize(), e.clone());
        prop_assert_eq!(e.normalize().normalize(), e.normalize());
    }

    #[test]
    fn d_x_is_even_derivation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = random_expr(&mut rng, &pool(), 4);
        let y = random_expr(&mut rng, &pool(), 4);
        let r = RuleSet::new();
        let lhs = d_x(&(&x * &y), &r);
        let rhs = &(&d_x(&x, &r) * &y) + &(&x * &d_x(&y, &r));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_homomorphic(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = random_expr(&mut rng, &pool(), 4);
        let y = random_expr(&mut rng, &pool(), 4);
        let mut atoms = x.atom_set();
        atoms.extend(y.atom_set());
        let asg = Assignment::random(8, atoms, ParamValues::default(), &mut rng);
        let ex = eval(&x, &asg).unwrap();
        let ey = eval(&y, &asg).unwrap();
        prop_assert!(close(&eval(&(&x * &y), &asg).unwrap(), &(&ex * &ey)));
        prop_assert!(close(&eval(&x.normalize(), &asg).unwrap(), &ex));
    }

    #[test]
    fn laurent_reconstruction(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_expr(&mut rng, &pool(), 6);
        let mut r = SymExpr::zero();
        if let Some((lo, hi)) = e.lambda_range() {
            for k in lo..=hi {
                r += &e.laurent_coeff(k).times_lambda(k);
            }
        }
        prop_assert_eq!(r, e);
    }

    #[test]
    fn text_form_round_trips(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_expr(&mut rng, &pool(), 5);
        let back = parse_expr_with(&e.to_string(), true).unwrap();
        prop_assert_eq!(back, e);
    }
}

#[test]
fn exponential_evaluation_matches_complex_exp() {
    let mut rng = StdRng::seed_from_u64(7);
    let phi = f(FieldId::Phi);
    let mut asg = Assignment::new(4, ParamValues::default());
    asg.set(phi, crate::GradedElement::scalar(4, Complex64::new(0.3, 0.0)));
    let _ = rng.gen::<u8>();
    let v = eval(&SymExpr::exp_iv(phi, 1, 1), &asg).unwrap();
    assert!((v.body() - Complex64::new(0.0, 0.3).exp()).norm() < 1e-15);
}
