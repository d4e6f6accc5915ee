use super::*;

fn model(n: ModelName) -> ModelSpec {
    build_model(n, ParamValues::default()).unwrap()
}

#[test]
fn zero_curvature_all_models() {
    for n in ModelName::ALL {
        let s = model(n);
        if let Err(e) = check_zero_curvature(&s) {
            panic!("{}", e);
        }
    }
}

#[test]
fn defect_gauge_all_models() {
    for n in ModelName::ALL {
        let s = model(n);
        if let Err(e) = check_defect_gauge(&s) {
            panic!("{}", e);
        }
    }
}

#[test]
fn corrupted_defect_matrix_is_rejected() {
    for n in ModelName::ALL {
        let s = inject_fault(&model(n), Fault::KSign);
        assert!(check_defect_gauge(&s).is_err(), "{} fault went unnoticed", n);
    }
}

#[test]
fn wrong_backlund_sign_is_rejected() {
    let mut s = model(ModelName::Bt);
    let x = s.defect_atom();
    let r = s.backlund.rules.dt[&x].clone();
    s.backlund.rules.set_dt(x, -r);
    assert!(check_defect_gauge(&s).is_err());
    let mut s = model(ModelName::Sg);
    let key = *s.backlund.elimination.keys().next().unwrap();
    let r = s.backlund.elimination[&key].clone();
    s.backlund.elimination.insert(key, &r + &SymExpr::atom(FieldAtom::field(FieldId::Phi)));
    assert!(check_defect_gauge(&s).is_err());
}

#[test]
fn printed_entries() {
    let bt = model(ModelName::Bt);
    assert_eq!(bt.u[0][0], expr("1/4*i*(g*(phi2'*phi2 - phi1'*phi1) - m*(lam^2 - lam^-2))", false));
    let gt = model(ModelName::Gt);
    assert_eq!(gt.u[2][2], expr("i*m*lam^2 - i*m*lam^-2", true));
    let sg = model(ModelName::Sg);
    assert_eq!(sg.v[0][0], expr("-1/4*i*phi_x", false));
}

#[test]
fn lambda_window() {
    for n in ModelName::ALL {
        let s = model(n);
        for m in [&s.u, &s.v] {
            for e in m.iter().flatten() {
                if let Some((lo, hi)) = e.lambda_range() {
                    assert!(lo >= -2 && hi <= 2);
                }
            }
        }
    }
}

#[test]
fn grading() {
    let gt = model(ModelName::Gt);
    for i in 0..3 {
        for j in 0..3 {
            let odd = gt.odd_index[i] != gt.odd_index[j];
            for m in [&gt.u, &gt.v] {
                assert_eq!(m[i][j].parity_odd(), Some(odd), "entry {} {}", i, j);
            }
        }
    }
    for n in [ModelName::Bt, ModelName::Sg] {
        let s = model(n);
        for e in s.u.iter().chain(s.v.iter()).chain(s.k.iter()).flatten() {
            assert!(e.atom_set().iter().all(|a| !a.odd));
        }
    }
}

/// Conjugation with `lambda` real swaps the off-diagonal functions.
#[test]
fn hermitian_pairing() {
    let bt = model(ModelName::Bt);
    assert_eq!(bt.u[0][1].conjugate(), bt.u[1][0]);
    assert_eq!(bt.v[0][1].conjugate(), bt.v[1][0]);
    assert_eq!(bt.u[0][0].conjugate(), -&bt.u[0][0]);
}

#[test]
fn invalid_params() {
    let mut p = ParamValues { a: 0.0, ..ParamValues::default() };
    assert!(build_model(ModelName::Bt, p).is_err());
    assert!(build_model(ModelName::Sg, p).is_ok());
    p.sigma = 0.0;
    assert!(build_model(ModelName::Sg, p).is_err());
    p = ParamValues::default();
    p.m = -1.0;
    assert!(build_model(ModelName::Gt, p).is_err());
}

#[test]
fn json_round_trip() {
    for n in ModelName::ALL {
        let s = model(n);
        let j = s.to_json();
        for (row, jrow) in s.k.iter().zip(&j.k) {
            for (e, je) in row.iter().zip(jrow) {
                assert_eq!(&SymExpr::from_json(je, s.odd_x).unwrap(), e);
            }
        }
    }
}
