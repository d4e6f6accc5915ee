//! Bosonic Thirring model.

use super::backlund::{AngleRelation, BacklundRuleSet, DefectForm};
use super::{angle_rules, eom_with_tilde, expr, ModelName, ModelSpec};
use crate::scalar::ParamValues;
use crate::symexpr::{FieldAtom, FieldId, RuleSet, SymExpr};

fn p(s: &str) -> SymExpr {
    expr(s, false)
}

pub(super) fn build(params: ParamValues) -> ModelSpec {
    let u11 = p("1/4*i*g*(phi2'*phi2 - phi1'*phi1) - 1/4*i*m*(lam^2 - lam^-2)");
    let v11 = p("-1/4*i*g*(phi2'*phi2 + phi1'*phi1) - 1/4*i*m*(lam^2 + lam^-2)");
    let q = p("1/2*i*m^(1/2)*g^(1/2)*(lam*phi1 + lam^-1*phi2)");
    let r = p("-1/2*i*m^(1/2)*g^(1/2)*(lam*phi1' + lam^-1*phi2')");
    let b = p("1/2*i*m^(1/2)*g^(1/2)*(lam*phi1 - lam^-1*phi2)");
    let c = p("-1/2*i*m^(1/2)*g^(1/2)*(lam*phi1' - lam^-1*phi2')");
    let u = vec![vec![u11.clone(), q], vec![r, -u11]];
    let v = vec![vec![v11.clone(), b], vec![c, -v11]];

    let f = |id| FieldAtom::field(id);
    let mut eom = RuleSet::new();
    eom.set_dt(f(FieldId::Phi1), p("phi1_x - i*m*phi2 - i*g*phi2'*phi2*phi1"));
    eom.set_dt(f(FieldId::Phi2), p("-phi2_x - i*m*phi1 - i*g*phi1'*phi1*phi2"));
    eom.set_dt(f(FieldId::Phi1).dag(), p("phi1'_x + i*m*phi2' + i*g*phi1'*phi2'*phi2"));
    eom.set_dt(f(FieldId::Phi2).dag(), p("-phi2'_x + i*m*phi1' + i*g*phi2'*phi1'*phi1"));
    let eom = eom_with_tilde(&eom);

    let k = vec![
        vec![p("-m^(1/2)*g^(-1/2)*(lam*exp(-i*alpha) - i*a^-1*lam^-1*exp(i*alpha))"), p("X")],
        vec![p("-X'"), p("m^(1/2)*g^(-1/2)*(lam*exp(i*alpha) + i*a^-1*lam^-1*exp(-i*alpha))")],
    ];

    let x = FieldAtom::new(FieldId::X, false);
    let mut rules = RuleSet::new();
    rules.set_dt(
        x,
        p("1/2*m*a^-1*(phi1*exp(i*alpha) - ~phi1*exp(-i*alpha)) \
           - 1/2*i*m*(~phi2*exp(i*alpha) + phi2*exp(-i*alpha)) \
           - 1/4*i*g*(~phi1'*~phi1 + phi1'*phi1 + ~phi2'*~phi2 + phi2'*phi2)*X"),
    );
    rules.set_dt(
        x.dag(),
        p("1/2*m*a^-1*(phi1'*exp(-i*alpha) - ~phi1'*exp(i*alpha)) \
           + 1/2*i*m*(~phi2'*exp(-i*alpha) + phi2'*exp(i*alpha)) \
           + 1/4*i*g*(~phi1'*~phi1 + phi1'*phi1 + ~phi2'*~phi2 + phi2'*phi2)*X'"),
    );
    rules.set_dx(
        x,
        p("1/2*m*a^-1*(phi1*exp(i*alpha) - ~phi1*exp(-i*alpha)) \
           + 1/2*i*m*(~phi2*exp(i*alpha) + phi2*exp(-i*alpha)) \
           - 1/4*i*g*(~phi1'*~phi1 + phi1'*phi1 - ~phi2'*~phi2 - phi2'*phi2)*X"),
    );
    rules.set_dx(
        x.dag(),
        p("1/2*m*a^-1*(phi1'*exp(-i*alpha) - ~phi1'*exp(i*alpha)) \
           - 1/2*i*m*(~phi2'*exp(-i*alpha) + phi2'*exp(i*alpha)) \
           + 1/4*i*g*(~phi1'*~phi1 + phi1'*phi1 - ~phi2'*~phi2 - phi2'*phi2)*X'"),
    );
    let rules = angle_rules(rules, x);

    let mut elimination = std::collections::BTreeMap::new();
    elimination.insert(f(FieldId::Phi1).til(), p("X*exp(-i*alpha) - phi1*exp(-2*i*alpha)"));
    elimination.insert(f(FieldId::Phi1).dag().til(), p("X'*exp(i*alpha) - phi1'*exp(2*i*alpha)"));
    elimination.insert(f(FieldId::Phi2).til(), p("phi2*exp(2*i*alpha) + i*a*X*exp(i*alpha)"));
    elimination.insert(f(FieldId::Phi2).dag().til(), p("phi2'*exp(-2*i*alpha) - i*a*X'*exp(-i*alpha)"));

    let algebraic = vec![
        p("X - ~phi1*exp(i*alpha) - phi1*exp(-i*alpha)"),
        p("X - i*a^-1*(phi2*exp(i*alpha) - ~phi2*exp(-i*alpha))"),
        p("X' - ~phi1'*exp(-i*alpha) - phi1'*exp(i*alpha)"),
        p("X' + i*a^-1*(phi2'*exp(-i*alpha) - ~phi2'*exp(i*alpha))"),
        &super::backlund::sin_two_alpha() - &p("1/2*g*a*m^-1*X'*X"),
    ];

    let defect_forms = vec![
        DefectForm { target: x, partner: 1, form: p("~phi1*exp(i*alpha) + phi1*exp(-i*alpha)") },
        DefectForm { target: x, partner: 2, form: p("i*a^-1*(phi2*exp(i*alpha) - ~phi2*exp(-i*alpha))") },
        DefectForm { target: x.dag(), partner: 1, form: p("~phi1'*exp(-i*alpha) + phi1'*exp(i*alpha)") },
        DefectForm { target: x.dag(), partner: 2, form: p("-i*a^-1*(phi2'*exp(-i*alpha) - ~phi2'*exp(i*alpha))") },
    ];

    ModelSpec {
        name: ModelName::Bt,
        size: 2,
        params,
        u,
        v,
        eom,
        k,
        backlund: BacklundRuleSet {
            algebraic,
            rules,
            elimination,
            angle: Some(AngleRelation { shift: p("i*g*a*m^-1*X'*X") }),
            defect_forms,
        },
        odd_index: vec![false, false],
        series_start: 0,
        odd_x: false,
    }
}
