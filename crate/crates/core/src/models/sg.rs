//! sine-Gordon model with a type-I defect.

use super::backlund::BacklundRuleSet;
use super::{eom_with_tilde, expr, ModelName, ModelSpec};
use crate::scalar::ParamValues;
use crate::symexpr::{FieldAtom, FieldId, RuleSet, SymExpr};

fn p(s: &str) -> SymExpr {
    expr(s, false)
}

const SUM: &str = "(1/2*~phi + 1/2*phi)";
const DIFF: &str = "(1/2*~phi - 1/2*phi)";

/// Boundary values of `~phi_t` and `~phi_x`.
fn defect_conditions() -> (SymExpr, SymExpr) {
    let bulk = format!("1/2*i*m*sigma*(exp(-i*{SUM}) - exp(i*{SUM}))");
    let jump = format!("1/2*i*m*sigma^-1*(exp(i*{DIFF}) - exp(-i*{DIFF}))");
    (p(&format!("phi_x + {bulk} + {jump}")), p(&format!("phit + {bulk} - {jump}")))
}

pub(super) fn build(params: ParamValues) -> ModelSpec {
    let u = vec![
        vec![p("-1/4*i*phit"), p("-1/4*m*(lam*exp(1/2*i*phi) - lam^-1*exp(-1/2*i*phi))")],
        vec![p("1/4*m*(lam*exp(-1/2*i*phi) - lam^-1*exp(1/2*i*phi))"), p("1/4*i*phit")],
    ];
    let v = vec![
        vec![p("-1/4*i*phi_x"), p("-1/4*m*(lam*exp(1/2*i*phi) + lam^-1*exp(-1/2*i*phi))")],
        vec![p("1/4*m*(lam*exp(-1/2*i*phi) + lam^-1*exp(1/2*i*phi))"), p("1/4*i*phi_x")],
    ];

    let phi = FieldAtom::field(FieldId::Phi);
    let phit = FieldAtom::field(FieldId::PhiT);
    let mut eom = RuleSet::new();
    eom.set_dt(phi, p("phit"));
    eom.set_dt(phit, p("phi_xx + 1/2*i*m^2*(exp(i*phi) - exp(-i*phi))"));
    let eom = eom_with_tilde(&eom);

    let k = vec![
        vec![p("exp(i*(1/4*~phi - 1/4*phi))"), p("sigma*lam^-1*exp(-i*(1/4*~phi + 1/4*phi))")],
        vec![p("-sigma*lam^-1*exp(i*(1/4*~phi + 1/4*phi))"), p("exp(-i*(1/4*~phi - 1/4*phi))")],
    ];

    let (tt, tx) = defect_conditions();
    let mut elimination = std::collections::BTreeMap::new();
    elimination.insert(phit.til(), tt.clone());
    elimination.insert(phi.til().with_deriv(1), tx.clone());
    let algebraic = vec![&SymExpr::atom(phit.til()) - &tt, &SymExpr::atom(phi.til().with_deriv(1)) - &tx];

    ModelSpec {
        name: ModelName::Sg,
        size: 2,
        params,
        u,
        v,
        eom,
        k,
        backlund: BacklundRuleSet {
            algebraic,
            rules: RuleSet::new(),
            elimination,
            angle: None,
            defect_forms: Vec::new(),
        },
        odd_index: vec![false, false],
        series_start: 0,
        odd_x: false,
    }
}
