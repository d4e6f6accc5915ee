//! Grassmannian Thirring model.

use super::backlund::{BacklundRuleSet, DefectForm};
use super::{eom_with_tilde, expr, ModelName, ModelSpec};
use crate::scalar::ParamValues;
use crate::symexpr::{FieldAtom, FieldId, RuleSet, SymExpr};

fn p(s: &str) -> SymExpr {
    expr(s, true)
}

const S: &str = "1/2*sqrt2*m^(1/2)*g^(1/2)";
const R: &str = "sqrt2*g^(1/2)*m^(-1/2)";

pub(super) fn build(params: ParamValues) -> ModelSpec {
    let rho_minus = "(psi2'*psi2 - psi1'*psi1)";
    let rho_plus = "(psi2'*psi2 + psi1'*psi1)";
    let u11 = p(&format!("1/2*i*g*{rho_minus} + 1/2*i*m*(lam^2 - lam^-2)"));
    let u22 = p(&format!("-1/2*i*g*{rho_minus} + 1/2*i*m*(lam^2 - lam^-2)"));
    let u33 = p("i*m*(lam^2 - lam^-2)");
    let q1 = p(&format!("-i*{S}*(lam*psi1 + lam^-1*psi2)"));
    let q2 = p(&format!("i*{S}*(lam*psi1' - lam^-1*psi2')"));
    let r1 = p(&format!("-i*{S}*(lam*psi1' + lam^-1*psi2')"));
    let r2 = p(&format!("i*{S}*(lam*psi1 - lam^-1*psi2)"));
    let a_term = p(&format!("1/2*i*g*{rho_plus}"));
    let half = p("1/2*i*m*(lam^2 + lam^-2)");
    let v11 = &half - &a_term;
    let v22 = &half + &a_term;
    let v33 = p("i*m*(lam^2 + lam^-2)");
    let z = SymExpr::zero;
    let u = vec![vec![u11, z(), q1.clone()], vec![z(), u22, q2.clone()], vec![r1.clone(), r2.clone(), u33]];
    let v = vec![vec![v11, z(), -&r2], vec![z(), v22, -&r1], vec![-&q2, -&q1, v33]];

    let f = |id| FieldAtom::field(id);
    let mut eom = RuleSet::new();
    eom.set_dt(f(FieldId::Psi1), p("psi1_x - i*m*psi2 - i*g*psi2'*psi2*psi1"));
    eom.set_dt(f(FieldId::Psi2), p("-psi2_x - i*m*psi1 - i*g*psi1'*psi1*psi2"));
    eom.set_dt(f(FieldId::Psi1).dag(), p("psi1'_x + i*m*psi2' + i*g*psi1'*psi2'*psi2"));
    eom.set_dt(f(FieldId::Psi2).dag(), p("-psi2'_x + i*m*psi1' + i*g*psi2'*psi1'*psi1"));
    let eom = eom_with_tilde(&eom);

    let c = "1/2*i*g*a*m^-1";
    let k = vec![
        vec![p(&format!("(lam - i*a^-1*lam^-1) - {c}*(lam + i*a^-1*lam^-1)*X'*X")), z(), p(&format!("{R}*X"))],
        vec![z(), p(&format!("(lam - i*a^-1*lam^-1) + {c}*(lam + i*a^-1*lam^-1)*X'*X")), p(&format!("-{R}*X'"))],
        vec![p(&format!("{R}*X'")), p(&format!("-{R}*X")), p("-lam - i*a^-1*lam^-1")],
    ];

    let x = FieldAtom::new(FieldId::X, true);
    let dens_t = "(~psi1'*~psi1 + psi1'*psi1 + ~psi2'*~psi2 + psi2'*psi2)";
    let dens_x = "(~psi1'*~psi1 + psi1'*psi1 - ~psi2'*~psi2 - psi2'*psi2)";
    let mut rules = RuleSet::new();
    rules.set_dt(x, p(&format!("1/2*m*a^-1*(psi1 - ~psi1) - 1/2*i*m*(psi2 + ~psi2) - 1/4*i*g*{dens_t}*X")));
    rules.set_dt(x.dag(), p(&format!("1/2*m*a^-1*(psi1' - ~psi1') + 1/2*i*m*(psi2' + ~psi2') + 1/4*i*g*{dens_t}*X'")));
    rules.set_dx(x, p(&format!("1/2*m*a^-1*(psi1 - ~psi1) + 1/2*i*m*(psi2 + ~psi2) - 1/4*i*g*{dens_x}*X")));
    rules.set_dx(x.dag(), p(&format!("1/2*m*a^-1*(psi1' - ~psi1') - 1/2*i*m*(psi2' + ~psi2') + 1/4*i*g*{dens_x}*X'")));

    let mut elimination = std::collections::BTreeMap::new();
    elimination.insert(f(FieldId::Psi1).til(), p(&format!("X - psi1 + {c}*psi1*X'*X")));
    elimination.insert(f(FieldId::Psi1).dag().til(), p(&format!("X' - psi1' - {c}*psi1'*X'*X")));
    elimination.insert(f(FieldId::Psi2).til(), p(&format!("psi2 + i*a*X + {c}*X'*X*psi2")));
    elimination.insert(f(FieldId::Psi2).dag().til(), p(&format!("psi2' - i*a*X' - {c}*X'*X*psi2'")));

    let forms = [
        (x, 1, format!("~psi1 + psi1 + {c}*~psi1*X'*X")),
        (x, 2, "i*a^-1*(psi2 - ~psi2) - 1/2*g*m^-1*X'*X*psi2".to_string()),
        (x.dag(), 1, format!("~psi1' + psi1' - {c}*~psi1'*X'*X")),
        (x.dag(), 2, "-i*a^-1*(psi2' - ~psi2') - 1/2*g*m^-1*X'*X*psi2'".to_string()),
    ];
    let algebraic = forms.iter().map(|(t, _, s)| &SymExpr::atom(*t) - &p(s)).collect();
    let defect_forms = forms.iter().map(|(t, k, s)| DefectForm { target: *t, partner: *k, form: p(s) }).collect();

    ModelSpec {
        name: ModelName::Gt,
        size: 3,
        params,
        u,
        v,
        eom,
        k,
        backlund: BacklundRuleSet { algebraic, rules, elimination, angle: None, defect_forms },
        odd_index: vec![false, false, true],
        series_start: 1,
        odd_x: true,
    }
}
