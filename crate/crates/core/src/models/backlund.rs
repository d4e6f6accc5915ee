//! Bäcklund relations at the defect and the reduction that decides whether
//! an expression vanishes on the defect manifold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::rat;
use crate::symexpr::{FieldAtom, Mono, RuleSet, SymExpr};

/// Pass budget for rewriting to a fixed point.
pub const REWRITE_BUDGET: usize = 64;

/// One way of writing the defect field in terms of bulk fields, used when
/// the defect field multiplies a bulk field of the given index.
#[derive(Clone, Debug)]
pub struct DefectForm {
    pub target: FieldAtom,
    pub partner: u8,
    pub form: SymExpr,
}

/// `w^4 = shift * w^2 + 1` for `w = e^{i alpha}`.
#[derive(Clone, Debug)]
pub struct AngleRelation {
    pub shift: SymExpr,
}

#[derive(Clone, Debug, Default)]
pub struct BacklundRuleSet {
    /// Identities that vanish on the defect manifold.
    pub algebraic: Vec<SymExpr>,
    /// Time and space derivatives of the defect field and of the angle.
    pub rules: RuleSet,
    /// Boundary values of the left fields in terms of free variables.
    pub elimination: BTreeMap<FieldAtom, SymExpr>,
    pub angle: Option<AngleRelation>,
    pub defect_forms: Vec<DefectForm>,
}

impl BacklundRuleSet {
    /// Canonical representative on the defect manifold: left fields are
    /// eliminated, `sec 2 alpha` cleared and powers of `e^{i alpha}` reduced
    /// to `0..=3`. Zero exactly when the input vanishes there.
    pub fn reduce(&self, e: &SymExpr) -> Result<SymExpr> {
        let mut cur = e
            .substitute_fixpoint(&|a| self.elimination.get(a).cloned(), REWRITE_BUDGET)
            .ok_or_else(|| Error::RewriteBudget { budget: REWRITE_BUDGET, partial: e.to_string() })?;
        if let Some(rel) = &self.angle {
            cur = clear_secant(&cur);
            cur = reduce_angle(&cur, &rel.shift)?;
        }
        Ok(cur)
    }

    pub fn vanishes(&self, e: &SymExpr) -> Result<bool> {
        Ok(self.reduce(e)?.is_zero())
    }
}

/// `cos 2 alpha` as exponentials.
pub fn cos_two_alpha() -> SymExpr {
    let a = FieldAtom::alpha();
    (&SymExpr::exp_iv(a, 2, 1) + &SymExpr::exp_iv(a, -2, 1)).scale_ratio(1, 2)
}

/// `sin 2 alpha` as exponentials.
pub fn sin_two_alpha() -> SymExpr {
    let a = FieldAtom::alpha();
    (&SymExpr::exp_iv(a, 2, 1) - &SymExpr::exp_iv(a, -2, 1)).scale(&crate::Scalar::imag(-1, 2))
}

/// Multiply through by the highest power of `cos 2 alpha` so that no
/// secant remains.
fn clear_secant(e: &SymExpr) -> SymExpr {
    let sec = FieldAtom::sec_two_alpha();
    let p = e.degree_in(&sec);
    if p == 0 {
        return e.clone();
    }
    let cos = cos_two_alpha();
    let mut out = SymExpr::zero();
    for (m, c) in e.terms() {
        let k = m.atoms.iter().filter(|a| **a == sec).count();
        let mut m2 = m.clone();
        m2.atoms.retain(|a| *a != sec);
        out += &(&SymExpr::from_mono(m2, c.clone()) * &cos.pow((p - k) as u32));
    }
    out
}

fn alpha_power(m: &Mono) -> Option<i64> {
    let alpha = FieldAtom::alpha();
    match m.expo.iter().find(|(v, _)| *v == alpha) {
        None => Some(0),
        Some((_, r)) if r.is_integer() => num_traits::ToPrimitive::to_i64(&r.to_integer()),
        _ => None,
    }
}

fn with_alpha_power(m: &Mono, k: i64) -> Mono {
    let alpha = FieldAtom::alpha();
    let mut m2 = m.clone();
    m2.expo.retain(|(v, _)| *v != alpha);
    if k != 0 {
        m2.expo.push((alpha, rat(k, 1)));
        m2.expo.sort();
    }
    m2
}

fn reduce_angle(e: &SymExpr, shift: &SymExpr) -> Result<SymExpr> {
    let mut cur = e.clone();
    for _ in 0..4 * REWRITE_BUDGET {
        let mut next = SymExpr::zero();
        let mut changed = false;
        for (m, c) in cur.terms() {
            let k =
                alpha_power(m).ok_or_else(|| Error::Derivation(format!("fractional multiple of alpha in {}", cur)))?;
            if (0..4).contains(&k) {
                next.add_term(m.clone(), c.clone());
                continue;
            }
            changed = true;
            let (hi, lo) = if k < 0 { (k + 4, k + 2) } else { (k - 2, k - 4) };
            let a = SymExpr::from_mono(with_alpha_power(m, hi), c.clone());
            let b = SymExpr::from_mono(with_alpha_power(m, lo), c.clone());
            if k < 0 {
                // w^k = w^{k+4} - shift w^{k+2}
                next += &a;
                next -= &(&b * shift);
            } else {
                // w^k = shift w^{k-2} + w^{k-4}
                next += &(&a * shift);
                next += &b;
            }
        }
        cur = next;
        if !changed {
            return Ok(cur);
        }
    }
    Err(Error::RewriteBudget { budget: 4 * REWRITE_BUDGET, partial: cur.to_string() })
}

/// Serializable view of a rule set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleTable {
    pub dt: BTreeMap<String, String>,
    pub dx: BTreeMap<String, String>,
}

impl RuleTable {
    pub fn from_rules(r: &RuleSet) -> Self {
        RuleTable {
            dt: r.dt.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            dx: r.dx.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}
