//! Conserved densities, their fluxes, and the physical charge combinations.

use std::collections::BTreeMap;

use super::{Branch, RiccatiSolution};
use crate::error::{Error, Result};
use crate::models::{ModelName, ModelSpec};
use crate::symexpr::calculus::equal_mod_total_derivative;
use crate::symexpr::{d_t, d_x, parse_expr, RuleSet, SymExpr};

#[derive(Clone, Debug)]
pub struct ChargeDensity {
    pub model: ModelName,
    pub j: usize,
    pub branch: Branch,
    pub order: i32,
    pub density: SymExpr,
    pub flux: SymExpr,
}

/// Densities keyed by `(j, branch, order)`.
pub type DensityTable = BTreeMap<(usize, Branch, i32), ChargeDensity>;

/// `d_t density - d_x flux` on shell.
pub fn conservation_residual(model: &ModelSpec, rules: &RuleSet, cd: &ChargeDensity) -> Result<SymExpr> {
    let all = model.eom.merged(rules);
    Ok(&d_t(&cd.density, &all)? - &d_x(&cd.flux, &all))
}

/// Order-`k` density and flux of column `j`, checked for conservation.
pub fn conserved_density(model: &ModelSpec, sol: &RiccatiSolution, k: i32) -> Result<ChargeDensity> {
    let upto = sol.known_order();
    if k + 2 > upto {
        return Err(Error::Missing(format!("order {} density needs Gamma through order {}, have {}", k, k + 2, upto)));
    }
    let j = sol.j;
    let gen = |a: &crate::models::Matrix| {
        let mut acc = a[j - 1][j - 1].clone();
        for i in (1..=model.size).filter(|&i| i != j) {
            acc += &(&a[j - 1][i - 1] * &sol.series(i, upto));
        }
        acc.laurent_coeff(sol.branch.power(k)).drop_constants()
    };
    let cd = ChargeDensity {
        model: model.name,
        j,
        branch: sol.branch,
        order: k,
        density: gen(&model.u),
        flux: gen(&model.v),
    };
    let r = conservation_residual(model, &sol.aux_rules(), &cd)?;
    if !r.is_zero() {
        return Err(Error::Derivation(format!(
            "density I_{}^({}) [{}] is not conserved: residual {}",
            j, k, sol.branch, r
        )));
    }
    Ok(cd)
}

/// Number, energy and momentum densities (number absent for sine-Gordon).
#[derive(Clone, Debug, PartialEq)]
pub struct Charges {
    pub n: Option<SymExpr>,
    pub e: SymExpr,
    pub p: SymExpr,
}

fn c(s: &str) -> SymExpr {
    parse_expr(s).expect("charge prefactor")
}

/// Linear combinations of the generating-function coefficients that give
/// the physical charges. `get(j, branch, order)` supplies the pieces; the
/// same combinations apply to bulk densities and to defect terms.
pub fn combine_charges(model: ModelName, get: &dyn Fn(usize, Branch, i32) -> Option<SymExpr>) -> Result<Charges> {
    let need = |j: usize, b: Branch, k: i32| {
        get(j, b, k).ok_or_else(|| Error::Missing(format!("component j={} {} order {}", j, b, k)))
    };
    let (inf, zero) = (Branch::Infinity, Branch::Zero);
    match model {
        ModelName::Bt => {
            let diff = |b, k| -> Result<SymExpr> { Ok(&need(1, b, k)? - &need(2, b, k)?) };
            let n = &c("-i*g^-1") * &(&diff(inf, 0)? - &diff(zero, 0)?);
            let pre = c("1/2*i*m*g^-1");
            let e = &pre * &(&diff(inf, 2)? - &diff(zero, 2)?);
            let p = &pre * &(&diff(inf, 2)? + &diff(zero, 2)?);
            Ok(Charges { n: Some(n), e, p })
        }
        ModelName::Gt => {
            let low = |b| -> Result<SymExpr> { Ok(&(&need(1, b, 0)? - &need(2, b, 0)?) - &need(3, b, 0)?) };
            let high = |b| -> Result<SymExpr> { Ok(&(&need(1, b, 2)? + &need(2, b, 2)?) + &need(3, b, 2)?) };
            let n = &c("-1/2*i*g^-1") * &(&low(inf)? - &low(zero)?);
            let pre = c("-1/8*i*m*g^-1");
            let e = &pre * &(&high(inf)? - &high(zero)?);
            let p = &pre * &(&high(inf)? + &high(zero)?);
            Ok(Charges { n: Some(n), e, p })
        }
        ModelName::Sg => {
            let diff = |b| -> Result<SymExpr> { Ok(&need(1, b, 1)? - &need(2, b, 1)?) };
            let pre = c("i*m");
            let e = &pre * &(&diff(inf)? - &diff(zero)?);
            let p = &pre * &(&diff(inf)? + &diff(zero)?);
            Ok(Charges { n: None, e, p })
        }
    }
}

#[derive(Clone, Debug)]
pub struct SumRuleReport {
    pub order: i32,
    pub branch: Branch,
    pub holds: bool,
    /// `I_1 + I_2 - I_3`
    pub discrepancy: SymExpr,
}

/// `I_1^(n) + I_2^(n) = I_3^(n)` modulo total derivatives, for every
/// order and branch present in the table.
pub fn check_sum_rule_gt(table: &DensityTable) -> Vec<SumRuleReport> {
    let mut out = Vec::new();
    let keys: std::collections::BTreeSet<(Branch, i32)> = table.keys().map(|(_, b, k)| (*b, *k)).collect();
    for (b, k) in keys {
        let get = |j| table.get(&(j, b, k)).map(|d| d.density.clone());
        if let (Some(i1), Some(i2), Some(i3)) = (get(1), get(2), get(3)) {
            let d = &(&i1 + &i2) - &i3;
            out.push(SumRuleReport {
                order: k,
                branch: b,
                holds: equal_mod_total_derivative(&d, &SymExpr::zero()),
                discrepancy: d,
            });
        }
    }
    out
}
