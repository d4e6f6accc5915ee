//! Defect contributions `D_j = -ln[K_jj + sum_k K_jk Gamma_kj]` at `x = 0`,
//! the modified charges built from them, and the checks that make the
//! bulk-plus-defect charges conserved.


use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::backlund::REWRITE_BUDGET;
use crate::models::{tilde_matrix, ModelName, ModelSpec};
use crate::riccati::{combine_charges, invert_even, solve_riccati, Branch, Charges, RiccatiSolution, SumRuleReport};
use crate::scalar::Scalar;
use crate::symexpr::{d_t, FieldAtom, FieldId, SymExpr};

/// Extra Riccati orders solved beyond the requested defect order.
const GAMMA_MARGIN: i32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct DefectContribution {
    pub model: ModelName,
    pub j: usize,
    pub branch: Branch,
    pub order: i32,
    pub value: SymExpr,
}

/// Contributions keyed by `(j, branch, order)`.
pub type DefectTable = BTreeMap<(usize, Branch, i32), SymExpr>;

/// `Delta_j` oriented so that order `k` sits at `lambda^{-k}`, together
/// with the Riccati solution it was built from.
struct Generating {
    sol: RiccatiSolution,
    delta: SymExpr,
}

fn generating(model: &ModelSpec, j: usize, branch: Branch, order: i32) -> Result<Generating> {
    let sol = solve_riccati(model, j, branch, order + GAMMA_MARGIN)?;
    let upto = sol.known_order();
    let k = &model.k;
    let mut delta = k[j - 1][j - 1].clone();
    for r in (1..=model.size).filter(|&r| r != j) {
        delta += &(&k[j - 1][r - 1] * &sol.series(r, upto));
    }
    Ok(Generating { delta: branch.orient(&delta), sol })
}

/// `-ln` of the leading coefficient, without field-independent constants.
fn neg_log_leading(lead: &SymExpr) -> Result<SymExpr> {
    let unit = lead.filter_terms(|m, _| m.atoms.is_empty());
    let (m, _) = unit.as_single().ok_or_else(|| Error::SingularDefect(format!("leading coefficient {}", lead)))?;
    let mut out = SymExpr::zero();
    for (v, r) in &m.expo {
        let c = Scalar::new(num_traits::Zero::zero(), -r.clone());
        out += &SymExpr::atom(*v).scale(&c);
    }
    let uinv = unit.invert_unit().ok_or_else(|| Error::SingularDefect(format!("leading coefficient {}", lead)))?;
    let nil = &(lead * &uinv) - &SymExpr::one();
    out -= &log1p(&nil, i32::MIN / 2)?;
    Ok(out)
}

/// `ln(1 + s)` keeping powers of `lambda` not below `lo`; `s` must be
/// nilpotent or carry only negative powers.
fn log1p(s: &SymExpr, lo: i32) -> Result<SymExpr> {
    let mut acc = SymExpr::zero();
    let mut pow = SymExpr::one();
    for n in 1..=256i64 {
        pow = (&pow * s).truncate_lambda(lo, i32::MAX / 2);
        if pow.is_zero() {
            return Ok(acc);
        }
        let sign = if n % 2 == 1 { 1 } else { -1 };
        acc += &pow.scale_ratio(sign, n);
    }
    Err(Error::SingularDefect(format!("log series does not terminate for {}", s)))
}

fn top_power(e: &SymExpr) -> Result<i32> {
    e.lambda_range()
        .filter(|_| !e.is_zero())
        .map(|(_, hi)| hi)
        .ok_or_else(|| Error::SingularDefect("vanishing generating function".into()))
}

/// `-ln Delta` as a truncated series in the oriented parameter, orders
/// `0..=max_order`.
fn neg_log_delta(delta: &SymExpr, max_order: i32) -> Result<(i32, SymExpr)> {
    let p = top_power(delta)?;
    let lead = delta.laurent_coeff(p);
    let inv = invert_even(&lead).ok_or_else(|| Error::SingularDefect(format!("leading coefficient {}", lead)))?;
    let s = &(&delta.times_lambda(-p) * &inv) - &SymExpr::one();
    let mut out = -&log1p(&s, -max_order)?;
    out += &neg_log_leading(&lead)?;
    Ok((p, out))
}

/// Defect contributions of column `j` for orders `0..=max_order`.
pub fn defect_expand(model: &ModelSpec, j: usize, branch: Branch, max_order: i32) -> Result<Vec<DefectContribution>> {
    let g = generating(model, j, branch, max_order)?;
    let (_, series) = neg_log_delta(&g.delta, max_order)?;
    (0..=max_order)
        .map(|k| {
            let value = series.laurent_coeff(-k).drop_constants();
            if value.parity_odd() == Some(true) || value.parity_odd().is_none() {
                return Err(Error::Parity(format!(
                    "defect contribution D_{}^({}) [{}] is not even: {}",
                    j, k, branch, value
                )));
            }
            Ok(DefectContribution { model: model.name, j, branch, order: k, value })
        })
        .collect()
}

/// All columns and both branches, computed in parallel.
pub fn defect_table(model: &ModelSpec, max_order: i32) -> Result<DefectTable> {
    let jobs: Vec<(usize, Branch)> =
        (1..=model.size).flat_map(|j| Branch::BOTH.into_iter().map(move |b| (j, b))).collect();
    let parts: Vec<Vec<DefectContribution>> =
        jobs.par_iter().map(|&(j, b)| defect_expand(model, j, b, max_order)).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().map(|d| ((d.j, d.branch, d.order), d.value)).collect())
}

/// `N_D`, `E_D`, `P_D` from the same combinations as the bulk charges.
pub fn defect_charges(model: &ModelSpec, table: &DefectTable) -> Result<Charges> {
    combine_charges(model.name, &|j, b, k| table.get(&(j, b, k)).cloned())
}

fn partner_index(a: &FieldAtom) -> Option<u8> {
    match a.id {
        FieldId::Phi1 | FieldId::Psi1 => Some(1),
        FieldId::Phi2 | FieldId::Psi2 => Some(2),
        _ => None,
    }
}

/// Rewrite the defect field in favour of bulk fields, choosing in each term
/// the form whose bulk index matches the bulk fields it multiplies.
pub fn eliminate_boundary(model: &ModelSpec, e: &SymExpr) -> Result<SymExpr> {
    let forms = &model.backlund.defect_forms;
    if forms.is_empty() {
        return Ok(e.clone());
    }
    let mut cur = e.clone();
    for _ in 0..REWRITE_BUDGET {
        let mut next = SymExpr::zero();
        let mut changed = false;
        for (m, c) in cur.terms() {
            let term = SymExpr::from_mono(m.clone(), c.clone());
            let idx: std::collections::BTreeSet<u8> = m.atoms.iter().filter_map(partner_index).collect();
            let has_target = m.atoms.iter().any(|a| forms.iter().any(|f| f.target == *a));
            if idx.len() != 1 || !has_target {
                next += &term;
                continue;
            }
            let k = *idx.iter().next().unwrap();
            changed = true;
            next +=
                &term.substitute(&|a| forms.iter().find(|f| f.target == *a && f.partner == k).map(|f| f.form.clone()));
        }
        cur = next;
        if !changed {
            return Ok(cur);
        }
    }
    Err(Error::RewriteBudget { budget: REWRITE_BUDGET, partial: cur.to_string() })
}

/// `D_1 + D_2 = D_3` for every order and branch in the table.
pub fn defect_sum_rule_gt(table: &DefectTable) -> Vec<SumRuleReport> {
    let keys: std::collections::BTreeSet<(Branch, i32)> = table.keys().map(|(_, b, k)| (*b, *k)).collect();
    let mut out = Vec::new();
    for (b, k) in keys {
        let get = |j| table.get(&(j, b, k));
        if let (Some(d1), Some(d2), Some(d3)) = (get(1), get(2), get(3)) {
            let d = &(d1 + d2) - d3;
            out.push(SumRuleReport { order: k, branch: b, holds: d.is_zero(), discrepancy: d });
        }
    }
    out
}

/// `Delta_j` minus its field-independent part, cubed. Zero for the
/// Grassmannian model, which makes its log series terminate.
pub fn nilpotent_cube(model: &ModelSpec, j: usize, branch: Branch) -> Result<SymExpr> {
    let g = generating(model, j, branch, 2)?;
    let nil = &g.delta - &g.delta.constant_part();
    Ok(nil.pow(3))
}

fn mul_trunc(a: &SymExpr, b: &SymExpr, lo: i32) -> SymExpr {
    (a * b).truncate_lambda(lo, i32::MAX / 2)
}

/// `d_t D_j^(k) - (F - F~)^(k)` reduced on the defect manifold, where `F` is
/// the flux of the generating function on the right and `F~` the one on
/// the left, continued through the defect matrix.
pub fn conservation_with_defect(model: &ModelSpec, j: usize, branch: Branch, order: i32) -> Result<SymExpr> {
    let g = generating(model, j, branch, order)?;
    let (p, neg_log) = neg_log_delta(&g.delta, order)?;
    let d_k = neg_log.laurent_coeff(-order).drop_constants();

    let upto = g.sol.known_order();
    let gamma: Vec<SymExpr> = (1..=model.size).map(|r| branch.orient(&g.sol.series(r, upto))).collect();
    let v = branch.orient_matrix(&model.v);
    let vt = tilde_matrix(&v);
    let k = branch.orient_matrix(&model.k);
    let jj = j - 1;

    // Lowest power still able to reach lambda^{-order} once multiplied by
    // the positive powers of K and V.
    let top = |m: &crate::models::Matrix| {
        m.iter().flatten().filter_map(|e| e.lambda_range()).map(|(_, hi)| hi).max().unwrap_or(0)
    };
    let (pv, pk) = (top(&v).max(top(&vt)).max(0), top(&k).max(0));
    let lo = -order - pv + (p - pk).min(0) - 1;
    if -lo > upto {
        return Err(Error::Missing(format!(
            "conservation at order {} needs Gamma through order {}, have {}",
            order, -lo, upto
        )));
    }

    let lead = g.delta.laurent_coeff(p);
    let lead_inv = invert_even(&lead).ok_or_else(|| Error::SingularDefect(format!("leading coefficient {}", lead)))?;
    let s = &(&g.delta.times_lambda(-p) * &lead_inv) - &SymExpr::one();
    let mut geo = SymExpr::one();
    let mut pow = SymExpr::one();
    loop {
        pow = -&mul_trunc(&pow, &s, lo);
        if pow.is_zero() {
            break;
        }
        geo += &pow;
    }
    let delta_inv = (&geo * &lead_inv).times_lambda(-p);

    let mut flux = v[jj][jj].clone();
    let mut flux_left = vt[jj][jj].clone();
    for i in (0..model.size).filter(|&i| i != jj) {
        flux += &mul_trunc(&v[jj][i], &gamma[i], lo);
        let mut n_i = k[i][jj].clone();
        for l in (0..model.size).filter(|&l| l != jj) {
            n_i += &mul_trunc(&k[i][l], &gamma[l], lo);
        }
        let ratio = mul_trunc(&n_i, &delta_inv, lo);
        flux_left += &mul_trunc(&vt[jj][i], &ratio, lo);
    }
    let jump = (&flux - &flux_left).laurent_coeff(-order);

    let rules = model.defect_rules().merged(&g.sol.aux_rules());
    let r = &d_t(&d_k, &rules)? - &jump;
    model.backlund.reduce(&r)
}

/// `sin(g N_D / 2) - (g a / 2 m) X'X` on the defect manifold, with `N_D`
/// expressed through the defect angle. Zero when `4 alpha = g N_D`.
pub fn angle_number_residual(model: &ModelSpec, n_d: &SymExpr) -> Result<SymExpr> {
    if model.name != ModelName::Bt {
        return Err(Error::Missing("angle relation exists for the bosonic model only".into()));
    }
    let alpha = SymExpr::atom(FieldAtom::alpha());
    let quarter = n_d.scale(&Scalar::from_ratio(1, 4));
    let g_quarter = &quarter * &model.parse("g")?;
    if g_quarter != alpha {
        return Err(Error::Derivation(format!("N_D = {} is not 4 alpha / g", n_d)));
    }
    let rel = &crate::models::backlund::sin_two_alpha() - &model.parse("1/2*g*a*m^-1*X'*X")?;
    model.backlund.reduce(&rel)
}
