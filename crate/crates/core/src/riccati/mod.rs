//! Order-by-order solution of the Riccati equations for the ratios
//! `Gamma_ij = Psi_i / Psi_j`, conserved densities and charge combinations.

mod charges;
#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Matrix, ModelName, ModelSpec};
use crate::symexpr::calculus::partial;
use crate::symexpr::calculus::{d_x_free, d_x_n};
use crate::symexpr::{FieldAtom, FieldId, RuleSet, SymExpr};

pub use charges::{
    check_sum_rule_gt, combine_charges, conservation_residual, conserved_density, ChargeDensity, Charges, DensityTable,
    SumRuleReport,
};

/// Expansion point of the spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// powers `lambda^{-k}`
    Infinity,
    /// powers `lambda^{+k}`, hatted quantities
    Zero,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Infinity, Branch::Zero];

    pub fn is_hat(self) -> bool {
        self == Branch::Zero
    }

    /// Power of `lambda` carrying order `k`.
    pub fn power(self, k: i32) -> i32 {
        match self {
            Branch::Infinity => -k,
            Branch::Zero => k,
        }
    }

    /// Orient an expression so that order `k` sits at `lambda^{-k}`.
    pub fn orient(self, e: &SymExpr) -> SymExpr {
        match self {
            Branch::Infinity => e.clone(),
            Branch::Zero => e.invert_lambda(),
        }
    }

    pub fn orient_matrix(self, m: &Matrix) -> Matrix {
        crate::models::matrix::map(m, |e| self.orient(e))
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Infinity => "inf",
            Branch::Zero => "zero",
        })
    }
}

/// Nonlocal coefficient defined through its derivatives.
#[derive(Clone, Debug)]
pub struct AuxSymbol {
    pub atom: FieldAtom,
    pub dx_rule: SymExpr,
    pub dt_rule: Option<SymExpr>,
}

impl AuxSymbol {
    pub fn name(&self) -> String {
        self.atom.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct RiccatiSolution {
    pub model: ModelName,
    /// column, 1-based
    pub j: usize,
    pub branch: Branch,
    pub max_order: i32,
    pub start: i32,
    /// `(row (1-based), order) -> coefficient`; orders beyond `max_order`
    /// are kept when they could be resolved
    pub coeffs: BTreeMap<(usize, i32), SymExpr>,
    pub aux: Vec<AuxSymbol>,
}

impl RiccatiSolution {
    pub fn coeff(&self, row: usize, k: i32) -> Option<&SymExpr> {
        if k < self.start {
            return None;
        }
        self.coeffs.get(&(row, k))
    }

    /// Highest order known for every row.
    pub fn known_order(&self) -> i32 {
        let rows: BTreeSet<usize> = self.coeffs.keys().map(|(r, _)| *r).collect();
        rows.iter()
            .map(|r| {
                let mut k = self.start;
                while self.coeffs.contains_key(&(*r, k)) {
                    k += 1;
                }
                k - 1
            })
            .min()
            .unwrap_or(self.start - 1)
    }

    pub fn rows(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.coeffs.keys().map(|(r, _)| *r).collect();
        s.into_iter().collect()
    }

    /// Truncated series of `Gamma_{row j}` in the original spectral
    /// parameter, through order `upto`.
    pub fn series(&self, row: usize, upto: i32) -> SymExpr {
        if row == self.j {
            return SymExpr::one();
        }
        let mut acc = SymExpr::zero();
        for k in self.start..=upto {
            if let Some(c) = self.coeffs.get(&(row, k)) {
                acc += &c.times_lambda(self.branch.power(k));
            }
        }
        acc
    }

    /// Derivative rules of the auxiliary symbols.
    pub fn aux_rules(&self) -> RuleSet {
        let mut r = RuleSet::new();
        for a in &self.aux {
            r.set_dx(a.atom, a.dx_rule.clone());
            if let Some(t) = &a.dt_rule {
                r.set_dt(a.atom, t.clone());
            }
        }
        r
    }
}

/// Nonlocal symbols of several solutions merged into one rule set.
pub fn merged_aux_rules<'a>(sols: impl IntoIterator<Item = &'a RiccatiSolution>) -> RuleSet {
    let mut r = RuleSet::new();
    for s in sols {
        r = r.merged(&s.aux_rules());
    }
    r
}

/// Extra orders solved internally so that densities and defect terms up to
/// `max_order` have every coefficient they need.
pub const ORDER_MARGIN: i32 = 4;

const PASS_BUDGET: usize = 64;

struct Solver<'a> {
    model: &'a ModelSpec,
    j: usize,
    hat: bool,
    rows: Vec<usize>,
    start: i32,
    top: i32,
    sol: BTreeMap<FieldAtom, SymExpr>,
    aux_rules: RuleSet,
    /// aux atom, row, power of the defining equation
    aux: Vec<(FieldAtom, usize, i32)>,
}

fn is_slot(a: &FieldAtom) -> bool {
    matches!(a.id, FieldId::Slot { .. })
}

/// Inverse of an even expression `u (1 + n)` with `u` an atom-free single
/// term and `n` nilpotent.
pub fn invert_even(c: &SymExpr) -> Option<SymExpr> {
    if let Some(inv) = c.invert_unit() {
        return Some(inv);
    }
    if c.parity_odd() != Some(false) {
        return None;
    }
    let unit = c.filter_terms(|m, _| m.atoms.is_empty());
    let uinv = unit.invert_unit()?;
    let nil = &(c * &uinv) - &SymExpr::one();
    // geometric series terminates by nilpotency
    let mut acc = SymExpr::one();
    let mut pow = SymExpr::one();
    for _ in 0..32 {
        pow = &pow * &(-&nil);
        if pow.is_zero() {
            return Some(&acc * &uinv);
        }
        acc += &pow;
    }
    None
}

impl<'a> Solver<'a> {
    fn slot(&self, row: usize, k: i32) -> FieldAtom {
        let odd = self.model.odd_index[row] != self.model.odd_index[self.j];
        FieldAtom::new(FieldId::Slot { row: (row + 1) as u8, order: k as u8 }, odd)
    }

    fn gamma(&self, row: usize) -> SymExpr {
        if row == self.j {
            return SymExpr::one();
        }
        let mut acc = SymExpr::zero();
        for k in self.start..=self.top {
            acc += &SymExpr::atom(self.slot(row, k)).times_lambda(-k);
        }
        acc
    }

    /// Right-hand sides `sum_k A_ik G_k - G_i sum_k A_jk G_k` for each row.
    fn rhs(&self, a: &Matrix, lo: i32) -> Vec<SymExpr> {
        let n = self.model.size;
        let gammas: Vec<SymExpr> = (0..n).map(|r| self.gamma(r)).collect();
        let mut back = SymExpr::zero();
        for k in 0..n {
            back += &(&a[self.j][k] * &gammas[k]);
        }
        let back = back.truncate_lambda(lo - 2, 2);
        self.rows
            .iter()
            .map(|&i| {
                let mut acc = SymExpr::zero();
                for k in 0..n {
                    acc += &(&a[i][k] * &gammas[k]);
                }
                acc -= &(&gammas[i] * &back);
                acc.truncate_lambda(lo, 2)
            })
            .collect()
    }

    fn resolve(&self, e: &SymExpr) -> Result<SymExpr> {
        let f = |a: &FieldAtom| -> Option<SymExpr> {
            if !is_slot(a) || a.dt {
                return None;
            }
            let s = self.sol.get(&a.with_deriv(0))?;
            Some(d_x_n(s, &self.aux_rules, a.deriv))
        };
        e.substitute_fixpoint(&f, PASS_BUDGET)
            .ok_or_else(|| Error::RewriteBudget { budget: PASS_BUDGET, partial: e.to_string() })
    }

    fn unsolved(&self, e: &SymExpr) -> BTreeSet<FieldAtom> {
        e.atom_set()
            .into_iter()
            .filter(|a| is_slot(a) && !self.sol.contains_key(&a.with_deriv(0)))
            .map(|a| a.with_deriv(0))
            .collect()
    }

    fn has_deriv_of(e: &SymExpr, s: &FieldAtom, min: u16) -> bool {
        e.atom_set().iter().any(|a| a.base() == *s && a.deriv >= min)
    }

    /// Try the algebraic pivot on `eq`.
    fn try_linear(&self, eq: &SymExpr) -> Option<(FieldAtom, SymExpr)> {
        for s in self.unsolved(eq) {
            if Self::has_deriv_of(eq, &s, 1) || eq.degree_in(&s) != 1 {
                continue;
            }
            let c = partial(eq, &s);
            if !self.unsolved(&c).is_empty() {
                continue;
            }
            let Some(cinv) = invert_even(&c) else {
                continue;
            };
            let (_, rest) = eq.split_on(&s);
            return Some((s, -(&rest * &cinv)));
        }
        None
    }

    /// `c2 s^2 + c0 = 0` with units `c2`, `c0`; principal root.
    fn try_quadratic(&self, eq: &SymExpr) -> Option<(FieldAtom, SymExpr)> {
        let un = self.unsolved(eq);
        if un.len() != 1 {
            return None;
        }
        let s = *un.iter().next()?;
        if s.odd || Self::has_deriv_of(eq, &s, 1) || eq.degree_in(&s) != 2 {
            return None;
        }
        let (with, c0) = eq.split_on(&s);
        let sq = &SymExpr::atom(s) * &SymExpr::atom(s);
        let c2 = with.substitute(&|a| if *a == s { Some(SymExpr::one()) } else { None });
        if &c2 * &sq != with {
            return None;
        }
        let root = (&(-&c0) * &c2.invert_unit()?).sqrt_unit()?;
        Some((s, root))
    }

    /// `C1 s_x + (terms in s) = 0`: a new nonlocal symbol.
    fn try_ode(&mut self, eq: &SymExpr, power: i32) -> Option<FieldAtom> {
        let un = self.unsolved(eq);
        if un.len() != 1 {
            return None;
        }
        let s = *un.iter().next()?;
        let s1 = s.with_deriv(1);
        if Self::has_deriv_of(eq, &s, 2) || eq.degree_in(&s1) != 1 {
            return None;
        }
        let c1 = partial(eq, &s1);
        if !self.unsolved(&c1).is_empty() {
            return None;
        }
        let c1inv = invert_even(&c1)?;
        let (_, rest) = eq.split_on(&s1);
        let FieldId::Slot { row, order } = s.id else {
            return None;
        };
        let aux = FieldAtom::new(FieldId::Aux { row, col: (self.j + 1) as u8, order, hat: self.hat }, s.odd);
        let rule = -(&rest * &c1inv);
        let rule = rule.substitute(&|a| if *a == s { Some(SymExpr::atom(aux)) } else { None });
        self.sol.insert(s, SymExpr::atom(aux));
        self.aux_rules.set_dx(aux, rule);
        self.aux.push((aux, row as usize - 1, power));
        Some(aux)
    }

    fn run(&mut self, u: &Matrix) -> Result<()> {
        let lo = 2 - self.top;
        let hi = 2 - self.start;
        let mut full: Vec<SymExpr> = self.rhs(u, lo);
        for (r, &i) in self.rows.iter().enumerate() {
            full[r] -= &d_x_free(&self.gamma(i));
        }
        let mut pending: Vec<(i32, SymExpr)> = Vec::new();
        for p in (lo..=hi).rev() {
            for e in &full {
                pending.push((p, e.laurent_coeff(p)));
            }
            loop {
                let mut next = Vec::new();
                for (q, e) in &pending {
                    let r = self.resolve(e)?;
                    if !r.is_zero() {
                        next.push((*q, r));
                    }
                }
                pending = next;
                let mut progress = false;
                for (_, e) in &pending {
                    if let Some((s, v)) = self.try_linear(e) {
                        self.sol.insert(s, v);
                        progress = true;
                        break;
                    }
                }
                if !progress {
                    for (_, e) in &pending {
                        if let Some((s, v)) = self.try_quadratic(e) {
                            self.sol.insert(s, v);
                            progress = true;
                            break;
                        }
                    }
                }
                if !progress {
                    let cands: Vec<(i32, SymExpr)> = pending.clone();
                    for (q, e) in &cands {
                        if self.try_ode(e, *q).is_some() {
                            progress = true;
                            break;
                        }
                    }
                }
                if !progress {
                    break;
                }
            }
            if let Some((q, e)) = pending.iter().find(|(_, e)| self.unsolved(e).is_empty()) {
                return Err(Error::Structural {
                    order: -q,
                    what: format!("inconsistent equation left over: {} = 0", e),
                });
            }
        }
        Ok(())
    }

    fn dt_rules(&mut self, v: &Matrix) -> Result<()> {
        let lo = 2 - self.top;
        let full = self.rhs(v, lo);
        for (aux, row, p) in self.aux.clone() {
            let r = self.rows.iter().position(|&x| x == row).expect("row of aux");
            let e = self.resolve(&full[r].laurent_coeff(p))?;
            if self.unsolved(&e).is_empty() {
                self.aux_rules.set_dt(aux, e);
            }
        }
        Ok(())
    }
}

/// Solve column `j` (1-based) of the Riccati system through `max_order`.
pub fn solve_riccati(model: &ModelSpec, j: usize, branch: Branch, max_order: i32) -> Result<RiccatiSolution> {
    if max_order < 1 {
        return Err(Error::Missing("max_order must be at least 1".into()));
    }
    if j == 0 || j > model.size {
        return Err(Error::Missing(format!("column {} out of range", j)));
    }
    let jj = j - 1;
    let u = branch.orient_matrix(&model.u);
    let v = branch.orient_matrix(&model.v);
    let mut s = Solver {
        model,
        j: jj,
        hat: branch.is_hat(),
        rows: (0..model.size).filter(|&i| i != jj).collect(),
        start: model.series_start,
        top: max_order + ORDER_MARGIN,
        sol: BTreeMap::new(),
        aux_rules: RuleSet::new(),
        aux: Vec::new(),
    };
    s.run(&u)?;
    s.dt_rules(&v)?;

    let mut coeffs = BTreeMap::new();
    for &i in &s.rows {
        for k in s.start..=s.top {
            let slot = s.slot(i, k);
            if !s.sol.contains_key(&slot) {
                break;
            }
            let c = s.resolve(&SymExpr::atom(slot))?;
            if !s.unsolved(&c).is_empty() {
                break;
            }
            coeffs.insert((i + 1, k), c);
        }
        for k in s.start..=max_order {
            if !coeffs.contains_key(&(i + 1, k)) {
                return Err(Error::Structural {
                    order: k,
                    what: format!("no solvable pivot for Gamma_{}{}", i + 1, j),
                });
            }
        }
    }
    let aux = s
        .aux
        .iter()
        .map(|(a, _, _)| AuxSymbol {
            atom: *a,
            dx_rule: s.aux_rules.dx[a].clone(),
            dt_rule: s.aux_rules.dt.get(a).cloned(),
        })
        .collect();
    Ok(RiccatiSolution { model: model.name, j, branch, max_order, start: s.start, coeffs, aux })
}

/// Residuals of the x- and t-Riccati equations for the truncated series,
/// as `(power, expression)` pairs at powers fully determined by the
/// truncation (orders `<= upto`). All must vanish.
pub fn series_residuals(
    model: &ModelSpec,
    sol: &RiccatiSolution,
    upto: i32,
) -> Result<Vec<(char, usize, i32, SymExpr)>> {
    let rules = model.eom.merged(&sol.aux_rules());
    let n = model.size;
    let jj = sol.j - 1;
    let g: Vec<SymExpr> = (0..n).map(|r| sol.series(r + 1, upto)).collect();
    let mut out = Vec::new();
    for (label, a) in [('x', &model.u), ('t', &model.v)] {
        let mut back = SymExpr::zero();
        for k in 0..n {
            back += &(&a[jj][k] * &g[k]);
        }
        for i in (0..n).filter(|&i| i != jj) {
            let mut e = SymExpr::zero();
            for k in 0..n {
                e += &(&a[i][k] * &g[k]);
            }
            e -= &(&g[i] * &back);
            e -= &match label {
                'x' => crate::symexpr::d_x(&g[i], &rules),
                _ => crate::symexpr::d_t(&g[i], &rules)?,
            };
            let lowest = 2 - upto;
            let oriented = sol.branch.orient(&e);
            for p in lowest..=2 {
                out.push((label, i + 1, p, oriented.laurent_coeff(p)));
            }
        }
    }
    Ok(out)
}
