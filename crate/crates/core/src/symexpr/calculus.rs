//! Derivations on `SymExpr`: total x-derivative, formal time derivative,
//! on-shell substitution, variational derivatives and integration by parts.

use std::collections::{BTreeMap, BTreeSet};

use super::atom::FieldAtom;
use super::expr::{Mono, SymExpr};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Derivative rules attached to atoms. Keys are atoms with no x-derivative
/// and no time marker; rules for higher x-derivatives follow by applying
/// `d_x` to the rule. Atoms without an x-rule are jet variables: `d_x`
/// raises their derivative order.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub dx: BTreeMap<FieldAtom, SymExpr>,
    pub dt: BTreeMap<FieldAtom, SymExpr>,
}

impl RuleSet {
    pub fn new() -> Self {
        RuleSet::default()
    }

    pub fn with_dx(mut self, a: FieldAtom, e: SymExpr) -> Self {
        self.dx.insert(a, e);
        self
    }

    pub fn with_dt(mut self, a: FieldAtom, e: SymExpr) -> Self {
        self.dt.insert(a, e);
        self
    }

    pub fn set_dx(&mut self, a: FieldAtom, e: SymExpr) {
        self.dx.insert(a, e);
    }

    pub fn set_dt(&mut self, a: FieldAtom, e: SymExpr) {
        self.dt.insert(a, e);
    }

    /// Union; rules in `other` win on conflicts.
    pub fn merged(&self, other: &RuleSet) -> RuleSet {
        let mut r = self.clone();
        r.dx.extend(other.dx.iter().map(|(k, v)| (*k, v.clone())));
        r.dt.extend(other.dt.iter().map(|(k, v)| (*k, v.clone())));
        r
    }

    fn dx_of(&self, a: &FieldAtom) -> SymExpr {
        if a.dt {
            return SymExpr::atom(a.dx(1));
        }
        if a.deriv == 0 {
            if let Some(r) = self.dx.get(a) {
                return r.clone();
            }
        }
        SymExpr::atom(a.dx(1))
    }
}

/// Total x-derivative. `d_x` is even, so the Leibniz rule carries no signs.
pub fn d_x(e: &SymExpr, rules: &RuleSet) -> SymExpr {
    leibniz(e, &|a| rules.dx_of(a))
}

/// Total x-derivative in the free jet space (no rules).
pub fn d_x_free(e: &SymExpr) -> SymExpr {
    leibniz(e, &|a| SymExpr::atom(a.dx(1)))
}

pub fn d_x_n(e: &SymExpr, rules: &RuleSet, n: u16) -> SymExpr {
    let mut r = e.clone();
    for _ in 0..n {
        r = d_x(&r, rules);
    }
    r
}

/// Formal time derivative: every atom `a` becomes the tagged atom
/// `dt(a)`, to be resolved by [`subst_eom`].
pub fn d_t_formal(e: &SymExpr) -> SymExpr {
    leibniz(e, &|a| SymExpr::atom(a.marked_dt()))
}

/// On-shell time derivative.
pub fn d_t(e: &SymExpr, rules: &RuleSet) -> Result<SymExpr> {
    subst_eom(&d_t_formal(e), rules)
}

/// Replace every tagged atom `dt(d_x^n f)` by `d_x^n` of the time rule
/// for `f`.
pub fn subst_eom(e: &SymExpr, rules: &RuleSet) -> Result<SymExpr> {
    let mut missing: Option<FieldAtom> = None;
    let mut cache: BTreeMap<FieldAtom, SymExpr> = BTreeMap::new();
    for a in e.atom_set() {
        if !a.dt {
            continue;
        }
        let base = a.base();
        match rules.dt.get(&base) {
            Some(r) => {
                cache.insert(a, d_x_n(r, rules, a.deriv));
            }
            None => {
                missing = Some(base);
                break;
            }
        }
    }
    if let Some(m) = missing {
        return Err(Error::UnresolvedSymbol(m.to_string()));
    }
    Ok(e.substitute(&|a| cache.get(a).cloned()))
}

/// Leibniz rule with an atom-level derivative `da`. Exponentials
/// contribute `i * sum c_k da(v_k)` times themselves.
fn leibniz(e: &SymExpr, da: &dyn Fn(&FieldAtom) -> SymExpr) -> SymExpr {
    let mut out = SymExpr::zero();
    for (m, c) in e.terms() {
        let head = {
            let mut h = m.clone();
            h.atoms.clear();
            SymExpr::from_mono(h, c.clone())
        };
        // exponential part
        if !m.expo.is_empty() {
            let mut inner = SymExpr::zero();
            for (v, k) in &m.expo {
                inner += &da(v).scale(&Scalar::new(num_traits::Zero::zero(), k.clone()));
            }
            let rest = SymExpr::product_of(&m.atoms);
            out += &(&(&head * &inner) * &rest);
        }
        for p in 0..m.atoms.len() {
            let left = SymExpr::product_of(&m.atoms[..p]);
            let right = SymExpr::product_of(&m.atoms[p + 1..]);
            let mid = da(&m.atoms[p]);
            out += &(&(&(&head * &left) * &mid) * &right);
        }
    }
    out
}

/// Left partial derivative with respect to the atom `u` (exact match,
/// derivative order included). Odd atoms are moved to the front first.
pub fn partial(e: &SymExpr, u: &FieldAtom) -> SymExpr {
    let mut out = SymExpr::zero();
    for (m, c) in e.terms() {
        for (p, a) in m.atoms.iter().enumerate() {
            if a != u {
                continue;
            }
            let odd_before = m.atoms[..p].iter().filter(|x| x.odd).count();
            let sign = if u.odd && odd_before % 2 == 1 { -1 } else { 1 };
            let mut rest = m.clone();
            rest.atoms.remove(p);
            out.add_term(rest, c.scale(&crate::scalar::rat(sign, 1)));
        }
        if u.deriv == 0 && !u.dt {
            if let Some((_, k)) = m.expo.iter().find(|(v, _)| v == u) {
                out.add_term(m.clone(), c * &Scalar::new(num_traits::Zero::zero(), k.clone()));
            }
        }
    }
    out
}

/// Dependent variables of `e`: atoms with derivative order stripped.
pub fn dependent_vars(e: &SymExpr) -> BTreeSet<FieldAtom> {
    e.atom_set().into_iter().map(|a| a.base()).collect()
}

/// Euler operator `E_u(f) = sum_k (-d_x)^k df/du_k` in the free jet space.
pub fn euler(e: &SymExpr, u: &FieldAtom) -> SymExpr {
    let top = e.atom_set().iter().filter(|a| a.base() == *u).map(|a| a.deriv).max().unwrap_or(0);
    let mut out = SymExpr::zero();
    for k in 0..=top {
        let mut t = partial(e, &u.with_deriv(k));
        for _ in 0..k {
            t = -d_x_free(&t);
        }
        out += &t;
    }
    out
}

/// True if `e` is a total x-derivative of a differential polynomial
/// (all variational derivatives vanish and there is no constant term).
pub fn is_total_derivative(e: &SymExpr) -> bool {
    if !e.constant_part().is_zero() {
        return false;
    }
    dependent_vars(e).iter().all(|u| euler(e, u).is_zero())
}

/// Canonical representative modulo total x-derivatives. A monomial with a
/// single daggered atom has that atom's derivatives moved onto the rest;
/// a dagger-free monomial whose top derivative sits on one atom is lowered
/// while the other factors stay at least two orders below.
pub fn ibp_normal(e: &SymExpr) -> SymExpr {
    let mut cur = e.clone();
    // each pass strictly lowers some derivative order; the bound is generous
    for _ in 0..256 {
        let mut next = SymExpr::zero();
        let mut changed = false;
        for (m, c) in cur.terms() {
            match ibp_step(m) {
                Some(p) => {
                    let lowered = SymExpr::product_of(&p);
                    let mut head = m.clone();
                    head.atoms.clear();
                    let lowered = &SymExpr::from_mono(head, c.clone()) * &lowered;
                    let mono = SymExpr::from_mono(m.clone(), c.clone());
                    next += &(&mono - &d_x_free(&lowered));
                    changed = true;
                }
                None => next.add_term(m.clone(), c.clone()),
            }
        }
        cur = next;
        if !changed {
            break;
        }
    }
    cur
}

/// Atom list of the monomial with one derivative removed, or `None` if the
/// monomial is already in normal form.
fn ibp_step(m: &Mono) -> Option<Vec<FieldAtom>> {
    let daggered: Vec<usize> = (0..m.atoms.len()).filter(|&p| m.atoms[p].dagger).collect();
    if daggered.len() == 1 {
        let p = daggered[0];
        if m.atoms[p].deriv == 0 {
            return None;
        }
        let mut v = m.atoms.clone();
        v[p] = v[p].with_deriv(v[p].deriv - 1);
        return Some(v);
    }
    if !daggered.is_empty() {
        return None;
    }
    let top = m.atoms.iter().map(|a| a.deriv).max()?;
    if top == 0 {
        return None;
    }
    let at_top: Vec<usize> = (0..m.atoms.len()).filter(|&p| m.atoms[p].deriv == top).collect();
    if at_top.len() != 1 {
        return None;
    }
    let p = at_top[0];
    let rest_max = m.atoms.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, a)| a.deriv).max();
    if let Some(r) = rest_max {
        if r + 1 >= top {
            return None;
        }
    }
    if !m.expo.is_empty() && top < 2 {
        return None;
    }
    let mut v = m.atoms.clone();
    v[p] = v[p].with_deriv(top - 1);
    Some(v)
}

/// Equality modulo total x-derivatives.
pub fn equal_mod_total_derivative(a: &SymExpr, b: &SymExpr) -> bool {
    let d = a - b;
    d.is_zero() || is_total_derivative(&d)
}
