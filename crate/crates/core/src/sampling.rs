//! Numerical re-verification of symbolic identities at random points of a
//! finite Grassmann algebra.
//!
//! Matrix and series products are formed on evaluated values, so the
//! symbolic product and normal form are not on the checked path. Only
//! derivations (`d_x`, `d_t`, the Euler operator) and coefficient
//! extraction are taken from the symbolic side.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graded::GradedElement;
use crate::models::{tilde_matrix, Matrix, ModelSpec};
use crate::riccati::Branch;
use crate::symexpr::calculus::{dependent_vars, euler};
use crate::symexpr::eval::{eval, Assignment};
use crate::symexpr::{d_t, d_x, RuleSet, SymExpr};

/// Generators used by the sampling checks.
pub const GENERATORS: usize = 8;

/// Largest sampled error accepted as agreement.
pub const TOLERANCE: f64 = 1e-10;

/// Coefficients of a truncated Laurent series, keyed by power.
pub type Laurent = BTreeMap<i32, GradedElement>;

/// Fresh random values for every atom of `exprs` not yet assigned.
pub fn fill<'a, R: Rng>(asg: &mut Assignment, exprs: impl IntoIterator<Item = &'a SymExpr>, rng: &mut R) {
    for e in exprs {
        for a in e.atom_set() {
            if !asg.atoms.contains_key(&a) {
                asg.set_random(a, rng);
            }
        }
    }
}

/// Random point of the defect manifold: free variables are random, the
/// left boundary values follow from the elimination rules.
pub fn on_defect<R: Rng>(model: &ModelSpec, asg: &mut Assignment, rng: &mut R) -> Result<()> {
    for (target, form) in &model.backlund.elimination {
        fill(asg, [form], rng);
        let v = eval(form, asg)?;
        asg.set(*target, v);
    }
    Ok(())
}

pub fn eval_laurent(e: &SymExpr, asg: &Assignment) -> Result<Laurent> {
    let mut out = Laurent::new();
    if let Some((lo, hi)) = e.lambda_range() {
        for p in lo..=hi {
            let c = e.laurent_coeff(p);
            if !c.is_zero() {
                out.insert(p, eval(&c, asg)?);
            }
        }
    }
    Ok(out)
}

fn accumulate(out: &mut Laurent, p: i32, v: GradedElement) {
    match out.get_mut(&p) {
        Some(x) => *x = &*x + &v,
        None => {
            out.insert(p, v);
        }
    }
}

/// Product with powers below `lo` dropped.
pub fn mul_laurent(a: &Laurent, b: &Laurent, lo: i32) -> Laurent {
    let mut out = Laurent::new();
    for (p, x) in a {
        for (q, y) in b {
            if p + q >= lo {
                accumulate(&mut out, p + q, x * y);
            }
        }
    }
    out
}

pub fn add_laurent(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (p, y) in b {
        accumulate(&mut out, *p, y.clone());
    }
    out
}

pub fn sub_laurent(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (p, y) in b {
        accumulate(&mut out, *p, -y);
    }
    out
}

pub fn coeff(l: &Laurent, p: i32, n: usize) -> GradedElement {
    l.get(&p).cloned().unwrap_or_else(|| GradedElement::zero(n))
}

pub fn distance(a: &GradedElement, b: &GradedElement) -> f64 {
    (a - b).max_abs()
}

fn eval_matrix(m: &Matrix, asg: &Assignment) -> Result<Vec<Vec<GradedElement>>> {
    m.iter().map(|r| r.iter().map(|e| eval(e, asg)).collect()).collect()
}

fn mat_mul(a: &[Vec<GradedElement>], b: &[Vec<GradedElement>], n: usize) -> Vec<Vec<GradedElement>> {
    let size = a.len();
    (0..size)
        .map(|i| {
            (0..size).map(|j| (0..size).fold(GradedElement::zero(n), |acc, k| &acc + &(&a[i][k] * &b[k][j]))).collect()
        })
        .collect()
}

fn mat_error(parts: &[(f64, &[Vec<GradedElement>])], n: usize) -> f64 {
    let size = parts[0].1.len();
    let mut worst: f64 = 0.0;
    for i in 0..size {
        for j in 0..size {
            let mut acc = GradedElement::zero(n);
            for (s, m) in parts {
                acc = &acc + &m[i][j].scale(Complex64::new(*s, 0.0));
            }
            worst = worst.max(acc.max_abs());
        }
    }
    worst
}

/// Derivatives of the Lax and defect matrices, computed once per model.
pub struct StructureProbe<'a> {
    model: &'a ModelSpec,
    dt_u: Matrix,
    dx_v: Matrix,
    dx_k: Matrix,
    dt_k: Matrix,
    ut: Matrix,
    vt: Matrix,
}

impl<'a> StructureProbe<'a> {
    pub fn new(model: &'a ModelSpec) -> Result<Self> {
        use crate::models::matrix::{map, try_map};
        let rules = model.defect_rules();
        Ok(StructureProbe {
            model,
            dt_u: try_map(&model.u, |e| d_t(e, &model.eom))?,
            dx_v: map(&model.v, |e| d_x(e, &RuleSet::new())),
            dx_k: map(&model.k, |e| d_x(e, &rules)),
            dt_k: try_map(&model.k, |e| d_t(e, &rules))?,
            ut: tilde_matrix(&model.u),
            vt: tilde_matrix(&model.v),
        })
    }

    /// `max |d_t U - d_x V + [U, V]|` at the spectral parameter of `asg`.
    pub fn zero_curvature<R: Rng>(&self, asg: &mut Assignment, rng: &mut R) -> Result<f64> {
        let m = self.model;
        for mat in [&m.u, &m.v, &self.dt_u, &self.dx_v] {
            for row in mat.iter() {
                fill(asg, row, rng);
            }
        }
        let n = asg.n;
        let (u, v) = (eval_matrix(&m.u, asg)?, eval_matrix(&m.v, asg)?);
        let uv = mat_mul(&u, &v, n);
        let vu = mat_mul(&v, &u, n);
        let (a, b) = (eval_matrix(&self.dt_u, asg)?, eval_matrix(&self.dx_v, asg)?);
        Ok(mat_error(&[(1.0, &a), (-1.0, &b), (1.0, &uv), (-1.0, &vu)], n))
    }

    /// Largest entry of `d_x K - U~K + KU` and `d_t K - V~K + KV` at a
    /// random point of the defect manifold.
    pub fn defect_gauge<R: Rng>(&self, asg: &mut Assignment, rng: &mut R) -> Result<f64> {
        let m = self.model;
        on_defect(m, asg, rng)?;
        for mat in [&m.k, &self.dx_k, &self.dt_k, &self.ut, &self.vt, &m.u, &m.v] {
            for row in mat.iter() {
                fill(asg, row, rng);
            }
        }
        let n = asg.n;
        let kv = eval_matrix(&m.k, asg)?;
        let mut worst: f64 = 0.0;
        for (d, left, right) in [(&self.dx_k, &self.ut, &m.u), (&self.dt_k, &self.vt, &m.v)] {
            let d = eval_matrix(d, asg)?;
            let lk = mat_mul(&eval_matrix(left, asg)?, &kv, n);
            let kr = mat_mul(&kv, &eval_matrix(right, asg)?, n);
            worst = worst.max(mat_error(&[(1.0, &d), (-1.0, &lk), (1.0, &kr)], n));
        }
        Ok(worst)
    }
}

pub fn zero_curvature_error<R: Rng>(model: &ModelSpec, asg: &mut Assignment, rng: &mut R) -> Result<f64> {
    StructureProbe::new(model)?.zero_curvature(asg, rng)
}

pub fn defect_gauge_error<R: Rng>(model: &ModelSpec, asg: &mut Assignment, rng: &mut R) -> Result<f64> {
    StructureProbe::new(model)?.defect_gauge(asg, rng)
}

/// Riccati coefficients of one column: `(row, order) -> coefficient`.
pub type Coefficients = BTreeMap<(usize, i32), SymExpr>;

/// Oriented series of `Gamma_{row j}`; the diagonal entry is one.
fn gamma_series(coeffs: &Coefficients, row: usize, j: usize, asg: &Assignment) -> Result<Laurent> {
    let n = asg.n;
    let mut out = Laurent::new();
    if row == j {
        out.insert(0, GradedElement::one(n));
        return Ok(out);
    }
    for ((r, k), c) in coeffs {
        if *r == row && !c.is_zero() {
            accumulate(&mut out, -k, eval(c, asg)?);
        }
    }
    Ok(out)
}

/// Truncated Riccati data of one column with the x-derivatives of its
/// coefficients, ready for repeated evaluation.
pub struct RiccatiProbe {
    j: usize,
    upto: i32,
    kept: Coefficients,
    dx: Coefficients,
    u: Matrix,
}

impl RiccatiProbe {
    pub fn new(
        model: &ModelSpec,
        j: usize,
        branch: Branch,
        coeffs: &Coefficients,
        aux_rules: &RuleSet,
        upto: i32,
    ) -> Self {
        let rules = model.eom.merged(aux_rules);
        let kept: Coefficients = coeffs.iter().filter(|((_, k), _)| *k <= upto).map(|(k, v)| (*k, v.clone())).collect();
        let dx = kept.iter().map(|(k, c)| (*k, d_x(c, &rules))).collect();
        RiccatiProbe { j, upto, kept, dx, u: branch.orient_matrix(&model.u) }
    }

    /// Largest coefficient of the x-Riccati residual of the column at the
    /// powers fixed by the coefficients through `upto`.
    pub fn error<R: Rng>(&self, asg: &mut Assignment, rng: &mut R) -> Result<f64> {
        fill(asg, self.kept.values().chain(self.dx.values()), rng);
        for row in self.u.iter() {
            fill(asg, row, rng);
        }
        let n = asg.n;
        let lo = 2 - self.upto;
        let size = self.u.len();
        let g: Vec<Laurent> = (1..=size).map(|r| gamma_series(&self.kept, r, self.j, asg)).collect::<Result<_>>()?;
        let uv: Vec<Vec<Laurent>> =
            self.u.iter().map(|r| r.iter().map(|e| eval_laurent(e, asg)).collect()).collect::<Result<_>>()?;
        let jj = self.j - 1;
        let mut back = Laurent::new();
        for k in 0..size {
            back = add_laurent(&back, &mul_laurent(&uv[jj][k], &g[k], lo));
        }
        let mut worst: f64 = 0.0;
        for i in (0..size).filter(|&i| i != jj) {
            let mut e = Laurent::new();
            for k in 0..size {
                e = add_laurent(&e, &mul_laurent(&uv[i][k], &g[k], lo));
            }
            e = sub_laurent(&e, &mul_laurent(&g[i], &back, lo));
            let dgi = gamma_series(&self.dx, i + 1, self.j, asg)?;
            e = sub_laurent(&e, &dgi);
            for p in lo..=2 {
                worst = worst.max(coeff(&e, p, n).max_abs());
            }
        }
        Ok(worst)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn riccati_error<R: Rng>(
    model: &ModelSpec,
    j: usize,
    branch: Branch,
    coeffs: &Coefficients,
    aux_rules: &RuleSet,
    upto: i32,
    asg: &mut Assignment,
    rng: &mut R,
) -> Result<f64> {
    RiccatiProbe::new(model, j, branch, coeffs, aux_rules, upto).error(asg, rng)
}

fn inverse(c: &GradedElement) -> Result<GradedElement> {
    let n = c.num_generators();
    let b = c.body();
    if b.norm() < 1e-300 {
        return Err(Error::SingularDefect("sampled leading coefficient has no body".into()));
    }
    let nil = &c.scale(1.0 / b) - &GradedElement::one(n);
    let mut term = GradedElement::one(n);
    let mut acc = GradedElement::one(n);
    for _ in 0..=n {
        term = -&(&term * &nil);
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    Ok(acc.scale(1.0 / b))
}

fn ln_even(c: &GradedElement) -> Result<GradedElement> {
    let n = c.num_generators();
    let b = c.body();
    if b.norm() < 1e-300 {
        return Err(Error::SingularDefect("sampled leading coefficient has no body".into()));
    }
    let nil = &c.scale(1.0 / b) - &GradedElement::one(n);
    let mut acc = GradedElement::scalar(n, b.ln());
    let mut pow = GradedElement::one(n);
    for k in 1..=n {
        pow = &pow * &nil;
        if pow.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc = &acc + &pow.scale(Complex64::new(sign / k as f64, 0.0));
    }
    Ok(acc)
}

/// Coefficients `0..=max_order` of `-ln(K_jj + sum_k K_jk Gamma_kj)`,
/// formed numerically. Field-independent constants are not removed.
pub fn defect_series(
    model: &ModelSpec,
    j: usize,
    branch: Branch,
    coeffs: &Coefficients,
    max_order: i32,
    asg: &Assignment,
) -> Result<Vec<GradedElement>> {
    let n = asg.n;
    let k = branch.orient_matrix(&model.k);
    let lo = -max_order - 8;
    let mut delta = eval_laurent(&k[j - 1][j - 1], asg)?;
    for r in (1..=model.size).filter(|&r| r != j) {
        let g = gamma_series(coeffs, r, j, asg)?;
        delta = add_laurent(&delta, &mul_laurent(&eval_laurent(&k[j - 1][r - 1], asg)?, &g, lo));
    }
    let top = delta
        .iter()
        .rev()
        .find(|(_, v)| v.max_abs() > 1e-13)
        .map(|(p, _)| *p)
        .ok_or_else(|| Error::SingularDefect("sampled generating function vanishes".into()))?;
    let lead = delta[&top].clone();
    let inv = inverse(&lead)?;
    // s = Delta / (lead lambda^top) - 1, strictly negative powers only
    let mut s = Laurent::new();
    for (p, v) in &delta {
        if *p < top {
            s.insert(p - top, v * &inv);
        }
    }
    let cut = -max_order;
    let mut out = Laurent::new();
    let mut pow = Laurent::new();
    pow.insert(0, GradedElement::one(n));
    for m in 1..=(max_order + 1) {
        pow = mul_laurent(&pow, &s, cut);
        if pow.is_empty() {
            break;
        }
        let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
        for (p, v) in &pow {
            accumulate(&mut out, *p, v.scale(Complex64::new(sign / m as f64, 0.0)));
        }
    }
    accumulate(&mut out, 0, -&ln_even(&lead)?);
    Ok((0..=max_order).map(|k| coeff(&out, -k, n)).collect())
}

/// Same assignment with every atom set to zero.
pub fn vacuum(asg: &Assignment) -> Assignment {
    let mut z = asg.clone();
    for v in z.atoms.values_mut() {
        *v = GradedElement::zero(asg.n);
    }
    z
}

/// Largest difference of the variational derivatives of `a` and `b`,
/// which vanishes when they agree up to a total x-derivative.
pub fn euler_error<R: Rng>(a: &SymExpr, b: &SymExpr, asg: &mut Assignment, rng: &mut R) -> Result<f64> {
    let mut vars = dependent_vars(a);
    vars.extend(dependent_vars(b));
    let mut worst: f64 = 0.0;
    for u in vars {
        let (ea, eb) = (euler(a, &u), euler(b, &u));
        fill(asg, [&ea, &eb], rng);
        worst = worst.max(distance(&eval(&ea, asg)?, &eval(&eb, asg)?));
    }
    Ok(worst)
}

/// Largest sampled error per identity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    pub samples: usize,
    pub errors: BTreeMap<String, f64>,
}

impl SweepReport {
    fn record(&mut self, name: &str, e: f64) {
        let slot = self.errors.entry(name.to_string()).or_insert(0.0);
        if e.is_nan() || e > *slot {
            *slot = e;
        }
    }

    pub fn worst(&self) -> f64 {
        self.errors.values().fold(0.0, |a, &b| if b.is_nan() { f64::NAN } else { a.max(b) })
    }
}

/// Re-check the structure equations, Riccati coefficients, sum rules and
/// defect contributions of a polynomial model at `samples` random points.
pub fn sweep<R: Rng>(model: &ModelSpec, samples: usize, rng: &mut R) -> Result<SweepReport> {
    use crate::defects::defect_table;
    use crate::riccati::{conserved_density, solve_riccati};

    let sols: Vec<_> = (1..=model.size)
        .flat_map(|j| Branch::BOTH.into_iter().map(move |b| (j, b)))
        .map(|(j, b)| solve_riccati(model, j, b, 4))
        .collect::<Result<_>>()?;
    let table = defect_table(model, 2)?;
    let mut dens = BTreeMap::new();
    for sol in &sols {
        for k in 0..=2 {
            dens.insert((sol.j, sol.branch, k), conserved_density(model, sol, k)?.density);
        }
    }
    let structure = StructureProbe::new(model)?;
    let probes: Vec<RiccatiProbe> =
        sols.iter().map(|s| RiccatiProbe::new(model, s.j, s.branch, &s.coeffs, &s.aux_rules(), 3)).collect();
    let mut report = SweepReport { samples, ..SweepReport::default() };
    for _ in 0..samples {
        let mut asg = Assignment::random(GENERATORS, [], model.params, rng);
        report.record("zero_curvature", structure.zero_curvature(&mut asg, rng)?);
        let mut asg = Assignment::random(GENERATORS, [], model.params, rng);
        report.record("defect_gauge", structure.defect_gauge(&mut asg, rng)?);

        let mut asg = Assignment::random(GENERATORS, [], model.params, rng);
        fill(&mut asg, dens.values().chain(table.values()), rng);
        for (sol, probe) in sols.iter().zip(&probes) {
            let (j, b) = (sol.j, sol.branch);
            report.record("riccati", probe.error(&mut asg, rng)?);
            fill(&mut asg, sol.coeffs.values(), rng);
            let got = defect_series(model, j, b, &sol.coeffs, 2, &asg)?;
            let base = defect_series(model, j, b, &sol.coeffs, 2, &vacuum(&asg))?;
            for k in 0..=2 {
                if let Some(want) = table.get(&(j, b, k)) {
                    let d = distance(&(&got[k as usize] - &base[k as usize]), &eval(want, &asg)?);
                    report.record("defect_contribution", d);
                }
            }
        }
        if model.size == 3 {
            for b in Branch::BOTH {
                for k in [0, 2] {
                    let v = |j| eval(&dens[&(j, b, k)], &asg);
                    report.record("density_sum_rule", distance(&(&v(1)? + &v(2)?), &v(3)?));
                    let d = |j| eval(&table[&(j, b, k)], &asg);
                    report.record("defect_sum_rule", distance(&(&d(1)? + &d(2)?), &d(3)?));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    use super::*;
    use crate::defects::defect_table;
    use crate::models::{build_model, inject_fault, Fault, ModelName};
    use crate::riccati::solve_riccati;
    use crate::scalar::ParamValues;

    fn gt() -> ModelSpec {
        build_model(ModelName::Gt, ParamValues { m: 1.3, g: 0.7, a: 1.1, sigma: 1.0 }).unwrap()
    }

    fn point(model: &ModelSpec, rng: &mut StdRng) -> Assignment {
        Assignment::random(GENERATORS, [], model.params, rng)
    }

    #[test]
    fn structure_equations_hold_at_random_points() {
        let m = gt();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let mut asg = point(&m, &mut rng);
            assert!(zero_curvature_error(&m, &mut asg, &mut rng).unwrap() < 1e-10);
            let mut asg = point(&m, &mut rng);
            assert!(defect_gauge_error(&m, &mut asg, &mut rng).unwrap() < 1e-10);
        }
        let bad = inject_fault(&m, Fault::KSign);
        let mut asg = point(&bad, &mut rng);
        assert!(defect_gauge_error(&bad, &mut asg, &mut rng).unwrap() > 1e-3);
    }

    #[test]
    fn solver_output_satisfies_sampled_riccati_equations() {
        let m = gt();
        let mut rng = StdRng::seed_from_u64(11);
        for j in 1..=3 {
            for b in Branch::BOTH {
                let sol = solve_riccati(&m, j, b, 4).unwrap();
                let mut asg = point(&m, &mut rng);
                let e = riccati_error(&m, j, b, &sol.coeffs, &sol.aux_rules(), 3, &mut asg, &mut rng).unwrap();
                assert!(e < 1e-10, "j={} {}: {:e}", j, b, e);
                let mut broken = sol.coeffs.clone();
                let key = *broken.keys().find(|(r, k)| *r != j && *k == 1).unwrap();
                broken.insert(key, broken[&key].scale_ratio(2, 1));
                let e = riccati_error(&m, j, b, &broken, &sol.aux_rules(), 3, &mut asg, &mut rng).unwrap();
                assert!(e > 1e-3, "j={} {}: corrupted coefficient passed", j, b);
            }
        }
    }

    #[test]
    fn sweep_is_clean_for_the_grassmannian_model() {
        let mut rng = StdRng::seed_from_u64(5);
        let r = sweep(&gt(), 4, &mut rng).unwrap();
        assert_eq!(r.errors.len(), 6);
        assert!(r.worst() < 1e-10, "{:?}", r);
    }

    #[test]
    fn sampled_logarithm_matches_defect_table() {
        let m = gt();
        let table = defect_table(&m, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for j in 1..=3 {
            for b in Branch::BOTH {
                let sol = solve_riccati(&m, j, b, 5).unwrap();
                let mut asg = point(&m, &mut rng);
                fill(&mut asg, sol.coeffs.values().chain(table.values()), &mut rng);
                let got = defect_series(&m, j, b, &sol.coeffs, 2, &asg).unwrap();
                let base = defect_series(&m, j, b, &sol.coeffs, 2, &vacuum(&asg)).unwrap();
                for k in [0, 2] {
                    let want = eval(&table[&(j, b, k)], &asg).unwrap();
                    let d = distance(&(&got[k as usize] - &base[k as usize]), &want);
                    assert!(d < 1e-10, "D_{}^({}) [{}]: {:e}", j, k, b, d);
                }
            }
        }
    }
}
