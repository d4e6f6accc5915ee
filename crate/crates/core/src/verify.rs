//! The verification matrix behind `check`: structure equations, Riccati
//! residuals, conservation with and without the defect, sum rules, and the
//! sampled re-check of the Grassmannian identities.

use std::fmt;

use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::defects::{
    angle_number_residual, conservation_with_defect, defect_charges, defect_sum_rule_gt, defect_table, nilpotent_cube,
};
use crate::error::Result;
use crate::models::{
    build_model, check_defect_gauge, check_trace, check_zero_curvature, inject_fault, Fault, ModelName, ModelSpec,
};
use crate::riccati::{check_sum_rule_gt, conserved_density, series_residuals, solve_riccati, Branch, DensityTable};
use crate::sampling;
use crate::scalar::ParamValues;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub model: ModelName,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{:<4} {:<2} {:<26} {}", mark, self.model.as_str(), self.name, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub models: Vec<ModelName>,
    pub params: ParamValues,
    pub fault: Option<Fault>,
    /// random points for the sampled checks; zero skips them
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            models: ModelName::ALL.to_vec(),
            params: ParamValues::default(),
            fault: None,
            samples: 100,
            seed: 1,
        }
    }
}

/// Conservation orders checked with the defect present.
pub fn defect_orders(model: ModelName) -> &'static [i32] {
    match model {
        ModelName::Sg => &[1],
        ModelName::Bt => &[2],
        ModelName::Gt => &[0, 2],
    }
}

fn outcome(model: ModelName, name: &str, r: Result<String>) -> CheckOutcome {
    match r {
        Ok(detail) => CheckOutcome { model, name: name.into(), passed: true, detail },
        Err(e) => CheckOutcome { model, name: name.into(), passed: false, detail: e.to_string() },
    }
}

fn fail(what: String) -> crate::error::Error {
    crate::error::Error::Derivation(what)
}

fn riccati_check(m: &ModelSpec) -> Result<String> {
    let mut n = 0;
    for j in 1..=m.size {
        for b in Branch::BOTH {
            let sol = solve_riccati(m, j, b, 4)?;
            for (eq, row, p, r) in series_residuals(m, &sol, 4)? {
                if !r.is_zero() {
                    return Err(fail(format!("column {} [{}] {}-equation row {} power {}: {}", j, b, eq, row, p, r)));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{} residuals vanish", n))
}

fn densities(m: &ModelSpec) -> Result<DensityTable> {
    let mut t = DensityTable::new();
    for j in 1..=m.size {
        for b in Branch::BOTH {
            let sol = solve_riccati(m, j, b, 4)?;
            for k in 0..=2 {
                t.insert((j, b, k), conserved_density(m, &sol, k)?);
            }
        }
    }
    Ok(t)
}

fn defect_conservation(m: &ModelSpec) -> Result<String> {
    let mut n = 0;
    for j in 1..=m.size {
        for b in Branch::BOTH {
            for &k in defect_orders(m.name) {
                let r = conservation_with_defect(m, j, b, k)?;
                if !r.is_zero() {
                    return Err(fail(format!("D_{}^({}) [{}]: residual {}", j, k, b, r)));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{} identities hold", n))
}

fn sum_rules(m: &ModelSpec) -> Result<String> {
    let bulk = check_sum_rule_gt(&densities(m)?);
    let defect = defect_sum_rule_gt(&defect_table(m, 2)?);
    for r in bulk.iter().chain(&defect) {
        if !r.holds {
            return Err(fail(format!("order {} [{}]: {}", r.order, r.branch, r.discrepancy)));
        }
    }
    for j in 1..=m.size {
        for b in Branch::BOTH {
            let c = nilpotent_cube(m, j, b)?;
            if !c.is_zero() {
                return Err(fail(format!("cube of the nilpotent part of Delta_{} [{}]: {}", j, b, c)));
            }
        }
    }
    Ok(format!("{} bulk and {} defect rules hold", bulk.len(), defect.len()))
}

fn angle_check(m: &ModelSpec) -> Result<String> {
    let c = defect_charges(m, &defect_table(m, 2)?)?;
    let n = c.n.ok_or_else(|| fail("no number charge".into()))?;
    let r = angle_number_residual(m, &n)?;
    if !r.is_zero() {
        return Err(fail(format!("residual {}", r)));
    }
    Ok(format!("N_D = {}", n))
}

fn sampled(m: &ModelSpec, samples: usize, seed: u64) -> Result<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let r = sampling::sweep(m, samples, &mut rng)?;
    let worst = r.worst();
    if worst.is_nan() || worst >= sampling::TOLERANCE {
        let bad: Vec<String> = r
            .errors
            .iter()
            .filter(|(_, e)| e.is_nan() || **e >= sampling::TOLERANCE)
            .map(|(k, e)| format!("{} {:.2e}", k, e))
            .collect();
        return Err(fail(format!("{} samples: {}", samples, bad.join(", "))));
    }
    Ok(format!("{} samples, max error {:.2e}", samples, worst))
}

type Job<'a> = (&'static str, Box<dyn Fn() -> Result<String> + Send + Sync + 'a>);

/// Every check for one model, in a fixed order.
pub fn check_model(name: ModelName, opts: &CheckOptions) -> Vec<CheckOutcome> {
    let m = match build_model(name, opts.params) {
        Ok(m) => m,
        Err(e) => return vec![outcome(name, "build", Err(e))],
    };
    let m = match opts.fault {
        Some(f) => inject_fault(&m, f),
        None => m,
    };
    let mut jobs: Vec<Job<'_>> = vec![
        ("trace", Box::new(|| check_trace(&m).map(|_| "traceless".to_string()))),
        ("zero_curvature", Box::new(|| check_zero_curvature(&m).map(|_| "exactly zero".to_string()))),
        ("defect_gauge", Box::new(|| check_defect_gauge(&m).map(|_| "exactly zero".to_string()))),
        ("riccati_series", Box::new(|| riccati_check(&m))),
        ("bulk_conservation", Box::new(|| densities(&m).map(|t| format!("{} densities conserved", t.len())))),
        ("defect_conservation", Box::new(|| defect_conservation(&m))),
    ];
    match name {
        ModelName::Bt => jobs.push(("angle_number", Box::new(|| angle_check(&m)))),
        ModelName::Gt => {
            jobs.push(("sum_rules", Box::new(|| sum_rules(&m))));
            if opts.samples > 0 {
                jobs.push(("grassmann_sampling", Box::new(|| sampled(&m, opts.samples, opts.seed))));
            }
        }
        ModelName::Sg => {}
    }
    jobs.par_iter().map(|(label, f)| outcome(name, label, f())).collect()
}

pub fn check_all(opts: &CheckOptions) -> Vec<CheckOutcome> {
    opts.models.par_iter().flat_map(|&n| check_model(n, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_gordon_matrix_passes() {
        let opts = CheckOptions { models: vec![ModelName::Sg], ..CheckOptions::default() };
        let out = check_all(&opts);
        assert_eq!(out.len(), 6);
        assert!(out.iter().all(|c| c.passed), "{:#?}", out);
    }

    #[test]
    fn flipped_defect_matrix_fails_the_gauge_check() {
        let opts = CheckOptions { models: vec![ModelName::Bt], fault: Some(Fault::KSign), ..CheckOptions::default() };
        let out = check_all(&opts);
        let gauge = out.iter().find(|c| c.name == "defect_gauge").unwrap();
        assert!(!gauge.passed);
        assert!(gauge.detail.contains("R_x") || gauge.detail.contains("R_t"), "{}", gauge.detail);
        assert!(out.iter().find(|c| c.name == "zero_curvature").unwrap().passed);
    }
}
