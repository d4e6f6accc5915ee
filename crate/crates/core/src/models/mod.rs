//! Lax pairs, equations of motion, defect matrices and Bäcklund relations
//! for the three models, with their structural checks.

pub mod backlund;
mod bt;
mod gt;
pub mod matrix;
mod sg;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ParamValues;
use crate::symexpr::{d_t, d_x, parse_expr_with, FieldAtom, FieldId, JsonExpr, RuleSet, SymExpr};
pub use backlund::{BacklundRuleSet, DefectForm, RuleTable};
pub use matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelName {
    #[serde(rename = "BT")]
    Bt,
    #[serde(rename = "GT")]
    Gt,
    #[serde(rename = "SG")]
    Sg,
}

impl ModelName {
    pub const ALL: [ModelName; 3] = [ModelName::Bt, ModelName::Gt, ModelName::Sg];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Bt => "BT",
            ModelName::Gt => "GT",
            ModelName::Sg => "SG",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BT" => Ok(ModelName::Bt),
            "GT" => Ok(ModelName::Gt),
            "SG" => Ok(ModelName::Sg),
            _ => Err(Error::Config(format!("unknown model `{}` (expected BT, GT or SG)", s))),
        }
    }
}

/// Everything that defines one model.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: ModelName,
    pub size: usize,
    pub params: ParamValues,
    pub u: Matrix,
    pub v: Matrix,
    /// time derivatives of the bulk fields on both sides
    pub eom: RuleSet,
    pub k: Matrix,
    pub backlund: BacklundRuleSet,
    /// grading of the row/column indices (true = odd)
    pub odd_index: Vec<bool>,
    /// first power of the expansion of the Riccati coefficients
    pub series_start: i32,
    /// statistics of the defect field
    pub odd_x: bool,
}

/// Parse a model expression; panics on malformed built-in tables.
pub(crate) fn expr(s: &str, odd_x: bool) -> SymExpr {
    match parse_expr_with(s, odd_x) {
        Ok(e) => e,
        Err(err) => panic!("built-in model expression `{}`: {}", s, err),
    }
}

fn is_bulk(id: FieldId) -> bool {
    matches!(id, FieldId::Phi1 | FieldId::Phi2 | FieldId::Psi1 | FieldId::Psi2 | FieldId::Phi | FieldId::PhiT)
}

/// Same expression with every bulk field taken on the left of the defect.
pub fn tilde(e: &SymExpr) -> SymExpr {
    e.rename_atoms(&|a| if is_bulk(a.id) { a.with_tilde(true) } else { *a })
}

pub fn tilde_matrix(m: &Matrix) -> Matrix {
    matrix::map(m, tilde)
}

fn eom_with_tilde(r: &RuleSet) -> RuleSet {
    let mut out = r.clone();
    for (k, v) in &r.dt {
        out.set_dt(k.with_tilde(true), tilde(v));
    }
    out
}

/// Chain-rule derivatives of the angle defined by
/// `sin 2 alpha = (g a / 2 m) X'X`, and of `sec 2 alpha`.
fn angle_rules(mut r: RuleSet, x: FieldAtom) -> RuleSet {
    let xd = x.dag();
    let coef = expr("1/4*g*a*m^-1*sec2a", false);
    let sec_coef = expr("-i*sec2a^2*(exp(2*i*alpha) - exp(-2*i*alpha))", false);
    let rate = |table: &BTreeMap<FieldAtom, SymExpr>| {
        let prod = &(&table[&xd] * &SymExpr::atom(x)) + &(&SymExpr::atom(xd) * &table[&x]);
        let da = &coef * &prod;
        let ds = &sec_coef * &da;
        (da, ds)
    };
    let (at, st) = rate(&r.dt);
    let (ax, sx) = rate(&r.dx);
    r.set_dt(FieldAtom::alpha(), at);
    r.set_dt(FieldAtom::sec_two_alpha(), st);
    r.set_dx(FieldAtom::alpha(), ax);
    r.set_dx(FieldAtom::sec_two_alpha(), sx);
    r
}

pub fn validate_params(name: ModelName, p: &ParamValues) -> Result<()> {
    let bad = |what: &str| Err(Error::InvalidParams(format!("{}: {}", name, what)));
    let finite = [p.m, p.g, p.a, p.sigma].iter().all(|v| v.is_finite());
    if !finite {
        return bad("parameters must be finite");
    }
    if p.m <= 0.0 {
        return bad("mass m must be positive");
    }
    match name {
        ModelName::Bt | ModelName::Gt => {
            if p.g <= 0.0 {
                return bad("coupling g must be positive");
            }
            if p.a == 0.0 {
                return bad("defect parameter a must be nonzero");
            }
        }
        ModelName::Sg => {
            if p.sigma == 0.0 {
                return bad("defect parameter sigma must be nonzero");
            }
        }
    }
    Ok(())
}

/// Build the model with symbolic parameters; `params` are kept for
/// numerical use and validated here.
pub fn build_model(name: ModelName, params: ParamValues) -> Result<ModelSpec> {
    validate_params(name, &params)?;
    let spec = match name {
        ModelName::Bt => bt::build(params),
        ModelName::Gt => gt::build(params),
        ModelName::Sg => sg::build(params),
    };
    check_trace(&spec)?;
    Ok(spec)
}

impl ModelSpec {
    pub fn parse(&self, s: &str) -> Result<SymExpr> {
        parse_expr_with(s, self.odd_x)
    }

    /// Equations of motion together with the Bäcklund derivative rules.
    pub fn defect_rules(&self) -> RuleSet {
        self.eom.merged(&self.backlund.rules)
    }

    pub fn defect_atom(&self) -> FieldAtom {
        FieldAtom::new(FieldId::X, self.odd_x)
    }

    /// Bulk fields (right of the defect), daggered ones included.
    pub fn bulk_fields(&self) -> Vec<FieldAtom> {
        let ids: &[FieldId] = match self.name {
            ModelName::Bt => &[FieldId::Phi1, FieldId::Phi2],
            ModelName::Gt => &[FieldId::Psi1, FieldId::Psi2],
            ModelName::Sg => &[FieldId::Phi, FieldId::PhiT],
        };
        let mut v = Vec::new();
        for &id in ids {
            let a = FieldAtom::field(id);
            v.push(a);
            if self.name != ModelName::Sg {
                v.push(a.dag());
            }
        }
        v
    }

    /// Sign of the `(i, j)` entry in the (super)trace form.
    pub fn trace_sign(&self, i: usize) -> i64 {
        if self.odd_index[i] {
            -1
        } else {
            1
        }
    }
}

/// Supertrace (plain trace when no index is odd).
pub fn supertrace(spec: &ModelSpec, m: &Matrix) -> SymExpr {
    let mut acc = SymExpr::zero();
    for (i, row) in m.iter().enumerate() {
        acc += &row[i].scale_ratio(spec.trace_sign(i), 1);
    }
    acc
}

pub fn check_trace(spec: &ModelSpec) -> Result<()> {
    for (label, m) in [("U", &spec.u), ("V", &spec.v)] {
        let t = supertrace(spec, m);
        if !t.is_zero() {
            return Err(Error::ModelDefect {
                model: spec.name.to_string(),
                what: format!("{} is not trace-free: {}", label, t),
            });
        }
    }
    Ok(())
}

/// `d_t U - d_x V + [U, V]` on shell.
pub fn zero_curvature_residual(spec: &ModelSpec) -> Result<Matrix> {
    let dt_u = matrix::try_map(&spec.u, |e| d_t(e, &spec.eom))?;
    let dx_v = matrix::map(&spec.v, |e| d_x(e, &RuleSet::new()));
    Ok(matrix::add(&matrix::sub(&dt_u, &dx_v), &matrix::commutator(&spec.u, &spec.v)))
}

/// `(R_t, R_x)` with `R_t = d_t K - V~K + KV` and `R_x = d_x K - U~K + KU`,
/// each entry reduced on the defect manifold.
pub fn defect_gauge_residual(spec: &ModelSpec) -> Result<(Matrix, Matrix)> {
    let rules = spec.defect_rules();
    let k = &spec.k;
    let dt_k = matrix::try_map(k, |e| d_t(e, &rules))?;
    let dx_k = matrix::map(k, |e| d_x(e, &rules));
    let vt = tilde_matrix(&spec.v);
    let ut = tilde_matrix(&spec.u);
    let rt = matrix::add(&matrix::sub(&dt_k, &matrix::mul(&vt, k)), &matrix::mul(k, &spec.v));
    let rx = matrix::add(&matrix::sub(&dx_k, &matrix::mul(&ut, k)), &matrix::mul(k, &spec.u));
    let red = |e: &SymExpr| spec.backlund.reduce(e);
    Ok((matrix::try_map(&rt, red)?, matrix::try_map(&rx, red)?))
}

/// Entry-by-entry description of a nonzero residual, split by powers of
/// the spectral parameter.
pub fn describe_residual(label: &str, m: &Matrix) -> String {
    let mut out = String::new();
    for (i, j) in matrix::nonzero_entries(m) {
        let e = &m[i][j];
        let (lo, hi) = e.lambda_range().unwrap_or((0, 0));
        for k in lo..=hi {
            let c = e.laurent_coeff(k);
            if !c.is_zero() {
                out.push_str(&format!("{}[{}][{}] lam^{}: {}\n", label, i + 1, j + 1, k, c));
            }
        }
    }
    out
}

pub fn check_zero_curvature(spec: &ModelSpec) -> Result<()> {
    let r = zero_curvature_residual(spec)?;
    if matrix::is_zero(&r) {
        Ok(())
    } else {
        Err(Error::ModelDefect {
            model: spec.name.to_string(),
            what: format!("zero-curvature residual\n{}", describe_residual("R", &r)),
        })
    }
}

pub fn check_defect_gauge(spec: &ModelSpec) -> Result<()> {
    let (rt, rx) = defect_gauge_residual(spec)?;
    if matrix::is_zero(&rt) && matrix::is_zero(&rx) {
        Ok(())
    } else {
        Err(Error::ModelDefect {
            model: spec.name.to_string(),
            what: format!("defect gauge residual\n{}{}", describe_residual("R_t", &rt), describe_residual("R_x", &rx)),
        })
    }
}

/// Deliberate corruptions used to exercise the failure paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// flip the sign of the upper off-diagonal defect-matrix entry
    KSign,
}

impl FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k-sign" => Ok(Fault::KSign),
            _ => Err(Error::Config(format!("unknown fault `{}`", s))),
        }
    }
}

pub fn inject_fault(spec: &ModelSpec, fault: Fault) -> ModelSpec {
    let mut s = spec.clone();
    match fault {
        Fault::KSign => {
            let last = s.size - 1;
            s.k[0][last] = -&s.k[0][last];
        }
    }
    s
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelJson {
    pub name: ModelName,
    pub size: usize,
    pub u: Vec<Vec<JsonExpr>>,
    pub v: Vec<Vec<JsonExpr>>,
    pub k: Vec<Vec<JsonExpr>>,
    pub eom: RuleTable,
    pub backlund_rules: RuleTable,
    pub backlund_identities: Vec<String>,
    pub boundary_values: BTreeMap<String, String>,
}

fn json_matrix(m: &Matrix) -> Vec<Vec<JsonExpr>> {
    m.iter().map(|r| r.iter().map(|e| e.to_json()).collect()).collect()
}

impl ModelSpec {
    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            name: self.name,
            size: self.size,
            u: json_matrix(&self.u),
            v: json_matrix(&self.v),
            k: json_matrix(&self.k),
            eom: RuleTable::from_rules(&self.eom),
            backlund_rules: RuleTable::from_rules(&self.backlund.rules),
            backlund_identities: self.backlund.algebraic.iter().map(|e| e.to_string()).collect(),
            boundary_values: self.backlund.elimination.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    pub fn to_latex(&self) -> String {
        let mat = |m: &Matrix| {
            let rows: Vec<String> =
                m.iter().map(|r| r.iter().map(|e| e.to_latex()).collect::<Vec<_>>().join(" & ")).collect();
            format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}", rows.join(" \\\\\n"))
        };
        let mut s = format!("% {} model\n", self.name);
        for (label, m) in [("U", &self.u), ("V", &self.v), ("K", &self.k)] {
            s.push_str(&format!("\\[\n{} = {}\n\\]\n", label, mat(m)));
        }
        s.push_str("\\begin{align*}\n");
        for (k, v) in &self.eom.dt {
            if !k.tilde {
                s.push_str(&format!("\\partial_t {} &= {} \\\\\n", k.to_latex(), v.to_latex()));
            }
        }
        s.push_str("\\end{align*}\n");
        s
    }
}
