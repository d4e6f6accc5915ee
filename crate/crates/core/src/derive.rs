//! End-to-end derivation for one model: Riccati coefficients, conserved
//! densities and charges, defect contributions, serialised as JSON and
//! LaTeX.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defects::{defect_table, eliminate_boundary, DefectTable};
use crate::error::{Error, Result};
use crate::models::{ModelName, ModelSpec};
use crate::riccati::{combine_charges, conserved_density, solve_riccati, Branch, RiccatiSolution};
use crate::scalar::ParamValues;
use crate::symexpr::calculus::ibp_normal;
use crate::symexpr::SymExpr;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rendered {
    pub text: String,
    pub tex: String,
}

impl Rendered {
    fn of(e: &SymExpr) -> Self {
        Rendered { text: e.to_string(), tex: e.to_latex() }
    }

    fn trig(e: &SymExpr) -> Self {
        Rendered { text: e.to_string(), tex: e.to_latex_trig() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub row: usize,
    pub column: usize,
    pub branch: Branch,
    pub order: i32,
    pub symbol: String,
    pub value: Rendered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxEntry {
    pub symbol: String,
    pub column: usize,
    pub branch: Branch,
    pub dx: Rendered,
    pub dt: Option<Rendered>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFile {
    pub model: ModelName,
    pub params: ParamValues,
    pub order: i32,
    pub coefficients: Vec<GammaEntry>,
    pub aux: Vec<AuxEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEntry {
    pub column: usize,
    pub branch: Branch,
    pub order: i32,
    pub density: Rendered,
    pub flux: Rendered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeEntry {
    pub name: String,
    pub density: Rendered,
    /// canonical representative modulo total x-derivatives
    pub normal_form: Rendered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitiesFile {
    pub model: ModelName,
    pub params: ParamValues,
    pub order: i32,
    pub densities: Vec<DensityEntry>,
    pub charges: Vec<ChargeEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectEntry {
    pub column: usize,
    pub branch: Branch,
    pub order: i32,
    pub symbol: String,
    pub value: Rendered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectChargeEntry {
    pub name: String,
    /// in terms of the defect field
    pub value: Rendered,
    /// defect field eliminated in favour of the bulk fields
    pub eliminated: Rendered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectFile {
    pub model: ModelName,
    pub params: ParamValues,
    pub order: i32,
    pub contributions: Vec<DefectEntry>,
    pub charges: Vec<DefectChargeEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub gamma: GammaFile,
    pub densities: DensitiesFile,
    pub defect: DefectFile,
    pub tex: String,
}

/// Output names, in write order.
pub const OUTPUT_FILES: [&str; 4] = ["gamma.json", "densities.json", "defect.json", "report.tex"];

/// Lowest order entering each physical charge.
fn charge_orders(model: ModelName) -> Vec<(&'static str, i32)> {
    match model {
        ModelName::Bt | ModelName::Gt => vec![("N", 0), ("E", 2), ("P", 2)],
        ModelName::Sg => vec![("E", 1), ("P", 1)],
    }
}

fn hat(b: Branch) -> &'static str {
    if b.is_hat() {
        "h"
    } else {
        ""
    }
}

/// Charges whose ingredients all sit at orders `<= order`.
fn available_charges(
    model: ModelName,
    order: i32,
    get: &dyn Fn(usize, Branch, i32) -> Option<SymExpr>,
) -> Result<Vec<(&'static str, SymExpr)>> {
    let fill = |j, b, k| get(j, b, k).or(Some(SymExpr::zero()));
    let c = combine_charges(model, &fill)?;
    let mut out = Vec::new();
    for (name, k) in charge_orders(model) {
        if k > order {
            continue;
        }
        let e = match name {
            "N" => c.n.clone().ok_or_else(|| Error::Missing("number charge".into()))?,
            "E" => c.e.clone(),
            _ => c.p.clone(),
        };
        out.push((name, e));
    }
    Ok(out)
}

pub fn derive(model: &ModelSpec, order: i32) -> Result<Derivation> {
    if order < 0 {
        return Err(Error::Config(format!("order must be non-negative, got {}", order)));
    }
    let jobs: Vec<(usize, Branch)> =
        (1..=model.size).flat_map(|j| Branch::BOTH.into_iter().map(move |b| (j, b))).collect();
    let sols: Vec<RiccatiSolution> =
        jobs.par_iter().map(|&(j, b)| solve_riccati(model, j, b, order + 2)).collect::<Result<_>>()?;

    let mut coefficients = Vec::new();
    let mut aux = Vec::new();
    let mut densities = Vec::new();
    let mut table = std::collections::BTreeMap::new();
    for sol in &sols {
        for (&(row, k), c) in &sol.coeffs {
            if k > order + 2 {
                continue;
            }
            coefficients.push(GammaEntry {
                row,
                column: sol.j,
                branch: sol.branch,
                order: k,
                symbol: format!("G{}{}{}^({})", row, sol.j, hat(sol.branch), k),
                value: Rendered::of(c),
            });
        }
        for a in &sol.aux {
            aux.push(AuxEntry {
                symbol: a.name(),
                column: sol.j,
                branch: sol.branch,
                dx: Rendered::of(&a.dx_rule),
                dt: a.dt_rule.as_ref().map(Rendered::of),
            });
        }
        for k in 0..=order {
            let cd = conserved_density(model, sol, k)?;
            densities.push(DensityEntry {
                column: sol.j,
                branch: sol.branch,
                order: k,
                density: Rendered::of(&cd.density),
                flux: Rendered::of(&cd.flux),
            });
            table.insert((sol.j, sol.branch, k), cd.density);
        }
    }
    let charges = available_charges(model.name, order, &|j, b, k| table.get(&(j, b, k)).cloned())?
        .into_iter()
        .map(|(name, e)| ChargeEntry {
            name: name.into(),
            density: Rendered::trig(&e),
            normal_form: Rendered::trig(&ibp_normal(&e)),
        })
        .collect();

    let dt: DefectTable = defect_table(model, order)?;
    let contributions = dt
        .iter()
        .map(|(&(j, b, k), v)| DefectEntry {
            column: j,
            branch: b,
            order: k,
            symbol: format!("D{}{}^({})", j, hat(b), k),
            value: Rendered::of(v),
        })
        .collect();
    let mut defect_charges = Vec::new();
    for (name, e) in available_charges(model.name, order, &|j, b, k| dt.get(&(j, b, k)).cloned())? {
        defect_charges.push(DefectChargeEntry {
            name: format!("{}_D", name),
            value: Rendered::trig(&e),
            eliminated: Rendered::trig(&eliminate_boundary(model, &e)?),
        });
    }

    let params = model.params;
    let mut d = Derivation {
        gamma: GammaFile { model: model.name, params, order, coefficients, aux },
        densities: DensitiesFile { model: model.name, params, order, densities, charges },
        defect: DefectFile { model: model.name, params, order, contributions, charges: defect_charges },
        tex: String::new(),
    };
    d.tex = report_tex(model, &d);
    Ok(d)
}

fn report_tex(model: &ModelSpec, d: &Derivation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "\\documentclass{{article}}\n\\usepackage{{amsmath}}\n\\begin{{document}}");
    let _ = writeln!(s, "\\section*{{{} model through order {}}}", model.name, d.gamma.order);
    s.push_str(&model.to_latex());

    let tex_symbol = |sym: &str| {
        let (head, order) = sym.split_once("^").unwrap_or((sym, ""));
        let (letter, rest) = head.split_at(1);
        let (idx, hatted) = match rest.strip_suffix('h') {
            Some(i) => (i, true),
            None => (rest, false),
        };
        let base = match (letter, hatted) {
            ("G", false) => "\\Gamma".to_string(),
            ("G", true) => "\\hat\\Gamma".to_string(),
            (l, false) => l.to_string(),
            (l, true) => format!("\\hat {}", l),
        };
        format!("{}_{{{}}}^{{{}}}", base, idx, order)
    };

    s.push_str("\\subsection*{Riccati coefficients}\n\\begin{align*}\n");
    for g in &d.gamma.coefficients {
        let _ = writeln!(s, "{} &= {} \\\\", tex_symbol(&g.symbol), g.value.tex);
    }
    for a in &d.gamma.aux {
        let _ = writeln!(s, "\\partial_x {} &= {} \\\\", a.symbol, a.dx.tex);
    }
    s.push_str("\\end{align*}\n");

    s.push_str("\\subsection*{Conserved densities}\n\\begin{align*}\n");
    for e in &d.densities.densities {
        let hat = if e.branch.is_hat() { "\\hat " } else { "" };
        let _ = writeln!(s, "{}I_{{{}}}^{{({})}} &= {} \\\\", hat, e.column, e.order, e.density.tex);
    }
    for c in &d.densities.charges {
        let _ = writeln!(s, "\\mathcal{{{}}} &\\simeq {} \\\\", c.name, c.normal_form.tex);
    }
    s.push_str("\\end{align*}\n");

    s.push_str("\\subsection*{Defect contributions}\n\\begin{align*}\n");
    for e in &d.defect.contributions {
        let _ = writeln!(s, "{} &= {} \\\\", tex_symbol(&e.symbol), e.value.tex);
    }
    for c in &d.defect.charges {
        let (q, _) = c.name.split_once('_').unwrap_or((&c.name, ""));
        let _ = writeln!(s, "{}_D &= {} \\\\", q, c.value.tex);
        if c.eliminated != c.value {
            let _ = writeln!(s, "&= {} \\\\", c.eliminated.tex);
        }
    }
    s.push_str("\\end{align*}\n\\end{document}\n");
    s
}

impl Derivation {
    /// Write the four outputs into `dir`; returns their paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let bodies = [
            serde_json::to_string_pretty(&self.gamma)?,
            serde_json::to_string_pretty(&self.densities)?,
            serde_json::to_string_pretty(&self.defect)?,
            self.tex.clone(),
        ];
        let mut out = Vec::new();
        for (name, body) in OUTPUT_FILES.iter().zip(bodies) {
            let path = dir.join(name);
            std::fs::write(&path, body + if name.ends_with(".json") { "\n" } else { "" })?;
            out.push(path);
        }
        Ok(out)
    }
}
