//! Text, LaTeX and JSON forms of `SymExpr`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::atom::FieldAtom;
use super::expr::{Mono, SymExpr};
use super::parse::parse_atom;
use crate::error::{Error, Result};
use crate::scalar::{Param, ParamMono, Scalar};

/// Coefficient text with its leading sign split off: `(negative, body)`.
/// `body` is empty for a unit coefficient.
fn coeff_text(c: &Scalar, latex: bool) -> (bool, String) {
    let unit_im = "i";
    let frac = |r: &BigRational| -> String {
        if latex && !r.is_integer() {
            format!("\\tfrac{{{}}}{{{}}}", r.numer(), r.denom())
        } else {
            r.to_string()
        }
    };
    let join = if latex { "" } else { "*" };
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let a = c.re.abs();
        return (neg, if a.is_one() { String::new() } else { frac(&a) });
    }
    if c.re.is_zero() {
        let neg = c.im.is_negative();
        let a = c.im.abs();
        let body = if a.is_one() { unit_im.to_string() } else { format!("{}{}{}", frac(&a), join, unit_im) };
        return (neg, body);
    }
    let im_sign = if c.im.is_negative() { "-" } else { "+" };
    let im_abs = c.im.abs();
    let im = if im_abs.is_one() { unit_im.to_string() } else { format!("{}{}{}", frac(&im_abs), join, unit_im) };
    if latex {
        (false, format!("\\left({} {} {}\\right)", frac(&c.re), im_sign, im))
    } else {
        (false, format!("({} {} {})", c.re, im_sign, im))
    }
}

fn exponent_text(expo: &[(FieldAtom, BigRational)], latex: bool) -> String {
    let mut s = String::new();
    for (k, (v, c)) in expo.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let name = if latex { v.to_latex() } else { v.to_string() };
        if a.is_one() {
            s.push_str(&name);
        } else if latex {
            if a.is_integer() {
                s.push_str(&format!("{}{}", a, name));
            } else {
                s.push_str(&format!("\\tfrac{{{}}}{{{}}}{}", a.numer(), a.denom(), name));
            }
        } else {
            s.push_str(&format!("{}*{}", a, name));
        }
    }
    s
}

fn mono_factors(m: &Mono, latex: bool) -> Vec<String> {
    let mut f = Vec::new();
    if !m.params.is_one() {
        f.push(if latex { m.params.to_latex() } else { m.params.to_string() });
    }
    if m.lam != 0 {
        f.push(match (m.lam, latex) {
            (1, false) => "lam".into(),
            (1, true) => "\\lambda".into(),
            (k, false) => format!("lam^{}", k),
            (k, true) => format!("\\lambda^{{{}}}", k),
        });
    }
    if !m.expo.is_empty() {
        let t = exponent_text(&m.expo, latex);
        f.push(if latex { format!("e^{{i({})}}", t) } else { format!("exp(i*({}))", t) });
    }
    // group equal even neighbours into powers
    let mut k = 0;
    while k < m.atoms.len() {
        let a = m.atoms[k];
        let mut n = 1;
        while k + n < m.atoms.len() && m.atoms[k + n] == a {
            n += 1;
        }
        let name = if latex { a.to_latex() } else { a.to_string() };
        f.push(match (n, latex) {
            (1, _) => name,
            (n, false) => format!("{}^{}", name, n),
            (n, true) => format!("{{{}}}^{{{}}}", name, n),
        });
        k += n;
    }
    f
}

fn render(e: &SymExpr, latex: bool) -> String {
    let terms: Vec<(Scalar, Vec<String>)> = e.terms().map(|(m, c)| (c.clone(), mono_factors(m, latex))).collect();
    join_terms(terms, latex)
}

fn join_terms(terms: Vec<(Scalar, Vec<String>)>, latex: bool) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (c, mut factors)) in terms.into_iter().enumerate() {
        let (neg, body) = coeff_text(&c, latex);
        if !body.is_empty() {
            factors.insert(0, body);
        }
        let text = if factors.is_empty() {
            "1".to_string()
        } else if latex {
            factors.join(" ")
        } else {
            factors.join("*")
        };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&text);
    }
    out
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self, false))
    }
}

/// LaTeX with `c e^{i t} + c e^{-i t}` shown as `2c cos t` and
/// `c e^{i t} - c e^{-i t}` as `2ic sin t`.
fn render_trig(e: &SymExpr) -> String {
    let all: BTreeMap<&Mono, &Scalar> = e.terms().collect();
    let partner = |m: &Mono| {
        let mut p = m.clone();
        p.expo = m.expo.iter().map(|(v, r)| (*v, -r)).collect();
        p
    };
    // trig function and coefficient for a term whose first phase is positive
    let fold = |m: &Mono, c: &Scalar| -> Option<(&'static str, Scalar)> {
        if !m.expo.first().is_some_and(|(_, r)| r.is_positive()) {
            return None;
        }
        match all.get(&partner(m)) {
            Some(pc) if *pc == c => Some(("\\cos", &Scalar::from_int(2) * c)),
            Some(pc) if **pc == -c => Some(("\\sin", &Scalar::imag(2, 1) * c)),
            _ => None,
        }
    };
    let mut terms = Vec::new();
    for (m, c) in e.terms() {
        let p = partner(m);
        if all.get(&p).is_some_and(|pc| fold(&p, pc).is_some()) {
            continue;
        }
        match fold(m, c) {
            Some((f, coeff)) => {
                let mut bare = m.clone();
                bare.expo.clear();
                let mut factors = mono_factors(&bare, true);
                let at = usize::from(!m.params.is_one()) + usize::from(m.lam != 0);
                factors.insert(at, format!("{}\\left({}\\right)", f, exponent_text(&m.expo, true)));
                terms.push((coeff, factors));
            }
            None => terms.push((c.clone(), mono_factors(m, true))),
        }
    }
    join_terms(terms, true)
}

impl SymExpr {
    pub fn to_latex(&self) -> String {
        render(self, true)
    }

    pub fn to_latex_trig(&self) -> String {
        render_trig(self)
    }

    pub fn to_json(&self) -> JsonExpr {
        JsonExpr {
            terms: self
                .terms()
                .map(|(m, c)| JsonTerm {
                    coeff: c.to_pair(),
                    lam: m.lam,
                    params: param_map(&m.params),
                    sqrt2: m.params.sqrt2,
                    exp: m.expo.iter().map(|(v, r)| (v.to_string(), r.to_string())).collect(),
                    atoms: m.atoms.iter().map(|a| a.to_string()).collect(),
                })
                .collect(),
        }
    }

    /// Inverse of [`SymExpr::to_json`]; `odd_x` gives the statistics of the
    /// defect field.
    pub fn from_json(j: &JsonExpr, odd_x: bool) -> Result<SymExpr> {
        let mut out = SymExpr::zero();
        for t in &j.terms {
            let c =
                Scalar::from_pair(&t.coeff).ok_or_else(|| Error::Parse(format!("bad coefficient {:?}", t.coeff)))?;
            let mut params = ParamMono::one();
            params.sqrt2 = t.sqrt2;
            for (name, e) in &t.params {
                let p = Param::ALL
                    .into_iter()
                    .find(|p| p.name() == name)
                    .ok_or_else(|| Error::Parse(format!("unknown parameter {}", name)))?;
                let r: BigRational = e.parse().map_err(|_| Error::Parse(format!("bad exponent {}", e)))?;
                let h = &r * BigRational::from_integer(2.into());
                if !h.is_integer() {
                    return Err(Error::Parse(format!("bad exponent {}", e)));
                }
                params.half_exps[p as usize] = num_traits::ToPrimitive::to_i32(&h.to_integer())
                    .ok_or_else(|| Error::Parse(format!("bad exponent {}", e)))?;
            }
            let mut expo = Vec::new();
            for (v, r) in &t.exp {
                let r: BigRational = r.parse().map_err(|_| Error::Parse(format!("bad exponent {}", r)))?;
                expo.push((parse_atom(v, odd_x)?, r));
            }
            let atoms: Vec<FieldAtom> = t.atoms.iter().map(|a| parse_atom(a, odd_x)).collect::<Result<_>>()?;
            let mut m = Mono::unit();
            m.lam = t.lam;
            m.params = params;
            let head = &SymExpr::from_mono(m, c) * &SymExpr::exp_i(&expo);
            out += &(&head * &SymExpr::product_of(&atoms));
        }
        Ok(out)
    }
}

fn param_map(p: &ParamMono) -> BTreeMap<String, String> {
    Param::ALL
        .into_iter()
        .filter(|q| p.exp(*q) != 0)
        .map(|q| (q.name().to_string(), BigRational::new(p.exp(q).into(), 2.into()).to_string()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub coeff: [String; 2],
    pub lam: i32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub sqrt2: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exp: Vec<(String, String)>,
    pub atoms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonExpr {
    pub terms: Vec<JsonTerm>,
}
