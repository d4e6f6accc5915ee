//! Evaluation of expressions at points of a Grassmann algebra.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::atom::FieldAtom;
use super::expr::SymExpr;
use crate::error::{Error, Result};
use crate::graded::GradedElement;
use crate::scalar::ParamValues;

/// Values for atoms, parameters and the spectral parameter.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub n: usize,
    pub atoms: BTreeMap<FieldAtom, GradedElement>,
    pub params: ParamValues,
    pub lambda: Complex64,
}

impl Assignment {
    pub fn new(n: usize, params: ParamValues) -> Self {
        Assignment { n, atoms: BTreeMap::new(), params, lambda: Complex64::new(1.0, 0.0) }
    }

    /// Random values for every atom of `atoms`: odd atoms get odd elements,
    /// even atoms get an even element with a nonzero body.
    pub fn random<R: Rng>(
        n: usize,
        atoms: impl IntoIterator<Item = FieldAtom>,
        params: ParamValues,
        rng: &mut R,
    ) -> Self {
        let mut a = Assignment::new(n, params);
        a.lambda = Complex64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5));
        for atom in atoms {
            a.set_random(atom, rng);
        }
        a
    }

    pub fn set_random<R: Rng>(&mut self, atom: FieldAtom, rng: &mut R) {
        let v = if atom.odd {
            GradedElement::random(self.n, true, 0.5, rng)
        } else {
            let mut e = GradedElement::random(self.n, false, 0.3, rng);
            let body = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            e = &e + &GradedElement::scalar(self.n, body - e.body());
            e
        };
        self.atoms.insert(atom, v);
    }

    pub fn set(&mut self, atom: FieldAtom, v: GradedElement) {
        self.atoms.insert(atom, v);
    }

    fn get(&self, a: &FieldAtom) -> Result<&GradedElement> {
        self.atoms.get(a).ok_or_else(|| Error::Missing(format!("no value for atom `{}`", a)))
    }
}

/// Homomorphic image of `e`.
pub fn eval(e: &SymExpr, asg: &Assignment) -> Result<GradedElement> {
    let n = asg.n;
    let mut out = GradedElement::zero(n);
    for (m, c) in e.terms() {
        let mut coef = c.to_complex() * m.params.eval(&asg.params);
        if m.lam != 0 {
            coef *= asg.lambda.powi(m.lam);
        }
        let mut v = GradedElement::scalar(n, coef);
        if !m.expo.is_empty() {
            let mut arg = GradedElement::zero(n);
            for (a, k) in &m.expo {
                let k = num_traits::ToPrimitive::to_f64(k).unwrap_or(f64::NAN);
                arg = &arg + &asg.get(a)?.scale(Complex64::new(0.0, k));
            }
            v = &v * &exp_general(&arg)?;
        }
        for a in &m.atoms {
            v = &v * asg.get(a)?;
        }
        out = &out + &v;
    }
    Ok(out)
}

/// `exp` of an even element with arbitrary body: `e^body * exp(soul)`.
pub fn exp_general(x: &GradedElement) -> Result<GradedElement> {
    let n = x.num_generators();
    let body = x.body();
    let soul = x - &GradedElement::scalar(n, body);
    Ok(soul.exp()?.scale(body.exp()))
}
