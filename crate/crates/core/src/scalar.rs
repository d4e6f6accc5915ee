//! Exact coefficients: Gaussian rationals and monomials in the model
//! parameters `m`, `g`, `a`, `sigma` (half-integer exponents) and `sqrt(2)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact complex number `re + i im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }
    pub fn zero() -> Self {
        Scalar::new(BigRational::zero(), BigRational::zero())
    }
    pub fn one() -> Self {
        Scalar::from_int(1)
    }
    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }
    pub fn from_int(n: i64) -> Self {
        Scalar::new(rat(n, 1), BigRational::zero())
    }
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::new(rat(n, d), BigRational::zero())
    }
    /// `(re_n/re_d) + i (im_n/im_d)`
    pub fn gauss(re: (i64, i64), im: (i64, i64)) -> Self {
        Scalar::new(rat(re.0, re.1), rat(im.0, im.1))
    }
    pub fn imag(n: i64, d: i64) -> Self {
        Scalar::new(BigRational::zero(), rat(n, d))
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar::new(&self.re / &n, -(&self.im / &n)))
    }
    pub fn scale(&self, r: &BigRational) -> Self {
        Scalar::new(&self.re * r, &self.im * r)
    }
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
    /// Exact square root when both parts make it a perfect square in Q(i)
    /// of the simple forms `r^2` or `-r^2` (enough for leading Riccati balances).
    pub fn sqrt_exact(&self) -> Option<Self> {
        if !self.im.is_zero() {
            return None;
        }
        let r = rational_sqrt(&self.re.abs())?;
        if self.re.is_negative() {
            Some(Scalar::new(BigRational::zero(), r))
        } else {
            Some(Scalar::new(r, BigRational::zero()))
        }
    }

    /// `["num/den","num/den"]` rendering used by the JSON form.
    pub fn to_pair(&self) -> [String; 2] {
        [ratio_str(&self.re), ratio_str(&self.im)]
    }

    pub fn from_pair(p: &[String; 2]) -> Option<Self> {
        Some(Scalar::new(parse_ratio(&p[0])?, parse_ratio(&p[1])?))
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub(crate) fn ratio_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_ratio(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.re + &o.re, &self.im + &o.im)
    }
}
impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.re - &o.re, &self.im - &o.im)
    }
}
impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-self.im.clone()).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}i", self.im)
                }
            }
            (false, false) => write!(f, "({}+{}i)", self.re, self.im),
        }
    }
}

/// Model parameters that stay symbolic in derivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    M,
    G,
    A,
    Sigma,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::M, Param::G, Param::A, Param::Sigma];
    pub fn name(self) -> &'static str {
        match self {
            Param::M => "m",
            Param::G => "g",
            Param::A => "a",
            Param::Sigma => "sigma",
        }
    }
    pub fn latex(self) -> &'static str {
        match self {
            Param::M => "m",
            Param::G => "g",
            Param::A => "a",
            Param::Sigma => "\\sigma",
        }
    }
}

/// `sqrt(2)^s * prod p^(e_p / 2)`; exponents are stored in half units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamMono {
    pub half_exps: [i32; 4],
    pub sqrt2: bool,
}

impl ParamMono {
    pub fn one() -> Self {
        ParamMono::default()
    }
    pub fn is_one(&self) -> bool {
        self.half_exps == [0; 4] && !self.sqrt2
    }
    /// `p^(half/2)`
    pub fn pow_half(p: Param, half: i32) -> Self {
        let mut m = ParamMono::default();
        m.half_exps[p as usize] = half;
        m
    }
    pub fn param(p: Param) -> Self {
        ParamMono::pow_half(p, 2)
    }
    pub fn sqrt2() -> Self {
        ParamMono { half_exps: [0; 4], sqrt2: true }
    }
    pub fn exp(&self, p: Param) -> i32 {
        self.half_exps[p as usize]
    }
    /// Product; the returned integer multiplies the rational coefficient
    /// (2 when two `sqrt(2)` factors meet, else 1).
    pub fn mul(&self, o: &ParamMono) -> (ParamMono, i64) {
        let mut r = *self;
        for k in 0..4 {
            r.half_exps[k] += o.half_exps[k];
        }
        let factor = if self.sqrt2 && o.sqrt2 { 2 } else { 1 };
        r.sqrt2 = self.sqrt2 ^ o.sqrt2;
        (r, factor)
    }
    /// Inverse, with a rational correction (1/2 when `sqrt(2)` is inverted).
    pub fn inv(&self) -> (ParamMono, BigRational) {
        let mut r = *self;
        for k in 0..4 {
            r.half_exps[k] = -r.half_exps[k];
        }
        if self.sqrt2 {
            (r, rat(1, 2))
        } else {
            (r, BigRational::one())
        }
    }
    /// Square root when all exponents are even (in half units) and no sqrt2.
    pub fn sqrt(&self) -> Option<ParamMono> {
        if self.sqrt2 || self.half_exps.iter().any(|e| e % 2 != 0) {
            return None;
        }
        let mut r = *self;
        for e in r.half_exps.iter_mut() {
            *e /= 2;
        }
        Some(r)
    }
    pub fn eval(&self, values: &ParamValues) -> f64 {
        let mut v = if self.sqrt2 { 2f64.sqrt() } else { 1.0 };
        for p in Param::ALL {
            let e = self.exp(p);
            if e != 0 {
                v *= values.get(p).powf(e as f64 / 2.0);
            }
        }
        v
    }

    fn fmt_with(&self, latex: bool) -> String {
        let mut parts = Vec::new();
        if self.sqrt2 {
            parts.push(if latex { "\\sqrt{2}".to_string() } else { "sqrt2".to_string() });
        }
        for p in Param::ALL {
            let e = self.exp(p);
            if e == 0 {
                continue;
            }
            let name = if latex { p.latex() } else { p.name() };
            let s = if e == 2 {
                name.to_string()
            } else if e % 2 == 0 {
                if latex {
                    format!("{}^{{{}}}", name, e / 2)
                } else {
                    format!("{}^{}", name, e / 2)
                }
            } else if latex {
                format!("{}^{{{}/2}}", name, e)
            } else {
                format!("{}^({}/2)", name, e)
            };
            parts.push(s);
        }
        parts.join(if latex { " " } else { "*" })
    }
    pub fn to_latex(&self) -> String {
        self.fmt_with(true)
    }
}

impl fmt::Display for ParamMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(false))
    }
}

/// Numeric values for the symbolic parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamValues {
    pub m: f64,
    pub g: f64,
    pub a: f64,
    pub sigma: f64,
}

impl Default for ParamValues {
    fn default() -> Self {
        ParamValues { m: 1.0, g: 1.0, a: 1.0, sigma: 1.0 }
    }
}

impl ParamValues {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::M => self.m,
            Param::G => self.g,
            Param::A => self.a,
            Param::Sigma => self.sigma,
        }
    }
}
