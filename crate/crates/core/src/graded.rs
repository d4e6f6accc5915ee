//! Finite Grassmann algebra over complex numbers.
//!
//! Basis monomials are subsets of the generators `g_1..g_N`, stored as
//! bitmasks. Products carry the Koszul sign of interleaving the sorted
//! generator lists.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_GENERATORS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    n: usize,
    coeffs: BTreeMap<u32, Complex64>,
}

/// Sign of `g_S * g_T` for disjoint `S`, `T`: one flip for every pair
/// `(s, t)` with `s` in `S`, `t` in `T` and `s > t`.
fn koszul_sign(s: u32, t: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = t;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        // generators of S strictly above `bit`
        swaps += (s >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl GradedElement {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        GradedElement { n, coeffs: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: Complex64) -> Self {
        let mut e = GradedElement::zero(n);
        e.insert(0, c);
        e
    }

    pub fn one(n: usize) -> Self {
        GradedElement::scalar(n, Complex64::new(1.0, 0.0))
    }

    /// The generator `g_k` (1-based).
    pub fn generator(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n);
        let mut e = GradedElement::zero(n);
        e.insert(1 << (k - 1), Complex64::new(1.0, 0.0));
        e
    }

    /// Basis monomial for an explicit generator subset (1-based indices).
    pub fn monomial(n: usize, gens: &[usize], c: Complex64) -> Self {
        let mut e = GradedElement::scalar(n, c);
        for &k in gens {
            e = &e * &GradedElement::generator(n, k);
        }
        e
    }

    pub fn num_generators(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: u32) -> Complex64 {
        self.coeffs.get(&mask).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    fn insert(&mut self, mask: u32, c: Complex64) {
        if c == Complex64::default() {
            return;
        }
        let slot = self.coeffs.entry(mask).or_default();
        *slot += c;
        if *slot == Complex64::default() {
            self.coeffs.remove(&mask);
        }
    }

    pub fn body(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Some(0)` or `Some(1)` for homogeneous elements, `None` for mixed
    /// parity. Zero counts as even.
    pub fn parity(&self) -> Option<u32> {
        let mut found: Option<u32> = None;
        for &mask in self.coeffs.keys() {
            let p = mask.count_ones() % 2;
            match found {
                None => found = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or(0))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut r = GradedElement::zero(self.n);
        for (&k, &v) in &self.coeffs {
            r.insert(k, v * c);
        }
        r
    }

    pub fn try_mul(&self, other: &GradedElement) -> Result<GradedElement> {
        if self.n != other.n {
            return Err(Error::Dimension { left: self.n, right: other.n });
        }
        let mut r = GradedElement::zero(self.n);
        for (&s, &a) in &self.coeffs {
            for (&t, &b) in &other.coeffs {
                if s & t != 0 {
                    continue;
                }
                r.insert(s | t, a * b * koszul_sign(s, t));
            }
        }
        Ok(r)
    }

    pub fn try_add(&self, other: &GradedElement) -> Result<GradedElement> {
        if self.n != other.n {
            return Err(Error::Dimension { left: self.n, right: other.n });
        }
        let mut r = self.clone();
        for (&k, &v) in &other.coeffs {
            r.insert(k, v);
        }
        Ok(r)
    }

    /// Exponential of an even element with zero body. The series stops
    /// after `N/2` terms because higher powers vanish identically.
    pub fn exp(&self) -> Result<GradedElement> {
        if self.body() != Complex64::default() {
            return Err(Error::NonzeroBody);
        }
        if self.coeffs.keys().any(|m| m.count_ones() % 2 == 1) {
            return Err(Error::Parity("exponent must be even".into()));
        }
        let mut result = GradedElement::one(self.n);
        let mut power = GradedElement::one(self.n);
        for k in 1..=self.n / 2 {
            power = &power * self;
            if power.is_zero() {
                break;
            }
            result = &result + &power.scale(Complex64::new(1.0 / factorial(k), 0.0));
        }
        Ok(result)
    }

    /// Random element of the given parity with coefficients in the unit
    /// square; every basis monomial of that parity gets a coefficient.
    pub fn random<R: Rng>(n: usize, odd: bool, density: f64, rng: &mut R) -> Self {
        let mut e = GradedElement::zero(n);
        for mask in 0u32..(1u32 << n) {
            if (mask.count_ones() % 2 == 1) != odd {
                continue;
            }
            if rng.gen::<f64>() > density {
                continue;
            }
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            e.insert(mask, c);
        }
        e
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

impl Add for &GradedElement {
    type Output = GradedElement;
    fn add(self, o: &GradedElement) -> GradedElement {
        self.try_add(o).expect("generator count mismatch")
    }
}

impl Sub for &GradedElement {
    type Output = GradedElement;
    fn sub(self, o: &GradedElement) -> GradedElement {
        self.try_add(&-o).expect("generator count mismatch")
    }
}

impl Mul for &GradedElement {
    type Output = GradedElement;
    fn mul(self, o: &GradedElement) -> GradedElement {
        self.try_mul(o).expect("generator count mismatch")
    }
}

impl Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
