use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::Zero;

use super::atom::{FieldAtom, FieldId};
use crate::scalar::{rat, Param, ParamMono, Scalar};

/// Exponent `i * sum_k c_k v_k` of an exponential atom, sorted by variable.
pub type Exponent = Vec<(FieldAtom, BigRational)>;

/// One monomial without its coefficient: `lambda^lam * params *
/// exp(i expo) * atoms[0] * atoms[1] * ...`. Atoms are kept sorted; odd
/// atoms appear at most once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub lam: i32,
    pub params: ParamMono,
    pub expo: Exponent,
    pub atoms: Vec<FieldAtom>,
}

impl Mono {
    pub fn unit() -> Self {
        Mono { lam: 0, params: ParamMono::one(), expo: Vec::new(), atoms: Vec::new() }
    }

    pub fn is_odd(&self) -> bool {
        self.atoms.iter().filter(|a| a.odd).count() % 2 == 1
    }

    /// True when the monomial carries no field atoms (exponentials allowed).
    pub fn is_atom_free(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Product of two monomials, `None` when it vanishes; the scalar is the
    /// sign of reordering odd atoms times any `sqrt(2)^2` factor.
    pub fn mul(&self, o: &Mono) -> Option<(Mono, i64)> {
        let (atoms, sign) = merge_atoms(&self.atoms, &o.atoms)?;
        let (params, f) = self.params.mul(&o.params);
        Some((Mono { lam: self.lam + o.lam, params, expo: add_exponents(&self.expo, &o.expo), atoms }, sign * f))
    }
}

pub(crate) fn add_exponents(a: &Exponent, b: &Exponent) -> Exponent {
    let mut m: BTreeMap<FieldAtom, BigRational> = BTreeMap::new();
    for (v, c) in a.iter().chain(b.iter()) {
        *m.entry(*v).or_insert_with(BigRational::zero) += c;
    }
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Merge two sorted atom lists. Moving an odd atom of `b` past the odd atoms
/// still pending in `a` contributes one sign flip each.
fn merge_atoms(a: &[FieldAtom], b: &[FieldAtom]) -> Option<(Vec<FieldAtom>, i64)> {
    if b.is_empty() {
        return Some((a.to_vec(), 1));
    }
    if a.is_empty() {
        return Some((b.to_vec(), 1));
    }
    let mut odd_left: usize = a.iter().filter(|x| x.odd).count();
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut flips = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = if i == a.len() {
            false
        } else if j == b.len() {
            true
        } else {
            if a[i] == b[j] && a[i].odd {
                return None;
            }
            a[i] <= b[j]
        };
        if take_a {
            if a[i].odd {
                odd_left -= 1;
            }
            out.push(a[i]);
            i += 1;
        } else {
            if b[j].odd {
                flips += odd_left;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    Some((out, if flips.is_multiple_of(2) { 1 } else { -1 }))
}

/// Sort an arbitrary atom sequence; `None` if an odd atom repeats.
pub(crate) fn sort_atoms(v: &[FieldAtom]) -> Option<(Vec<FieldAtom>, i64)> {
    let mut out: Vec<FieldAtom> = Vec::with_capacity(v.len());
    let mut sign = 1i64;
    for &x in v {
        let mut pos = out.len();
        while pos > 0 && out[pos - 1] > x {
            if out[pos - 1].odd && x.odd {
                sign = -sign;
            }
            pos -= 1;
        }
        if pos > 0 && out[pos - 1] == x && x.odd {
            return None;
        }
        out.insert(pos, x);
    }
    Some((out, sign))
}

/// Differential polynomial with exact coefficients, in canonical form:
/// sorted monomials, merged like terms, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SymExpr {
    terms: BTreeMap<Mono, Scalar>,
}

impl SymExpr {
    pub fn zero() -> Self {
        SymExpr::default()
    }
    pub fn one() -> Self {
        SymExpr::scalar(Scalar::one())
    }
    pub fn scalar(c: Scalar) -> Self {
        SymExpr::from_mono(Mono::unit(), c)
    }
    pub fn int(n: i64) -> Self {
        SymExpr::scalar(Scalar::from_int(n))
    }
    pub fn ratio(n: i64, d: i64) -> Self {
        SymExpr::scalar(Scalar::from_ratio(n, d))
    }
    pub fn i() -> Self {
        SymExpr::scalar(Scalar::i())
    }
    pub fn imag(n: i64, d: i64) -> Self {
        SymExpr::scalar(Scalar::imag(n, d))
    }
    pub fn atom(a: FieldAtom) -> Self {
        let mut m = Mono::unit();
        m.atoms.push(a);
        SymExpr::from_mono(m, Scalar::one())
    }
    pub fn param(p: Param) -> Self {
        SymExpr::params(ParamMono::param(p))
    }
    /// `p^(half/2)`
    pub fn param_half(p: Param, half: i32) -> Self {
        SymExpr::params(ParamMono::pow_half(p, half))
    }
    pub fn params(p: ParamMono) -> Self {
        let mut m = Mono::unit();
        m.params = p;
        SymExpr::from_mono(m, Scalar::one())
    }
    pub fn sqrt2() -> Self {
        SymExpr::params(ParamMono::sqrt2())
    }
    pub fn lambda(k: i32) -> Self {
        let mut m = Mono::unit();
        m.lam = k;
        SymExpr::from_mono(m, Scalar::one())
    }
    /// `exp(i * sum c v)`.
    pub fn exp_i(parts: &[(FieldAtom, BigRational)]) -> Self {
        let mut m = Mono::unit();
        m.expo = add_exponents(&parts.to_vec(), &Vec::new());
        SymExpr::from_mono(m, Scalar::one())
    }
    /// `exp(i * (n/d) * v)`.
    pub fn exp_iv(v: FieldAtom, n: i64, d: i64) -> Self {
        SymExpr::exp_i(&[(v, rat(n, d))])
    }

    pub fn from_mono(m: Mono, c: Scalar) -> Self {
        let mut e = SymExpr::zero();
        e.add_term(m, c);
        e
    }

    /// Build from an unsorted atom list (the product in the given order).
    pub fn product_of(atoms: &[FieldAtom]) -> Self {
        match sort_atoms(atoms) {
            None => SymExpr::zero(),
            Some((sorted, sign)) => {
                let mut m = Mono::unit();
                m.atoms = sorted;
                SymExpr::from_mono(m, Scalar::from_int(sign))
            }
        }
    }

    pub fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }
    pub fn into_terms(self) -> impl Iterator<Item = (Mono, Scalar)> {
        self.terms.into_iter()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-canonicalize every monomial. All operations already return
    /// canonical forms; this exists for expressions assembled by hand.
    pub fn normalize(&self) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            if let Some((atoms, sign)) = sort_atoms(&m.atoms) {
                let mut m2 = m.clone();
                m2.atoms = atoms;
                m2.expo = add_exponents(&m.expo, &Vec::new());
                out.add_term(m2, c.scale(&rat(sign, 1)));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> SymExpr {
        if c.is_zero() {
            return SymExpr::zero();
        }
        SymExpr { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn scale_ratio(&self, n: i64, d: i64) -> SymExpr {
        self.scale(&Scalar::from_ratio(n, d))
    }

    pub fn pow(&self, k: u32) -> SymExpr {
        let mut r = SymExpr::one();
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    pub fn times_lambda(&self, k: i32) -> SymExpr {
        SymExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.lam += k;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    /// Coefficient of `lambda^k` as a lambda-free expression.
    pub fn laurent_coeff(&self, k: i32) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            if m.lam == k {
                let mut m = m.clone();
                m.lam = 0;
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    /// Smallest and largest lambda powers present.
    pub fn lambda_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.keys().map(|m| m.lam).min()?;
        let hi = self.terms.keys().map(|m| m.lam).max()?;
        Some((lo, hi))
    }

    pub fn lambda_free(&self) -> bool {
        self.terms.keys().all(|m| m.lam == 0)
    }

    /// Keep only terms with `lo <= lambda power <= hi`.
    pub fn truncate_lambda(&self, lo: i32, hi: i32) -> SymExpr {
        SymExpr {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.lam >= lo && m.lam <= hi)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drop field-independent terms (no atoms, no exponentials).
    pub fn drop_constants(&self) -> SymExpr {
        SymExpr {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !(m.atoms.is_empty() && m.expo.is_empty()))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Part with no field atoms and no exponentials.
    pub fn constant_part(&self) -> SymExpr {
        SymExpr {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.atoms.is_empty() && m.expo.is_empty())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `Some(true)` if every term is odd, `Some(false)` if every term is even,
    /// `None` for mixed parity. Zero is even.
    pub fn parity_odd(&self) -> Option<bool> {
        let mut found = None;
        for m in self.terms.keys() {
            let p = m.is_odd();
            match found {
                None => found = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or(false))
    }

    /// All atoms appearing multiplicatively or inside exponents.
    pub fn atom_set(&self) -> BTreeSet<FieldAtom> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            s.extend(m.atoms.iter().copied());
            s.extend(m.expo.iter().map(|(v, _)| *v));
        }
        s
    }

    pub fn contains_id(&self, pred: impl Fn(&FieldAtom) -> bool) -> bool {
        self.atom_set().iter().any(pred)
    }

    /// The single term, if there is exactly one.
    pub fn as_single(&self) -> Option<(&Mono, &Scalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Multiplicative inverse of a single atom-free term (exponentials,
    /// parameters and lambda powers are invertible).
    pub fn invert_unit(&self) -> Option<SymExpr> {
        let (m, c) = self.as_single()?;
        if !m.atoms.is_empty() {
            return None;
        }
        let (params, corr) = m.params.inv();
        let c = c.inv()?.scale(&corr);
        let mono = Mono {
            lam: -m.lam,
            params,
            expo: m.expo.iter().map(|(v, r)| (*v, -r.clone())).collect(),
            atoms: Vec::new(),
        };
        Some(SymExpr::from_mono(mono, c))
    }

    /// Square root of a single atom-free term, when it is exact. The branch
    /// takes the principal root of the numeric coefficient (`sqrt(-1) = i`).
    pub fn sqrt_unit(&self) -> Option<SymExpr> {
        let (m, c) = self.as_single()?;
        if !m.atoms.is_empty() || m.lam % 2 != 0 {
            return None;
        }
        let c = c.sqrt_exact()?;
        let params = m.params.sqrt()?;
        let two = BigRational::from_integer(2.into());
        let mono = Mono {
            lam: m.lam / 2,
            params,
            expo: m.expo.iter().map(|(v, r)| (*v, r / &two)).collect(),
            atoms: Vec::new(),
        };
        Some(SymExpr::from_mono(mono, c))
    }

    /// Replace atoms (not exponent variables) by expressions, preserving the
    /// product order. Atoms for which `f` returns `None` stay.
    pub fn substitute(&self, f: &dyn Fn(&FieldAtom) -> Option<SymExpr>) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            let hit: Vec<Option<SymExpr>> = m.atoms.iter().map(f).collect();
            if hit.iter().all(|h| h.is_none()) {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let mut head = m.clone();
            head.atoms.clear();
            let mut acc = SymExpr::from_mono(head, c.clone());
            for (a, h) in m.atoms.iter().zip(hit) {
                let factor = h.unwrap_or_else(|| SymExpr::atom(*a));
                acc = &acc * &factor;
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        out
    }

    /// Replace atoms until no rule fires, up to `budget` passes.
    pub fn substitute_fixpoint(&self, f: &dyn Fn(&FieldAtom) -> Option<SymExpr>, budget: usize) -> Option<SymExpr> {
        let mut cur = self.clone();
        for _ in 0..budget {
            let next = cur.substitute(f);
            if next == cur {
                return Some(cur);
            }
            cur = next;
        }
        None
    }

    /// Rewrite exponentials: each monomial's exponent is passed to `f`, which
    /// may return an expression replacing the `exp(...)` factor.
    pub fn map_exponents(&self, f: &dyn Fn(&Exponent) -> Option<SymExpr>) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            match f(&m.expo) {
                None => out.add_term(m.clone(), c.clone()),
                Some(rep) => {
                    let mut rest = m.clone();
                    rest.expo.clear();
                    out += &(&rep * &SymExpr::from_mono(rest, c.clone()));
                }
            }
        }
        out
    }

    pub fn filter_terms(&self, keep: impl Fn(&Mono, &Scalar) -> bool) -> SymExpr {
        SymExpr { terms: self.terms.iter().filter(|(m, c)| keep(m, c)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Split into the part containing `target` and the rest.
    pub fn split_on(&self, target: &FieldAtom) -> (SymExpr, SymExpr) {
        let with = self.filter_terms(|m, _| m.atoms.contains(target));
        let without = self.filter_terms(|m, _| !m.atoms.contains(target));
        (with, without)
    }

    /// Degree in a given atom (max multiplicity over terms).
    pub fn degree_in(&self, target: &FieldAtom) -> usize {
        self.terms.keys().map(|m| m.atoms.iter().filter(|a| *a == target).count()).max().unwrap_or(0)
    }

    /// Smallest and largest integer multiple `k` of `alpha` in the
    /// exponentials `e^{i k alpha}`; `None` for fractional multiples.
    pub fn alpha_power_range(&self) -> Option<(i64, i64)> {
        let alpha = FieldAtom::alpha();
        let mut lo = None::<i64>;
        let mut hi = None::<i64>;
        for m in self.terms.keys() {
            let k = m.expo.iter().find(|(v, _)| *v == alpha).map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero);
            if !k.is_integer() {
                return None;
            }
            let k: i64 = num_traits::ToPrimitive::to_i64(&k.to_integer())?;
            lo = Some(lo.map_or(k, |l| l.min(k)));
            hi = Some(hi.map_or(k, |h| h.max(k)));
        }
        Some((lo.unwrap_or(0), hi.unwrap_or(0)))
    }

    /// Complex conjugation with dagger swap: `i -> -i`, `f <-> f'`,
    /// exponent signs flipped. Ordering of odd factors is reversed, as for
    /// the Hermitian conjugate of a product.
    pub fn conjugate(&self) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            let mut rev: Vec<FieldAtom> = m
                .atoms
                .iter()
                .map(|a| match a.id {
                    FieldId::Phi | FieldId::PhiT | FieldId::Alpha | FieldId::SecTwoAlpha => *a,
                    _ => a.dag(),
                })
                .collect();
            rev.reverse();
            let prod = SymExpr::product_of(&rev);
            let mut head = m.clone();
            head.atoms.clear();
            head.expo = m.expo.iter().map(|(v, r)| (*v, -r.clone())).collect();
            out += &(&SymExpr::from_mono(head, c.conj()) * &prod);
        }
        out
    }

    /// Rename atoms everywhere, exponent variables included.
    pub fn rename_atoms(&self, f: &dyn Fn(&FieldAtom) -> FieldAtom) -> SymExpr {
        let mut out = SymExpr::zero();
        for (m, c) in &self.terms {
            let atoms: Vec<FieldAtom> = m.atoms.iter().map(f).collect();
            let Some((atoms, sign)) = sort_atoms(&atoms) else {
                continue;
            };
            let expo: Exponent = m.expo.iter().map(|(v, r)| (f(v), r.clone())).collect();
            let mut m2 = m.clone();
            m2.atoms = atoms;
            m2.expo = add_exponents(&expo, &Vec::new());
            out.add_term(m2, c.scale(&rat(sign, 1)));
        }
        out
    }

    /// Lambda power flip `lambda -> 1/lambda`.
    pub fn invert_lambda(&self) -> SymExpr {
        SymExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.lam = -m.lam;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    pub fn is_scalar_one(&self) -> bool {
        match self.as_single() {
            Some((m, c)) => *m == Mono::unit() && c.is_one(),
            None => false,
        }
    }
}

impl Add for &SymExpr {
    type Output = SymExpr;
    fn add(self, o: &SymExpr) -> SymExpr {
        let mut r = self.clone();
        r += o;
        r
    }
}
impl Sub for &SymExpr {
    type Output = SymExpr;
    fn sub(self, o: &SymExpr) -> SymExpr {
        let mut r = self.clone();
        r -= o;
        r
    }
}
impl AddAssign<&SymExpr> for SymExpr {
    fn add_assign(&mut self, o: &SymExpr) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}
impl SubAssign<&SymExpr> for SymExpr {
    fn sub_assign(&mut self, o: &SymExpr) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), -c);
        }
    }
}
impl Mul for &SymExpr {
    type Output = SymExpr;
    fn mul(self, o: &SymExpr) -> SymExpr {
        let mut r = SymExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if let Some((m, f)) = ma.mul(mb) {
                    let c = (ca * cb).scale(&rat(f, 1));
                    r.add_term(m, c);
                }
            }
        }
        r
    }
}
impl Neg for &SymExpr {
    type Output = SymExpr;
    fn neg(self) -> SymExpr {
        self.scale(&Scalar::from_int(-1))
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<SymExpr> for SymExpr {
            type Output = SymExpr;
            fn $f(self, o: SymExpr) -> SymExpr {
                (&self).$f(&o)
            }
        }
        impl $tr<&SymExpr> for SymExpr {
            type Output = SymExpr;
            fn $f(self, o: &SymExpr) -> SymExpr {
                (&self).$f(o)
            }
        }
        impl $tr<SymExpr> for &SymExpr {
            type Output = SymExpr;
            fn $f(self, o: SymExpr) -> SymExpr {
                self.$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for SymExpr {
    type Output = SymExpr;
    fn neg(self) -> SymExpr {
        -&self
    }
}

impl From<FieldAtom> for SymExpr {
    fn from(a: FieldAtom) -> Self {
        SymExpr::atom(a)
    }
}

impl From<Scalar> for SymExpr {
    fn from(c: Scalar) -> Self {
        SymExpr::scalar(c)
    }
}

/// Sum of expressions.
pub fn sum<'a>(it: impl IntoIterator<Item = &'a SymExpr>) -> SymExpr {
    let mut r = SymExpr::zero();
    for e in it {
        r += e;
    }
    r
}
