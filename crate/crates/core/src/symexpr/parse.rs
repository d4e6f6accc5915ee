//! Reader for the text form written by `Display`.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := number | 'i' | param ['^' exp] | 'sqrt2' | 'lam' ['^' int]
//!         | 'exp(' expr ')' | atom | '(' expr ')' ['^' int]
//! atom   := ['~'] name [''' ] ['_' 'x'+] | 'dt(' atom ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::atom::{FieldAtom, FieldId};
use super::expr::SymExpr;
use crate::error::{Error, Result};
use crate::scalar::{Param, Scalar};

pub fn parse_expr(s: &str) -> Result<SymExpr> {
    parse_expr_with(s, false)
}

pub fn parse_atom(s: &str, odd_x: bool) -> Result<FieldAtom> {
    let mut p = Parser { s: s.as_bytes(), pos: 0, odd_x };
    let a = p.atom()?.ok_or_else(|| p.err("expected atom"))?;
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(a)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    odd_x: bool,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{} at byte {} in `{}`", what, self.pos, String::from_utf8_lossy(self.s)))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn starts_with(&mut self, kw: &str) -> bool {
        self.ws();
        self.s[self.pos..].starts_with(kw.as_bytes())
    }

    fn expr(&mut self) -> Result<SymExpr> {
        let mut acc = SymExpr::zero();
        let mut neg = self.eat(b'-');
        loop {
            let t = self.term()?;
            if neg {
                acc -= &t;
            } else {
                acc += &t;
            }
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SymExpr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    /// `int`, `-int`, `int/int`, or `(-int/int)`.
    fn signed_ratio(&mut self) -> Result<BigRational> {
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        let n = self.uint()?;
        let d = if self.eat(b'/') { self.uint()? } else { BigInt::from(1) };
        if paren && !self.eat(b')') {
            return Err(self.err("expected `)`"));
        }
        if d.is_zero() {
            return Err(self.err("zero denominator"));
        }
        let r = BigRational::new(n, d);
        Ok(if neg { -r } else { r })
    }

    fn small_int(&mut self) -> Result<i64> {
        let r = self.signed_ratio()?;
        if !r.is_integer() {
            return Err(self.err("expected integer exponent"));
        }
        r.to_integer().to_i64().ok_or_else(|| self.err("exponent too large"))
    }

    fn factor(&mut self) -> Result<SymExpr> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end"))?;
        if c.is_ascii_digit() {
            let n = self.uint()?;
            let r = if self.peek() == Some(b'/') && self.s.get(self.pos + 1).is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
                let d = self.uint()?;
                BigRational::new(n, d)
            } else {
                BigRational::from_integer(n)
            };
            return Ok(SymExpr::scalar(Scalar::new(r, BigRational::zero())));
        }
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            if self.eat(b'^') {
                let k = self.small_int()?;
                if k < 0 {
                    return Err(self.err("negative power of a sum"));
                }
                return Ok(e.pow(k as u32));
            }
            return Ok(e);
        }
        if self.starts_with("exp(") {
            self.pos += 4;
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return self.exponential(&arg);
        }
        if self.starts_with("lam") && !self.ident_continues(3) {
            self.pos += 3;
            let k = if self.eat(b'^') { self.small_int()? } else { 1 };
            return Ok(SymExpr::lambda(k as i32));
        }
        if self.starts_with("sqrt2") && !self.ident_continues(5) {
            self.pos += 5;
            return Ok(SymExpr::sqrt2());
        }
        if c == b'i' && !self.ident_continues(1) {
            self.pos += 1;
            return Ok(SymExpr::i());
        }
        for p in [Param::Sigma, Param::M, Param::G, Param::A] {
            let n = p.name();
            if self.starts_with(n) && !self.ident_continues(n.len()) {
                self.pos += n.len();
                let e = if self.eat(b'^') { self.signed_ratio()? } else { BigRational::from_integer(1.into()) };
                let half = &e * BigRational::from_integer(2.into());
                if !half.is_integer() {
                    return Err(self.err("parameter exponents must be multiples of 1/2"));
                }
                let half = half.to_integer().to_i32().unwrap();
                return Ok(SymExpr::param_half(p, half));
            }
        }
        match self.atom()? {
            Some(a) => {
                let base = SymExpr::atom(a);
                if self.eat(b'^') {
                    let k = self.small_int()?;
                    if k < 0 {
                        return Err(self.err("negative power of an atom"));
                    }
                    return Ok(base.pow(k as u32));
                }
                Ok(base)
            }
            None => Err(self.err("unexpected character")),
        }
    }

    fn ident_continues(&self, len: usize) -> bool {
        self.s.get(self.pos + len).is_some_and(|b| b.is_ascii_alphanumeric())
    }

    /// `exp(arg)` where `arg = i * (linear combination of even atoms)`.
    fn exponential(&self, arg: &SymExpr) -> Result<SymExpr> {
        let mut parts = Vec::new();
        for (m, c) in arg.terms() {
            if m.atoms.len() != 1 || !m.expo.is_empty() || !m.params.is_one() || m.lam != 0 {
                return Err(self.err("exponent must be linear in atoms"));
            }
            if !c.re.is_zero() {
                return Err(self.err("exponent must be purely imaginary"));
            }
            parts.push((m.atoms[0], c.im.clone()));
        }
        Ok(SymExpr::exp_i(&parts))
    }

    fn atom(&mut self) -> Result<Option<FieldAtom>> {
        self.ws();
        if self.s[self.pos..].starts_with(b"dt(") {
            self.pos += 3;
            let a = self.atom()?.ok_or_else(|| self.err("expected atom in dt(...)"))?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(Some(a.marked_dt()));
        }
        let tilde = if self.s.get(self.pos) == Some(&b'~') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
        let id = match name.as_str() {
            "phi1" => FieldId::Phi1,
            "phi2" => FieldId::Phi2,
            "psi1" => FieldId::Psi1,
            "psi2" => FieldId::Psi2,
            "phi" => FieldId::Phi,
            "phit" => FieldId::PhiT,
            "X" => FieldId::X,
            "alpha" => FieldId::Alpha,
            "sec2a" => FieldId::SecTwoAlpha,
            _ => {
                if let Some(id) = self.indexed(&name)? {
                    id
                } else {
                    self.pos = start - usize::from(tilde);
                    return Ok(None);
                }
            }
        };
        let odd = if id.is_fermionic() {
            true
        } else if let FieldId::Aux { row, col, .. } = id {
            (row == 3) != (col == 3)
        } else {
            id == FieldId::X && self.odd_x
        };
        let mut a = FieldAtom::new(id, odd).with_tilde(tilde);
        if self.s.get(self.pos) == Some(&b'\'') {
            self.pos += 1;
            a = a.dag();
        }
        if self.s.get(self.pos) == Some(&b'_') && self.s.get(self.pos + 1) == Some(&b'x') {
            self.pos += 1;
            let mut n = 0u16;
            while self.s.get(self.pos) == Some(&b'x') {
                self.pos += 1;
                n += 1;
            }
            a = a.with_deriv(n);
        }
        Ok(Some(a))
    }

    /// `G<r><c>[h]_<k>` and `slot<r>_<k>`.
    fn indexed(&mut self, name: &str) -> Result<Option<FieldId>> {
        let num_suffix = |p: &mut Parser| -> Option<u8> {
            if p.s.get(p.pos) != Some(&b'_') {
                return None;
            }
            let save = p.pos;
            p.pos += 1;
            let st = p.pos;
            while p.pos < p.s.len() && p.s[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            if st == p.pos {
                p.pos = save;
                return None;
            }
            std::str::from_utf8(&p.s[st..p.pos]).unwrap().parse().ok()
        };
        let b = name.as_bytes();
        if b.len() >= 3 && b[0] == b'G' && b[1].is_ascii_digit() && b[2].is_ascii_digit() {
            let hat = match &name[3..] {
                "" => false,
                "h" => true,
                _ => return Ok(None),
            };
            let order = num_suffix(self).ok_or_else(|| self.err("expected `_order`"))?;
            return Ok(Some(FieldId::Aux { row: b[1] - b'0', col: b[2] - b'0', order, hat }));
        }
        if let Some(r) = name.strip_prefix("slot") {
            let row: u8 = r.parse().map_err(|_| self.err("bad slot row"))?;
            let order = num_suffix(self).ok_or_else(|| self.err("expected `_order`"))?;
            return Ok(Some(FieldId::Slot { row, order }));
        }
        Ok(None)
    }
}

/// Parse with explicit statistics for the defect field `X` (odd in the
/// Grassmannian model).
pub fn parse_expr_with(s: &str, odd_x: bool) -> Result<SymExpr> {
    let mut p = Parser { s: s.as_bytes(), pos: 0, odd_x };
    let e = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
