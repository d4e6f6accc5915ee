use std::fmt;

use serde::{Deserialize, Serialize};

/// Which field a symbol refers to. The derived order is the canonical
/// order of atoms inside monomials and must never change: golden files
/// depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldId {
    Phi1,
    Phi2,
    Psi1,
    Psi2,
    /// sine-Gordon field
    Phi,
    /// independent symbol for the time derivative of the sine-Gordon field
    PhiT,
    /// defect degree of freedom
    X,
    /// nonlocal Riccati coefficient `Gamma_{row col}^{(order)}` (hatted for
    /// the expansion around zero)
    Aux {
        row: u8,
        col: u8,
        order: u8,
        hat: bool,
    },
    /// unknown coefficient used internally by the Riccati solver
    Slot {
        row: u8,
        order: u8,
    },
    /// the defect angle
    Alpha,
    /// `1 / cos(2 alpha)`
    SecTwoAlpha,
}

impl FieldId {
    pub fn base_name(&self) -> String {
        match self {
            FieldId::Phi1 => "phi1".into(),
            FieldId::Phi2 => "phi2".into(),
            FieldId::Psi1 => "psi1".into(),
            FieldId::Psi2 => "psi2".into(),
            FieldId::Phi => "phi".into(),
            FieldId::PhiT => "phit".into(),
            FieldId::X => "X".into(),
            FieldId::Aux { row, col, order, hat } => {
                format!("G{}{}{}_{}", row, col, if *hat { "h" } else { "" }, order)
            }
            FieldId::Slot { row, order } => format!("slot{}_{}", row, order),
            FieldId::Alpha => "alpha".into(),
            FieldId::SecTwoAlpha => "sec2a".into(),
        }
    }

    pub fn latex_base(&self) -> String {
        match self {
            FieldId::Phi1 => "\\phi_1".into(),
            FieldId::Phi2 => "\\phi_2".into(),
            FieldId::Psi1 => "\\psi_1".into(),
            FieldId::Psi2 => "\\psi_2".into(),
            FieldId::Phi => "\\varphi".into(),
            FieldId::PhiT => "\\partial_t\\varphi".into(),
            FieldId::X => "X".into(),
            FieldId::Aux { row, col, order, hat } => {
                format!("{}\\Gamma_{{{}{}}}^{{({})}}", if *hat { "\\widehat" } else { "" }, row, col, order)
            }
            FieldId::Slot { row, order } => format!("c_{{{}}}^{{({})}}", row, order),
            FieldId::Alpha => "\\alpha".into(),
            FieldId::SecTwoAlpha => "\\sec 2\\alpha".into(),
        }
    }

    /// Grassmann fields of the fermionic model.
    pub fn is_fermionic(&self) -> bool {
        matches!(self, FieldId::Psi1 | FieldId::Psi2)
    }
}

/// A field symbol together with its decorations. Field order is
/// `(id, dagger, deriv, tilde)`; `dt` marks a pending time derivative
/// and `odd` records the statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldAtom {
    pub id: FieldId,
    pub dagger: bool,
    pub deriv: u16,
    pub tilde: bool,
    pub dt: bool,
    pub odd: bool,
}

impl FieldAtom {
    pub fn new(id: FieldId, odd: bool) -> Self {
        FieldAtom { id, dagger: false, deriv: 0, tilde: false, dt: false, odd }
    }
    /// Field with statistics implied by its id (fermions odd, rest even).
    pub fn field(id: FieldId) -> Self {
        FieldAtom::new(id, id.is_fermionic())
    }
    pub fn dag(mut self) -> Self {
        self.dagger = !self.dagger;
        self
    }
    pub fn with_dagger(mut self, d: bool) -> Self {
        self.dagger = d;
        self
    }
    pub fn til(mut self) -> Self {
        self.tilde = true;
        self
    }
    pub fn with_tilde(mut self, t: bool) -> Self {
        self.tilde = t;
        self
    }
    pub fn dx(mut self, n: u16) -> Self {
        self.deriv += n;
        self
    }
    pub fn with_deriv(mut self, n: u16) -> Self {
        self.deriv = n;
        self
    }
    pub fn marked_dt(mut self) -> Self {
        self.dt = true;
        self
    }
    pub fn base(mut self) -> Self {
        self.deriv = 0;
        self.dt = false;
        self
    }
    pub fn unmarked(mut self) -> Self {
        self.dt = false;
        self
    }
    pub fn is_odd(&self) -> bool {
        self.odd
    }
    pub fn alpha() -> Self {
        FieldAtom::new(FieldId::Alpha, false)
    }
    pub fn sec_two_alpha() -> Self {
        FieldAtom::new(FieldId::SecTwoAlpha, false)
    }

    pub fn to_latex(&self) -> String {
        let mut s = self.id.latex_base();
        if self.tilde {
            s = format!("\\widetilde{{{}}}", s);
        }
        if self.dagger {
            s = format!("{}^\\dagger", s);
        }
        if self.deriv > 0 {
            let d = if self.deriv == 1 { "\\partial_x".to_string() } else { format!("\\partial_x^{{{}}}", self.deriv) };
            s = format!("({} {})", d, s);
        }
        if self.dt {
            s = format!("\\partial_t {}", s);
        }
        s
    }
}

/// Text form, parseable back: `~phi1'_xx`, `dt(psi2)`.
impl fmt::Display for FieldAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if self.tilde {
            s.push('~');
        }
        s.push_str(&self.id.base_name());
        if self.dagger {
            s.push('\'');
        }
        if self.deriv > 0 {
            s.push('_');
            for _ in 0..self.deriv {
                s.push('x');
            }
        }
        if self.dt {
            write!(f, "dt({})", s)
        } else {
            write!(f, "{}", s)
        }
    }
}
