//! Differential polynomials in field atoms, exponentials and a formal
//! spectral parameter.

mod atom;
pub mod calculus;
pub mod eval;
mod expr;
mod parse;
mod render;

pub use atom::{FieldAtom, FieldId};
pub use calculus::{d_t, d_x, subst_eom, RuleSet};
pub use eval::{eval, Assignment};
pub use expr::{sum, Exponent, Mono, SymExpr};
pub use parse::{parse_atom, parse_expr, parse_expr_with};
pub use render::{JsonExpr, JsonTerm};

#[cfg(test)]
mod tests;
