//! Modified conserved charges for integrable field theories with defects.
//!
//! The crate derives charges for the bosonic and Grassmannian Thirring
//! models and for sine-Gordon from their Lax pairs, computes the
//! contributions of a defect at `x = 0`, and checks everything both
//! symbolically and numerically.

pub mod defects;
pub mod derive;
pub mod error;
pub mod graded;
pub mod models;
pub mod numsim;
pub mod riccati;
pub mod sampling;
pub mod scalar;
pub mod symexpr;
pub mod verify;

pub use error::{Error, Result};
pub use graded::GradedElement;
pub use models::{build_model, ModelName, ModelSpec};
pub use scalar::{Param, ParamMono, ParamValues, Scalar};
pub use symexpr::{FieldAtom, FieldId, Mono, SymExpr};
