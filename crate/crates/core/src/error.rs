use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator count mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("exponential needs a nilpotent argument (nonzero body)")]
    NonzeroBody,
    #[error("parity error: {0}")]
    Parity(String),
    #[error("no time-derivative rule for `{0}`")]
    UnresolvedSymbol(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("model `{model}`: {what}")]
    ModelDefect { model: String, what: String },
    #[error("riccati solver failed at order {order}: {what}")]
    Structural { order: i32, what: String },
    #[error("derivation check failed: {0}")]
    Derivation(String),
    #[error("defect expansion: leading term is not invertible ({0})")]
    SingularDefect(String),
    #[error("missing input: {0}")]
    Missing(String),
    #[error("rewriting did not terminate within {budget} passes")]
    RewriteBudget { budget: usize, partial: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("simulation blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
