use thiserror::Error;

use crate::octa::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context}: value {value} lies outside its legal interval beyond the clamp band")]
    Domain { context: &'static str, value: f64 },

    #[error("degenerate face {0}")]
    DegenerateFace(String),

    #[error("theta {theta} outside [{min}, {max}]")]
    ThetaOutOfRange { theta: f64, min: f64, max: f64 },

    #[error("invalid parameters: {}", format_violations(.0))]
    InvalidParams(Vec<Violation>),

    #[error("no flex state reproduces the diagonals: {0}")]
    InconsistentDiagonals(String),

    #[error("classification ambiguous: {0}")]
    Ambiguous(String),

    #[error("structural fit failed on face {face}: best residual {best:e}")]
    FitFailed { face: String, best: f64 },

    #[error("elliptic modulus {0} outside [0, 1)")]
    Modulus(f64),

    #[error("no admissible apex found after {0} attempts")]
    ApexSelection(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
