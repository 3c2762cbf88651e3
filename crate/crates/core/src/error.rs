use thiserror::Error;

use crate::symexpr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid vector field: {0}")]
    InvalidField(String),

    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("expected {expected} functions, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),

    #[error(
        "admissibility exhausted: {accepted} of {requested} points accepted after {draws} draws \
         (rejected: nu {rejected_nu}, oset {rejected_oset}, det {rejected_det}, eval {rejected_eval})"
    )]
    AdmissibilityExhausted {
        requested: usize,
        accepted: usize,
        draws: usize,
        rejected_nu: usize,
        rejected_oset: usize,
        rejected_det: usize,
        rejected_eval: usize,
    },

    #[error("singular chart Jacobian (|det| = {det:e})")]
    SingularJacobian { det: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate point: |div X| = {value:e}")]
    DegeneratePoint { value: f64 },

    #[error("kernel element rejected: [X~, Y~] residual {residual:e} exceeds {tolerance:e}")]
    KernelRejected { residual: f64, tolerance: f64 },

    #[error("adaptive step size underflow at t = {t}")]
    StepFailure { t: f64 },

    #[error("trajectory left the domain at t = {t}")]
    DomainExit { t: f64 },

    #[error("input file not found: {0}")]
    FileNotFound(String),

    #[error("schema error at `{path}`: {message}")]
    SchemaError { path: String, message: String },

    #[error("expression syntax error in `{field}`: {source}")]
    ExpressionSyntax { field: String, source: ParseError },

    #[error("unknown tolerance `{0}`")]
    UnknownTolerance(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures of iterative numerics, as opposed to bad input or broken hypotheses.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::StepFailure { .. }
                | Error::SingularJacobian { .. }
                | Error::DomainExit { .. }
                | Error::Eval(_)
                | Error::DegeneratePoint { .. }
        )
    }
}
