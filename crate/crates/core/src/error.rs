use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("function is not monotone on [{lo}, {hi}] (violation near x = {at})")]
    MonotonicityViolation { lo: f64, hi: f64, at: f64 },

    #[error("quadrature on [{a}, {b}] did not converge (error estimate {estimate:e})")]
    QuadratureFailure { a: f64, b: f64, estimate: f64 },

    #[error("evaluation underflow/overflow at x = {x}")]
    EvaluationOverflow { x: f64 },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("generator derivative vanishes at t = {t}")]
    DegenerateGenerator { t: f64 },

    #[error("not a copula: {0}")]
    NotACopula(String),

    #[error("section v -> S({u}, v) is not strictly increasing")]
    SectionInversionFailure { u: f64 },

    #[error("Kendall curve is not pseudo-Archimedean: |s - K(s)| below gap tolerance on [{from}, {to}]")]
    NotPseudoArchimedean { from: f64, to: f64 },

    #[error("Kendall curves do not share a grid and cannot be re-evaluated")]
    GridMismatch,

    #[error("survival model `{0}` has no density")]
    MissingDensity(String),

    #[error("Kendall routes disagree at t = {t}: {left} vs {right}")]
    RouteMismatch { t: f64, left: f64, right: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown family key `{key}`; valid keys: {}", valid.join(", "))]
    UnknownFamily { key: String, valid: Vec<String> },

    #[error("route `{route}` is not applicable: {reason}")]
    RouteInapplicable { route: String, reason: String },
}
