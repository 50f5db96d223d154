use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DabError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain { what: &'static str, value: f64, domain: &'static str },

    #[error("constant-power load needs Vc2 > 0 (got {vc2} V)")]
    SingularLoad { vc2: f64 },

    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("degenerate polynomial: leading coefficient is zero")]
    DegeneratePolynomial,

    #[error("integration blew up at t = {t:e} s")]
    IntegrationBlowup { t: f64 },

    #[error("no feasible operating point for P = {p_target} W (transferable limit {limit:.1} W)")]
    Infeasible { p_target: f64, limit: f64 },

    #[error("optimizer failed at P = {p_target} W after {iterations} iterations: {reason}")]
    SolverFailed { p_target: f64, iterations: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, DabError>;

impl From<std::io::Error> for DabError {
    fn from(e: std::io::Error) -> Self {
        DabError::Io(e.to_string())
    }
}

impl From<csv::Error> for DabError {
    fn from(e: csv::Error) -> Self {
        DabError::Io(e.to_string())
    }
}
