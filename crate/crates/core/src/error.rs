use thiserror::Error;

/// Failures raised by the calculators and constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponents: need 1 < q < p, got p = {p}, q = {q}")]
    InvalidExponents { p: f64, q: f64 },

    /// An input violates a documented inequality; the message names it.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// The requested object does not exist for these parameters.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The parameters belong to a different branch of the bound.
    #[error("wrong branch: {0}")]
    WrongBranch(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A root bracket did not straddle zero. This signals an internal
    /// misclassification rather than bad user input.
    #[error("bracketing failed: {0}")]
    Bracket(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Bracket(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
