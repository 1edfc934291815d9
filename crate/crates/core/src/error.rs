use thiserror::Error;

/// Errors raised by the exact IET toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Interval evaluation could not separate a nonzero value from zero
    /// within the refinement budget.
    #[error("comparison undecided after {refinements} refinements (sign of {value})")]
    Undecided { value: String, refinements: usize },
    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
    #[error("invalid symbol basis: {0}")]
    InvalidBasis(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid subdomain: {0}")]
    InvalidSubdomain(String),
    #[error("invalid interval exchange: {0}")]
    InvalidIet(String),
    #[error("operands live on different domains")]
    DomainMismatch,
    #[error("subdomain is not invariant: {0}")]
    NotInvariant(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),
    #[error("element does not decompose: {0}")]
    NotDecomposable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for failures caused by the comparison budget rather than bad input.
    pub fn is_undecided(&self) -> bool {
        matches!(self, Error::Undecided { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
