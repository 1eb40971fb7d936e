use crate::machine::{InputError, MachineKind, NotAMachineCode, NotInRange, ParseError, ValidationError};

/// Errors shared by the engines and the harness.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    NotAMachineCode(#[from] NotAMachineCode),
    #[error(transparent)]
    NotInRange(#[from] NotInRange),
    #[error("expected a {expected} machine, got {found}")]
    KindMismatch { expected: MachineKind, found: MachineKind },
    #[error("machine is not well-formed: {0}")]
    NotWellFormed(String),
    #[error("{what} exceeded the bound of {bound}")]
    Resource { what: &'static str, bound: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("structural error: {0}")]
    Structural(String),
}

impl Error {
    /// Process exit code: 1 for bad input, 2 for resource bounds, 3 for
    /// broken internal invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 2,
            Error::Structural(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn expect_kind(found: MachineKind, expected: MachineKind) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::KindMismatch { expected, found })
    }
}
