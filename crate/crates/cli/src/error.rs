//! Error type of the command-line front end and its exit-code mapping.

use std::fmt::Display;

use thiserror::Error;

/// Exit code of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code for usage and validation errors (bad flags, malformed input,
/// parameters outside the supported regime).
pub const EXIT_VALIDATION: i32 = 1;
/// Exit code for runtime failures (I/O, numerical breakdown, failed
/// certification).
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn validation(msg: impl Display) -> Self {
        CliError::Validation(msg.to_string())
    }

    pub fn runtime(msg: impl Display) -> Self {
        CliError::Runtime(msg.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Whether a library error stems from the caller's input.
trait Classify: Display {
    fn is_validation(&self) -> bool;
}

impl Classify for matrixkit::MatrixError {
    fn is_validation(&self) -> bool {
        use matrixkit::MatrixError::*;
        matches!(self, Parse { .. } | InvalidArgument(_) | DimensionMismatch(_) | HadamardTooLarge { .. } | NotSymmetric { .. })
    }
}

impl Classify for netmodel::ModelError {
    fn is_validation(&self) -> bool {
        use netmodel::ModelError::*;
        match self {
            Matrix(e) => e.is_validation(),
            InvalidSignature { .. }
            | InvalidPair(_)
            | InvalidSparsity(_)
            | InvalidModel { .. }
            | InvalidAdjacency(_)
            | InvalidArgument(_) => true,
            _ => false,
        }
    }
}

impl Classify for spectral::SpectralError {
    fn is_validation(&self) -> bool {
        use spectral::SpectralError::*;
        match self {
            TooManyComponents { .. } => true,
            Matrix(e) => e.is_validation(),
            Model(e) => e.is_validation(),
            _ => false,
        }
    }
}

impl Classify for alignment::AlignmentError {
    fn is_validation(&self) -> bool {
        use alignment::AlignmentError::*;
        match self {
            Shape(_) | SignatureMismatch(..) | InvalidArgument(_) | UnsupportedSignature { .. } => true,
            Matrix(e) => e.is_validation(),
            NotOrthogonal(_) => false,
        }
    }
}

impl Classify for packing::PackingError {
    fn is_validation(&self) -> bool {
        use packing::PackingError::*;
        match self {
            InvalidParams(_) | TooSmall { .. } | CosineUnattainable { .. } | Unsolvable(_) | Shape(_) => true,
            Matrix(e) => e.is_validation(),
            Model(e) => e.is_validation(),
            Alignment(e) => e.is_validation(),
            _ => false,
        }
    }
}

impl Classify for mcharness::McError {
    fn is_validation(&self) -> bool {
        use mcharness::McError::*;
        match self {
            InvalidConfig(_) | Parse { .. } | Json(_) => true,
            Model(e) => e.is_validation(),
            Packing(e) => e.is_validation(),
            Spectral(e) => e.is_validation(),
            Alignment(e) => e.is_validation(),
            Matrix(e) => e.is_validation(),
            Regression(_) | Io(_) => false,
        }
    }
}

impl Classify for hyperbolic::HyperbolicError {
    fn is_validation(&self) -> bool {
        use hyperbolic::HyperbolicError::*;
        !matches!(self, Io(_))
    }
}

macro_rules! classified {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                if e.is_validation() { CliError::Validation(e.to_string()) } else { CliError::Runtime(e.to_string()) }
            }
        }
    )*};
}

classified!(
    matrixkit::MatrixError,
    netmodel::ModelError,
    spectral::SpectralError,
    alignment::AlignmentError,
    packing::PackingError,
    mcharness::McError,
    hyperbolic::HyperbolicError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("I/O error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Runtime(e.to_string())
        } else {
            CliError::Validation(format!("JSON: {e}"))
        }
    }
}
