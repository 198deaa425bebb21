use thiserror::Error;

/// Every failure the library can report. Variant names follow the
/// mathematical condition that failed so the CLI can echo them verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("SyntaxError at {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("ConstantSymbol: the map is constant, composition operators need a non-constant symbol")]
    ConstantSymbol,

    #[error("DomainError: {0}")]
    Domain(String),

    #[error("OrbitEscape: iterate {0} left the domain")]
    OrbitEscape(usize),

    #[error("NotADiffeomorphism: {0}")]
    NotADiffeomorphism(String),

    #[error("DegreeOverflow: composed degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    #[error("HypothesisViolation: {0}")]
    HypothesisViolation(String),

    #[error("Unresolved: {0}")]
    Unresolved(String),

    #[error("InvarianceFailure: {message}")]
    InvarianceFailure {
        message: String,
        witness: Option<String>,
    },

    #[error("CenterMismatch: {0}")]
    CenterMismatch(String),

    #[error("ResonantEigenvalue: lambda equals the multiplier to the power {0}")]
    ResonantEigenvalue(usize),

    #[error("ZeroLambda: lambda must be nonzero")]
    ZeroLambda,

    #[error("NeutralOrSuperattracting: {0}")]
    NeutralOrSuperattracting(String),

    #[error("BasinEscape: orbit did not enter the core within {0} steps")]
    BasinEscape(usize),

    #[error("PrecisionLoss: {0}")]
    PrecisionLoss(String),

    #[error("BranchDomain: {0}")]
    BranchDomain(String),

    #[error("ReflectedUncovered: {0}")]
    ReflectedUncovered(String),

    #[error("LocalSolutionNotConvergent: {0}")]
    NotConvergent(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub fn syntax(position: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            position,
            message: message.into(),
        }
    }

    /// Short identifier used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::ConstantSymbol => "ConstantSymbol",
            Error::Domain(_) => "DomainError",
            Error::OrbitEscape(_) => "OrbitEscape",
            Error::NotADiffeomorphism(_) => "NotADiffeomorphism",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::HypothesisViolation(_) => "HypothesisViolation",
            Error::Unresolved(_) => "Unresolved",
            Error::InvarianceFailure { .. } => "InvarianceFailure",
            Error::CenterMismatch(_) => "CenterMismatch",
            Error::ResonantEigenvalue(_) => "ResonantEigenvalue",
            Error::ZeroLambda => "ZeroLambda",
            Error::NeutralOrSuperattracting(_) => "NeutralOrSuperattracting",
            Error::BasinEscape(_) => "BasinEscape",
            Error::PrecisionLoss(_) => "PrecisionLoss",
            Error::BranchDomain(_) => "BranchDomain",
            Error::ReflectedUncovered(_) => "ReflectedUncovered",
            Error::NotConvergent(_) => "LocalSolutionNotConvergent",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }

    /// Input errors (bad text, bad parameters) as opposed to mathematical
    /// obstructions met while computing.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::ConstantSymbol | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
