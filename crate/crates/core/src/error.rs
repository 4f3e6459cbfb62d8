//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong inside the engine.
///
/// The CLI maps these onto its exit codes: argument-shaped failures become
/// exit 2, numerical failures become exit 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a precondition (non-finite value, out-of-range
    /// parameter, unsupported option).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested operation is not defined for this input shape, e.g. a
    /// second derivative of a superposition that already carries one.
    #[error("unsupported operation: {0}")]
    UnsupportedOperation(String),

    /// A two-outcome Fisher information was requested at a point where one
    /// outcome probability vanishes while its derivative does not, so the
    /// information diverges instead of having a removable limit.
    #[error("singular limit: {0}")]
    SingularLimit(String),

    /// A conditional branch carries (numerically) zero probability; its
    /// normalized state and QFI are undefined.
    #[error("degenerate branch: probability {probability:.3e} below threshold")]
    DegenerateBranch { probability: f64 },

    /// The pre- and postselected system states are orthogonal, so the weak
    /// value has a vanishing denominator.
    #[error("orthogonal postselection: weak-value denominator vanishes")]
    OrthogonalPostselection,

    /// The round-trip amplitude feedback of the cavity reaches unity, so the
    /// geometric series for the intracavity field diverges.
    #[error("divergent cavity: round-trip feedback {feedback} >= 1")]
    DivergentCavity { feedback: f64 },

    /// The closed-form recycled-information approximation is singular at this
    /// point (sin or cos of the accumulated phase vanishes).
    #[error("singular approximation: {0}")]
    SingularApproximation(String),

    /// The Fock truncation needed to reach the requested tail mass exceeds
    /// the hard cap.
    #[error("truncation overflow: required {required} basis states, cap is {cap}")]
    TruncationOverflow { required: usize, cap: usize },

    /// A finite-difference estimate failed its step-halving self-check.
    #[error("step-size error: estimates {coarse} and {fine} disagree beyond tolerance")]
    StepSize { coarse: f64, fine: f64 },

    /// An internal consistency check failed; this indicates a bug, not a
    /// property of the inputs.
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
