//! Error type shared by every module in the crate.

use thiserror::Error;

use crate::modes::ModeLabel;

/// Everything that can go wrong when building or transforming states.
///
/// Numerical guards (`NotUnitary`, `NotHermitian`, `ProbabilityLeak`, ...)
/// carry the measured deviation so a failing tolerance is visible in the
/// message rather than just a boolean.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum SimError {
    #[error("mode registries differ between operands")]
    RegistryMismatch,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mode index {mode} out of range for a registry of {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("duplicate mode label {0} in registry")]
    DuplicateMode(ModeLabel),
    #[error("mode label {0} is absent from the target registry")]
    UnknownMode(ModeLabel),
    #[error("registry must contain at least one mode")]
    EmptyRegistry,
    #[error("operation would exceed the photon cap of {cap}")]
    PhotonCapExceeded { cap: u32 },
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("state is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("cannot normalize a state or density with vanishing norm")]
    ZeroNorm,
    #[error("parameter {name} = {value} is out of range")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("both tensor factors carry memory slot {slot}")]
    MemoryCollision { slot: char },
    #[error("detectors {first} and {second} do not come from opposite interferometer halves")]
    InvalidPattern {
        first: &'static str,
        second: &'static str,
    },
    #[error("operator violates 0 <= M <= 1 (eigenvalues span [{min_eig:.3e}, {max_eig:.3e}])")]
    OperatorBound { min_eig: f64, max_eig: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },
    #[error("loss-branch pruning dropped too much weight ({dropped:.3e})")]
    ProbabilityLeak { dropped: f64 },
    #[error("no sign change on bracket [{lo}, {hi}]")]
    BracketFailed { lo: f64, hi: f64 },
}

pub type SimResult<T> = Result<T, SimError>;
