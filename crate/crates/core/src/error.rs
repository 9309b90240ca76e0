//! Shared error type for all domain constructors and operations.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension must be 2 or 4, got {0}")]
    UnsupportedDimension(usize),

    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {actual}")]
    EntryCount {
        dim: usize,
        expected: usize,
        actual: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max |m - m†| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("direction must be a unit vector, got |n| = {norm}")]
    NonUnitDirection { norm: f64 },

    #[error("measurement outcome must be 0 or 1, got {0}")]
    InvalidOutcome(usize),

    #[error("detection efficiency must lie in [0, 1], got {0}")]
    EfficiencyOutOfRange(f64),

    #[error("POVM must have exactly 2 outcomes, got {0}")]
    OutcomeCount(usize),

    #[error(
        "POVM effect {index} is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}"
    )]
    EffectNotPsd { index: usize, min_eigenvalue: f64 },

    #[error("POVM effects do not sum to the identity: max deviation {deviation:.3e}")]
    IncompletePovm { deviation: f64 },

    #[error("pure state is not normalized: |psi| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("density matrix has trace {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("density matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("operation requires a pure state")]
    ExpectedPure,

    #[error("operation requires a mixed-state density matrix")]
    ExpectedMixed,

    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("operator has a σ_y Pauli component of magnitude {magnitude:.3e} ({label})")]
    UnexpectedPauliComponent { label: &'static str, magnitude: f64 },

    #[error("efficiency {eta} below the derivation window: the bound requires eta >= 1/2")]
    WindowLow { eta: f64 },

    #[error("efficiency {eta} above the derivation window limit (1+kappa)/sqrt(2) = {limit:.6}")]
    WindowHigh { eta: f64, limit: f64 },

    #[error("square-root argument 1 - kappa(2+kappa) - 4 eta (1-eta) = {value:.3e} is negative")]
    NegativeDiscriminant { value: f64 },

    #[error("distribution table has {actual} entries, expected {expected}")]
    TableSize { expected: usize, actual: usize },

    #[error("negative probability {value} at (x={x}, y={y}, a={a}, b={b})")]
    NegativeProbability {
        x: usize,
        y: usize,
        a: usize,
        b: usize,
        value: f64,
    },

    #[error("outcome probabilities at (x={x}, y={y}) sum to {sum}, expected 1")]
    TableNotNormalized { x: usize, y: usize, sum: f64 },

    #[error(
        "signaling to Bob: marginal of b={b} under y={y} differs between x={x0} and x={x1} by {deviation:.3e}"
    )]
    SignalingToBob {
        b: usize,
        y: usize,
        x0: usize,
        x1: usize,
        deviation: f64,
    },

    #[error(
        "signaling to Alice: marginal of a={a} under x={x} differs between y={y0} and y={y1} by {deviation:.3e}"
    )]
    SignalingToAlice {
        a: usize,
        x: usize,
        y0: usize,
        y1: usize,
        deviation: f64,
    },

    #[error("no LHV model at efficiency {eta}: the construction requires eta <= 1/|Y| = {limit}")]
    NoLhvModel { eta: f64, limit: f64 },

    #[error("value {value} is not representable as an exact rational")]
    NotRational { value: f64 },

    #[error("no CHSH violation exists at efficiency {eta} <= 1/2 (LHV-simulable regime)")]
    NoViolationPossible { eta: f64 },

    #[error("operation supports Asymmetric and SingleSetting operators, got {0}")]
    UnsupportedBellKind(&'static str),

    #[error("search failed: {0}")]
    SearchFailed(String),
}
