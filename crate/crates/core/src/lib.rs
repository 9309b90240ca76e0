//! Numerical toolkit for CHSH experiments in which one party suffers
//! detector inefficiency.
//!
//! The crate builds the Bell operators for the asymmetric scenario (Bob
//! conclusive only with probability η, for both or just one of his two
//! measurement settings), analyses the entanglement of violating states
//! through the concurrence, constructs local-hidden-variable models that
//! reproduce any no-signaling distribution at low efficiency, and searches
//! numerically for maximal violations under entanglement constraints.
//!
//! Module map:
//!
//! * [`matrix`] — complex 2×2/4×4 matrices, Pauli algebra, Jacobi eigensolver.
//! * [`scenario`] — measurement angles, efficiency, projectors and POVMs.
//! * [`bell`] — the three Bell operators and their closed-form spectra.
//! * [`entanglement`] — two-qubit states, Schmidt analysis, concurrence.
//! * [`bounds`] — analytic concurrence bounds for violating states.
//! * [`lhv`] — no-signaling distributions and the Massar–Pironio model.
//! * [`optimizer`] — grid + simplex search for maximal violations.

pub mod bell;
pub mod bounds;
pub mod entanglement;
pub mod error;
pub mod lhv;
pub mod matrix;
pub mod optimizer;
pub mod scenario;

pub use bell::{
    bell_asymmetric, bell_chsh, bell_single_setting, chsh_value, correlator,
    lambda_max_sq_single_setting, lambda_max_sq_single_setting_simplified, lambda_max_symmetric,
    outcome_probabilities, sign_flip_conjugate, theta_b_symmetric, BellKind, BellOperator,
    CoefficientTable,
};
pub use bounds::{
    in_derivation_window, kappa_max_bound_single, main_bound, quartic_coefficients, violation_ub,
    violation_ub_limit_check, QuarticCoefficients, Window,
};
pub use entanglement::{
    concurrence_mixed, concurrence_pure, filter_decomposition, marginal_z_expectation, schmidt,
    SchmidtData, TwoQubitState,
};
pub use error::{Error, Result};
pub use lhv::{
    massar_pironio_model, quantum_distribution, sample_model, simulate, validate_no_signaling,
    verify_simulation, Alphabets, JointTable, LhvModel, NoSignalingDistribution, SimulationCheck,
    Weight,
};
pub use matrix::{
    bloch_observable, eig_hermitian, pauli, tensor, trace_product_bound_check, Complex64,
    ComplexMatrix, PauliAxis, SpectralDecomposition,
};
pub use optimizer::{
    degenerate_eigenspace_concurrence, kappa_for_concurrence, max_value_fixed_angles,
    max_value_fixed_concurrence, max_value_fixed_concurrence_with, min_concurrence_violating,
    prop1_margin_scan, MarginScan, OptimizationResult, SearchConfig, StateParams,
};
pub use scenario::{
    canonical_directions, inefficient_povm, is_degenerate, observable_from_povm, projector, Povm,
    Scenario,
};
