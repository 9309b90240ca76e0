//! Measurement scenarios and the projectors / inefficiency POVMs they induce.
//!
//! A scenario fixes the two local measurement angles in the canonical x–z
//! plane (the first direction on each side is pinned to ẑ by local unitaries)
//! together with Bob's detection efficiency η. When a conclusive outcome is
//! obtained only with probability η, the inconclusive event ∅ is merged into
//! outcome 0, which turns Bob's projective pair into the two-outcome POVM
//! {(η/2)(𝕀 + n̂·σ̂) + (1−η)𝕀, (η/2)(𝕀 − n̂·σ̂)}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{bloch_observable, eig_hermitian, ComplexMatrix, STRUCTURAL_TOL};

/// Angles below this distance from ±π/2 count as degenerate (second
/// direction parallel or antiparallel to ẑ).
const DEGENERACY_TOL: f64 = 1e-12;

/// Measurement angles (θ_A, θ_B) in the x–z plane plus Bob's efficiency η.
///
/// Angles are normalised into (−π, π] on construction and η is validated to
/// lie in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRecord")]
pub struct Scenario {
    theta_a: f64,
    theta_b: f64,
    eta: f64,
}

#[derive(Deserialize)]
struct ScenarioRecord {
    theta_a: f64,
    theta_b: f64,
    eta: f64,
}

impl TryFrom<ScenarioRecord> for Scenario {
    type Error = Error;
    fn try_from(r: ScenarioRecord) -> Result<Self> {
        Scenario::new(r.theta_a, r.theta_b, r.eta)
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(std::f64::consts::TAU);
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

impl Scenario {
    pub fn new(theta_a: f64, theta_b: f64, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
            return Err(Error::EfficiencyOutOfRange(eta));
        }
        if !theta_a.is_finite() || !theta_b.is_finite() {
            return Err(Error::OutOfRange {
                name: "theta",
                value: if theta_a.is_finite() {
                    theta_b
                } else {
                    theta_a
                },
                range: "finite radians",
            });
        }
        Ok(Self {
            theta_a: normalize_angle(theta_a),
            theta_b: normalize_angle(theta_b),
            eta,
        })
    }

    pub fn theta_a(&self) -> f64 {
        self.theta_a
    }

    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Same angles, different efficiency.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.theta_a, self.theta_b, eta)
    }
}

/// A positive operator-valued measure: effects are PSD and sum to 𝕀.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    /// Validates positivity (min eigenvalue ≥ −1e-10) and completeness
    /// (effects sum to 𝕀 within 1e-10).
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::OutcomeCount(0));
        }
        let dim = effects[0].dim();
        let mut sum = ComplexMatrix::zeros(dim)?;
        for (index, effect) in effects.iter().enumerate() {
            if effect.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: effect.dim(),
                });
            }
            let dev = effect.hermiticity_deviation();
            if dev > STRUCTURAL_TOL {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let min = eig_hermitian(effect)?.min_eigenvalue();
            if min < -STRUCTURAL_TOL {
                return Err(Error::EffectNotPsd {
                    index,
                    min_eigenvalue: min,
                });
            }
            sum = &sum + effect;
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim)?);
        if deviation > STRUCTURAL_TOL {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn outcome_count(&self) -> usize {
        self.effects.len()
    }
}

/// Spin projector ½(𝕀 + (−1)^outcome n̂·σ̂) onto the ±n̂ eigenstate.
pub fn projector(direction: [f64; 3], outcome: usize) -> Result<ComplexMatrix> {
    if outcome > 1 {
        return Err(Error::InvalidOutcome(outcome));
    }
    let obs = bloch_observable(direction)?;
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    Ok((&ComplexMatrix::identity(2)? + &obs.scale_re(sign)).scale_re(0.5))
}

/// Bob's two-outcome POVM at efficiency η, with the inconclusive outcome
/// merged into outcome 0:
/// effect 0 = (η/2)(𝕀 + n̂·σ̂) + (1−η)𝕀, effect 1 = (η/2)(𝕀 − n̂·σ̂).
pub fn inefficient_povm(direction: [f64; 3], eta: f64) -> Result<Povm> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::EfficiencyOutOfRange(eta));
    }
    let identity = ComplexMatrix::identity(2)?;
    let effect0 = &projector(direction, 0)?.scale_re(eta) + &identity.scale_re(1.0 - eta);
    let effect1 = projector(direction, 1)?.scale_re(eta);
    Povm::new(vec![effect0, effect1])
}

/// The observable Π₀ − Π₁ of a two-outcome POVM. For [`inefficient_povm`]
/// input this equals η n̂·σ̂ + (1−η)𝕀.
pub fn observable_from_povm(povm: &Povm) -> Result<ComplexMatrix> {
    if povm.outcome_count() != 2 {
        return Err(Error::OutcomeCount(povm.outcome_count()));
    }
    Ok(&povm.effects[0] - &povm.effects[1])
}

/// The canonical measurement directions [â₀, â₁, b̂₀, b̂₁]:
/// â₀ = b̂₀ = ẑ and the second directions tilted by θ_A, θ_B in the x–z plane.
pub fn canonical_directions(s: &Scenario) -> [[f64; 3]; 4] {
    [
        [0.0, 0.0, 1.0],
        [s.theta_a.cos(), 0.0, s.theta_a.sin()],
        [0.0, 0.0, 1.0],
        [s.theta_b.cos(), 0.0, s.theta_b.sin()],
    ]
}

/// True iff either second direction is parallel or antiparallel to ẑ
/// (θ = ±π/2 within 1e-12), which collapses that side to a single setting.
pub fn is_degenerate(s: &Scenario) -> bool {
    let half_pi = std::f64::consts::FRAC_PI_2;
    (s.theta_a - half_pi).abs() <= DEGENERACY_TOL
        || (s.theta_a + half_pi).abs() <= DEGENERACY_TOL
        || (s.theta_b - half_pi).abs() <= DEGENERACY_TOL
        || (s.theta_b + half_pi).abs() <= DEGENERACY_TOL
}
