//! Bell operators for CHSH experiments with one-sided detector inefficiency.
//!
//! Three operators are covered:
//!
//! * `𝓑_CHSH` — the standard operator with projective measurements on both
//!   sides (η plays no role),
//! * `𝓑` — Bob's two settings both read out through the inefficiency POVM,
//!   which satisfies `𝓑 = η 𝓑_CHSH + 2(1−η) σ_z⊗𝕀`,
//! * `𝓑′` — only Bob's second setting (y = 1) is inefficient.
//!
//! In the canonical x–z frame every one of them expands as
//! `Σ c_ij σ_i⊗σ_j + (r_x σ_x + r_z σ_z)⊗𝕀` with i, j ∈ {x, z}, and the
//! largest eigenvalue has the closed form
//! `λ²_max = Σ(c² + r²) + 2√{(r_x c_xx + r_z c_zx)² + (r_x c_xz + r_z c_zz)²
//! + (c_xx c_zz − c_xz c_zx)²}`.

use crate::entanglement::TwoQubitState;
use crate::error::{Error, Result};
use crate::matrix::{
    bloch_observable, eig_hermitian, pauli, tensor, Complex64, ComplexMatrix, PauliAxis,
    SpectralDecomposition, STRUCTURAL_TOL,
};
use crate::scenario::{
    canonical_directions, inefficient_povm, observable_from_povm, projector, Scenario,
};

/// Which of the three Bell operators a value represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    /// Projective measurements everywhere.
    Chsh,
    /// Both of Bob's settings at efficiency η.
    Asymmetric,
    /// Only Bob's y = 1 setting at efficiency η.
    SingleSetting,
}

impl BellKind {
    pub fn name(&self) -> &'static str {
        match self {
            BellKind::Chsh => "Chsh",
            BellKind::Asymmetric => "Asymmetric",
            BellKind::SingleSetting => "SingleSetting",
        }
    }
}

/// Pauli-basis coefficients of a Bell operator in the canonical frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientTable {
    pub c_xx: f64,
    pub c_xz: f64,
    pub c_zx: f64,
    pub c_zz: f64,
    pub r_x: f64,
    pub r_z: f64,
}

impl CoefficientTable {
    /// Coefficients from raw angles and efficiency. Angles are not required
    /// to be normalised, which lets optimizer refinement evaluate the table
    /// anywhere along its search path.
    pub fn from_angles(kind: BellKind, theta_a: f64, theta_b: f64, eta: f64) -> Self {
        let (sa, ca) = theta_a.sin_cos();
        let (sb, cb) = theta_b.sin_cos();
        match kind {
            BellKind::Chsh => Self {
                c_xx: -ca * cb,
                c_xz: ca * (1.0 - sb),
                c_zx: cb * (1.0 - sa),
                c_zz: 1.0 + sa + sb - sa * sb,
                r_x: 0.0,
                r_z: 0.0,
            },
            BellKind::Asymmetric => {
                let base = Self::from_angles(BellKind::Chsh, theta_a, theta_b, eta);
                Self {
                    c_xx: eta * base.c_xx,
                    c_xz: eta * base.c_xz,
                    c_zx: eta * base.c_zx,
                    c_zz: eta * base.c_zz,
                    r_x: 0.0,
                    r_z: 2.0 * (1.0 - eta),
                }
            }
            BellKind::SingleSetting => Self {
                c_xx: -eta * ca * cb,
                c_xz: ca * (1.0 - eta * sb),
                c_zx: eta * cb * (1.0 - sa),
                c_zz: 1.0 + eta * sb + sa * (1.0 - eta * sb),
                r_x: -(1.0 - eta) * ca,
                r_z: (1.0 - eta) * (1.0 - sa),
            },
        }
    }

    /// Coefficients of 𝓑_CHSH (η treated as 1).
    pub fn chsh(s: &Scenario) -> Self {
        Self::from_angles(BellKind::Chsh, s.theta_a(), s.theta_b(), 1.0)
    }

    /// Coefficients of 𝓑 at efficiency η: the CHSH table scaled by η plus
    /// r_z = 2(1−η).
    pub fn asymmetric(s: &Scenario) -> Self {
        Self::from_angles(BellKind::Asymmetric, s.theta_a(), s.theta_b(), s.eta())
    }

    /// Coefficients of 𝓑′ (inefficiency on Bob's y = 1 setting only).
    pub fn single_setting(s: &Scenario) -> Self {
        Self::from_angles(BellKind::SingleSetting, s.theta_a(), s.theta_b(), s.eta())
    }

    pub fn for_kind(kind: BellKind, s: &Scenario) -> Self {
        match kind {
            BellKind::Chsh => Self::chsh(s),
            BellKind::Asymmetric => Self::asymmetric(s),
            BellKind::SingleSetting => Self::single_setting(s),
        }
    }

    /// Assembles Σ c_ij σ_i⊗σ_j + (r_x σ_x + r_z σ_z)⊗𝕀.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let sx = pauli(PauliAxis::X);
        let sz = pauli(PauliAxis::Z);
        let id = ComplexMatrix::identity(2).expect("dim 2");
        let mut m = tensor(&sx, &sx).expect("2x2").scale_re(self.c_xx);
        m = &m + &tensor(&sx, &sz).expect("2x2").scale_re(self.c_xz);
        m = &m + &tensor(&sz, &sx).expect("2x2").scale_re(self.c_zx);
        m = &m + &tensor(&sz, &sz).expect("2x2").scale_re(self.c_zz);
        m = &m + &tensor(&sx, &id).expect("2x2").scale_re(self.r_x);
        m = &m + &tensor(&sz, &id).expect("2x2").scale_re(self.r_z);
        m
    }

    /// Same operator as a real 4×4 array (every allowed Pauli term is real
    /// in the computational basis). Used by the optimizer's hot path.
    pub fn to_real_matrix(&self) -> [[f64; 4]; 4] {
        let m = self.to_matrix();
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = m.entry(i, j).re;
            }
        }
        out
    }

    /// Extracts the table from a 4×4 operator by Pauli projection
    /// coeff = tr[(σ_i⊗σ_j) m] / 4. Errors if any component outside the
    /// {𝕀,σ_x,σ_z} ⊗ {𝕀,σ_x,σ_z} span (σ_y in particular) exceeds 1e-10.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::DimensionMismatch {
                left: 4,
                right: m.dim(),
            });
        }
        let basis = |axis: Option<PauliAxis>| match axis {
            None => ComplexMatrix::identity(2).expect("dim 2"),
            Some(a) => pauli(a),
        };
        let labels: [(&'static str, Option<PauliAxis>, Option<PauliAxis>); 16] = [
            ("II", None, None),
            ("IX", None, Some(PauliAxis::X)),
            ("IY", None, Some(PauliAxis::Y)),
            ("IZ", None, Some(PauliAxis::Z)),
            ("XI", Some(PauliAxis::X), None),
            ("XX", Some(PauliAxis::X), Some(PauliAxis::X)),
            ("XY", Some(PauliAxis::X), Some(PauliAxis::Y)),
            ("XZ", Some(PauliAxis::X), Some(PauliAxis::Z)),
            ("YI", Some(PauliAxis::Y), None),
            ("YX", Some(PauliAxis::Y), Some(PauliAxis::X)),
            ("YY", Some(PauliAxis::Y), Some(PauliAxis::Y)),
            ("YZ", Some(PauliAxis::Y), Some(PauliAxis::Z)),
            ("ZI", Some(PauliAxis::Z), None),
            ("ZX", Some(PauliAxis::Z), Some(PauliAxis::X)),
            ("ZY", Some(PauliAxis::Z), Some(PauliAxis::Y)),
            ("ZZ", Some(PauliAxis::Z), Some(PauliAxis::Z)),
        ];
        let mut table = Self {
            c_xx: 0.0,
            c_xz: 0.0,
            c_zx: 0.0,
            c_zz: 0.0,
            r_x: 0.0,
            r_z: 0.0,
        };
        for (label, a, b) in labels {
            let op = tensor(&basis(a), &basis(b)).expect("2x2");
            let coeff = (&op * m).trace() / Complex64::new(4.0, 0.0);
            if coeff.im.abs() > STRUCTURAL_TOL {
                return Err(Error::UnexpectedPauliComponent {
                    label,
                    magnitude: coeff.im.abs(),
                });
            }
            let c = coeff.re;
            match label {
                "XX" => table.c_xx = c,
                "XZ" => table.c_xz = c,
                "ZX" => table.c_zx = c,
                "ZZ" => table.c_zz = c,
                "XI" => table.r_x = c,
                "ZI" => table.r_z = c,
                _ => {
                    if c.abs() > STRUCTURAL_TOL {
                        return Err(Error::UnexpectedPauliComponent {
                            label,
                            magnitude: c.abs(),
                        });
                    }
                }
            }
        }
        Ok(table)
    }

    /// Closed-form λ²_max for operators of this family.
    pub fn lambda_max_sq(&self) -> f64 {
        let sum = self.r_x * self.r_x
            + self.r_z * self.r_z
            + self.c_xx * self.c_xx
            + self.c_xz * self.c_xz
            + self.c_zx * self.c_zx
            + self.c_zz * self.c_zz;
        let u = self.r_x * self.c_xx + self.r_z * self.c_zx;
        let v = self.r_x * self.c_xz + self.r_z * self.c_zz;
        let w = self.c_xx * self.c_zz - self.c_xz * self.c_zx;
        sum + 2.0 * (u * u + v * v + w * w).sqrt()
    }
}

/// A Bell operator with the scenario that produced it.
#[derive(Debug, Clone)]
pub struct BellOperator {
    matrix: ComplexMatrix,
    kind: BellKind,
    scenario: Scenario,
}

impl BellOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> BellKind {
        self.kind
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Closed-form Pauli coefficients for this operator's kind and scenario.
    pub fn coefficient_table(&self) -> CoefficientTable {
        CoefficientTable::for_kind(self.kind, &self.scenario)
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        eig_hermitian(&self.matrix)
    }

    /// Numeric largest eigenvalue.
    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.spectral()?.max_eigenvalue())
    }
}

fn bob_observables(s: &Scenario, kind: BellKind) -> Result<[ComplexMatrix; 2]> {
    let dirs = canonical_directions(s);
    let projective = |d| bloch_observable(d);
    let coarse = |d| observable_from_povm(&inefficient_povm(d, s.eta())?);
    Ok(match kind {
        BellKind::Chsh => [projective(dirs[2])?, projective(dirs[3])?],
        BellKind::Asymmetric => [coarse(dirs[2])?, coarse(dirs[3])?],
        BellKind::SingleSetting => [projective(dirs[2])?, coarse(dirs[3])?],
    })
}

fn build(s: &Scenario, kind: BellKind) -> Result<BellOperator> {
    let dirs = canonical_directions(s);
    let oa0 = bloch_observable(dirs[0])?;
    let oa1 = bloch_observable(dirs[1])?;
    let [ob0, ob1] = bob_observables(s, kind)?;
    let matrix = &tensor(&oa0, &(&ob0 + &ob1))? + &tensor(&oa1, &(&ob0 - &ob1))?;
    Ok(BellOperator {
        matrix,
        kind,
        scenario: *s,
    })
}

/// Standard Bell operator `O^A_0⊗(O^B_0+O^B_1) + O^A_1⊗(O^B_0−O^B_1)` with
/// projective observables everywhere; the scenario's η is ignored.
pub fn bell_chsh(s: &Scenario) -> BellOperator {
    build(s, BellKind::Chsh).expect("canonical directions are unit vectors")
}

/// Bell operator with both of Bob's settings read out at efficiency η.
pub fn bell_asymmetric(s: &Scenario) -> BellOperator {
    build(s, BellKind::Asymmetric).expect("canonical directions are unit vectors")
}

/// Bell operator with only Bob's y = 1 setting read out at efficiency η.
pub fn bell_single_setting(s: &Scenario) -> BellOperator {
    build(s, BellKind::SingleSetting).expect("canonical directions are unit vectors")
}

/// Two-point correlator tr[ρ (oa⊗ob)] of Hermitian single-qubit observables.
pub fn correlator(state: &TwoQubitState, oa: &ComplexMatrix, ob: &ComplexMatrix) -> Result<f64> {
    for o in [oa, ob] {
        if o.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: 2,
                right: o.dim(),
            });
        }
        let deviation = o.hermiticity_deviation();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { deviation });
        }
    }
    let rho = state.density_matrix();
    let value = (&rho * &tensor(oa, ob)?).trace();
    debug_assert!(value.im.abs() < 1e-10);
    Ok(value.re)
}

/// Signed CHSH combination tr[ρ 𝓑]; callers test |value| > 2.
pub fn chsh_value(state: &TwoQubitState, op: &BellOperator) -> f64 {
    let value = (&state.density_matrix() * op.matrix()).trace();
    debug_assert!(value.im.abs() < 1e-10);
    value.re
}

/// Born probabilities p(a,b|x,y) with Alice projective and Bob measured
/// according to `kind`: projective (`Chsh`), both settings at efficiency η
/// (`Asymmetric`), or only y = 1 at efficiency η (`SingleSetting`).
/// Indexed `[x][y][a][b]`.
pub fn outcome_probabilities(
    state: &TwoQubitState,
    s: &Scenario,
    kind: BellKind,
) -> Result<[[[[f64; 2]; 2]; 2]; 2]> {
    let dirs = canonical_directions(s);
    let alice = [
        [projector(dirs[0], 0)?, projector(dirs[0], 1)?],
        [projector(dirs[1], 0)?, projector(dirs[1], 1)?],
    ];
    let bob_effects = |y: usize| -> Result<[ComplexMatrix; 2]> {
        let dir = dirs[2 + y];
        let projective =
            matches!(kind, BellKind::Chsh) || (matches!(kind, BellKind::SingleSetting) && y == 0);
        if projective {
            Ok([projector(dir, 0)?, projector(dir, 1)?])
        } else {
            let povm = inefficient_povm(dir, s.eta())?;
            Ok([povm.effects()[0].clone(), povm.effects()[1].clone()])
        }
    };
    let bob = [bob_effects(0)?, bob_effects(1)?];
    let rho = state.density_matrix();
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let effect = tensor(&alice[x][a], &bob[y][b])?;
                    p[x][y][a][b] = (&rho * &effect).trace().re;
                }
            }
        }
    }
    Ok(p)
}

/// Largest eigenvalue 2√(1+4κ²) of 𝓑 at η = 1/2 + κ, θ_A = 0 and
/// θ_B = arcsin((1−2κ)²/(1+2κ)²).
pub fn lambda_max_symmetric(kappa: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&kappa) || !kappa.is_finite() {
        return Err(Error::OutOfRange {
            name: "kappa",
            value: kappa,
            range: "[0, 1/2]",
        });
    }
    Ok(2.0 * (1.0 + 4.0 * kappa * kappa).sqrt())
}

/// The Bob angle that realises [`lambda_max_symmetric`]; principal arcsin
/// branch in [0, π/2].
pub fn theta_b_symmetric(kappa: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&kappa) || !kappa.is_finite() {
        return Err(Error::OutOfRange {
            name: "kappa",
            value: kappa,
            range: "[0, 1/2]",
        });
    }
    let ratio = (1.0 - 2.0 * kappa).powi(2) / (1.0 + 2.0 * kappa).powi(2);
    Ok(ratio.asin())
}

/// λ²_max of 𝓑′ from the general coefficient closed form.
pub fn lambda_max_sq_single_setting(s: &Scenario) -> f64 {
    CoefficientTable::single_setting(s).lambda_max_sq()
}

/// λ²_max of 𝓑′ from the simplified trigonometric form
/// `4(1 − η(1−η)(1−sinθ_A)) +
///  4√{η²(1−sinθ_A)[cos²θ_B (1+sinθ_A) + (1−η)²(1−sinθ_A)]}`.
pub fn lambda_max_sq_single_setting_simplified(s: &Scenario) -> f64 {
    let eta = s.eta();
    let sa = s.theta_a().sin();
    let cb = s.theta_b().cos();
    let inner =
        eta * eta * (1.0 - sa) * (cb * cb * (1.0 + sa) + (1.0 - eta) * (1.0 - eta) * (1.0 - sa));
    4.0 * (1.0 - eta * (1.0 - eta) * (1.0 - sa)) + 4.0 * inner.max(0.0).sqrt()
}

/// Conjugation (σ_y⊗𝕀) 𝓑 (σ_y⊗𝕀), which flips the sign of every operator in
/// this family; for the `Asymmetric` kind it equals −𝓑 exactly.
pub fn sign_flip_conjugate(op: &BellOperator) -> BellOperator {
    let sy_i = tensor(
        &pauli(PauliAxis::Y),
        &ComplexMatrix::identity(2).expect("dim 2"),
    )
    .expect("2x2 inputs");
    let matrix = &(&sy_i * op.matrix()) * &sy_i;
    BellOperator {
        matrix,
        kind: op.kind,
        scenario: op.scenario,
    }
}
