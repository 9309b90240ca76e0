//! Two-qubit states, Schmidt analysis and the concurrence.
//!
//! Pure states are stored as amplitude 4-vectors, mixed states as 4×4 density
//! matrices. The concurrence of a pure state is 2√(κ_max(1−κ_max)) with κ_max
//! the largest squared Schmidt coefficient; mixed states use the Wootters
//! construction. The filter form |φ⟩ = (R⊗𝕀)(|00⟩+|11⟩) identifies R with the
//! amplitude matrix, so tr(RR†) = 1 carries the normalisation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    eig_hermitian, pauli, tensor, Complex64, ComplexMatrix, PauliAxis, STRUCTURAL_TOL,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A two-qubit state, pure or mixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct TwoQubitState {
    form: Form,
}

#[derive(Debug, Clone, PartialEq)]
enum Form {
    Pure([Complex64; 4]),
    Mixed(ComplexMatrix),
}

/// JSON shape: pure states as 8 interleaved re/im reals, mixed states as 32
/// row-major re/im reals.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum StateRecord {
    Pure(Vec<f64>),
    Mixed(Vec<f64>),
}

impl TryFrom<StateRecord> for TwoQubitState {
    type Error = Error;
    fn try_from(r: StateRecord) -> Result<Self> {
        match r {
            StateRecord::Pure(reals) => {
                if reals.len() != 8 {
                    return Err(Error::EntryCount {
                        dim: 2,
                        expected: 8,
                        actual: reals.len(),
                    });
                }
                let mut amps = [ZERO; 4];
                for (i, amp) in amps.iter_mut().enumerate() {
                    *amp = Complex64::new(reals[2 * i], reals[2 * i + 1]);
                }
                TwoQubitState::pure(amps)
            }
            StateRecord::Mixed(reals) => {
                if reals.len() != 32 {
                    return Err(Error::EntryCount {
                        dim: 4,
                        expected: 32,
                        actual: reals.len(),
                    });
                }
                let entries = (0..16)
                    .map(|i| Complex64::new(reals[2 * i], reals[2 * i + 1]))
                    .collect();
                TwoQubitState::mixed(ComplexMatrix::new(4, entries)?)
            }
        }
    }
}

impl From<TwoQubitState> for StateRecord {
    fn from(state: TwoQubitState) -> Self {
        match state.form {
            Form::Pure(amps) => StateRecord::Pure(amps.iter().flat_map(|c| [c.re, c.im]).collect()),
            Form::Mixed(m) => {
                StateRecord::Mixed(m.entries().iter().flat_map(|c| [c.re, c.im]).collect())
            }
        }
    }
}

impl TwoQubitState {
    /// Pure state from amplitudes in the computational basis
    /// (|00⟩, |01⟩, |10⟩, |11⟩); must be unit norm within 1e-10.
    pub fn pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STRUCTURAL_TOL || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            form: Form::Pure(amplitudes),
        })
    }

    /// Mixed state from a density matrix: Hermitian within 1e-10, unit trace
    /// within 1e-10, min eigenvalue ≥ −1e-9.
    pub fn mixed(density: ComplexMatrix) -> Result<Self> {
        if density.dim() != 4 {
            return Err(Error::DimensionMismatch {
                left: 4,
                right: density.dim(),
            });
        }
        let deviation = density.hermiticity_deviation();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = density.trace();
        if (trace.re - 1.0).abs() > STRUCTURAL_TOL || trace.im.abs() > STRUCTURAL_TOL {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let min = eig_hermitian(&density)?.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            form: Form::Mixed(density),
        })
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.form, Form::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<[Complex64; 4]> {
        match self.form {
            Form::Pure(a) => Some(a),
            Form::Mixed(_) => None,
        }
    }

    /// Density matrix of the state (|ψ⟩⟨ψ| for pure input).
    pub fn density_matrix(&self) -> ComplexMatrix {
        match &self.form {
            Form::Pure(a) => {
                let entries = (0..4)
                    .flat_map(|i| (0..4).map(move |j| (i, j)))
                    .map(|(i, j)| a[i] * a[j].conj())
                    .collect();
                ComplexMatrix::new(4, entries).expect("4x4")
            }
            Form::Mixed(m) => m.clone(),
        }
    }

    /// |Φ⁺⟩ = (|00⟩+|11⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            form: Form::Pure([h, ZERO, ZERO, h]),
        }
    }

    /// |Ψ⁻⟩ = (|01⟩−|10⟩)/√2.
    pub fn singlet() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            form: Form::Pure([ZERO, h, -h, ZERO]),
        }
    }

    /// √κ|00⟩ + √(1−κ)|11⟩ for κ ∈ [0, 1].
    pub fn schmidt_aligned(kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::OutOfRange {
                name: "kappa",
                value: kappa,
                range: "[0, 1]",
            });
        }
        Self::pure([
            Complex64::new(kappa.sqrt(), 0.0),
            ZERO,
            ZERO,
            Complex64::new((1.0 - kappa).sqrt(), 0.0),
        ])
    }

    /// 𝕀/4.
    pub fn maximally_mixed() -> Self {
        Self {
            form: Form::Mixed(ComplexMatrix::identity(4).expect("4x4").scale_re(0.25)),
        }
    }

    /// Haar-ish random pure state (normalised complex Gaussian amplitudes).
    pub fn random_pure(rng: &mut impl rand::Rng) -> Self {
        loop {
            let mut amps = [ZERO; 4];
            let mut norm_sq = 0.0;
            for amp in amps.iter_mut() {
                // Box-Muller keeps the dependency surface at `rand` itself.
                let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = (-2.0 * u.ln()).sqrt();
                *amp = Complex64::new(r * v.cos(), r * v.sin());
                norm_sq += amp.norm_sqr();
            }
            if norm_sq > 1e-12 {
                let norm = norm_sq.sqrt();
                for amp in amps.iter_mut() {
                    *amp /= norm;
                }
                return Self {
                    form: Form::Pure(amps),
                };
            }
        }
    }

    fn pure_amplitudes(&self) -> Result<[Complex64; 4]> {
        self.amplitudes().ok_or(Error::ExpectedPure)
    }

    fn mixed_density(&self) -> Result<&ComplexMatrix> {
        match &self.form {
            Form::Mixed(m) => Ok(m),
            Form::Pure(_) => Err(Error::ExpectedMixed),
        }
    }
}

/// Schmidt decomposition data of a pure state: `κ_max` and the local bases
/// with (U_A⊗U_B)(√κ_max|00⟩+√(1−κ_max)|11⟩) reproducing the state.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub kappa_max: f64,
    /// Squared Schmidt coefficients, non-increasing, summing to 1.
    pub coefficients: [f64; 2],
    /// Local unitaries (U_A, U_B).
    pub local_bases: (ComplexMatrix, ComplexMatrix),
}

fn amplitude_matrix(amps: &[Complex64; 4]) -> ComplexMatrix {
    ComplexMatrix::new(2, vec![amps[0], amps[1], amps[2], amps[3]]).expect("2x2")
}

/// Schmidt decomposition of a pure two-qubit state via the 2×2 SVD of the
/// amplitude matrix, built from the spectral decomposition of M†M with left
/// vectors recovered as Mv/σ (ties and rank deficiency fall back to the
/// canonical completion).
pub fn schmidt(state: &TwoQubitState) -> Result<SchmidtData> {
    let amps = state.pure_amplitudes()?;
    let m = amplitude_matrix(&amps);
    let gram = &m.adjoint() * &m;
    let spectral = eig_hermitian(&gram)?;
    let kappa1 = spectral.eigenvalues()[0].clamp(0.0, 1.0);
    let kappa2 = spectral.eigenvalues()[1].max(0.0);
    let sigma1 = kappa1.sqrt();
    let sigma2 = kappa2.sqrt();

    let v1 = spectral.eigenvector(0).to_vec();
    let v2 = spectral.eigenvector(1).to_vec();

    // Left singular vectors: u_k = M v_k / σ_k. σ₁ ≥ 1/√2 always; σ₂ may
    // vanish for product states, where any completion works.
    let mv1 = m.apply(&v1);
    let u1 = [mv1[0] / sigma1, mv1[1] / sigma1];
    let u2 = if sigma2 > 1e-12 {
        let mv2 = m.apply(&v2);
        [mv2[0] / sigma2, mv2[1] / sigma2]
    } else {
        [-u1[1].conj(), u1[0].conj()]
    };

    // |φ⟩ = Σ σ_k u_k ⊗ conj(v_k): Bob's basis enters conjugated.
    let u_a = ComplexMatrix::new(2, vec![u1[0], u2[0], u1[1], u2[1]])?;
    let u_b = ComplexMatrix::new(
        2,
        vec![v1[0].conj(), v2[0].conj(), v1[1].conj(), v2[1].conj()],
    )?;

    Ok(SchmidtData {
        kappa_max: kappa1,
        coefficients: [kappa1, kappa2],
        local_bases: (u_a, u_b),
    })
}

impl SchmidtData {
    /// (U_A⊗U_B)(√κ_max|00⟩+√(1−κ_max)|11⟩), for reconstruction checks.
    pub fn reassemble(&self) -> Result<TwoQubitState> {
        let joint = tensor(&self.local_bases.0, &self.local_bases.1)?;
        let base = [
            Complex64::new(self.coefficients[0].max(0.0).sqrt(), 0.0),
            ZERO,
            ZERO,
            Complex64::new(self.coefficients[1].max(0.0).sqrt(), 0.0),
        ];
        let amps = joint.apply(&base);
        TwoQubitState::pure([amps[0], amps[1], amps[2], amps[3]])
    }
}

/// Concurrence 2√(κ_max(1−κ_max)) of a pure state.
pub fn concurrence_pure(state: &TwoQubitState) -> Result<f64> {
    let data = schmidt(state)?;
    let kappa = data.kappa_max;
    Ok(2.0 * (kappa * (1.0 - kappa)).max(0.0).sqrt())
}

/// Square root of a PSD matrix via its spectral decomposition; eigenvalues
/// are clipped at zero to absorb −1e-10-level noise.
fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectral = eig_hermitian(m)?;
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n)?;
    for (idx, &lambda) in spectral.eigenvalues().iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let v = spectral.eigenvector(idx);
        for i in 0..n {
            for j in 0..n {
                let cur = out.entry(i, j);
                out.set(i, j, cur + root * v[i] * v[j].conj());
            }
        }
    }
    Ok(out)
}

/// Wootters concurrence max(0, λ₁−λ₂−λ₃−λ₄) of a mixed state, where the λ_i
/// are the square-rooted eigenvalues of ρρ̃ with ρ̃ = (σ_y⊗σ_y)ρ*(σ_y⊗σ_y).
/// The spectrum is obtained from the Hermitian similarity √ρ ρ̃ √ρ.
pub fn concurrence_mixed(state: &TwoQubitState) -> Result<f64> {
    let rho = state.mixed_density()?;
    let syy = tensor(&pauli(PauliAxis::Y), &pauli(PauliAxis::Y))?;
    let rho_tilde = &(&syy * &rho.conjugate()) * &syy;
    let sqrt_rho = sqrt_psd(rho)?;
    let w = &(&sqrt_rho * &rho_tilde) * &sqrt_rho;
    let spectrum = eig_hermitian(&w)?;
    // The square root amplifies eigenvalue noise (√1e-16 = 1e-8), so clip
    // relative to the top eigenvalue before rooting.
    let cutoff = spectrum.max_eigenvalue().max(0.0) * 1e-14;
    let mut lambdas: Vec<f64> = spectrum
        .eigenvalues()
        .iter()
        .map(|&x| if x < cutoff { 0.0 } else { x.sqrt() })
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// The filter R with |φ⟩ = (R⊗𝕀)(|00⟩+|11⟩) and tr(RR†) = 1. R is the
/// amplitude matrix up to a global phase, fixed so that the first nonzero
/// entry in column-major order is real non-negative; the reconstruction
/// therefore matches the state up to that global phase.
pub fn filter_decomposition(state: &TwoQubitState) -> Result<ComplexMatrix> {
    let amps = state.pure_amplitudes()?;
    let m = amplitude_matrix(&amps);
    // Column-major scan: (0,0), (1,0), (0,1), (1,1).
    let scan = [(0, 0), (1, 0), (0, 1), (1, 1)];
    let mut phase = Complex64::new(1.0, 0.0);
    for (i, j) in scan {
        let e = m.entry(i, j);
        if e.norm() > 1e-12 {
            phase = e / e.norm();
            break;
        }
    }
    Ok(m.scale(phase.conj()))
}

/// Alice's z marginal ⟨φ|σ_z⊗𝕀|φ⟩ computed as tr(RR†σ_z); bounded above by
/// 2κ_max − 1.
pub fn marginal_z_expectation(state: &TwoQubitState) -> Result<f64> {
    let r = filter_decomposition(state)?;
    let value = (&(&r * &r.adjoint()) * &pauli(PauliAxis::Z)).trace();
    debug_assert!(value.im.abs() < 1e-12);
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary2(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        // Gram-Schmidt on two random complex columns.
        loop {
            let g: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let n1 = (g[0].norm_sqr() + g[2].norm_sqr()).sqrt();
            if n1 < 1e-6 {
                continue;
            }
            let c1 = [g[0] / n1, g[2] / n1];
            let proj = c1[0].conj() * g[1] + c1[1].conj() * g[3];
            let d = [g[1] - proj * c1[0], g[3] - proj * c1[1]];
            let n2 = (d[0].norm_sqr() + d[1].norm_sqr()).sqrt();
            if n2 < 1e-6 {
                continue;
            }
            let c2 = [d[0] / n2, d[1] / n2];
            return ComplexMatrix::new(2, vec![c1[0], c2[0], c1[1], c2[1]]).unwrap();
        }
    }

    fn apply_local(u: &ComplexMatrix, v: &ComplexMatrix, state: &TwoQubitState) -> TwoQubitState {
        let joint = tensor(u, v).unwrap();
        let amps = joint.apply(&state.amplitudes().unwrap());
        TwoQubitState::pure([amps[0], amps[1], amps[2], amps[3]]).unwrap()
    }

    #[test]
    fn pure_state_validation() {
        assert!(TwoQubitState::pure([
            Complex64::new(1.0, 0.0),
            ZERO,
            ZERO,
            Complex64::new(0.1, 0.0)
        ])
        .is_err());
        assert!(TwoQubitState::pure([Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO]).is_ok());
    }

    #[test]
    fn mixed_state_validation() {
        assert!(TwoQubitState::mixed(ComplexMatrix::identity(4).unwrap()).is_err()); // trace 4
        let proj = TwoQubitState::bell_phi_plus().density_matrix();
        assert!(TwoQubitState::mixed(proj).is_ok());
        // Not PSD: 𝕀/2 − |Φ⁺⟩⟨Φ⁺|/... use a matrix with a −0.25 eigenvalue.
        let bad = &ComplexMatrix::identity(4).unwrap().scale_re(0.375)
            - &TwoQubitState::bell_phi_plus()
                .density_matrix()
                .scale_re(0.5);
        assert!(matches!(
            TwoQubitState::mixed(bad),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn schmidt_examples() {
        let d = schmidt(&TwoQubitState::bell_phi_plus()).unwrap();
        assert!((d.kappa_max - 0.5).abs() < 1e-12);

        let basis00 = TwoQubitState::pure([Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO]).unwrap();
        let d = schmidt(&basis00).unwrap();
        assert!((d.kappa_max - 1.0).abs() < 1e-12);

        let d = schmidt(&TwoQubitState::schmidt_aligned(0.8).unwrap()).unwrap();
        assert!((d.kappa_max - 0.8).abs() < 1e-12);
        assert!((d.coefficients[0] + d.coefficients[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn schmidt_rejects_mixed_input() {
        assert!(matches!(
            schmidt(&TwoQubitState::maximally_mixed()),
            Err(Error::ExpectedPure)
        ));
    }

    #[test]
    fn schmidt_reassembles_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..300 {
            let state = TwoQubitState::random_pure(&mut rng);
            let d = schmidt(&state).unwrap();
            // Both reduced density matrices share the spectrum.
            let rho = state.density_matrix();
            let amps = state.amplitudes().unwrap();
            let m = amplitude_matrix(&amps);
            let left = &m * &m.adjoint();
            let right = &m.adjoint() * &m;
            let ka = eig_hermitian(&left).unwrap().max_eigenvalue();
            let kb = eig_hermitian(&right).unwrap().max_eigenvalue();
            assert!((ka - kb).abs() < 1e-10);
            assert!((d.kappa_max - ka).abs() < 1e-10);
            assert!(d.kappa_max >= 0.5 - 1e-12 && d.kappa_max <= 1.0 + 1e-12);

            // Local bases are unitary and the reassembly is exact.
            for u in [&d.local_bases.0, &d.local_bases.1] {
                let gram = &u.adjoint() * u;
                assert!(gram.max_abs_diff(&ComplexMatrix::identity(2).unwrap()) < 1e-10);
            }
            let back = d.reassemble().unwrap();
            let overlap: Complex64 = back
                .amplitudes()
                .unwrap()
                .iter()
                .zip(amps.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!(
                (overlap.norm() - 1.0).abs() < 1e-8,
                "overlap {}",
                overlap.norm()
            );
            drop(rho);
        }
    }

    #[test]
    fn concurrence_pure_examples() {
        assert!((concurrence_pure(&TwoQubitState::bell_phi_plus()).unwrap() - 1.0).abs() < 1e-12);
        let product = TwoQubitState::pure([ZERO, Complex64::new(1.0, 0.0), ZERO, ZERO]).unwrap();
        assert!(concurrence_pure(&product).unwrap() < 1e-12);
        let tilted = TwoQubitState::schmidt_aligned(0.8).unwrap();
        assert!((concurrence_pure(&tilted).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn concurrence_matches_spin_flip_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let syy = tensor(&pauli(PauliAxis::Y), &pauli(PauliAxis::Y)).unwrap();
        for _ in 0..300 {
            let state = TwoQubitState::random_pure(&mut rng);
            let amps = state.amplitudes().unwrap();
            let conj: Vec<Complex64> = amps.iter().map(|c| c.conj()).collect();
            let flipped = syy.apply(&conj);
            let overlap: Complex64 = amps.iter().zip(&flipped).map(|(a, b)| a.conj() * b).sum();
            let c = concurrence_pure(&state).unwrap();
            assert!((c - overlap.norm()).abs() < 1e-10);
            assert!((0.0..=1.0 + 1e-12).contains(&c));
        }
    }

    #[test]
    fn concurrence_is_locally_unitary_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..200 {
            let state = TwoQubitState::random_pure(&mut rng);
            let u = random_unitary2(&mut rng);
            let v = random_unitary2(&mut rng);
            let rotated = apply_local(&u, &v, &state);
            let c0 = concurrence_pure(&state).unwrap();
            let c1 = concurrence_pure(&rotated).unwrap();
            assert!((c0 - c1).abs() < 1e-10);
        }
    }

    #[test]
    fn concurrence_mixed_examples() {
        let phi = TwoQubitState::mixed(TwoQubitState::bell_phi_plus().density_matrix()).unwrap();
        assert!((concurrence_mixed(&phi).unwrap() - 1.0).abs() < 1e-8);

        assert!(concurrence_mixed(&TwoQubitState::maximally_mixed()).unwrap() < 1e-10);

        // Werner state w|Φ⁺⟩⟨Φ⁺| + (1−w)𝕀/4 has concurrence (3w−1)/2.
        for w in [0.8, 0.5, 0.4, 1.0 / 3.0, 0.2] {
            let rho = &TwoQubitState::bell_phi_plus().density_matrix().scale_re(w)
                + &ComplexMatrix::identity(4)
                    .unwrap()
                    .scale_re((1.0 - w) * 0.25);
            let state = TwoQubitState::mixed(rho).unwrap();
            let expect = (1.5 * w - 0.5).max(0.0);
            assert!(
                (concurrence_mixed(&state).unwrap() - expect).abs() < 1e-8,
                "w = {w}"
            );
        }
    }

    #[test]
    fn concurrence_mixed_agrees_with_pure_on_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..100 {
            let state = TwoQubitState::random_pure(&mut rng);
            let rank1 = TwoQubitState::mixed(state.density_matrix()).unwrap();
            let cp = concurrence_pure(&state).unwrap();
            let cm = concurrence_mixed(&rank1).unwrap();
            assert!((cp - cm).abs() < 1e-8);
        }
    }

    #[test]
    fn concurrence_mixed_rejects_pure_input() {
        assert!(matches!(
            concurrence_mixed(&TwoQubitState::bell_phi_plus()),
            Err(Error::ExpectedMixed)
        ));
    }

    #[test]
    fn filter_decomposition_examples() {
        let r = filter_decomposition(&TwoQubitState::bell_phi_plus()).unwrap();
        let expect = ComplexMatrix::from_real(
            2,
            &[
                std::f64::consts::FRAC_1_SQRT_2,
                0.0,
                0.0,
                std::f64::consts::FRAC_1_SQRT_2,
            ],
        )
        .unwrap();
        assert!(r.max_abs_diff(&expect) < 1e-12);

        let r = filter_decomposition(&TwoQubitState::schmidt_aligned(0.8).unwrap()).unwrap();
        let expect =
            ComplexMatrix::from_real(2, &[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]).unwrap();
        assert!(r.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn filter_reconstructs_up_to_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..300 {
            let state = TwoQubitState::random_pure(&mut rng);
            let r = filter_decomposition(&state).unwrap();
            // tr(RR†) = 1.
            let trace = (&r * &r.adjoint()).trace();
            assert!((trace.re - 1.0).abs() < 1e-10);
            // Eigenvalues of RR† are the squared Schmidt coefficients.
            let d = schmidt(&state).unwrap();
            let ev = eig_hermitian(&(&r * &r.adjoint())).unwrap();
            assert!((ev.eigenvalues()[0] - d.coefficients[0]).abs() < 1e-10);
            assert!((ev.eigenvalues()[1] - d.coefficients[1]).abs() < 1e-10);
            // (R⊗𝕀)(|00⟩+|11⟩) reproduces the state up to a global phase.
            let rebuilt = [r.entry(0, 0), r.entry(0, 1), r.entry(1, 0), r.entry(1, 1)];
            let amps = state.amplitudes().unwrap();
            let overlap: Complex64 = rebuilt
                .iter()
                .zip(amps.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-10);
            // First nonzero column-major entry is real non-negative.
            let scan = [r.entry(0, 0), r.entry(1, 0), r.entry(0, 1), r.entry(1, 1)];
            let first = scan.iter().find(|e| e.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-12 && first.re >= 0.0);
        }
    }

    #[test]
    fn marginal_z_examples_and_bound() {
        let phi = TwoQubitState::bell_phi_plus();
        assert!(marginal_z_expectation(&phi).unwrap().abs() < 1e-12);

        let basis00 = TwoQubitState::pure([Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO]).unwrap();
        assert!((marginal_z_expectation(&basis00).unwrap() - 1.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for _ in 0..1000 {
            let state = TwoQubitState::random_pure(&mut rng);
            let value = marginal_z_expectation(&state).unwrap();
            // Agrees with the direct expectation ⟨φ|σ_z⊗𝕀|φ⟩.
            let sz_i = tensor(&pauli(PauliAxis::Z), &ComplexMatrix::identity(2).unwrap()).unwrap();
            let direct = (&state.density_matrix() * &sz_i).trace().re;
            assert!((value - direct).abs() < 1e-10);
            // Lasserre bound via the Schmidt weight.
            let kappa = schmidt(&state).unwrap().kappa_max;
            assert!(value <= 2.0 * kappa - 1.0 + 1e-10);
        }
    }

    #[test]
    fn state_json_round_trip() {
        let state = TwoQubitState::bell_phi_plus();
        let json = serde_json::to_string(&state).unwrap();
        assert!(json.starts_with(r#"{"pure""#));
        let back: TwoQubitState = serde_json::from_str(&json).unwrap();
        assert_eq!(state, back);

        let mixed = TwoQubitState::maximally_mixed();
        let json = serde_json::to_string(&mixed).unwrap();
        assert!(json.starts_with(r#"{"mixed""#));
        let back: TwoQubitState = serde_json::from_str(&json).unwrap();
        assert_eq!(mixed, back);

        // Validation applies on the way in.
        assert!(serde_json::from_str::<TwoQubitState>(
            r#"{"pure":[1.0,0.0,1.0,0.0,0.0,0.0,0.0,0.0]}"#
        )
        .is_err());
    }
}
