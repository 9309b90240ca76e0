//! Complex matrix arithmetic and Hermitian spectral routines for the 2×2 and
//! 4×4 matrices that appear in two-qubit Bell experiments.
//!
//! The eigensolver is a cyclic Jacobi iteration specialised to complex
//! Hermitian input. Dimensions are capped at 4, so no external linear-algebra
//! dependency is pulled in and the solver is unconditionally stable.

use std::ops::{Add, Mul, Sub};

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Structural checks (Hermiticity, unit norm) are accepted up to this bound.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Unit-vector directions must satisfy ||n| - 1| <= this bound.
pub const UNIT_TOL: f64 = 1e-12;
/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this.
const JACOBI_OFF_TOL: f64 = 1e-12;
/// Hard cap on Jacobi sweeps; 4×4 Hermitian input converges in a handful.
const MAX_JACOBI_SWEEPS: usize = 100;
/// Eigenvalues closer than this are treated as one degenerate cluster.
const CLUSTER_GAP: f64 = 1e-9;

/// Dense row-major complex matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    // Trusted constructor for internal use; `dim` is always 2 or 4 here.
    fn raw(dim: usize, entries: Vec<Complex64>) -> Self {
        debug_assert!(dim == 2 || dim == 4);
        debug_assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::raw(self.dim, self.entries.iter().map(|e| e * factor).collect())
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose m†.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self::raw(n, out)
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Self {
        Self::raw(self.dim, self.entries.iter().map(|e| e.conj()).collect())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Max entrywise |m - m†|; zero for exactly Hermitian input.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.entry(i, j) - self.entry(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix-vector product m|v⟩.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect()
    }

    /// Quadratic form ⟨v|m|v⟩.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix::raw(
            self.dim,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix::raw(
            self.dim,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.entries[i * n + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += aik * rhs.entries[k * n + j];
                }
            }
        }
        ComplexMatrix::raw(n, out)
    }
}

/// Pauli axis selector for [`pauli`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// The standard Pauli matrix on the chosen axis.
pub fn pauli(axis: PauliAxis) -> ComplexMatrix {
    let (a, b, c, d) = match axis {
        PauliAxis::X => (
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ),
        PauliAxis::Y => (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ),
        PauliAxis::Z => (
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ),
    };
    ComplexMatrix::raw(2, vec![a, b, c, d])
}

fn check_unit(direction: [f64; 3]) -> Result<()> {
    let norm =
        (direction[0] * direction[0] + direction[1] * direction[1] + direction[2] * direction[2])
            .sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitDirection { norm });
    }
    Ok(())
}

/// Spin observable n̂·σ̂ for a unit Bloch direction; eigenvalues are ±1.
pub fn bloch_observable(direction: [f64; 3]) -> Result<ComplexMatrix> {
    check_unit(direction)?;
    let [nx, ny, nz] = direction;
    Ok(ComplexMatrix::raw(
        2,
        vec![
            Complex64::new(nz, 0.0),
            Complex64::new(nx, -ny),
            Complex64::new(nx, ny),
            Complex64::new(-nz, 0.0),
        ],
    ))
}

/// Kronecker product a⊗b of two 2×2 matrices, A-major block order.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 16];
    for i in 0..2 {
        for j in 0..2 {
            let aij = a.entry(i, j);
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k) * 4 + (2 * j + l)] = aij * b.entry(k, l);
                }
            }
        }
    }
    Ok(ComplexMatrix::raw(4, out))
}

/// Eigenvalues (non-increasing) and orthonormal eigenvectors of a Hermitian
/// matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Column eigenvectors; `eigenvectors[i]` pairs with `eigenvalues[i]`.
    eigenvectors: Vec<Vec<Complex64>>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> &[Complex64] {
        &self.eigenvectors[i]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Σ λ_i v_i v_i†, for reconstruction checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += lambda * v[i] * v[j].conj();
                }
            }
        }
        ComplexMatrix::raw(n, out)
    }

    /// Max entrywise deviation of the eigenvector Gram matrix from identity.
    pub fn gram_deviation(&self) -> f64 {
        let n = self.eigenvalues.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let g: Complex64 = self.eigenvectors[i]
                    .iter()
                    .zip(&self.eigenvectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Spectral decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Input must be Hermitian within `1e-10` (max entrywise |m - m†|); the
/// iteration stops once the off-diagonal Frobenius norm falls below `1e-12`,
/// capped at 100 sweeps. Eigenvectors inside a degenerate cluster (gap below
/// `1e-9`) are re-orthonormalised by Gram–Schmidt, so callers must not rely on
/// a particular basis there.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let deviation = m.hermiticity_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim;

    // Work on the Hermitian average so the iteration sees an exactly
    // Hermitian matrix even when the input carries 1e-11-level asymmetry.
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (m.entry(i, j) + m.entry(j, i).conj()) * 0.5;
        }
    }

    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a, n) < JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary U = identity outside the (p,q) block, with
                //   U[p][p] = c·phase, U[p][q] = s·phase,
                //   U[q][p] = -s,      U[q][q] = c,
                // chosen so that (U† a U)[p][q] = 0.
                let upp = phase * c;
                let upq = phase * s;

                // a <- a U  (columns p, q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * upp - akq * s;
                    a[k * n + q] = akp * upq + akq * c;
                }
                // a <- U† a  (rows p, q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = upp.conj() * apk - s * aqk;
                    a[q * n + k] = upq.conj() * apk + c * aqk;
                }
                // v <- v U
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * upp - vkq * s;
                    v[k * n + q] = vkp * upq + vkq * c;
                }
                // Pin the rotated pair exactly.
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) >= JACOBI_OFF_TOL {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
            off_norm: off_diagonal_norm(&a, n),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();

    // Re-orthonormalise inside degenerate clusters.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigenvalues[end - 1] - eigenvalues[end]).abs() < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut eigenvectors[start..end]);
        }
        start = end;
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn gram_schmidt(vectors: &mut [Vec<Complex64>]) {
    for i in 0..vectors.len() {
        for j in 0..i {
            let proj: Complex64 = vectors[j]
                .iter()
                .zip(vectors[i].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let prev = vectors[j].clone();
            for (x, p) in vectors[i].iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let norm: f64 = vectors[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in vectors[i].iter_mut() {
                *x /= norm;
            }
        }
    }
}

/// Checks the trace inequality tr(ab) ≤ Σ_i λ_i(a) λ_i(b) with both spectra
/// sorted non-increasing, up to a 1e-9 slack. Holds for every Hermitian pair,
/// so a `false` return indicates a numerical defect.
pub fn trace_product_bound_check(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<bool> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let da = eig_hermitian(a)?;
    let db = eig_hermitian(b)?;
    let lhs = (a * b).trace().re;
    let rhs: f64 = da
        .eigenvalues()
        .iter()
        .zip(db.eigenvalues())
        .map(|(x, y)| x * y)
        .sum();
    Ok(lhs <= rhs + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let mut g = vec![Complex64::new(0.0, 0.0); dim * dim];
        for e in g.iter_mut() {
            *e = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let m = ComplexMatrix::new(dim, g).unwrap();
        (&m + &m.adjoint()).scale_re(0.5)
    }

    #[test]
    fn pauli_matrices_are_standard() {
        let z = pauli(PauliAxis::Z);
        assert_eq!(z.entry(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(z.entry(1, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(z.entry(0, 1), Complex64::new(0.0, 0.0));

        let x = pauli(PauliAxis::X);
        assert_eq!(x.entry(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(x.entry(1, 0), Complex64::new(1.0, 0.0));

        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
            let p = pauli(axis);
            assert!(p.is_hermitian(0.0));
            assert_eq!(p.trace(), Complex64::new(0.0, 0.0));
            let sq = &p * &p;
            assert!(sq.max_abs_diff(&ComplexMatrix::identity(2).unwrap()) == 0.0);
        }
    }

    #[test]
    fn bloch_observable_axes() {
        let z = bloch_observable([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(z.max_abs_diff(&pauli(PauliAxis::Z)), 0.0);
        let x = bloch_observable([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(x.max_abs_diff(&pauli(PauliAxis::X)), 0.0);
    }

    #[test]
    fn bloch_observable_tilted_has_unit_eigenvalues() {
        let theta = 0.3f64;
        let m = bloch_observable([theta.cos(), 0.0, theta.sin()]).unwrap();
        let expect =
            &pauli(PauliAxis::X).scale_re(theta.cos()) + &pauli(PauliAxis::Z).scale_re(theta.sin());
        assert!(m.max_abs_diff(&expect) < 1e-15);
        let d = eig_hermitian(&m).unwrap();
        assert!((d.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!((d.eigenvalues()[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_observable_rejects_non_unit() {
        assert!(matches!(
            bloch_observable([0.0, 0.0, 1.1]),
            Err(Error::NonUnitDirection { .. })
        ));
    }

    #[test]
    fn tensor_basics() {
        let i2 = ComplexMatrix::identity(2).unwrap();
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert_eq!(tensor(&i2, &i2).unwrap().max_abs_diff(&i4), 0.0);

        let zi = tensor(&pauli(PauliAxis::Z), &i2).unwrap();
        let expect = ComplexMatrix::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, -1.0, 0.0, //
                0.0, 0.0, 0.0, -1.0,
            ],
        )
        .unwrap();
        assert_eq!(zi.max_abs_diff(&expect), 0.0);

        let xz = tensor(&pauli(PauliAxis::X), &pauli(PauliAxis::Z)).unwrap();
        assert_eq!(xz.trace(), Complex64::new(0.0, 0.0));
        assert!(xz.is_hermitian(0.0));
    }

    #[test]
    fn tensor_rejects_wrong_dims() {
        let i4 = ComplexMatrix::identity(4).unwrap();
        let i2 = ComplexMatrix::identity(2).unwrap();
        assert!(tensor(&i4, &i2).is_err());
    }

    #[test]
    fn tensor_trace_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_hermitian(&mut rng, 2);
            let b = random_hermitian(&mut rng, 2);
            let t = tensor(&a, &b).unwrap();
            let lhs = t.trace();
            let rhs = a.trace() * b.trace();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_is_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let a = random_hermitian(&mut rng, 2);
            let b = random_hermitian(&mut rng, 2);
            let c = random_hermitian(&mut rng, 2);
            let lhs = tensor(&(&a + &b), &c).unwrap();
            let rhs = &tensor(&a, &c).unwrap() + &tensor(&b, &c).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            let lhs = tensor(&c, &(&a + &b)).unwrap();
            let rhs = &tensor(&c, &a).unwrap() + &tensor(&c, &b).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn eig_diagonal_input() {
        let m = ComplexMatrix::from_real(
            4,
            &[
                3.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 4.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        let d = eig_hermitian(&m).unwrap();
        assert_eq!(d.eigenvalues(), &[4.0, 3.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_sigma_x() {
        let d = eig_hermitian(&pauli(PauliAxis::X)).unwrap();
        assert!((d.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues()[1] + 1.0).abs() < 1e-14);
        // Eigenvectors are (1, ±1)/√2 up to phase.
        let v = d.eigenvector(0);
        assert!((v[0].norm() - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
        assert!((v[0] - v[1]).norm() < 1e-12);
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2usize, 4] {
            for _ in 0..200 {
                let m = random_hermitian(&mut rng, dim);
                let d = eig_hermitian(&m).unwrap();
                assert!(d.reconstruct().max_abs_diff(&m) < 1e-10);
                assert!(d.gram_deviation() < 1e-10);
                for w in d.eigenvalues().windows(2) {
                    assert!(w[0] >= w[1]);
                }
            }
        }
    }

    #[test]
    fn eig_degenerate_cluster_is_orthonormal() {
        // λ = 1 twice; eigenvectors of the cluster must still be orthonormal.
        let m = ComplexMatrix::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 2.0, 0.0, //
                0.0, 0.0, 0.0, -1.0,
            ],
        )
        .unwrap();
        let d = eig_hermitian(&m).unwrap();
        assert!(d.gram_deviation() < 1e-12);
        assert!(d.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::new(
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    /// Power iteration on a shifted copy; independent of the Jacobi path.
    fn power_iteration_max(m: &ComplexMatrix, rng: &mut ChaCha8Rng) -> f64 {
        let n = m.dim();
        let shift = 1.0 + m.frobenius_norm();
        let mut shifted = m.clone();
        for i in 0..n {
            shifted.set(i, i, shifted.entry(i, i) + Complex64::new(shift, 0.0));
        }
        let mut best = f64::NEG_INFINITY;
        for _ in 0..16 {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            for _ in 0..200 {
                let w = shifted.apply(&v);
                let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                v = w.into_iter().map(|x| x / norm).collect();
            }
            best = best.max(m.expectation(&v).re);
        }
        best
    }

    #[test]
    fn max_eigenvalue_matches_rayleigh_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for dim in [2usize, 4] {
            for _ in 0..20 {
                let m = random_hermitian(&mut rng, dim);
                let lam = eig_hermitian(&m).unwrap().max_eigenvalue();
                // Random Rayleigh quotients never exceed the top eigenvalue.
                for _ in 0..10_000 {
                    let mut v: Vec<Complex64> = (0..dim)
                        .map(|_| {
                            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                        })
                        .collect();
                    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                    v.iter_mut().for_each(|x| *x /= norm);
                    assert!(m.expectation(&v).re <= lam + 1e-9);
                }
                // Power iteration from random starts reaches it.
                let oracle = power_iteration_max(&m, &mut rng);
                assert!(
                    (oracle - lam).abs() < 1e-6,
                    "power-iteration oracle {oracle} vs jacobi {lam}"
                );
            }
        }
    }

    #[test]
    fn trace_bound_simple_cases() {
        let z = pauli(PauliAxis::Z);
        assert!(trace_product_bound_check(&z, &z).unwrap());
        let mz = z.scale_re(-1.0);
        assert!(trace_product_bound_check(&z, &mz).unwrap());
    }

    #[test]
    fn trace_bound_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 4 };
            let a = random_hermitian(&mut rng, dim);
            let b = random_hermitian(&mut rng, dim);
            assert!(trace_product_bound_check(&a, &b).unwrap());
        }
    }

    #[test]
    fn trace_bound_rejects_mismatched_dims() {
        let a = pauli(PauliAxis::Z);
        let b = ComplexMatrix::identity(4).unwrap();
        assert!(trace_product_bound_check(&a, &b).is_err());
    }
}
