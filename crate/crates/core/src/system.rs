//! Finite-dimensional system Hamiltonians with a cached eigendecomposition,
//! and exact propagation |ψ(t)⟩ = Σ_k ψ_k e^{-iω_k t} |e_k⟩.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Relative tolerance for the Hermiticity check of explicit matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Tolerance on |‖ψ‖ - 1| for states that must be normalized.
pub const NORM_TOL: f64 = 1e-10;

/// How to build a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    /// d×d zero matrix: stationary system.
    Zero { dim: usize },
    /// diag(0, ω₀).
    Qubit { omega0: f64 },
    /// Truncated harmonic oscillator, diag(ω₀(n + ½)) for n < d.
    Oscillator { dim: usize, omega0: f64 },
    /// (A + A†)/2 with A_ij = x + iy, x, y standard normal (row-major draw).
    RandomHermitian { dim: usize, seed: u64 },
    /// Equally spaced spectrum (k - (d-1)/2)·spacing, a discrete ideal clock.
    Comb { dim: usize, spacing: f64 },
    /// Explicit row-major matrix.
    Matrix { dim: usize, entries: Vec<C64> },
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: DMatrix<C64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Hamiltonian {
    pub fn from_spec(spec: &HamiltonianSpec) -> Result<Self> {
        let real_diag = |values: Vec<f64>| {
            let d = values.len();
            DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    C64::new(values[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        };
        let matrix = match spec {
            HamiltonianSpec::Zero { dim } => {
                check_dim(*dim)?;
                DMatrix::zeros(*dim, *dim)
            }
            HamiltonianSpec::Qubit { omega0 } => {
                check_finite(*omega0)?;
                real_diag(vec![0.0, *omega0])
            }
            HamiltonianSpec::Oscillator { dim, omega0 } => {
                check_dim(*dim)?;
                check_finite(*omega0)?;
                real_diag((0..*dim).map(|n| omega0 * (n as f64 + 0.5)).collect())
            }
            HamiltonianSpec::RandomHermitian { dim, seed } => {
                check_dim(*dim)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut a = DMatrix::<C64>::zeros(*dim, *dim);
                for i in 0..*dim {
                    for j in 0..*dim {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        a[(i, j)] = C64::new(re, im);
                    }
                }
                (&a + a.adjoint()).scale(0.5)
            }
            HamiltonianSpec::Comb { dim, spacing } => {
                check_dim(*dim)?;
                check_finite(*spacing)?;
                let mid = (*dim as f64 - 1.0) / 2.0;
                real_diag((0..*dim).map(|k| (k as f64 - mid) * spacing).collect())
            }
            HamiltonianSpec::Matrix { dim, entries } => {
                check_dim(*dim)?;
                if entries.len() != dim * dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim * dim,
                        found: entries.len(),
                    });
                }
                DMatrix::from_row_slice(*dim, *dim, entries)
            }
        };
        Self::from_matrix(matrix)
    }

    /// Validate Hermiticity and diagonalize. Eigenvalues come out ascending.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        check_dim(matrix.nrows())?;
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("matrix entries must be finite"));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let max_asymmetry = max_asymmetry(&matrix);
        if max_asymmetry > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        let eig = matrix.clone().symmetric_eigen();
        let d = matrix.nrows();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Hamiltonian {
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Eigenfrequencies ω_k (ħ = 1), ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn eigenstate(&self, k: usize) -> SystemState {
        SystemState::new(self.eigenvectors.column(k).iter().copied().collect())
    }

    /// H|v⟩ written into `out`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        let d = self.dim();
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let mut acc = C64::new(0.0, 0.0);
            for (j, x) in v.iter().enumerate().take(d) {
                acc += self.matrix[(i, j)] * x;
            }
            *o = acc;
        }
    }

    pub fn apply(&self, psi: &SystemState) -> Result<SystemState> {
        self.check(psi)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(&psi.amplitudes, &mut out);
        Ok(SystemState::new(out))
    }

    /// Coefficients ψ_k = ⟨e_k|ψ⟩.
    pub fn eigen_coefficients(&self, psi: &SystemState) -> Result<Vec<C64>> {
        self.check(psi)?;
        let v = DVector::from_column_slice(&psi.amplitudes);
        Ok((self.eigenvectors.adjoint() * v).iter().copied().collect())
    }

    /// Σ_k c_k e^{-iω_k t} |e_k⟩ written into `out`.
    pub(crate) fn propagate_coefficients_into(&self, coeffs: &[C64], t: f64, out: &mut [C64]) {
        let d = self.dim();
        let phased: Vec<C64> = coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, w)| c * C64::new(0.0, -w * t).exp())
            .collect();
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let mut acc = C64::new(0.0, 0.0);
            for (k, p) in phased.iter().enumerate() {
                acc += self.eigenvectors[(i, k)] * p;
            }
            *o = acc;
        }
    }

    /// V·diag(e^{-iω_k t})·V†·ψ0.
    pub fn evolve(&self, psi0: &SystemState, t: f64) -> Result<SystemState> {
        let coeffs = self.eigen_coefficients(psi0)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.propagate_coefficients_into(&coeffs, t, &mut out);
        Ok(SystemState::new(out))
    }

    /// ⟨ψ|H|ψ⟩.
    pub fn energy(&self, psi: &SystemState) -> Result<f64> {
        let h_psi = self.apply(psi)?;
        Ok(psi.inner(&h_psi).re)
    }

    fn check(&self, psi: &SystemState) -> Result<()> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        Ok(())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("system dimension must be positive"));
    }
    Ok(())
}

fn check_finite(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter("Hamiltonian parameters must be finite"));
    }
    Ok(())
}

/// max_ij |H_ij - conj(H_ji)|.
pub fn max_asymmetry(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A system state vector in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    amplitudes: Vec<C64>,
}

impl SystemState {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        SystemState { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Self {
        SystemState::new(values.iter().map(|x| C64::new(*x, 0.0)).collect())
    }

    /// Computational basis vector |k⟩.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange {
                index: k,
                n_points: dim,
            });
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        Ok(SystemState::new(v))
    }

    /// (1, 1, ..., 1)/√d.
    pub fn equal_superposition(dim: usize) -> Self {
        let a = 1.0 / libm::sqrt(dim as f64);
        SystemState::new(vec![C64::new(a, 0.0); dim])
    }

    /// Σ_k |e_k⟩/√d over the eigenbasis of `h`.
    pub fn uniform_eigen_superposition(h: &Hamiltonian) -> Self {
        let d = h.dim();
        let coeffs = vec![C64::new(1.0 / libm::sqrt(d as f64), 0.0); d];
        let mut out = vec![C64::new(0.0, 0.0); d];
        h.propagate_coefficients_into(&coeffs, 0.0, &mut out);
        SystemState::new(out)
    }

    /// Normalized complex Gaussian vector.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            })
            .collect();
        SystemState::new(v).normalized()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &SystemState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        SystemState::new(self.amplitudes.iter().map(|a| a / n).collect())
    }

    /// |⟨self|other⟩| for unit vectors; insensitive to global phase.
    pub fn fidelity(&self, other: &SystemState) -> f64 {
        self.inner(other).norm()
    }

    pub fn is_normalized(&self) -> bool {
        libm::fabs(self.norm() - 1.0) < NORM_TOL
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm()))
        }
    }
}
