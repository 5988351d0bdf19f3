//! History states |Ψ⟩⟩ = ∫dt |t⟩|ψ(t)⟩ on the clock⊗system grid, the
//! constraint operator 𝕁 = Ω̂⊗1 + 1⊗H, conditioning on clock readings and
//! the spectral support of the clock-frequency transform.
//!
//! Rows store unweighted system states ψ(t_k); every inner product inserts
//! the quadrature weight Δt. A raw history built from a normalized ψ0 has
//! norm² = L.
//!
//! Sign convention: a component ψ_k e^{-iω_k t} shows up in the clock
//! frequency transform at ω = -ω_k, so 𝕁 annihilates it.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::grid::{self, TimeGrid, EDGE_FRACTION};
use crate::system::{Hamiltonian, SystemState};

/// Row norms below this are treated as "no support".
pub const MIN_ROW_NORM: f64 = 1e-14;

/// Largest grid the dense oracle will materialize.
pub const DENSE_MAX_POINTS: usize = 32;
pub const DENSE_MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Quadrature norm 1.
    Unit,
    /// Improper-state stand-in, norm² = L for a unit ψ0.
    Raw,
}

/// A clock⊗system vector: N rows of d amplitudes, row-major.
#[derive(Debug, Clone)]
pub struct HistoryState {
    grid: TimeGrid,
    sys_dim: usize,
    amplitudes: Vec<C64>,
    normalization: Normalization,
}

impl HistoryState {
    pub fn zeros(grid: &TimeGrid, sys_dim: usize) -> Self {
        HistoryState {
            grid: grid.clone(),
            sys_dim,
            amplitudes: vec![C64::new(0.0, 0.0); grid.n_points() * sys_dim],
            normalization: Normalization::Raw,
        }
    }

    pub fn from_amplitudes(
        grid: &TimeGrid,
        sys_dim: usize,
        amplitudes: Vec<C64>,
        normalization: Normalization,
    ) -> Result<Self> {
        if sys_dim == 0 {
            return Err(Error::InvalidParameter("system dimension must be positive"));
        }
        let expected = grid.n_points() * sys_dim;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(HistoryState {
            grid: grid.clone(),
            sys_dim,
            amplitudes,
            normalization,
        })
    }

    /// Product state θ(t)|φ(t)⟩ from per-row closures.
    pub fn from_fn(grid: &TimeGrid, sys_dim: usize, mut row: impl FnMut(usize, f64, &mut [C64])) -> Self {
        let mut out = Self::zeros(grid, sys_dim);
        for k in 0..grid.n_points() {
            let t = grid.time(k);
            row(k, t, out.row_mut(k));
        }
        out
    }

    /// Unit-norm state with i.i.d. complex Gaussian amplitudes.
    pub fn random(grid: &TimeGrid, sys_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amplitudes = (0..grid.n_points() * sys_dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            })
            .collect();
        HistoryState {
            grid: grid.clone(),
            sys_dim,
            amplitudes,
            normalization: Normalization::Raw,
        }
        .normalized()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.amplitudes[k * self.sys_dim..(k + 1) * self.sys_dim]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [C64] {
        &mut self.amplitudes[k * self.sys_dim..(k + 1) * self.sys_dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.amplitudes.chunks(self.sys_dim)
    }

    pub fn row_norms(&self) -> Vec<f64> {
        self.rows()
            .map(|r| libm::sqrt(r.iter().map(|a| a.norm_sqr()).sum()))
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        self.rows().map(|r| r[c]).collect()
    }

    fn set_column(&mut self, c: usize, values: &[C64]) {
        let d = self.sys_dim;
        for (k, v) in values.iter().enumerate() {
            self.amplitudes[k * d + c] = *v;
        }
    }

    fn compatible(&self, other: &HistoryState) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.sys_dim != other.sys_dim {
            return Err(Error::DimensionMismatch {
                expected: self.sys_dim,
                found: other.sys_dim,
            });
        }
        Ok(())
    }

    /// ⟨self|other⟩ = Δt Σ_k ⟨ψ_self(t_k)|ψ_other(t_k)⟩.
    pub fn inner(&self, other: &HistoryState) -> Result<C64> {
        self.compatible(other)?;
        let sum: C64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.dt())
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dt()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    /// Unit-normalized copy.
    pub fn normalized(&self) -> Self {
        let mut out = self.scaled(C64::new(1.0 / self.norm(), 0.0));
        out.normalization = Normalization::Unit;
        out
    }

    pub fn scaled(&self, factor: C64) -> Self {
        HistoryState {
            grid: self.grid.clone(),
            sys_dim: self.sys_dim,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            normalization: Normalization::Raw,
        }
    }

    /// self + factor·other.
    pub fn add_scaled(&self, factor: C64, other: &HistoryState) -> Result<Self> {
        self.compatible(other)?;
        Ok(HistoryState {
            grid: self.grid.clone(),
            sys_dim: self.sys_dim,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + factor * b)
                .collect(),
            normalization: Normalization::Raw,
        })
    }

    /// Multiply row k by envelope[k].
    pub fn with_envelope(&self, envelope: &[f64]) -> Result<Self> {
        if envelope.len() != self.n_points() {
            return Err(Error::DimensionMismatch {
                expected: self.n_points(),
                found: envelope.len(),
            });
        }
        let mut out = self.clone();
        for (k, e) in envelope.iter().enumerate() {
            for a in out.row_mut(k) {
                *a *= *e;
            }
        }
        out.normalization = Normalization::Raw;
        Ok(out)
    }

    /// T̂⊗1.
    pub fn apply_time_operator(&self) -> Self {
        let mut out = self.clone();
        for k in 0..self.n_points() {
            let t = self.grid.time(k);
            for a in out.row_mut(k) {
                *a *= t;
            }
        }
        out.normalization = Normalization::Raw;
        out
    }

    /// Ω̂⊗1, one spectral multiplier per system component.
    pub fn apply_clock_frequency(&self) -> Self {
        self.map_columns(|grid, col| grid.frequency_multiply_in_place(col))
    }

    /// 1⊗H, applied row by row.
    pub fn apply_system(&self, h: &Hamiltonian) -> Result<Self> {
        if h.dim() != self.sys_dim {
            return Err(Error::DimensionMismatch {
                expected: self.sys_dim,
                found: h.dim(),
            });
        }
        let mut out = self.clone();
        for k in 0..self.n_points() {
            h.apply_into(self.row(k), out.row_mut(k));
        }
        out.normalization = Normalization::Raw;
        Ok(out)
    }

    /// Clock-frequency amplitudes ψ̃(ω_j), same N×d layout.
    pub fn to_frequency(&self) -> Vec<C64> {
        self.map_columns(|grid, col| grid.forward_in_place(col)).amplitudes
    }

    /// Inverse of [`Self::to_frequency`].
    pub fn from_frequency(grid: &TimeGrid, sys_dim: usize, spectrum: Vec<C64>) -> Result<Self> {
        let state = Self::from_amplitudes(grid, sys_dim, spectrum, Normalization::Raw)?;
        Ok(state.map_columns(|grid, col| grid.inverse_in_place(col)))
    }

    fn map_columns(&self, f: impl Fn(&TimeGrid, &mut [C64])) -> Self {
        let mut out = self.clone();
        let mut col = vec![C64::new(0.0, 0.0); self.n_points()];
        for c in 0..self.sys_dim {
            for (k, v) in col.iter_mut().enumerate() {
                *v = self.amplitudes[k * self.sys_dim + c];
            }
            f(&self.grid, &mut col);
            out.set_column(c, &col);
        }
        out.normalization = Normalization::Raw;
        out
    }

    /// Rows in the outer edge band are below 1e-8 of the largest row.
    pub fn boundary_negligible(&self) -> bool {
        let norms = self.row_norms();
        grid::boundary_negligible(&self.grid, |k| norms[k])
    }
}

/// Matrix-free 𝕁 = Ω̂⊗1 + 1⊗H.
#[derive(Debug, Clone)]
pub struct ConstraintOperator {
    grid: TimeGrid,
    hamiltonian: Hamiltonian,
}

impl ConstraintOperator {
    pub fn new(grid: &TimeGrid, hamiltonian: &Hamiltonian) -> Self {
        ConstraintOperator {
            grid: grid.clone(),
            hamiltonian: hamiltonian.clone(),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn apply(&self, psi: &HistoryState) -> Result<HistoryState> {
        if psi.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let clock = psi.apply_clock_frequency();
        let system = psi.apply_system(&self.hamiltonian)?;
        clock.add_scaled(C64::new(1.0, 0.0), &system)
    }

    /// Dense (N·d)×(N·d) matrix of 𝕁 in the row-major amplitude basis,
    /// built from explicit exponential sums (no FFT). Tiny grids only.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let n = self.grid.n_points();
        let d = self.hamiltonian.dim();
        if n > DENSE_MAX_POINTS || d > DENSE_MAX_DIM {
            return Err(Error::OracleTooLarge { n_points: n, dim: d });
        }
        let times = self.grid.times();
        let freqs = self.grid.freqs();
        // Ω_kl = (1/N) Σ_j ω_j e^{iω_j (t_k - t_l)}
        let omega = DMatrix::from_fn(n, n, |k, l| {
            let s: C64 = freqs
                .iter()
                .map(|w| C64::new(0.0, w * (times[k] - times[l])).exp() * *w)
                .sum();
            s / n as f64
        });
        let h = self.hamiltonian.matrix();
        Ok(DMatrix::from_fn(n * d, n * d, |r, c| {
            let (k, a) = (r / d, r % d);
            let (l, b) = (c / d, c % d);
            let mut v = if a == b { omega[(k, l)] } else { C64::new(0.0, 0.0) };
            if k == l {
                v += h[(a, b)];
            }
            v
        }))
    }
}

/// |Ψ⟩⟩ with row k = e^{-iHt_k}ψ0. Raw normalization (norm² = L).
pub fn build_history(grid: &TimeGrid, h: &Hamiltonian, psi0: &SystemState) -> Result<HistoryState> {
    psi0.require_normalized()?;
    let coeffs = h.eigen_coefficients(psi0)?;
    let mut out = HistoryState::zeros(grid, h.dim());
    for k in 0..grid.n_points() {
        let t = grid.time(k);
        h.propagate_coefficients_into(&coeffs, t, out.row_mut(k));
    }
    Ok(out)
}

/// System state given that the clock reads t_k.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditioned {
    pub state: SystemState,
    /// ‖ψ(t_k)‖ before renormalization.
    pub row_norm: f64,
    /// Δt‖ψ(t_k)‖²/‖Ψ‖², the probability weight of this reading.
    pub weight: f64,
}

pub fn condition(psi: &HistoryState, k: usize) -> Result<Conditioned> {
    if k >= psi.n_points() {
        return Err(Error::IndexOutOfRange {
            index: k,
            n_points: psi.n_points(),
        });
    }
    let row = SystemState::new(psi.row(k).to_vec());
    let row_norm = row.norm();
    if row_norm < MIN_ROW_NORM {
        return Err(Error::NoSupport(row_norm));
    }
    Ok(Conditioned {
        state: row.normalized(),
        row_norm,
        weight: psi.grid.dt() * row_norm * row_norm / psi.norm_sq(),
    })
}

/// Per-row residual ‖(-i D_t + H)ψ(t_k)‖, where D_t is the spectral
/// derivative of the edge-tapered state. Rows inside the edge band are
/// meaningless; use [`schrodinger_residual`] for the interior maximum.
pub fn residual_profile(psi: &HistoryState, h: &Hamiltonian) -> Result<Vec<f64>> {
    let taper = psi.grid.taper(EDGE_FRACTION);
    let tapered = psi.with_envelope(&taper)?;
    let j = ConstraintOperator::new(&psi.grid, h);
    Ok(j.apply(&tapered)?.row_norms())
}

/// Max residual of the clock-conditioned Schrödinger equation over the
/// interior rows (outer 10% per side excluded).
pub fn schrodinger_residual(psi: &HistoryState, h: &Hamiltonian) -> Result<f64> {
    let profile = residual_profile(psi, h)?;
    let interior = psi.grid.interior(EDGE_FRACTION);
    Ok(profile[interior].iter().copied().fold(0.0, f64::max))
}

/// Two views of how well a history satisfies the constraint on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResidual {
    /// ‖𝕁Ψ‖/‖Ψ‖ with the periodic wrap included.
    pub relative_raw: f64,
    /// Interior maximum of the edge-tapered residual.
    pub interior_tapered: f64,
}

pub fn constraint_residual(j: &ConstraintOperator, psi: &HistoryState) -> Result<ConstraintResidual> {
    let raw = j.apply(psi)?;
    Ok(ConstraintResidual {
        relative_raw: raw.norm() / psi.norm(),
        interior_tapered: schrodinger_residual(psi, j.hamiltonian())?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_points: usize,
    pub residual: ConstraintResidual,
    /// log2 of the tapered residual ratio against the previous row.
    pub tapered_order: Option<f64>,
}

/// Constraint residuals of build_history under N-doubling at fixed L.
pub fn constraint_convergence(
    h: &Hamiltonian,
    psi0: &SystemState,
    window: f64,
    sizes: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let grid = TimeGrid::new(n, window)?;
        let psi = build_history(&grid, h, psi0)?;
        let residual = constraint_residual(&ConstraintOperator::new(&grid, h), &psi)?;
        let tapered_order = rows.last().and_then(|prev| {
            let (a, b) = (prev.residual.interior_tapered, residual.interior_tapered);
            (a > 0.0 && b > 0.0).then(|| libm::log2(a / b) / libm::log2(n as f64 / prev.n_points as f64))
        });
        rows.push(ConvergenceRow {
            n_points: n,
            residual,
            tapered_order,
        });
    }
    Ok(rows)
}

/// ‖[T̂⊗1, 1⊗H]ψ‖; zero because the two act on different factors.
pub fn peres_commutator_norm(psi: &HistoryState, h: &Hamiltonian) -> Result<f64> {
    let th = psi.apply_system(h)?.apply_time_operator();
    let ht = psi.apply_time_operator().apply_system(h)?;
    Ok(th.add_scaled(C64::new(-1.0, 0.0), &ht)?.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSupport {
    pub eigenvalue: f64,
    /// Expected clock frequency of the line, -ω_k.
    pub frequency: f64,
    /// Fraction of the ω-mass within one lattice spacing of the line.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    pub lines: Vec<LineSupport>,
    /// Fraction of mass within one spacing of any line (no double counting).
    pub captured_fraction: f64,
    pub nyquist_exceeded: bool,
    /// Σ_c |ψ̃_c(ω_j)|² per lattice frequency.
    pub mass: Vec<f64>,
}

pub fn spectral_support(psi: &HistoryState, h: &Hamiltonian) -> Result<SupportReport> {
    if h.dim() != psi.sys_dim {
        return Err(Error::DimensionMismatch {
            expected: psi.sys_dim,
            found: h.dim(),
        });
    }
    let spectrum = psi.to_frequency();
    let mass: Vec<f64> = spectrum
        .chunks(psi.sys_dim)
        .map(|r| r.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let total: f64 = mass.iter().sum();
    let freqs = psi.grid.freqs();
    let reach = psi.grid.freq_spacing() * (1.0 + 1e-9);
    let near = |j: usize, line: f64| libm::fabs(freqs[j] - line) <= reach;

    let lines: Vec<LineSupport> = h
        .eigenvalues()
        .iter()
        .map(|&w| {
            let line = -w;
            let inside: f64 = (0..mass.len()).filter(|&j| near(j, line)).map(|j| mass[j]).sum();
            LineSupport {
                eigenvalue: w,
                frequency: line,
                fraction: if total > 0.0 { inside / total } else { 0.0 },
            }
        })
        .collect();
    let captured: f64 = (0..mass.len())
        .filter(|&j| lines.iter().any(|l| near(j, l.frequency)))
        .map(|j| mass[j])
        .sum();
    let nyquist = psi.grid.nyquist();
    Ok(SupportReport {
        captured_fraction: if total > 0.0 { captured / total } else { 0.0 },
        nyquist_exceeded: h.eigenvalues().iter().any(|w| libm::fabs(*w) > nyquist),
        lines,
        mass,
    })
}
