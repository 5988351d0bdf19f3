//! Clocks with a finite energy spread: an explicit spectral amplitude φ(ω)
//! on the frequency lattice, the smeared history it produces, the overlap
//! C(τ) of that history with itself, and the half-overlap time compared
//! with the bound 1/(2Δω).

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, BOUNDARY_REL_THRESHOLD, EDGE_FRACTION};
use crate::history::{build_history, schrodinger_residual, HistoryState};
use crate::system::{Hamiltonian, SystemState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Gaussian,
    Box,
    Flat,
    Custom,
}

impl Shape {
    pub fn label(&self) -> &'static str {
        match self {
            Shape::Gaussian => "gaussian",
            Shape::Box => "box",
            Shape::Flat => "flat",
            Shape::Custom => "custom",
        }
    }
}

/// φ(ω_j) on the lattice of a grid, normalized so Σ_j Δω |φ_j|² = 1.
#[derive(Debug, Clone)]
pub struct SpectralAmplitude {
    grid: TimeGrid,
    values: Vec<C64>,
    delta_omega: f64,
    shape: Shape,
}

impl SpectralAmplitude {
    /// φ ∝ e^{-ω²/(4Δω²)}, so |φ|² has standard deviation Δω.
    pub fn gaussian(grid: &TimeGrid, delta_omega: f64) -> Result<Self> {
        check_width(delta_omega)?;
        let s = 4.0 * delta_omega * delta_omega;
        let values = grid.freqs().iter().map(|w| C64::new(libm::exp(-w * w / s), 0.0)).collect();
        Self::build(grid, values, delta_omega, Shape::Gaussian)
    }

    /// Flat on |ω| ≤ √3 Δω, the width at which a continuous box has
    /// standard deviation Δω.
    pub fn box_shape(grid: &TimeGrid, delta_omega: f64) -> Result<Self> {
        check_width(delta_omega)?;
        let a = libm::sqrt(3.0) * delta_omega;
        let values = grid
            .freqs()
            .iter()
            .map(|w| C64::new(if libm::fabs(*w) <= a { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Self::build(grid, values, delta_omega, Shape::Box)
    }

    /// Constant over the whole lattice (the Δω → ∞ limit).
    pub fn flat(grid: &TimeGrid) -> Result<Self> {
        let values = alloc::vec![C64::new(1.0, 0.0); grid.n_points()];
        let mut phi = Self::build(grid, values, 0.0, Shape::Flat)?;
        phi.delta_omega = phi.measured_std();
        Ok(phi)
    }

    pub fn custom(grid: &TimeGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                found: values.len(),
            });
        }
        let mut phi = Self::build(grid, values, 0.0, Shape::Custom)?;
        phi.delta_omega = phi.measured_std();
        Ok(phi)
    }

    fn build(grid: &TimeGrid, mut values: Vec<C64>, delta_omega: f64, shape: Shape) -> Result<Self> {
        let norm_sq = grid.freq_spacing() * values.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if !(norm_sq > 0.0 && norm_sq.is_finite()) {
            return Err(Error::InvalidParameter("spectral amplitude has no support on the lattice"));
        }
        let s = 1.0 / libm::sqrt(norm_sq);
        for v in values.iter_mut() {
            *v *= s;
        }
        Ok(SpectralAmplitude {
            grid: grid.clone(),
            values,
            delta_omega,
            shape,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Stated standard deviation of |φ|² (measured for flat/custom).
    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid.freq_spacing() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Standard deviation of |φ|² over the lattice.
    pub fn measured_std(&self) -> f64 {
        let dw = self.grid.freq_spacing();
        let freqs = self.grid.freqs();
        let p: Vec<f64> = self.values.iter().map(|v| v.norm_sqr() * dw).collect();
        let total: f64 = p.iter().sum();
        let mean: f64 = p.iter().zip(freqs).map(|(p, w)| p * w).sum::<f64>() / total;
        let var: f64 = p.iter().zip(freqs).map(|(p, w)| p * (w - mean) * (w - mean)).sum::<f64>() / total;
        libm::sqrt(var)
    }

    /// True if φ is still non-negligible at the outermost lattice points.
    pub fn reaches_nyquist(&self) -> bool {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let n = self.values.len();
        let edge = self.values[0].norm().max(self.values[n - 1].norm());
        edge > BOUNDARY_REL_THRESHOLD * max
    }
}

fn check_width(delta_omega: f64) -> Result<()> {
    if delta_omega > 0.0 && delta_omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("delta_omega must be positive"))
    }
}

/// Sharp history of (h, χ0) with every clock frequency ω_j weighted by
/// φ(ω_j). Rescaled to the sharp history's norm, ‖Ψ‖² = L.
pub fn build_bandlimited_history(
    grid: &TimeGrid,
    h: &Hamiltonian,
    chi0: &SystemState,
    phi: &SpectralAmplitude,
) -> Result<HistoryState> {
    if phi.grid != *grid {
        return Err(Error::GridMismatch);
    }
    let sharp = build_history(grid, h, chi0)?;
    let d = h.dim();
    let mut spectrum = sharp.to_frequency();
    for (row, p) in spectrum.chunks_mut(d).zip(phi.values()) {
        for a in row {
            *a *= *p;
        }
    }
    let smeared = HistoryState::from_frequency(grid, d, spectrum)?;
    let norm = smeared.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("spectral amplitude misses every system line"));
    }
    Ok(smeared.scaled(C64::new(libm::sqrt(grid.window()) / norm, 0.0)))
}

/// C(τ_s) for lags τ_s = s Δt ≥ 0; C(-τ) = C(τ)*.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    pub lags: Vec<f64>,
    pub values: Vec<C64>,
    pub window: f64,
}

/// Normalized overlap between rows a lag s apart, both inside the
/// interior: Σ_k⟨ψ_k|ψ_{k+s}⟩ / √(Σ_k‖ψ_k‖² Σ_k‖ψ_{k+s}‖²). Lags run up
/// to half the interior length so every value averages over many rows.
pub fn autocorrelation(psi: &HistoryState) -> Autocorrelation {
    let grid = psi.grid();
    let interior = grid.interior(EDGE_FRACTION);
    let len = interior.len();
    let max_lag = len / 2;
    let row_sq: Vec<f64> = psi.row_norms().iter().map(|r| r * r).collect();
    let mut lags = Vec::with_capacity(max_lag + 1);
    let mut values = Vec::with_capacity(max_lag + 1);
    for s in 0..=max_lag {
        let mut overlap = C64::new(0.0, 0.0);
        let mut left = 0.0;
        let mut right = 0.0;
        for k in interior.start..interior.end - s {
            overlap += psi
                .row(k)
                .iter()
                .zip(psi.row(k + s))
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>();
            left += row_sq[k];
            right += row_sq[k + s];
        }
        let denom = libm::sqrt(left * right);
        lags.push(s as f64 * grid.dt());
        values.push(if denom > 0.0 { overlap / denom } else { C64::new(0.0, 0.0) });
    }
    Autocorrelation {
        lags,
        values,
        window: grid.window(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionEstimate {
    /// First τ with |C(τ)| < 1/2 (linear interpolation between lags).
    pub half_overlap: f64,
    /// First τ with |C(τ)| < 0.05, if reached.
    pub near_orthogonal: Option<f64>,
    /// |C| stayed above 1/2 over all lags; half_overlap is then L.
    pub resolution_limited: bool,
    /// Standard deviation of a Gaussian with the same half-overlap time,
    /// half_overlap / √(2 ln 2).
    pub width: f64,
}

pub fn resolution_estimate(c: &Autocorrelation) -> ResolutionEstimate {
    let half = first_crossing(c, 0.5);
    let near_orthogonal = first_crossing(c, 0.05);
    let (half_overlap, limited) = match half {
        Some(t) => (t, false),
        None => (c.window, true),
    };
    ResolutionEstimate {
        half_overlap,
        near_orthogonal,
        resolution_limited: limited,
        width: half_overlap / libm::sqrt(2.0 * core::f64::consts::LN_2),
    }
}

fn first_crossing(c: &Autocorrelation, level: f64) -> Option<f64> {
    let mags: Vec<f64> = c.values.iter().map(|v| v.norm()).collect();
    for s in 1..mags.len() {
        if mags[s] < level {
            let (a, b) = (mags[s - 1], mags[s]);
            let frac = if a > b { (a - level) / (a - b) } else { 0.0 };
            return Some(c.lags[s - 1] + frac * (c.lags[s] - c.lags[s - 1]));
        }
    }
    None
}

/// The Schrödinger residual of a smeared history, computed exactly as for
/// a sharp one.
pub fn smeared_schrodinger_residual(psi: &HistoryState, h: &Hamiltonian) -> Result<f64> {
    schrodinger_residual(psi, h)
}

/// Half-overlap estimate of the sharp history's own row correlation, the
/// decorrelation time of |χ(t)⟩.
pub fn chi_correlation(grid: &TimeGrid, h: &Hamiltonian, chi0: &SystemState) -> Result<ResolutionEstimate> {
    let sharp = build_history(grid, h, chi0)?;
    Ok(resolution_estimate(&autocorrelation(&sharp)))
}
