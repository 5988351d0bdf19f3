//! Discretized clock space: a symmetric periodic time grid, the time
//! operator T̂ (pointwise multiplication by t), the frequency operator Ω̂
//! (spectral multiplier, Ω̂ = -i d/dt), and the unitary t↔ω transforms.
//!
//! Conventions (ħ = 1):
//!
//! ```text
//! t_k = (k - N/2) Δt,          Δt = L/N
//! ω_j = 2π (j - N/2) / L        (ascending; Nyquist point at -πN/L)
//! f̃(ω_j) = Δt/√(2π) Σ_k e^{-iω_j t_k} f(t_k)
//! f(t_k) = Δω/√(2π) Σ_j e^{+iω_j t_k} f̃(ω_j),   Δω = 2π/L
//! ```
//!
//! The kernel sign makes e^{+iωt} the Ω̂-eigenfunction with eigenvalue +ω,
//! so [T̂, Ω̂] = +i on interior states. Both inner products carry their
//! quadrature weight (Δt resp. Δω), and the transform is unitary between
//! them.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fft::Fft;

/// Fraction of the window, per side, treated as boundary zone.
pub const EDGE_FRACTION: f64 = 0.1;

/// Amplitudes below this fraction of the maximum count as negligible.
pub const BOUNDARY_REL_THRESHOLD: f64 = 1e-8;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// The discretized clock line. Cheap to clone; the sample arrays and the
/// FFT plan are shared.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    inner: Arc<GridInner>,
}

#[derive(Debug)]
struct GridInner {
    n_points: usize,
    window: f64,
    times: Vec<f64>,
    freqs: Vec<f64>,
    fft: Fft,
}

impl PartialEq for TimeGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n_points == other.inner.n_points
                && self.inner.window == other.inner.window)
    }
}

impl TimeGrid {
    pub fn new(n_points: usize, window: f64) -> Result<Self> {
        if !n_points.is_multiple_of(2) {
            return Err(Error::OddPoints(n_points));
        }
        if n_points < 4 {
            return Err(Error::TooFewPoints(n_points));
        }
        if !(window.is_finite() && window > 0.0) {
            return Err(Error::BadWindow(window));
        }
        let half = (n_points / 2) as f64;
        let dt = window / n_points as f64;
        let times = (0..n_points).map(|k| (k as f64 - half) * dt).collect();
        let freqs = (0..n_points)
            .map(|j| 2.0 * PI * (j as f64 - half) / window)
            .collect();
        Ok(TimeGrid {
            inner: Arc::new(GridInner {
                n_points,
                window,
                times,
                freqs,
                fft: Fft::new(n_points),
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    pub fn window(&self) -> f64 {
        self.inner.window
    }

    pub fn dt(&self) -> f64 {
        self.inner.window / self.inner.n_points as f64
    }

    /// Spacing of the frequency lattice, 2π/L.
    pub fn freq_spacing(&self) -> f64 {
        2.0 * PI / self.inner.window
    }

    /// πN/L; the lattice covers [-nyquist, nyquist).
    pub fn nyquist(&self) -> f64 {
        PI * self.inner.n_points as f64 / self.inner.window
    }

    pub fn times(&self) -> &[f64] {
        &self.inner.times
    }

    pub fn freqs(&self) -> &[f64] {
        &self.inner.freqs
    }

    pub fn time(&self, k: usize) -> f64 {
        self.inner.times[k]
    }

    /// Index whose time equals `t` to within a millionth of a cell.
    pub fn index_of_time(&self, t: f64) -> Option<usize> {
        let s = t / self.dt() + (self.inner.n_points / 2) as f64;
        let k = libm::round(s);
        if libm::fabs(s - k) < 1e-6 && k >= 0.0 && (k as usize) < self.inner.n_points {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Indices with |t_k| <= (1/2 - edge) L.
    pub fn interior(&self, edge_fraction: f64) -> Range<usize> {
        let limit = (0.5 - edge_fraction) * self.inner.window * (1.0 + 1e-12);
        let times = &self.inner.times;
        let start = times.iter().position(|t| libm::fabs(*t) <= limit);
        match start {
            Some(lo) => {
                let hi = times.iter().rposition(|t| libm::fabs(*t) <= limit).unwrap_or(lo);
                lo..hi + 1
            }
            None => 0..0,
        }
    }

    /// Smooth window equal to 1 on the interior (to ~1e-11) and vanishing
    /// at the periodic wrap: ½ erfc((|t| - t_c)/σ), with t_c in the middle
    /// of the edge band and σ one tenth of its width.
    pub fn taper(&self, edge_fraction: f64) -> Vec<f64> {
        let band = edge_fraction * self.inner.window;
        let center = 0.5 * self.inner.window - 0.5 * band;
        let sigma = band / 10.0;
        self.inner
            .times
            .iter()
            .map(|t| 0.5 * libm::erfc((libm::fabs(*t) - center) / sigma))
            .collect()
    }

    /// t-amplitudes → ω-amplitudes in place.
    pub fn forward_in_place(&self, buf: &mut [C64]) {
        let n = self.inner.n_points;
        assert_eq!(buf.len(), n, "buffer length must equal n_points");
        for (k, v) in buf.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
        self.inner.fft.forward(buf);
        let mut scale = self.dt() / SQRT_2PI;
        if (n / 2) % 2 == 1 {
            scale = -scale;
        }
        for (j, v) in buf.iter_mut().enumerate() {
            *v *= if j % 2 == 1 { -scale } else { scale };
        }
    }

    /// ω-amplitudes → t-amplitudes in place.
    pub fn inverse_in_place(&self, buf: &mut [C64]) {
        let n = self.inner.n_points;
        assert_eq!(buf.len(), n, "buffer length must equal n_points");
        for (j, v) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
        self.inner.fft.inverse(buf);
        let mut scale = self.freq_spacing() / SQRT_2PI;
        if (n / 2) % 2 == 1 {
            scale = -scale;
        }
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= if k % 2 == 1 { -scale } else { scale };
        }
    }

    /// Ω̂ applied in place: transform, multiply by ω_j, transform back.
    pub fn frequency_multiply_in_place(&self, buf: &mut [C64]) {
        self.forward_in_place(buf);
        for (v, w) in buf.iter_mut().zip(&self.inner.freqs) {
            *v *= *w;
        }
        self.inverse_in_place(buf);
    }
}

/// A clock wavefunction sampled on a [`TimeGrid`].
#[derive(Debug, Clone)]
pub struct ClockVector {
    grid: TimeGrid,
    amplitudes: Vec<C64>,
}

impl ClockVector {
    pub fn new(grid: &TimeGrid, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                found: amplitudes.len(),
            });
        }
        Ok(ClockVector {
            grid: grid.clone(),
            amplitudes,
        })
    }

    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> C64) -> Self {
        let amplitudes = grid.times().iter().map(|t| f(*t)).collect();
        ClockVector {
            grid: grid.clone(),
            amplitudes,
        }
    }

    /// Build from ω-amplitudes.
    pub fn from_frequency(grid: &TimeGrid, mut spectrum: Vec<C64>) -> Result<Self> {
        if spectrum.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                found: spectrum.len(),
            });
        }
        grid.inverse_in_place(&mut spectrum);
        Ok(ClockVector {
            grid: grid.clone(),
            amplitudes: spectrum,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// ⟨self|other⟩ = Δt Σ_k self*(t_k) other(t_k).
    pub fn inner(&self, other: &ClockVector) -> C64 {
        let sum: C64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        sum * self.grid.dt()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.inner(self).re)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scaled(1.0 / n)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ClockVector {
            grid: self.grid.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// ω-amplitudes of this vector.
    pub fn to_frequency(&self) -> Vec<C64> {
        let mut buf = self.amplitudes.clone();
        self.grid.forward_in_place(&mut buf);
        buf
    }

    /// Quadrature norm of the ω-amplitudes, Δω Σ_j |f̃_j|².
    pub fn frequency_norm_sq(&self) -> f64 {
        let spacing = self.grid.freq_spacing();
        self.to_frequency().iter().map(|v| v.norm_sqr()).sum::<f64>() * spacing
    }

    pub fn apply_time_operator(&self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(self.grid.times())
            .map(|(a, t)| a * *t)
            .collect();
        ClockVector {
            grid: self.grid.clone(),
            amplitudes,
        }
    }

    pub fn apply_frequency_operator(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        self.grid.frequency_multiply_in_place(&mut amplitudes);
        ClockVector {
            grid: self.grid.clone(),
            amplitudes,
        }
    }

    /// Expectation of T̂ for the normalized direction of this vector.
    pub fn mean_time(&self) -> f64 {
        self.inner(&self.apply_time_operator()).re / self.inner(self).re
    }

    /// True if every amplitude in the outer `edge_fraction` of the window
    /// is below `BOUNDARY_REL_THRESHOLD` times the largest amplitude.
    pub fn boundary_negligible(&self) -> bool {
        boundary_negligible(&self.grid, |k| self.amplitudes[k].norm())
    }

    /// Same test on the spectrum: false when the state is too narrow for Δt
    /// and its spectrum reaches the outer 10% of the frequency lattice.
    pub fn spectrum_negligible(&self) -> bool {
        let spectrum = self.to_frequency();
        boundary_negligible(&self.grid, |j| spectrum[j].norm())
    }
}

pub(crate) fn boundary_negligible(grid: &TimeGrid, magnitude: impl Fn(usize) -> f64) -> bool {
    let n = grid.n_points();
    let max = (0..n).map(&magnitude).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return true;
    }
    let interior = grid.interior(EDGE_FRACTION);
    (0..n)
        .filter(|k| !interior.contains(k))
        .all(|k| magnitude(k) < BOUNDARY_REL_THRESHOLD * max)
}

/// Result of a commutator sandwich; `boundary_ok` is false when the state
/// reaches into the edge band, where the periodic grid cannot reproduce
/// the canonical commutator, and `spectrum_ok` is the same in frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorSandwich {
    pub value: C64,
    pub boundary_ok: bool,
    pub spectrum_ok: bool,
}

/// ⟨v|(T̂Ω̂ - Ω̂T̂)|v⟩ / ⟨v|v⟩.
pub fn commutator_sandwich(v: &ClockVector) -> CommutatorSandwich {
    let tv = v.apply_time_operator();
    let wv = v.apply_frequency_operator();
    // ⟨v|TΩv⟩ - ⟨v|ΩTv⟩ = ⟨Tv|Ωv⟩ - ⟨Ωv|Tv⟩ for Hermitian T, Ω
    let value = (tv.inner(&wv) - wv.inner(&tv)) / v.inner(v).re;
    CommutatorSandwich {
        value,
        boundary_ok: v.boundary_negligible(),
        spectrum_ok: v.spectrum_negligible(),
    }
}

/// Normalized Gaussian clock state e^{-(t-center)²/(2 width²)}.
pub fn gaussian_clock_state(grid: &TimeGrid, center: f64, width: f64) -> ClockVector {
    ClockVector::from_fn(grid, |t| {
        let x = (t - center) / width;
        C64::new(libm::exp(-0.5 * x * x), 0.0)
    })
    .normalized()
}
