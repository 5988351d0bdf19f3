//! Static checks on a parsed config, without running anything.

use std::fmt::Write as _;

use relclock_core::weyl::{BOX_WINDOW_FRACTION, GAUSSIAN_WINDOW_FACTOR};
use relclock_core::TimeGrid;

use crate::config::{weyl_grid, Config, HamiltonianConfig, Scenario, WeylKindConfig};

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub issues: Vec<String>,
    pub parameters: Vec<(String, String)>,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let width = self.parameters.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "  {k:width$}  {v}");
        }
        if self.ok() {
            let _ = writeln!(s, "ok");
        } else {
            for i in &self.issues {
                let _ = writeln!(s, "warning: {i}");
            }
        }
        s
    }
}

pub fn validate(cfg: &Config) -> Diagnostics {
    let mut d = Diagnostics::default();
    let mut param = |k: &str, v: String| d.parameters.push((k.to_string(), v));
    param("scenario", cfg.scenario.to_string());
    if let Some(seed) = cfg.seed {
        param("seed", seed.to_string());
    }

    let grid = match cfg.grid {
        Some(g) => {
            param("grid.n_points", g.n_points.to_string());
            param("grid.window", g.window.to_string());
            match TimeGrid::new(g.n_points, g.window) {
                Ok(grid) => {
                    param("grid.dt", grid.dt().to_string());
                    param("grid.nyquist", format!("{:.6}", grid.nyquist()));
                    Some(grid)
                }
                Err(e) => {
                    d.issues.push(format!("grid: {e}"));
                    None
                }
            }
        }
        None => None,
    };
    let needs_grid = !(cfg.scenario == Scenario::WeylSweep && cfg.weyl.dt.is_some());
    if needs_grid && cfg.grid.is_none() {
        d.issues.push(format!("scenario {} needs a [grid] section", cfg.scenario));
    }

    param("hamiltonian", hamiltonian_label(&cfg.hamiltonian));
    let h = match cfg.hamiltonian(grid.as_ref()) {
        Ok(h) => Some(h),
        Err(e) => {
            d.issues.push(format!("hamiltonian: {e:#}"));
            None
        }
    };

    let mut grids: Vec<TimeGrid> = grid.iter().cloned().collect();
    match cfg.scenario {
        Scenario::WeylSweep => {
            let values = &cfg.weyl.values;
            param("weyl.kind", format!("{:?}", cfg.weyl.kind).to_lowercase());
            param("weyl.values", format!("{values:?}"));
            let max = values.iter().copied().fold(0.0_f64, f64::max);
            match (cfg.weyl.dt, &grid) {
                (Some(dt), _) => {
                    param("weyl.dt", dt.to_string());
                    grids = values
                        .iter()
                        .filter_map(|v| weyl_grid(cfg.weyl.kind, *v, dt).ok())
                        .collect();
                }
                (None, Some(g)) => {
                    let required = match cfg.weyl.kind {
                        WeylKindConfig::Gaussian => GAUSSIAN_WINDOW_FACTOR * max.sqrt(),
                        WeylKindConfig::Box => max / BOX_WINDOW_FRACTION,
                    };
                    if g.window() < required {
                        d.issues.push(format!("window too small, need L >= {required} (got L = {})", g.window()));
                    }
                }
                (None, None) => {}
            }
        }
        Scenario::WeakConvergence => {
            let max = cfg.weak.m_values.iter().copied().fold(0.0_f64, f64::max);
            param("weak.m_values", format!("{:?}", cfg.weak.m_values));
            if let Some(g) = &grid {
                let required = max / BOX_WINDOW_FRACTION;
                if g.window() < required {
                    d.issues.push(format!("window too small, need L >= {required} (got L = {})", g.window()));
                }
            }
        }
        Scenario::BandwidthSweep => {
            param("bandwidth.delta_omegas", format!("{:?}", cfg.bandwidth.delta_omegas));
            if let Some(g) = &grid {
                let max = cfg.bandwidth.delta_omegas.iter().copied().fold(0.0_f64, f64::max);
                // Gaussian |φ|² tails at 6Δω should still sit inside the lattice
                if 6.0 * max > g.nyquist() {
                    d.issues.push(format!(
                        "Δω = {max} reaches the lattice edge (πN/L = {:.4} < 6Δω)",
                        g.nyquist()
                    ));
                }
            }
        }
        Scenario::PauliCheck if cfg.pauli.random_states > 0 && cfg.seed.is_none() => {
            d.issues.push("pauli-check random states need a fixed seed".into());
        }
        _ => {}
    }

    if let Some(h) = &h {
        let max = h.eigenvalues().iter().fold(0.0_f64, |m, w| m.max(w.abs()));
        param("max |eigenfrequency|", format!("{max:.6}"));
        for g in &grids {
            if max > g.nyquist() {
                d.issues.push(format!(
                    "Nyquist: πN/L = {:.4} < max eigenfrequency {max} (N = {}, L = {})",
                    g.nyquist(),
                    g.n_points(),
                    g.window()
                ));
            }
        }
        if let Err(e) = cfg.initial_state(h) {
            d.issues.push(format!("{e:#}"));
        }
    }
    d
}

fn hamiltonian_label(h: &HamiltonianConfig) -> String {
    match h {
        HamiltonianConfig::Zero { dim } => format!("zero(d={dim})"),
        HamiltonianConfig::Qubit { omega0 } => format!("qubit(omega0={omega0})"),
        HamiltonianConfig::Oscillator { dim, omega0 } => format!("oscillator(d={dim}, omega0={omega0})"),
        HamiltonianConfig::RandomHermitian { dim, seed } => match seed {
            Some(s) => format!("random_hermitian(d={dim}, seed={s})"),
            None => format!("random_hermitian(d={dim})"),
        },
        HamiltonianConfig::Comb { dim, spacing, spacing_in_lattice_units } => match (spacing, spacing_in_lattice_units) {
            (Some(s), _) => format!("comb(d={dim}, spacing={s})"),
            (None, Some(u)) => format!("comb(d={dim}, spacing={u}·2π/L)"),
            _ => format!("comb(d={dim})"),
        },
        HamiltonianConfig::Matrix { entries } => format!("matrix({0}x{0})", entries.len()),
    }
}
