//! Scenario configuration (TOML). See `configs/` for one file per scenario
//! and the README for the full grammar.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use relclock_core::{Hamiltonian, HamiltonianSpec, SystemState, TimeGrid, C64};
use serde::{Deserialize, Serialize};

pub const SCENARIOS: [&str; 6] = [
    "pauli-check",
    "weyl-sweep",
    "schrodinger-recovery",
    "spectral-support",
    "bandwidth-sweep",
    "weak-convergence",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PauliCheck,
    WeylSweep,
    SchrodingerRecovery,
    SpectralSupport,
    BandwidthSweep,
    WeakConvergence,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::PauliCheck => "pauli-check",
            Scenario::WeylSweep => "weyl-sweep",
            Scenario::SchrodingerRecovery => "schrodinger-recovery",
            Scenario::SpectralSupport => "spectral-support",
            Scenario::BandwidthSweep => "bandwidth-sweep",
            Scenario::WeakConvergence => "weak-convergence",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: Scenario,
    /// Seed for every random draw that does not carry its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub initial_state: StateConfig,
    /// Not part of the results file, so runs into different directories
    /// stay byte-identical.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub pauli: PauliConfig,
    #[serde(default)]
    pub weyl: WeylConfig,
    #[serde(default)]
    pub schrodinger: SchrodingerConfig,
    #[serde(default)]
    pub weak: WeakConfig,
    #[serde(default)]
    pub bandwidth: BandwidthConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub window: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    Zero {
        dim: usize,
    },
    Qubit {
        #[serde(default = "one")]
        omega0: f64,
    },
    Oscillator {
        dim: usize,
        #[serde(default = "one")]
        omega0: f64,
    },
    RandomHermitian {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Equally spaced spectrum. Give `spacing` directly or as a multiple
    /// of the grid's frequency spacing 2π/L.
    Comb {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing_in_lattice_units: Option<f64>,
    },
    /// Row-major complex entries, each `[re, im]`.
    Matrix {
        entries: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    #[default]
    EqualSuperposition,
    Basis {
        index: usize,
    },
    Eigenstate {
        index: usize,
    },
    UniformEigen,
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Explicit amplitudes `[re, im]`; must be normalized.
    Amplitudes {
        values: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockStateConfig {
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliConfig {
    /// Gaussian clock states for the ⟨[T,Ω]⟩ check.
    #[serde(default = "default_clock_states")]
    pub states: Vec<ClockStateConfig>,
    /// Random history states for the ‖[T⊗1, 1⊗H]ψ‖ check.
    #[serde(default = "default_random_states")]
    pub random_states: usize,
}

impl Default for PauliConfig {
    fn default() -> Self {
        PauliConfig {
            states: default_clock_states(),
            random_states: default_random_states(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeylKindConfig {
    #[default]
    Gaussian,
    Box,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylConfig {
    #[serde(default)]
    pub kind: WeylKindConfig,
    /// Gaussian widths n, or box widths m.
    #[serde(default = "default_weyl_values")]
    pub values: Vec<f64>,
    /// If set, each value gets its own grid: L = 10√n (gaussian) or
    /// L = m/0.8 (box), N = L/dt rounded to even.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl Default for WeylConfig {
    fn default() -> Self {
        WeylConfig {
            kind: WeylKindConfig::Gaussian,
            values: default_weyl_values(),
            dt: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerConfig {
    /// N values for the residual convergence table, at the config's L.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_sizes: Option<Vec<usize>>,
    #[serde(default = "yes")]
    pub export_history: bool,
}

impl Default for SchrodingerConfig {
    fn default() -> Self {
        SchrodingerConfig {
            convergence_sizes: None,
            export_history: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunctionConfig {
    Gaussian {
        #[serde(default = "one")]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    SlowDecay {
        epsilon: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakConfig {
    #[serde(default = "default_m_values")]
    pub m_values: Vec<f64>,
    #[serde(default = "default_test_functions")]
    pub test_functions: Vec<TestFunctionConfig>,
    /// System part φ0 of the probe; defaults to the initial state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_state: Option<StateConfig>,
}

impl Default for WeakConfig {
    fn default() -> Self {
        WeakConfig {
            m_values: default_m_values(),
            test_functions: default_test_functions(),
            probe_state: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShapeConfig {
    #[default]
    Gaussian,
    Box,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthConfig {
    #[serde(default)]
    pub shape: ShapeConfig,
    #[serde(default = "default_delta_omegas")]
    pub delta_omegas: Vec<f64>,
    #[serde(default = "yes")]
    pub export_autocorrelation: bool,
}

impl Default for BandwidthConfig {
    fn default() -> Self {
        BandwidthConfig {
            shape: ShapeConfig::Gaussian,
            delta_omegas: default_delta_omegas(),
            export_autocorrelation: true,
        }
    }
}

/// Pass/fail thresholds. Every field can be overridden under
/// `[tolerances]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub clock_commutator_abs: f64,
    pub peres_abs: f64,
    pub weyl_constraint_rel: f64,
    pub weyl_t_amplified_rel: f64,
    pub weyl_sandwich_rel: f64,
    pub weyl_sandwich_real_abs: f64,
    pub weyl_commutator_abs: f64,
    pub weyl_adjoint_abs: f64,
    pub weyl_optimal_residual_abs: f64,
    pub fidelity_deficit: f64,
    pub schrodinger_residual: f64,
    pub support_fraction: f64,
    pub weak_decay_factor: f64,
    pub weak_ratio_min: f64,
    pub weak_ratio_max: f64,
    pub bandwidth_width_rel: f64,
    pub smeared_residual_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            clock_commutator_abs: 1e-4,
            peres_abs: 1e-12,
            weyl_constraint_rel: 0.02,
            weyl_t_amplified_rel: 0.01,
            weyl_sandwich_rel: 0.01,
            weyl_sandwich_real_abs: 1e-3,
            weyl_commutator_abs: 1e-2,
            weyl_adjoint_abs: 1e-6,
            weyl_optimal_residual_abs: 1e-2,
            fidelity_deficit: 1e-10,
            schrodinger_residual: 1e-6,
            support_fraction: 0.99,
            weak_decay_factor: 10.0,
            weak_ratio_min: 0.5,
            weak_ratio_max: 2.0,
            bandwidth_width_rel: 0.05,
            smeared_residual_factor: 10.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_clock_states() -> Vec<ClockStateConfig> {
    vec![
        ClockStateConfig { center: 0.0, width: 1.0 },
        ClockStateConfig { center: 3.0, width: 1.5 },
    ]
}

fn default_random_states() -> usize {
    100
}

fn default_weyl_values() -> Vec<f64> {
    vec![4.0, 16.0, 64.0]
}

fn default_m_values() -> Vec<f64> {
    vec![5.0, 10.0, 20.0]
}

fn default_test_functions() -> Vec<TestFunctionConfig> {
    vec![
        TestFunctionConfig::Gaussian { center: 1.0, width: 1.0 },
        TestFunctionConfig::SlowDecay { epsilon: 0.05 },
    ]
}

fn default_delta_omegas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: toml::Table = toml::from_str(text).context("config is not valid TOML")?;
        match raw.get("scenario") {
            None => bail!("config has no `scenario` key"),
            Some(toml::Value::String(s)) if !SCENARIOS.contains(&s.as_str()) => {
                bail!("unknown scenario `{s}` (expected one of: {})", SCENARIOS.join(", "))
            }
            Some(toml::Value::String(_)) => {}
            Some(_) => bail!("`scenario` must be a string"),
        }
        toml::from_str(text).context("invalid config")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        let g = self
            .grid
            .with_context(|| format!("scenario {} needs a [grid] section", self.scenario))?;
        TimeGrid::new(g.n_points, g.window).context("invalid grid")
    }

    /// The Hamiltonian; comb spacing in lattice units needs the grid.
    pub fn hamiltonian(&self, grid: Option<&TimeGrid>) -> Result<Hamiltonian> {
        let spec = match &self.hamiltonian {
            HamiltonianConfig::Zero { dim } => HamiltonianSpec::Zero { dim: *dim },
            HamiltonianConfig::Qubit { omega0 } => HamiltonianSpec::Qubit { omega0: *omega0 },
            HamiltonianConfig::Oscillator { dim, omega0 } => HamiltonianSpec::Oscillator {
                dim: *dim,
                omega0: *omega0,
            },
            HamiltonianConfig::RandomHermitian { dim, seed } => HamiltonianSpec::RandomHermitian {
                dim: *dim,
                seed: self.require_seed(*seed, "random_hermitian Hamiltonian")?,
            },
            HamiltonianConfig::Comb {
                dim,
                spacing,
                spacing_in_lattice_units,
            } => {
                let spacing = match (spacing, spacing_in_lattice_units) {
                    (Some(s), None) => *s,
                    (None, Some(u)) => {
                        let grid = grid.context("comb spacing in lattice units needs a grid")?;
                        u * grid.freq_spacing()
                    }
                    _ => bail!("comb Hamiltonian needs exactly one of `spacing`, `spacing_in_lattice_units`"),
                };
                HamiltonianSpec::Comb { dim: *dim, spacing }
            }
            HamiltonianConfig::Matrix { entries } => {
                let dim = entries.len();
                if entries.iter().any(|row| row.len() != dim) {
                    bail!("matrix Hamiltonian must be square");
                }
                HamiltonianSpec::Matrix {
                    dim,
                    entries: entries.iter().flatten().map(|[re, im]| C64::new(*re, *im)).collect(),
                }
            }
        };
        Hamiltonian::from_spec(&spec).context("invalid Hamiltonian")
    }

    pub fn initial_state(&self, h: &Hamiltonian) -> Result<SystemState> {
        self.state(&self.initial_state, h).context("invalid initial_state")
    }

    pub fn state(&self, cfg: &StateConfig, h: &Hamiltonian) -> Result<SystemState> {
        let d = h.dim();
        let state = match cfg {
            StateConfig::EqualSuperposition => SystemState::equal_superposition(d),
            StateConfig::Basis { index } => SystemState::basis(d, *index)?,
            StateConfig::Eigenstate { index } => {
                if *index >= d {
                    bail!("eigenstate index {index} out of range for dimension {d}");
                }
                h.eigenstate(*index)
            }
            StateConfig::UniformEigen => SystemState::uniform_eigen_superposition(h),
            StateConfig::Random { seed } => SystemState::random(d, self.require_seed(*seed, "random state")?),
            StateConfig::Amplitudes { values } => {
                if values.len() != d {
                    bail!("state has {} amplitudes, Hamiltonian dimension is {d}", values.len());
                }
                let s = SystemState::new(values.iter().map(|[re, im]| C64::new(*re, *im)).collect());
                if !s.is_normalized() {
                    bail!("state amplitudes are not normalized (norm = {})", s.norm());
                }
                s
            }
        };
        Ok(state)
    }

    pub fn require_seed(&self, own: Option<u64>, what: &str) -> Result<u64> {
        own.or(self.seed)
            .with_context(|| format!("{what} needs a fixed seed (set `seed`)"))
    }
}

/// Grid for one value of a Weyl sweep when `dt` is set.
pub fn weyl_grid(kind: WeylKindConfig, value: f64, dt: f64) -> Result<TimeGrid> {
    let window = match kind {
        WeylKindConfig::Gaussian => relclock_core::weyl::GAUSSIAN_WINDOW_FACTOR * value.sqrt(),
        WeylKindConfig::Box => value / relclock_core::weyl::BOX_WINDOW_FRACTION,
    };
    let mut n = (window / dt).round() as usize;
    n += n % 2;
    TimeGrid::new(n.max(4), window).context("invalid Weyl grid")
}

/// πN/L
pub fn nyquist(grid: &GridConfig) -> f64 {
    PI * grid.n_points as f64 / grid.window
}
