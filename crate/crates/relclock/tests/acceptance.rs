//! Acceptance criteria 1-9, one PASS/FAIL line each.
//!
//! Criteria 1-7 run the shipped configs in `configs/` through the library
//! and re-judge the reported values at the criterion's own tolerances, so
//! loosening a config tolerance cannot turn a criterion green.
//!
//! Exit status: nonzero if any criterion outside `KNOWN_FAILURES` fails, or
//! if a known failure starts passing (the list is then stale). With
//! RELCLOCK_ACCEPTANCE_STRICT=1 every FAIL is fatal.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use relclock::{run, Config, Report, RunOptions};
use relclock_core::{ConstraintOperator, Hamiltonian, HamiltonianSpec, HistoryState, TimeGrid};

/// Criterion 5 is unattainable as stated: the qubit eigenfrequency 1 sits
/// 0.17 of a lattice spacing off the ω grid at L = 200, and the Dirichlet
/// leakage caps the captured mass at 0.9736 for every N. See README.
const KNOWN_FAILURES: &[u32] = &[5];

struct Verdict {
    pass: bool,
    detail: String,
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

struct Runner {
    tmp: tempfile::TempDir,
    cache: BTreeMap<String, Report>,
}

impl Runner {
    fn report(&mut self, name: &str) -> Result<&Report, String> {
        if !self.cache.contains_key(name) {
            let dir = self.tmp.path().join(name);
            let r = run_config(name, &dir)?;
            self.cache.insert(name.to_string(), r);
        }
        Ok(&self.cache[name])
    }
}

fn run_config(name: &str, out: &Path) -> Result<Report, String> {
    let cfg = Config::load(&configs_dir().join(format!("{name}.toml"))).map_err(|e| format!("{e:#}"))?;
    let opts = RunOptions {
        output_dir: Some(out.to_path_buf()),
        timestamp: false,
    };
    run(&cfg, &opts).map(|o| o.report).map_err(|e| format!("{name}: {e:#}"))
}

fn checked(r: &Report, name: &str) -> Result<f64, String> {
    r.checks
        .iter()
        .find(|c| c.name == name)
        .map(|c| c.value)
        .ok_or_else(|| format!("missing value {name}"))
}

fn reported(r: &Report, name: &str) -> Result<f64, String> {
    r.quantities
        .iter()
        .find(|q| q.name == name)
        .map(|q| q.value)
        .ok_or_else(|| format!("missing quantity {name}"))
}

fn rel_err(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs()
}

fn c1_pauli_core(rn: &mut Runner) -> Result<Verdict, String> {
    let r = rn.report("weyl_sweep")?;
    let (mut worst_t, mut worst_c) = (0.0_f64, 0.0_f64);
    for n in [4.0_f64, 16.0, 64.0] {
        worst_t = worst_t.max(rel_err(checked(r, &format!("t_amplified_norm_sq[n={n}]"))?, 0.75));
        worst_c = worst_c.max(rel_err(checked(r, &format!("constraint_norm_sq[n={n}]"))?, 1.0 / n));
    }
    Ok(Verdict {
        pass: worst_t <= 0.01 && worst_c <= 0.02,
        detail: format!("max rel err ‖TJΨ‖²: {worst_t:.2e} (≤ 1%), ‖JΨ‖²: {worst_c:.2e} (≤ 2%)"),
    })
}

fn c2_sandwich(rn: &mut Runner) -> Result<Verdict, String> {
    let r = rn.report("weyl_sweep")?;
    let (mut abs_err, mut re_max, mut diff_err) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut signs = Vec::new();
    for n in [4.0_f64, 16.0, 64.0] {
        for order in ["tj", "jt"] {
            abs_err = abs_err.max(rel_err(checked(r, &format!("abs_sandwich_{order}[n={n}]"))?, 0.5));
            re_max = re_max.max(checked(r, &format!("re_sandwich_{order}[n={n}]"))?.abs());
        }
        diff_err = diff_err.max(checked(r, &format!("commutator_error[n={n}]"))?);
        let im = reported(r, &format!("im_sandwich_tj[n={n}]"))?;
        signs.push(if im > 0.0 { "+" } else { "-" });
    }
    Ok(Verdict {
        pass: abs_err <= 0.01 && re_max <= 1e-3 && diff_err <= 1e-2,
        detail: format!(
            "|⟨·⟩| rel err {abs_err:.2e}, max |Re| {re_max:.2e}, |Δ - i| {diff_err:.2e}; sign of Im⟨TJ⟩: {}",
            signs.join("")
        ),
    })
}

fn c3_commutation(rn: &mut Runner) -> Result<Verdict, String> {
    let r = rn.report("pauli_check")?;
    let states = reported(r, "peres_states")?;
    let peres = checked(r, "peres_commutator_max")?;
    let clock = (0..2)
        .map(|i| checked(r, &format!("clock_commutator_error[{i}]")))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0_f64, f64::max);
    Ok(Verdict {
        pass: states >= 100.0 && peres <= 1e-12 && clock <= 1e-4,
        detail: format!("Peres max {peres:.2e} over {states} states; |⟨[T,Ω]⟩ - i| max {clock:.2e}"),
    })
}

fn c4_schrodinger(rn: &mut Runner) -> Result<Verdict, String> {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["schrodinger_qubit", "schrodinger_oscillator", "schrodinger_random"] {
        let r = rn.report(name)?;
        let f = checked(r, "min_fidelity")?;
        let res = checked(r, "interior_residual")?;
        pass &= f >= 1.0 - 1e-10 && res < 1e-6;
        parts.push(format!("{}: 1-F {:.1e}, residual {res:.1e}", &name[12..], 1.0 - f));
    }
    Ok(Verdict {
        pass,
        detail: parts.join("; "),
    })
}

fn c5_spectral_support(rn: &mut Runner) -> Result<Verdict, String> {
    let r = rn.report("spectral_support")?;
    let f = checked(r, "captured_fraction")?;
    Ok(Verdict {
        pass: f >= 0.99,
        detail: format!("captured ω-mass {f:.5} (need ≥ 0.99)"),
    })
}

fn c6_weak(rn: &mut Runner) -> Result<Verdict, String> {
    let r = rn.report("weak_convergence")?;
    let g = "gaussian(c=1,w=1)";
    let decay = [
        checked(r, &format!("a_decay[{g},m=5->10]"))?,
        checked(r, &format!("a_decay[{g},m=10->20]"))?,
    ];
    let ratios = [5, 10, 20]
        .iter()
        .map(|m| checked(r, &format!("b_ratio[slow(eps=0.05),m={m}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let min_decay = decay.iter().copied().fold(f64::INFINITY, f64::min);
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    Ok(Verdict {
        pass: min_decay >= 10.0 && lo >= 0.5 && hi <= 2.0,
        detail: format!("min decay per doubling {min_decay:.3e} (≥ 10); b ratios in [{lo:.5}, {hi:.5}]"),
    })
}

fn c7_bandwidth(rn: &mut Runner) -> Result<Verdict, String> {
    let start = Instant::now();
    let r = rn.report("bandwidth_sweep")?;
    let seconds = start.elapsed().as_secs_f64();
    let sharp = reported(r, "sharp_residual")?;
    let (mut width_err, mut bound_ok, mut smear) = (0.0_f64, true, 0.0_f64);
    for dw in [0.5_f64, 1.0, 2.0, 4.0] {
        width_err = width_err.max(rel_err(checked(r, &format!("width_times_delta_omega[dw={dw}]"))?, 1.0));
        bound_ok &= checked(r, &format!("estimate_half[dw={dw}]"))? >= 1.0 / (2.0 * dw);
        smear = smear.max(checked(r, &format!("smeared_residual[dw={dw}]"))? / sharp);
    }
    Ok(Verdict {
        pass: width_err <= 0.05 && bound_ok && smear <= 10.0 && seconds < 60.0,
        detail: format!(
            "width·Δω rel err {width_err:.2e}; estimates ≥ 1/(2Δω): {bound_ok}; smeared/sharp {smear:.2}; {seconds:.1} s"
        ),
    })
}

fn c8_dense_oracle() -> Result<Verdict, String> {
    let e = |e: relclock_core::Error| e.to_string();
    let grid = TimeGrid::new(16, 6.0).map_err(e)?;
    let h = Hamiltonian::from_spec(&HamiltonianSpec::RandomHermitian { dim: 2, seed: 11 }).map_err(e)?;
    let j = ConstraintOperator::new(&grid, &h);
    let dense = j.to_dense().map_err(e)?;
    let mut worst = 0.0_f64;
    for seed in 0..20 {
        let psi = HistoryState::random(&grid, 2, 1000 + seed);
        let fast = j.apply(&psi).map_err(e)?;
        let x = psi.amplitudes();
        for (i, f) in fast.amplitudes().iter().enumerate() {
            let slow: relclock_core::C64 = (0..x.len()).map(|k| dense[(i, k)] * x[k]).sum();
            worst = worst.max((f - slow).norm());
        }
    }
    Ok(Verdict {
        pass: worst <= 1e-12,
        detail: format!("max |𝕁ψ - Dψ| {worst:.2e} over 20 states, N = 16, d = 2"),
    })
}

fn c9_determinism() -> Result<Verdict, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut names: Vec<String> = std::fs::read_dir(configs_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    names.sort();
    let mut scenarios = BTreeSet::new();
    let mut differing = Vec::new();
    for name in &names {
        let a = tmp.path().join(format!("{name}-a"));
        let b = tmp.path().join(format!("{name}-b"));
        run_config(name, &a)?;
        run_config(name, &b)?;
        let cfg = Config::load(&configs_dir().join(format!("{name}.toml"))).map_err(|e| format!("{e:#}"))?;
        scenarios.insert(cfg.scenario.to_string());
        for entry in std::fs::read_dir(&a).map_err(|e| e.to_string())? {
            let file = entry.map_err(|e| e.to_string())?.file_name();
            let x = std::fs::read(a.join(&file)).map_err(|e| e.to_string())?;
            let y = std::fs::read(b.join(&file)).map_err(|e| e.to_string())?;
            if x != y {
                differing.push(format!("{name}/{}", file.to_string_lossy()));
            }
        }
    }
    let all = scenarios.len() == relclock::config::SCENARIOS.len();
    Ok(Verdict {
        pass: differing.is_empty() && all,
        detail: if differing.is_empty() {
            format!("{} configs covering {} scenarios, all output files identical", names.len(), scenarios.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    })
}

fn main() -> ExitCode {
    let mut rn = Runner {
        tmp: tempfile::tempdir().expect("temporary directory"),
        cache: BTreeMap::new(),
    };
    type Criterion<'a> = (u32, &'a str, Box<dyn FnOnce(&mut Runner) -> Result<Verdict, String>>);
    let criteria: Vec<Criterion> = vec![
        (1, "Pauli-resolution core", Box::new(c1_pauli_core)),
        (2, "sandwich values", Box::new(c2_sandwich)),
        (3, "commutation structure", Box::new(c3_commutation)),
        (4, "Schrödinger recovery", Box::new(c4_schrodinger)),
        (5, "spectral support", Box::new(c5_spectral_support)),
        (6, "weak-convergence dichotomy", Box::new(c6_weak)),
        (7, "time-energy resolution", Box::new(c7_bandwidth)),
        (8, "dense oracle equivalence", Box::new(|_| c8_dense_oracle())),
        (9, "determinism", Box::new(|_| c9_determinism())),
    ];

    let mut failed = BTreeSet::new();
    for (id, title, f) in criteria {
        let start = Instant::now();
        let verdict = f(&mut rn).unwrap_or_else(|e| Verdict {
            pass: false,
            detail: format!("error: {e}"),
        });
        if !verdict.pass {
            failed.insert(id);
        }
        println!(
            "{} criterion {id} ({title}): {} [{:.1} s]",
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.detail,
            start.elapsed().as_secs_f64()
        );
    }

    let known: BTreeSet<u32> = KNOWN_FAILURES.iter().copied().collect();
    println!("{}/9 criteria passed", 9 - failed.len());
    let strict = std::env::var("RELCLOCK_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failed.is_empty() {
        return ExitCode::SUCCESS;
    }
    if failed == known && !strict {
        println!("only the documented known failure(s) {known:?} failed");
        return ExitCode::SUCCESS;
    }
    let unexpected: Vec<_> = failed.difference(&known).collect();
    let stale: Vec<_> = known.difference(&failed).collect();
    if !unexpected.is_empty() {
        println!("unexpected failure(s): {unexpected:?}");
    }
    if !stale.is_empty() {
        println!("known failure(s) now passing, update KNOWN_FAILURES: {stale:?}");
    }
    ExitCode::FAILURE
}
