use anyhow::{Context, Result};
use relclock_core::bandwidth::{
    autocorrelation, build_bandlimited_history, chi_correlation, resolution_estimate, smeared_schrodinger_residual,
    SpectralAmplitude,
};
use relclock_core::grid::{commutator_sandwich, gaussian_clock_state};
use relclock_core::history::{
    constraint_convergence, peres_commutator_norm, residual_profile, schrodinger_residual, spectral_support,
    HistoryState,
};
use relclock_core::weyl::{make_weyl, weak_convergence_probe, weyl_report, TestFunction, WeylKind};
use relclock_core::{build_history, condition, ConstraintOperator, Hamiltonian, TimeGrid, C64};

use crate::config::{weyl_grid, Config, Scenario, ShapeConfig, TestFunctionConfig, WeylKindConfig};
use crate::report::{Check, Report, Table};

pub fn run_scenario(cfg: &Config) -> Result<Report> {
    match cfg.scenario {
        Scenario::PauliCheck => pauli_check(cfg),
        Scenario::WeylSweep => weyl_sweep(cfg),
        Scenario::SchrodingerRecovery => schrodinger_recovery(cfg),
        Scenario::SpectralSupport => spectral_support_scenario(cfg),
        Scenario::BandwidthSweep => bandwidth_sweep(cfg),
        Scenario::WeakConvergence => weak_convergence(cfg),
    }
}

fn nyquist_warning(report: &mut Report, grid: &TimeGrid, h: &Hamiltonian) {
    let max = h.eigenvalues().iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    if max > grid.nyquist() {
        report.warn(format!(
            "eigenfrequency {max} exceeds the grid Nyquist frequency πN/L = {:.6}",
            grid.nyquist()
        ));
    }
}

fn pauli_check(cfg: &Config) -> Result<Report> {
    let grid = cfg.grid()?;
    let h = cfg.hamiltonian(Some(&grid))?;
    let tol = &cfg.tolerances;
    let mut report = Report::default();

    let mut table = Table::new(
        "commutator",
        &["center", "width", "re", "im", "error", "boundary_ok", "spectrum_ok"],
    );
    for (i, s) in cfg.pauli.states.iter().enumerate() {
        let v = gaussian_clock_state(&grid, s.center, s.width);
        let c = commutator_sandwich(&v);
        let err = (c.value - C64::new(0.0, 1.0)).norm();
        if !c.boundary_ok {
            report.warn(format!(
                "clock state {i} (center {}, width {}) is not negligible at the window edge",
                s.center, s.width
            ));
        }
        if !c.spectrum_ok {
            report.warn(format!(
                "clock state {i} (center {}, width {}) is unresolved: its spectrum reaches the Nyquist band (dt = {})",
                s.center,
                s.width,
                grid.dt()
            ));
        }
        report.check(Check::abs(format!("clock_commutator_error[{i}]"), err, 0.0, tol.clock_commutator_abs));
        table.push(vec![
            s.center.into(),
            s.width.into(),
            c.value.re.into(),
            c.value.im.into(),
            err.into(),
            c.boundary_ok.into(),
            c.spectrum_ok.into(),
        ]);
    }
    report.tables.push(table);

    if cfg.pauli.random_states > 0 {
        let seed = cfg.require_seed(None, "pauli-check random states")?;
        let mut worst = 0.0_f64;
        for i in 0..cfg.pauli.random_states {
            let psi = HistoryState::random(&grid, h.dim(), seed.wrapping_add(i as u64));
            worst = worst.max(peres_commutator_norm(&psi, &h)?);
        }
        report.quantity("peres_states", cfg.pauli.random_states as f64);
        report.check(Check::abs("peres_commutator_max", worst, 0.0, tol.peres_abs));
    }
    Ok(report)
}

fn weyl_sweep(cfg: &Config) -> Result<Report> {
    let tol = &cfg.tolerances;
    let mut report = Report::default();
    let fixed_grid = match cfg.weyl.dt {
        Some(_) => None,
        None => Some(cfg.grid()?),
    };
    let mut table = Table::new(
        "weyl",
        &[
            "kind",
            "n_or_m",
            "N",
            "L",
            "constraint_norm_sq",
            "constraint_target",
            "t_amplified_norm_sq",
            "t_amplified_target",
            "sandwich_tj_re",
            "sandwich_tj_im",
            "sandwich_jt_re",
            "sandwich_jt_im",
            "commutator_re",
            "commutator_im",
            "jt_norm_sq",
            "optimal_residual_sq",
            "boundary_ok",
            "edges_on_grid",
        ],
    );
    let mut sweep = Vec::new();
    for &value in &cfg.weyl.values {
        let grid = match (&fixed_grid, cfg.weyl.dt) {
            (Some(g), _) => g.clone(),
            (None, Some(dt)) => weyl_grid(cfg.weyl.kind, value, dt)?,
            (None, None) => unreachable!(),
        };
        let h = cfg.hamiltonian(Some(&grid))?;
        let psi0 = cfg.initial_state(&h)?;
        let kind = match cfg.weyl.kind {
            WeylKindConfig::Gaussian => WeylKind::Gaussian { n: value },
            WeylKindConfig::Box => WeylKind::Box { m: value },
        };
        let w = make_weyl(&grid, &h, &psi0, kind).with_context(|| format!("weyl state {} = {value}", kind.label()))?;
        let r = weyl_report(&w, &ConstraintOperator::new(&grid, &h))?;
        let label = format!("{}={value}", if matches!(kind, WeylKind::Gaussian { .. }) { "n" } else { "m" });
        if !r.boundary_ok {
            report.warn(format!(
                "{label}: state or T̂-image above 1e-8 of its peak in the edge band (N = {}, L = {})",
                grid.n_points(),
                grid.window()
            ));
        }
        if !w.edges_on_grid {
            report.warn(format!("{label}: box edges fall between grid points"));
        }
        if let WeylKind::Box { m } = kind {
            report.check(Check::abs(
                format!("envelope_norm_sq[{label}]"),
                w.envelope_norm_sq,
                1.0,
                grid.dt() / m,
            ));
        }
        report.check(Check::abs(
            format!("adjoint_error[{label}]"),
            (r.sandwich_tj - r.sandwich_jt.conj()).norm(),
            0.0,
            tol.weyl_adjoint_abs,
        ));
        sweep.push((value, r.constraint_norm_sq, r.t_amplified_norm_sq));
        if let Some(t) = r.targets {
            report.check(Check::rel(
                format!("constraint_norm_sq[{label}]"),
                r.constraint_norm_sq,
                t.constraint_norm_sq,
                tol.weyl_constraint_rel,
            ));
            report.check(Check::rel(
                format!("t_amplified_norm_sq[{label}]"),
                r.t_amplified_norm_sq,
                t.t_amplified_norm_sq,
                tol.weyl_t_amplified_rel,
            ));
            report.check(Check::rel(
                format!("abs_sandwich_tj[{label}]"),
                r.sandwich_tj.norm(),
                0.5,
                tol.weyl_sandwich_rel,
            ));
            report.check(Check::rel(
                format!("abs_sandwich_jt[{label}]"),
                r.sandwich_jt.norm(),
                0.5,
                tol.weyl_sandwich_rel,
            ));
            report.check(Check::abs(
                format!("re_sandwich_tj[{label}]"),
                r.sandwich_tj.re,
                0.0,
                tol.weyl_sandwich_real_abs,
            ));
            report.check(Check::abs(
                format!("re_sandwich_jt[{label}]"),
                r.sandwich_jt.re,
                0.0,
                tol.weyl_sandwich_real_abs,
            ));
            report.check(Check::abs(
                format!("commutator_error[{label}]"),
                (r.commutator_check - t.commutator).norm(),
                0.0,
                tol.weyl_commutator_abs,
            ));
            report.check(Check::abs(
                format!("optimal_residual_sq[{label}]"),
                r.optimal_residual_sq,
                t.optimal_residual_sq,
                tol.weyl_optimal_residual_abs,
            ));
            // which ordering carries +i/2 is reported, not asserted
            report.quantity(format!("im_sandwich_tj[{label}]"), r.sandwich_tj.im);
            report.quantity(format!("im_sandwich_jt[{label}]"), r.sandwich_jt.im);
        }
        let (ct, tt) = r
            .targets
            .map(|t| (t.constraint_norm_sq, t.t_amplified_norm_sq))
            .unwrap_or((f64::NAN, f64::NAN));
        table.push(vec![
            kind.label().into(),
            value.into(),
            grid.n_points().into(),
            grid.window().into(),
            r.constraint_norm_sq.into(),
            ct.into(),
            r.t_amplified_norm_sq.into(),
            tt.into(),
            r.sandwich_tj.re.into(),
            r.sandwich_tj.im.into(),
            r.sandwich_jt.re.into(),
            r.sandwich_jt.im.into(),
            r.commutator_check.re.into(),
            r.commutator_check.im.into(),
            r.jt_norm_sq.into(),
            r.optimal_residual_sq.into(),
            r.boundary_ok.into(),
            w.edges_on_grid.into(),
        ]);
    }
    if sweep.len() > 1 {
        sweep.sort_by(|a, b| a.0.total_cmp(&b.0));
        let increases = sweep.windows(2).filter(|p| p[1].1 >= p[0].1).count();
        report.check(Check::at_most("constraint_norm_sq_increases", increases as f64, 0.0));
        let floor = sweep.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
        report.quantity("min_t_amplified_norm_sq", floor);
    }
    report.tables.push(table);
    Ok(report)
}

fn schrodinger_recovery(cfg: &Config) -> Result<Report> {
    let grid = cfg.grid()?;
    let h = cfg.hamiltonian(Some(&grid))?;
    let psi0 = cfg.initial_state(&h)?;
    let tol = &cfg.tolerances;
    let mut report = Report::default();
    nyquist_warning(&mut report, &grid, &h);

    let hist = build_history(&grid, &h, &psi0)?;
    let profile = residual_profile(&hist, &h)?;
    let interior = grid.interior(relclock_core::grid::EDGE_FRACTION);
    let mut table = Table::new("fidelity", &["k", "t", "fidelity", "row_norm", "residual", "interior"]);
    let mut worst = 1.0_f64;
    for k in 0..grid.n_points() {
        let t = grid.time(k);
        let c = condition(&hist, k)?;
        let f = c.state.fidelity(&h.evolve(&psi0, t)?);
        worst = worst.min(f);
        table.push(vec![
            k.into(),
            t.into(),
            f.into(),
            c.row_norm.into(),
            profile[k].into(),
            interior.contains(&k).into(),
        ]);
    }
    report.check(Check::at_least("min_fidelity", worst, 1.0 - tol.fidelity_deficit));
    report.check(Check::at_most(
        "interior_residual",
        schrodinger_residual(&hist, &h)?,
        tol.schrodinger_residual,
    ));
    report.quantity("norm_sq_over_window", hist.norm_sq() / grid.window());
    report.tables.push(table.csv_only());

    let sizes = cfg.schrodinger.convergence_sizes.clone().unwrap_or_else(|| {
        let n = grid.n_points();
        [n / 4, n / 2, n].into_iter().filter(|m| *m >= 4 && m % 2 == 0).collect()
    });
    let rows = constraint_convergence(&h, &psi0, grid.window(), &sizes)?;
    let mut conv = Table::new("convergence", &["N", "raw_relative", "interior_tapered", "tapered_order"]);
    for r in &rows {
        conv.push(vec![
            r.n_points.into(),
            r.residual.relative_raw.into(),
            r.residual.interior_tapered.into(),
            r.tapered_order.unwrap_or(f64::NAN).into(),
        ]);
    }
    report.tables.push(conv);

    if cfg.schrodinger.export_history {
        report.tables.push(history_table("history", &hist));
    }
    Ok(report)
}

/// Columnar export: k, t, then re/im of each system amplitude.
pub fn history_table(name: &str, psi: &HistoryState) -> Table {
    let mut columns = vec!["k".to_string(), "t".to_string()];
    for c in 0..psi.sys_dim() {
        columns.push(format!("re_{c}"));
        columns.push(format!("im_{c}"));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(name, &cols).csv_only();
    for k in 0..psi.n_points() {
        let mut row = vec![k.into(), psi.grid().time(k).into()];
        for a in psi.row(k) {
            row.push(a.re.into());
            row.push(a.im.into());
        }
        table.push(row);
    }
    table
}

fn spectral_support_scenario(cfg: &Config) -> Result<Report> {
    let grid = cfg.grid()?;
    let h = cfg.hamiltonian(Some(&grid))?;
    let psi0 = cfg.initial_state(&h)?;
    let mut report = Report::default();
    let hist = build_history(&grid, &h, &psi0)?;
    let s = spectral_support(&hist, &h)?;
    if s.nyquist_exceeded {
        report.warn(format!(
            "an eigenfrequency exceeds the grid Nyquist frequency πN/L = {:.6}",
            grid.nyquist()
        ));
    }
    report.check(Check::at_least(
        "captured_fraction",
        s.captured_fraction,
        cfg.tolerances.support_fraction,
    ));
    let mut lines = Table::new("support_lines", &["eigenvalue", "line_frequency", "fraction"]);
    for l in &s.lines {
        lines.push(vec![l.eigenvalue.into(), l.frequency.into(), l.fraction.into()]);
    }
    report.tables.push(lines);
    let total: f64 = s.mass.iter().sum();
    let mut spectrum = Table::new("spectrum", &["omega", "mass_fraction"]).csv_only();
    for (w, m) in grid.freqs().iter().zip(&s.mass) {
        spectrum.push(vec![(*w).into(), (m / total).into()]);
    }
    report.tables.push(spectrum);
    Ok(report)
}

fn bandwidth_sweep(cfg: &Config) -> Result<Report> {
    let grid = cfg.grid()?;
    let h = cfg.hamiltonian(Some(&grid))?;
    let chi0 = cfg.initial_state(&h)?;
    let tol = &cfg.tolerances;
    let mut report = Report::default();
    nyquist_warning(&mut report, &grid, &h);

    let sharp = build_history(&grid, &h, &chi0)?;
    let sharp_residual = schrodinger_residual(&sharp, &h)?;
    report.quantity("sharp_residual", sharp_residual);
    let chi = chi_correlation(&grid, &h, &chi0)?;
    report.quantity("chi_half_overlap", chi.half_overlap);
    report.quantity("chi_width", chi.width);

    let mut table = Table::new(
        "resolution",
        &[
            "delta_omega",
            "measured_std",
            "bound",
            "estimate_half",
            "estimate_005",
            "width",
            "width_times_delta_omega",
            "resolution_limited",
            "smeared_residual",
        ],
    );
    let mut sorted = cfg.bandwidth.delta_omegas.clone();
    sorted.sort_by(f64::total_cmp);
    let mut previous: Option<(f64, f64)> = None;
    for (idx, &dw) in sorted.iter().enumerate() {
        let phi = match cfg.bandwidth.shape {
            ShapeConfig::Gaussian => SpectralAmplitude::gaussian(&grid, dw)?,
            ShapeConfig::Box => SpectralAmplitude::box_shape(&grid, dw)?,
        };
        if phi.reaches_nyquist() {
            report.warn(format!("Δω = {dw}: φ is not negligible at the lattice edge (Nyquist)"));
        }
        let smeared = build_bandlimited_history(&grid, &h, &chi0, &phi)?;
        let c = autocorrelation(&smeared);
        let est = resolution_estimate(&c);
        let residual = smeared_schrodinger_residual(&smeared, &h)?;
        let bound = 0.5 / dw;
        let label = format!("dw={dw}");
        if est.resolution_limited {
            report.warn(format!("{label}: |C| stays above 1/2 over every lag (resolution-limited)"));
        }
        if cfg.bandwidth.shape == ShapeConfig::Gaussian {
            report.check(Check::rel(
                format!("width_times_delta_omega[{label}]"),
                est.width * dw,
                1.0,
                tol.bandwidth_width_rel,
            ));
        }
        report.check(Check::at_least(
            format!("estimate_half[{label}]"),
            est.half_overlap,
            bound - grid.dt(),
        ));
        report.check(Check::at_most(
            format!("smeared_residual[{label}]"),
            residual,
            tol.smeared_residual_factor * sharp_residual,
        ));
        if let Some((pdw, pest)) = previous {
            report.check(Check::at_most(
                format!("estimate_monotone[{pdw}->{dw}]"),
                est.half_overlap,
                pest + grid.dt(),
            ));
        }
        previous = Some((dw, est.half_overlap));
        table.push(vec![
            dw.into(),
            phi.measured_std().into(),
            bound.into(),
            est.half_overlap.into(),
            est.near_orthogonal.unwrap_or(f64::NAN).into(),
            est.width.into(),
            (est.width * dw).into(),
            est.resolution_limited.into(),
            residual.into(),
        ]);
        if cfg.bandwidth.export_autocorrelation {
            let mut ac = Table::new(&format!("autocorrelation_{idx}"), &["tau", "re", "im", "abs"]).csv_only();
            for (tau, v) in c.lags.iter().zip(&c.values) {
                ac.push(vec![(*tau).into(), v.re.into(), v.im.into(), v.norm().into()]);
            }
            report.tables.push(ac);
        }
    }
    report.tables.insert(0, table);
    Ok(report)
}

fn weak_convergence(cfg: &Config) -> Result<Report> {
    let grid = cfg.grid()?;
    let h = cfg.hamiltonian(Some(&grid))?;
    let psi0 = cfg.initial_state(&h)?;
    let phi0 = match &cfg.weak.probe_state {
        Some(s) => cfg.state(s, &h).context("invalid weak.probe_state")?,
        None => psi0.clone(),
    };
    let tol = &cfg.tolerances;
    let mut report = Report::default();
    let mut table = Table::new(
        "weak",
        &[
            "theta", "m", "a_re", "a_im", "b_re", "b_im", "a_pred_re", "a_pred_im", "b_pred_re", "b_pred_im",
            "b_ratio", "edges_on_grid",
        ],
    );
    for tf in &cfg.weak.test_functions {
        let (theta, name) = match *tf {
            TestFunctionConfig::Gaussian { center, width } => {
                (TestFunction::Gaussian { center, width }, format!("gaussian(c={center},w={width})"))
            }
            TestFunctionConfig::SlowDecay { epsilon } => {
                (TestFunction::SlowDecay { epsilon }, format!("slow(eps={epsilon})"))
            }
        };
        let rows = weak_convergence_probe(&grid, &h, &psi0, &phi0, theta, &cfg.weak.m_values)?;
        for r in &rows {
            if !r.edges_on_grid {
                report.warn(format!("{name}, m={}: box edges fall between grid points", r.m));
            }
            let ratio = r.b.norm() / r.b_pred.norm();
            table.push(vec![
                name.as_str().into(),
                r.m.into(),
                r.a.re.into(),
                r.a.im.into(),
                r.b.re.into(),
                r.b.im.into(),
                r.a_pred.re.into(),
                r.a_pred.im.into(),
                r.b_pred.re.into(),
                r.b_pred.im.into(),
                ratio.into(),
                r.edges_on_grid.into(),
            ]);
            match theta {
                TestFunction::SlowDecay { .. } => report.check(Check::within(
                    format!("b_ratio[{name},m={}]", r.m),
                    ratio,
                    tol.weak_ratio_min,
                    tol.weak_ratio_max,
                )),
                TestFunction::Gaussian { .. } => {
                    report.quantity(format!("abs_a[{name},m={}]", r.m), r.a.norm());
                }
            }
        }
        if matches!(theta, TestFunction::Gaussian { .. }) {
            for pair in rows.windows(2) {
                report.check(Check::at_least(
                    format!("a_decay[{name},m={}->{}]", pair[0].m, pair[1].m),
                    pair[0].a.norm() / pair[1].a.norm(),
                    tol.weak_decay_factor,
                ));
            }
        }
    }
    report.tables.push(table);
    Ok(report)
}
