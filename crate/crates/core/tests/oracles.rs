//! Cross-checks against independent reference computations: explicit
//! exponential sums instead of FFTs, a Taylor matrix exponential instead
//! of the eigendecomposition, direct convolution sums and Simpson
//! quadrature of the Weyl integrals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use relclock_core::bandwidth::{build_bandlimited_history, SpectralAmplitude};
use relclock_core::grid::{commutator_sandwich, gaussian_clock_state};
use relclock_core::history::{constraint_convergence, schrodinger_residual, HistoryState};
use relclock_core::weyl::{make_weyl, weyl_report, WeylKind};
use relclock_core::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// exp(-iHt) by scaling and squaring a 30-term Taylor series.
fn expm_oracle(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let d = h.nrows();
    let a = h * c(0.0, -t);
    let norm = a.iter().map(|x| x.norm()).sum::<f64>();
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.25 {
        squarings += 1;
    }
    let a = a / c(2f64.powi(squarings), 0.0);
    let mut term = DMatrix::<C64>::identity(d, d);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn dense_time(grid: &TimeGrid) -> DMatrix<C64> {
    DMatrix::from_fn(grid.n_points(), grid.n_points(), |k, l| {
        if k == l {
            c(grid.time(k), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Ω_kl = (1/N) Σ_j ω_j e^{iω_j (t_k - t_l)}.
fn dense_frequency(grid: &TimeGrid) -> DMatrix<C64> {
    let n = grid.n_points();
    DMatrix::from_fn(n, n, |k, l| {
        grid.freqs()
            .iter()
            .map(|w| c(0.0, w * (grid.time(k) - grid.time(l))).exp() * *w)
            .sum::<C64>()
            / n as f64
    })
}

#[test]
fn frequency_operator_matches_dense_sum() {
    let grid = TimeGrid::new(64, 12.0).unwrap();
    let omega = dense_frequency(&grid);
    let v = ClockVector::from_fn(&grid, |t| c((-(t - 0.7) * (t - 0.7) / 3.0).exp(), 0.3 * t.sin()));
    let fast = v.apply_frequency_operator();
    let slow = &omega * DVector::from_column_slice(v.amplitudes());
    for (a, b) in fast.amplitudes().iter().zip(slow.iter()) {
        assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn commutator_matches_dense_oracle() {
    let grid = TimeGrid::new(64, 16.0).unwrap();
    let t = dense_time(&grid);
    let omega = dense_frequency(&grid);
    let comm = &t * &omega - &omega * &t;
    let v = gaussian_clock_state(&grid, 0.5, 1.0);
    let x = DVector::from_column_slice(v.amplitudes());
    let dense = (x.adjoint() * &comm * &x)[(0, 0)] / (x.adjoint() * &x)[(0, 0)];
    let fast = commutator_sandwich(&v);
    assert!((fast.value - dense).norm() < 1e-12);
    assert!((fast.value - c(0.0, 1.0)).norm() < 1e-6);
}

#[test]
fn evolve_matches_taylor_exponential() {
    let specs = [
        HamiltonianSpec::Qubit { omega0: 1.0 },
        HamiltonianSpec::Oscillator { dim: 8, omega0: 1.0 },
        HamiltonianSpec::RandomHermitian { dim: 16, seed: 7 },
    ];
    for spec in &specs {
        let h = Hamiltonian::from_spec(spec).unwrap();
        let psi0 = SystemState::random(h.dim(), 3);
        for t in [-3.7, -0.2, 0.0, 1.1, 9.5] {
            let u = expm_oracle(h.matrix(), t);
            let expect = &u * DVector::from_column_slice(psi0.amplitudes());
            let got = h.evolve(&psi0, t).unwrap();
            for (a, b) in got.amplitudes().iter().zip(expect.iter()) {
                assert!((a - b).norm() < 1e-11, "{spec:?} t={t}");
            }
        }
    }
}

#[test]
fn conditioning_recovers_schrodinger_evolution() {
    let specs = [
        HamiltonianSpec::Qubit { omega0: 1.0 },
        HamiltonianSpec::Oscillator { dim: 8, omega0: 1.0 },
        HamiltonianSpec::RandomHermitian { dim: 16, seed: 20260 },
    ];
    let grid = TimeGrid::new(128, 20.0).unwrap();
    for spec in &specs {
        let h = Hamiltonian::from_spec(spec).unwrap();
        let psi0 = SystemState::random(h.dim(), 99);
        let hist = build_history(&grid, &h, &psi0).unwrap();
        for k in 0..grid.n_points() {
            let u = expm_oracle(h.matrix(), grid.time(k));
            let expect = SystemState::new((&u * DVector::from_column_slice(psi0.amplitudes())).iter().copied().collect());
            let got = condition(&hist, k).unwrap();
            assert!(got.state.fidelity(&expect) >= 1.0 - 1e-10, "{spec:?} k={k}");
            assert!((got.row_norm - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn matrix_free_constraint_matches_dense() {
    let grid = TimeGrid::new(16, 6.0).unwrap();
    let h = Hamiltonian::from_spec(&HamiltonianSpec::RandomHermitian { dim: 2, seed: 1 }).unwrap();
    let j = ConstraintOperator::new(&grid, &h);
    let dense = j.to_dense().unwrap();
    assert!((&dense - dense.adjoint()).iter().all(|x| x.norm() < 1e-12));
    for seed in 0..20 {
        let psi = HistoryState::random(&grid, 2, seed);
        let fast = j.apply(&psi).unwrap();
        let slow = &dense * DVector::from_column_slice(psi.amplitudes());
        for (a, b) in fast.amplitudes().iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn bandlimited_history_matches_direct_convolution() {
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let n = grid.n_points();
    let h = Hamiltonian::from_spec(&HamiltonianSpec::Qubit { omega0: 1.0 }).unwrap();
    let chi0 = SystemState::equal_superposition(2);
    let phi = SpectralAmplitude::gaussian(&grid, 2.0).unwrap();
    let fast = build_bandlimited_history(&grid, &h, &chi0, &phi).unwrap();

    // kernel K(t_k - t_l) = (1/N) Σ_j φ_j e^{iω_j (t_k - t_l)}, then Σ_l K χ(t_l)
    let kernel: Vec<C64> = (0..n)
        .map(|s| {
            let tau = s as f64 * grid.dt();
            grid.freqs()
                .iter()
                .zip(phi.values())
                .map(|(w, p)| p * c(0.0, w * tau).exp())
                .sum::<C64>()
                / n as f64
        })
        .collect();
    let rows: Vec<SystemState> = (0..n).map(|l| h.evolve(&chi0, grid.time(l)).unwrap()).collect();
    let mut direct = Vec::with_capacity(n * 2);
    for k in 0..n {
        for comp in 0..2 {
            let v: C64 = (0..n).map(|l| kernel[(k + n - l) % n] * rows[l].amplitudes()[comp]).sum();
            direct.push(v);
        }
    }
    let direct = HistoryState::from_amplitudes(&grid, 2, direct, history::Normalization::Raw).unwrap();
    let direct = direct.scaled(c(grid.window().sqrt() / direct.norm(), 0.0));
    let err = fast
        .amplitudes()
        .iter()
        .zip(direct.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-8, "max row error {err:e}");
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn weyl_values_match_quadrature() {
    for n in [4.0_f64, 16.0, 64.0] {
        let scale = (2.0 / (PI * n)).powf(0.25);
        let f = |t: f64| scale * (-t * t / n).exp();
        let df = |t: f64| -2.0 * t / n * f(t);
        let lim = 12.0 * n.sqrt();
        let q = |g: &dyn Fn(f64) -> f64| simpson(g, -lim, lim, 20000);
        let constraint = q(&|t| df(t) * df(t));
        let t_amplified = q(&|t| t * t * df(t) * df(t));
        let tj = q(&|t| -t * f(t) * df(t));
        let jt = q(&|t| (f(t) + t * df(t)).powi(2));
        assert!((constraint - 1.0 / n).abs() < 1e-10);
        assert!((t_amplified - 0.75).abs() < 1e-10);
        assert!((tj - 0.5).abs() < 1e-10);
        assert!((jt - 0.75).abs() < 1e-10);

        let window = 10.0 * n.sqrt();
        let grid = TimeGrid::new((window / 0.05).round() as usize, window).unwrap();
        let h = Hamiltonian::from_spec(&HamiltonianSpec::RandomHermitian { dim: 3, seed: 5 }).unwrap();
        let w = make_weyl(&grid, &h, &SystemState::random(3, 8), WeylKind::Gaussian { n }).unwrap();
        let r = weyl_report(&w, &ConstraintOperator::new(&grid, &h)).unwrap();
        assert!((r.constraint_norm_sq - constraint).abs() < 1e-8 * constraint.max(1.0));
        assert!((r.t_amplified_norm_sq - t_amplified).abs() < 1e-8);
        // 𝕁(fψ) = -i f' ψ, so ⟨Ψ|T𝕁|Ψ⟩ = -i ∫ t f f' = +i/2
        assert!((r.sandwich_tj - c(0.0, tj)).norm() < 1e-8);
        assert!((r.sandwich_jt - c(0.0, -tj)).norm() < 1e-8);
        assert!((r.jt_norm_sq - jt).abs() < 1e-8);
    }
}

#[test]
fn tapered_residual_converges_under_refinement() {
    let h = Hamiltonian::from_spec(&HamiltonianSpec::Qubit { omega0: 1.0 }).unwrap();
    let psi0 = SystemState::equal_superposition(2);
    let rows = constraint_convergence(&h, &psi0, 20.0, &[128, 256, 512]).unwrap();
    for pair in rows.windows(2) {
        assert!(pair[1].residual.interior_tapered < pair[0].residual.interior_tapered);
    }
    assert!(rows[2].residual.interior_tapered < 1e-6);
    // the untapered norm is dominated by the wrap jump and does not converge
    assert!(rows[2].residual.relative_raw > rows[0].residual.relative_raw);

    let grid = TimeGrid::new(512, 20.0).unwrap();
    let hist = build_history(&grid, &h, &psi0).unwrap();
    assert!(schrodinger_residual(&hist, &h).unwrap() < 1e-6);
}

#[test]
fn commutator_error_shrinks_with_resolution() {
    let mut previous = f64::INFINITY;
    for n in [128, 256, 512, 1024] {
        let grid = TimeGrid::new(n, 40.0).unwrap();
        let v = gaussian_clock_state(&grid, 0.0, 0.15);
        let err = (commutator_sandwich(&v).value - c(0.0, 1.0)).norm();
        assert!(err <= previous.max(1e-12), "N={n}: {err:e} after {previous:e}");
        previous = err;
    }
    assert!(previous < 1e-6);
}
