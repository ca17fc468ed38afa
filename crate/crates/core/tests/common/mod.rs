#![allow(dead_code)]

use num_complex::Complex;
use stokes_lfa::gridops::*;
use stokes_lfa::lfa::{cgc_symbol, Coarsening};
use stokes_lfa::mgsolver::relax::SchurContext;
use stokes_lfa::mgsolver::*;
use stokes_lfa::relaxation::{determinant_roots, smoother_symbol, RelaxScheme};
use stokes_lfa::symbols::transfer_symbol;
use stokes_lfa::{DiscretizationSpec, Frequency};

pub fn specs(n: usize) -> [DiscretizationSpec; 3] {
    let h = 1.0 / n as f64;
    [DiscretizationSpec::posd(h), DiscretizationSpec::prsd(h), DiscretizationSpec::q2q1(h)]
}

pub fn schemes() -> Vec<RelaxScheme<f64>> {
    vec![
        RelaxScheme::dwj1(1.451, 1.0, 1.29),
        RelaxScheme::dwj2(1.5, 1.0, 4.0 / 3.0),
        RelaxScheme::bsr(1.0, 8.0 / 9.0),
        RelaxScheme::ibsr(1.1, 1.0, 1.0, 2),
        RelaxScheme::ibsr(1.2, 16.0 / 15.0, 1.0, 1),
        RelaxScheme::uzawa_schur(1.0, 0.9),
        RelaxScheme::uzawa_mass(1.2, 0.8, 0.7),
        RelaxScheme::uzawa_diag(1.1, 0.9, 1.3),
    ]
}

pub fn level_relaxation(spec: &DiscretizationSpec, scheme: &RelaxScheme<f64>, n: usize) -> (BlockOperator<f64>, LevelRelaxation<f64>) {
    let op = system_operator(spec).unwrap();
    let ops = vec![op.clone()];
    let ctx = SchurContext { ops: &ops, coarsening: Coarsening::Rediscretize };
    let relax = LevelRelaxation::new(scheme, spec.h, n, ctx).unwrap();
    (op, relax)
}

/// Real and imaginary parts of the grid function `v_b · exp(iθ·z/h)` sampled
/// at each block's own positions.
pub fn fourier_mode(layout: FieldLayout, n: usize, theta: &Frequency, v: &[Complex<f64>]) -> (BlockGridFunction<f64>, BlockGridFunction<f64>) {
    let value = |b: usize, i: usize, j: usize| {
        let (hx, hy) = layout.blocks()[b].ty.half();
        let phase = theta.theta1 * (i as f64 + hx as f64 / 2.0) + theta.theta2 * (j as f64 + hy as f64 / 2.0);
        v[b] * Complex::from_polar(1.0, phase)
    };
    (
        BlockGridFunction::from_fn(layout, n, |b, i, j| value(b, i, j).re),
        BlockGridFunction::from_fn(layout, n, |b, i, j| value(b, i, j).im),
    )
}

/// The frequency `2π(m1, m2)/n`, wrapped into `[-π, π)`.
pub fn grid_theta(n: usize, m1: usize, m2: usize) -> Frequency {
    let t = |m: usize| {
        let x = std::f64::consts::TAU * m as f64 / n as f64;
        if x >= std::f64::consts::PI {
            x - std::f64::consts::TAU
        } else {
            x
        }
    };
    Frequency::raw(t(m1), t(m2))
}

pub fn test_vector(d: usize) -> Vec<Complex<f64>> {
    (0..d).map(|k| Complex::new(0.3 + 0.17 * k as f64, 0.5 - 0.11 * k as f64)).collect()
}

pub fn max_diff(a: &BlockGridFunction<f64>, b: &BlockGridFunction<f64>) -> f64 {
    a.sub(b).max_abs()
}

/// Every grid frequency pair of an `n × n` mesh.
pub fn all_grid_thetas(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
}

/// Largest deviation of the grid operator from its symbol on Fourier modes.
pub fn operator_symbol_error(spec: &DiscretizationSpec, n: usize, modes: &[(usize, usize)]) -> f64 {
    let op = system_operator(spec).unwrap();
    let layout = op.layout();
    let v = test_vector(layout.len());
    let mut worst = 0.0f64;
    for &(m1, m2) in modes {
        let th = grid_theta(n, m1, m2);
        let (re, im) = fourier_mode(layout, n, &th, &v);
        let (want_re, want_im) = fourier_mode(layout, n, &th, &op.symbol(&th).mul_vec(&v));
        worst = worst.max(max_diff(&op.apply(&re).unwrap(), &want_re)).max(max_diff(&op.apply(&im).unwrap(), &want_im));
    }
    worst
}

/// Largest deviation of one relaxation sweep from its smoother symbol.
pub fn relaxation_symbol_error(spec: &DiscretizationSpec, scheme: &RelaxScheme<f64>, n: usize, modes: &[(usize, usize)]) -> f64 {
    let (op, relax) = level_relaxation(spec, scheme, n);
    let layout = op.layout();
    let zero = BlockGridFunction::zeros(layout, n);
    let v = test_vector(layout.len());
    let mut worst = 0.0f64;
    for &(m1, m2) in modes {
        // the constant mode is the nullspace; the symbol is singular there
        if (m1, m2) == (0, 0) {
            continue;
        }
        let th = grid_theta(n, m1, m2);
        let sym = smoother_symbol(scheme, spec, &th).unwrap();
        let (mut re, mut im) = fourier_mode(layout, n, &th, &v);
        relax.relax(&op, &mut re, &zero).unwrap();
        relax.relax(&op, &mut im, &zero).unwrap();
        let (want_re, want_im) = fourier_mode(layout, n, &th, &sym.mul_vec(&v));
        worst = worst.max(max_diff(&re, &want_re)).max(max_diff(&im, &want_im));
    }
    worst
}

/// Largest deviation of prolongation and restriction from their symbols.
/// `modes` index low frequencies of the fine `n × n` mesh.
pub fn transfer_symbol_error(spec: &DiscretizationSpec, n: usize, modes: &[(usize, usize)]) -> f64 {
    let layout = FieldLayout::for_kind(spec.kind);
    let t = Transfer::<f64>::new(layout);
    let d = layout.len();
    let mut worst = 0.0f64;
    for &(m1, m2) in modes {
        let th = grid_theta(n, m1, m2);
        let ts = transfer_symbol(spec, &th);
        let c = test_vector(d);
        let (cre, cim) = fourier_mode(layout, n / 2, &th.doubled(), &c);
        let fine = ts.prolong.mul_vec(&c);
        let mut want_re = BlockGridFunction::zeros(layout, n);
        let mut want_im = BlockGridFunction::zeros(layout, n);
        for (k, hk) in th.harmonics().iter().enumerate() {
            let (r, i) = fourier_mode(layout, n, hk, &fine[k * d..(k + 1) * d]);
            want_re.axpy(1.0, &r);
            want_im.axpy(1.0, &i);
        }
        worst = worst.max(max_diff(&t.prolong(&cre).unwrap(), &want_re)).max(max_diff(&t.prolong(&cim).unwrap(), &want_im));

        let a: Vec<Complex<f64>> = (0..4 * d).map(|k| Complex::new(0.2 * k as f64 - 0.7, 0.1 + 0.05 * k as f64)).collect();
        let mut fre = BlockGridFunction::zeros(layout, n);
        let mut fim = BlockGridFunction::zeros(layout, n);
        for (k, hk) in th.harmonics().iter().enumerate() {
            let (r, i) = fourier_mode(layout, n, hk, &a[k * d..(k + 1) * d]);
            fre.axpy(1.0, &r);
            fim.axpy(1.0, &i);
        }
        let (want_re, want_im) = fourier_mode(layout, n / 2, &th.doubled(), &ts.restrict.mul_vec(&a));
        worst = worst.max(max_diff(&t.restrict(&fre).unwrap(), &want_re)).max(max_diff(&t.restrict(&fim).unwrap(), &want_im));
    }
    worst
}

/// Distance between the eigenvalues of the smoother symbol and the
/// factored-determinant closed forms `1 − ω·λ`, matched greedily.
pub fn closed_form_error(spec: &DiscretizationSpec, scheme: &RelaxScheme<f64>, theta: &Frequency) -> f64 {
    let mut numeric = smoother_symbol(scheme, spec, theta).unwrap().eigenvalues();
    let closed: Vec<Complex<f64>> = determinant_roots(scheme, spec, theta)
        .unwrap()
        .into_iter()
        .map(|l| Complex::new(1.0, 0.0) - l * scheme.params.omega)
        .collect();
    assert_eq!(numeric.len(), closed.len());
    let mut worst = 0.0f64;
    for c in closed {
        let (k, d) = numeric
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - c).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("eigenvalue left to match");
        worst = worst.max(d);
        numeric.remove(k);
    }
    worst
}

/// `‖C̃² − C̃‖` for the Galerkin coarse-grid correction symbol.
pub fn cgc_symbol_idempotence_error(spec: &DiscretizationSpec, theta: &Frequency) -> f64 {
    let c = cgc_symbol(spec, Coarsening::Galerkin, theta).unwrap();
    (&(&c * &c) - &c).max_abs()
}

/// Relative change of a mean-free iterate under a second application of the
/// grid Galerkin coarse-grid correction.
pub fn grid_cgc_idempotence_error(spec: &DiscretizationSpec, n: usize, seed: u64) -> f64 {
    let scheme = RelaxScheme::bsr(1.0, 8.0 / 9.0);
    let mg = Multigrid::new(spec, CycleSpec::new(CycleKind::TwoGrid, 0, 0, Coarsening::Galerkin), &scheme, n).unwrap();
    let zero = BlockGridFunction::zeros(mg.operator().layout(), n);
    let mut once = BlockGridFunction::random(mg.operator().layout(), n, seed);
    once.remove_means();
    mg.cycle(&mut once, &zero).unwrap();
    let mut twice = once.clone();
    mg.cycle(&mut twice, &zero).unwrap();
    max_diff(&once, &twice) / once.max_abs()
}

/// `|⟨P x, y⟩ − ⟨x, R y⟩|` relative to the magnitude of the inner products.
pub fn adjoint_error(layout: FieldLayout, n: usize, seed: u64) -> f64 {
    let t = Transfer::<f64>::new(layout);
    let xc = BlockGridFunction::random(layout, n / 2, seed);
    let yf = BlockGridFunction::random(layout, n, seed.wrapping_add(1));
    let lhs = t.prolong(&xc).unwrap().dot(&yf);
    let rhs = xc.dot(&t.restrict(&yf).unwrap());
    (lhs - rhs).abs() / lhs.abs().max(1.0)
}

/// Deviation between relaxing a shifted input and shifting the relaxed output.
pub fn translation_error(spec: &DiscretizationSpec, scheme: &RelaxScheme<f64>, n: usize, seed: u64, shift: (usize, usize)) -> f64 {
    let (op, relax) = level_relaxation(spec, scheme, n);
    let x = BlockGridFunction::random(op.layout(), n, seed);
    let b = BlockGridFunction::random(op.layout(), n, seed.wrapping_add(1));
    let mut a = x.clone();
    relax.relax(&op, &mut a, &b).unwrap();
    let mut s = x.shifted(shift.0, shift.1);
    relax.relax(&op, &mut s, &b.shifted(shift.0, shift.1)).unwrap();
    max_diff(&a.shifted(shift.0, shift.1), &s)
}
