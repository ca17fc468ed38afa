mod common;

use common::*;
use stokes_lfa::gridops::operator::flatten;
use stokes_lfa::gridops::*;
use stokes_lfa::lfa::Coarsening;
use stokes_lfa::mgsolver::*;
use stokes_lfa::relaxation::RelaxScheme;
use stokes_lfa::DiscretizationSpec;

#[test]
fn zero_residual_leaves_iterate_unchanged() {
    let n = 8;
    for spec in specs(n) {
        for scheme in schemes() {
            let (op, relax) = level_relaxation(&spec, &scheme, n);
            let x0 = BlockGridFunction::random(op.layout(), n, 5);
            let b = op.apply(&x0).unwrap();
            let mut x = x0.clone();
            relax.relax(&op, &mut x, &b).unwrap();
            assert!(max_diff(&x, &x0) < 1e-12, "{} {}", spec.kind, scheme.describe());
        }
    }
}

#[test]
fn relaxation_acts_on_fourier_modes_as_its_symbol() {
    let n = 8;
    for spec in specs(n) {
        for scheme in schemes() {
            let err = relaxation_symbol_error(&spec, &scheme, n, &[(1, 0), (3, 2), (4, 4), (6, 1), (2, 7)]);
            assert!(err < 1e-10, "{} {} err {err:e}", spec.kind, scheme.describe());
        }
    }
}

#[test]
fn operator_acts_on_fourier_modes_as_its_symbol() {
    let n = 8;
    for spec in specs(n) {
        let err = operator_symbol_error(&spec, n, &[(1, 0), (3, 5), (4, 4), (7, 2)]);
        assert!(err < 1e-10, "{} err {err:e}", spec.kind);
    }
}

#[test]
fn transfers_act_on_fourier_modes_as_their_symbols() {
    let n = 16;
    for spec in specs(n) {
        let err = transfer_symbol_error(&spec, n, &[(1, 0), (2, 3), (15, 14), (4, 12)]);
        assert!(err < 1e-10, "{} err {err:e}", spec.kind);
    }
}

#[test]
fn matrix_free_apply_matches_assembled_matrix() {
    let n = 8;
    for spec in specs(n) {
        let op = system_operator(&spec).unwrap();
        let x = BlockGridFunction::random(op.layout(), n, 11);
        let a = flatten(&op.apply(&x).unwrap());
        let b = op.assemble(n).matvec(&flatten(&x));
        let err = a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        assert!(err < 1e-12, "{} err {err:e}", spec.kind);
    }
}

#[test]
fn relaxation_commutes_with_translation() {
    let n = 8;
    for spec in specs(n) {
        for scheme in schemes() {
            let err = translation_error(&spec, &scheme, n, 2, (3, 5));
            assert!(err < 1e-12, "{} {} err {err:e}", spec.kind, scheme.describe());
        }
    }
}

#[test]
fn galerkin_coarse_grid_correction_is_a_projection() {
    for spec in specs(8) {
        let err = grid_cgc_idempotence_error(&spec, 8, 9);
        assert!(err < 1e-9, "{} err {err:e}", spec.kind);
    }
}

#[test]
fn constant_offsets_leave_residual_history_unchanged() {
    let n = 16;
    for spec in specs(n) {
        let scheme = RelaxScheme::bsr(1.0, 8.0 / 9.0);
        let mg = Multigrid::new(&spec, CycleSpec::w(1, 1), &scheme, n).unwrap();
        let layout = mg.operator().layout();
        let x0 = BlockGridFunction::random(layout, n, 4);
        let mut offset = x0.clone();
        for (b, info) in layout.blocks().iter().enumerate() {
            let c = match info.component {
                Component::U => 0.25,
                Component::V => -0.75,
                Component::P => 1.5,
            };
            offset.block_mut(b).iter_mut().for_each(|v| *v += c);
        }
        let mut p = x0.clone();
        p.remove_means();
        offset.remove_means();
        let a = measure_from(&mg, p, 10, 0).unwrap();
        let b = measure_from(&mg, offset, 10, 0).unwrap();
        assert_eq!(a.residual_history, b.residual_history, "{}", spec.kind);
    }
}

#[test]
fn measurement_is_deterministic_per_seed() {
    let n = 16;
    let spec = DiscretizationSpec::posd(1.0 / n as f64);
    let mg = Multigrid::new(&spec, CycleSpec::w(1, 1), &RelaxScheme::dwj1(1.451, 1.0, 1.29), n).unwrap();
    let a = measure_rho_hat(&mg, 15, 42).unwrap();
    let b = measure_rho_hat(&mg, 15, 42).unwrap();
    let c = measure_rho_hat(&mg, 15, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.residual_history, c.residual_history);
}

#[test]
fn many_inner_cycles_recover_exact_braess_sarazin() {
    let n = 32;
    let spec = DiscretizationSpec::posd(1.0 / n as f64);
    for (nu1, nu2) in [(1, 0), (1, 1)] {
        let cycle = CycleSpec::w(nu1, nu2);
        let exact = Multigrid::new(&spec, cycle, &RelaxScheme::bsr(1.0, 8.0 / 9.0), n).unwrap();
        let inner = Multigrid::new(&spec, cycle, &RelaxScheme::ibsr_inner(1.0, 8.0 / 9.0, 1.0, 8), n).unwrap();
        let a = measure_rho_hat(&exact, 40, 1).unwrap().rho_hat;
        let b = measure_rho_hat(&inner, 40, 1).unwrap().rho_hat;
        assert!((a - b).abs() < 0.01, "W({nu1},{nu2}): exact {a:.4} inner {b:.4}");
    }
}

#[test]
fn inner_schur_solver_converges_to_exact_solve() {
    let n = 32;
    let spec = DiscretizationSpec::posd(1.0 / n as f64);
    let mut stencils = vec![schur_stencil(&system_operator(&spec).unwrap(), 1.0).unwrap()];
    while stencils.len() < 5 {
        let prev = stokes_lfa::gridops::discretize::scalar_operator(stencils.last().unwrap().clone()).unwrap();
        stencils.push(galerkin_coarsen(&prev).unwrap().block_or_zero(0, 0));
    }
    let exact = ScalarFftSolver::new(&stencils[0], n).unwrap();
    let hier = ScalarHierarchy::new(n, stencils, 1.0).unwrap();
    let mut q = BlockGridFunction::<f64>::random(FieldLayout::Scalar, n, 3);
    q.remove_means();
    let want = exact.solve(q.block(0));
    let got = hier.solve(q.block(0), 16).unwrap();
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean = got.iter().sum::<f64>() / got.len() as f64;
    let err = got.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - mean - b).abs()));
    assert!(err / scale < 1e-6, "relative error {:e}", err / scale);
}

#[test]
fn divergence_is_flagged_not_fatal() {
    let n = 16;
    let spec = DiscretizationSpec::posd(1.0 / n as f64);
    let mg = Multigrid::new(&spec, CycleSpec::w(1, 0), &RelaxScheme::dwj1(1.0, 1.0, 3.5), n).unwrap();
    let r = measure_rho_hat(&mg, 100, 1).unwrap();
    assert!(r.diverged && r.rho_hat > 1.0, "{r:?}");
    assert!(r.display_rho().starts_with("diverged"));
}

#[test]
fn exact_two_grid_matches_lfa_prediction() {
    use stokes_lfa::lfa::{two_grid_factor, TwoGridSpec};
    let n = 32;
    let spec = DiscretizationSpec::posd(1.0 / n as f64);
    let scheme = RelaxScheme::dwj1(1.451, 1.0, 1.29);
    let mg = Multigrid::new(&spec, CycleSpec::new(CycleKind::TwoGrid, 1, 1, Coarsening::Rediscretize), &scheme, n).unwrap();
    let measured = measure_rho_hat(&mg, 60, 7).unwrap().rho_hat;
    let predicted = two_grid_factor(&scheme, &spec, &TwoGridSpec::new(1, 1, Coarsening::Rediscretize, n)).unwrap().factor;
    assert!(measured <= predicted + 1e-6 && measured > predicted - 0.05, "measured {measured:.4} predicted {predicted:.4}");
}
