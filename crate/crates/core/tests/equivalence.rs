//! The analysis problem and its augmented synthesis form have the same
//! solutions. Checked exhaustively on small instances, and through the
//! feasibility map `g -> D g` on larger ones.

use abs_core::model::{
    generate_measurement_matrix, generate_tight_frame, make_instance_with_dims, AnalysisOperator,
    RngSeed,
};
use abs_core::numerics::{Matrix, Vector};
use abs_core::solvers::{oracle_analysis, oracle_synthesis, SolverConfig, SolverKind};
use abs_core::{abs_recover, build_augmented_system, synthesis_recover};
use proptest::prelude::*;

#[test]
fn exhaustive_oracles_agree_on_small_instances() {
    let mut compared = 0;
    for trial in 0..40u64 {
        let seed = RngSeed(trial);
        let op = generate_tight_frame(9, 7, seed.derive(0)).unwrap();
        let l = 4 + (trial % 3) as usize;
        let m = 5 + (trial % 2) as usize;
        let inst = make_instance_with_dims(&op, m, l, seed.derive(1)).unwrap();

        let analysis = oracle_analysis(&op, &inst.m_mat, &inst.y, 0).unwrap();
        let system = build_augmented_system(&op, &inst.m_mat, &inst.y).unwrap();
        let synthesis = oracle_synthesis(&system.a_tilde, &system.y_tilde, op.n_rows()).unwrap();
        if !(analysis.unique && synthesis.unique) {
            continue;
        }
        compared += 1;
        assert_eq!(
            synthesis.sparsity.unwrap(),
            op.n_rows() - analysis.cosparsity.unwrap(),
            "trial {trial}"
        );
        let xa = analysis.x.unwrap();
        let xs = op.dict() * synthesis.gamma.unwrap();
        assert!((&xa - &xs).norm() <= 1e-8 * xa.norm(), "trial {trial}");
    }
    assert!(compared >= 30, "only {compared} unique instances");
}

fn random_operator(n: usize, d: usize, seed: u64) -> AnalysisOperator {
    generate_tight_frame(n, d, RngSeed(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Any `g` solving the augmented system maps to a signal that explains
    /// the measurements, and lies in the range of Omega.
    #[test]
    fn feasible_coefficients_map_to_feasible_signals(
        d in 3usize..20,
        extra in 0usize..8,
        m_frac in 0.2f64..1.0,
        seed in any::<u64>(),
    ) {
        let n = d + extra;
        let m = ((m_frac * d as f64).round() as usize).clamp(1, d);
        let op = random_operator(n, d, seed);
        let mut rng = RngSeed(seed ^ 0xabc).rng();
        let x = Vector::from_fn(d, |_, _| rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng));
        let mm = generate_measurement_matrix(m, d, RngSeed(seed ^ 0xdef)).unwrap();
        let y = &mm * &x;
        let system = build_augmented_system(&op, &mm, &y).unwrap();

        // Omega x is feasible.
        let gamma = op.analyze(&x);
        prop_assert!((&system.a_tilde * &gamma - &system.y_tilde).norm() <= 1e-8 * (1.0 + y.norm()));

        // So is every minimum-norm solution of the augmented system, plus any
        // nullspace direction of it.
        let g = abs_core::numerics::least_squares(&system.a_tilde, &system.y_tilde).unwrap();
        let null = abs_core::numerics::nullspace_basis(&system.a_tilde).unwrap();
        let g = if null.nrows() > 0 { g + null.row(0).transpose() * 0.7 } else { g };
        let xg = op.dict() * &g;
        prop_assert!((&y - &mm * &xg).norm() <= 1e-8 * y.norm().max(1.0));
        prop_assert!((&g - op.omega() * op.dict() * &g).norm() <= 1e-8 * g.norm().max(1.0));
    }
}

#[test]
fn square_operator_reduces_to_plain_synthesis() {
    let op = random_operator(16, 16, 5);
    let inst = make_instance_with_dims(&op, 10, 12, RngSeed(6)).unwrap();
    for cfg in [
        SolverConfig::omp_k(4),
        SolverConfig::omp_eps(),
        SolverConfig::tst(4),
        SolverConfig::bp(),
    ] {
        let via_abs = abs_recover(&op, &inst.m_mat, &inst.y, &cfg).unwrap();
        let direct = synthesis_recover(op.dict(), &inst.m_mat, &inst.y, &cfg).unwrap();
        assert_eq!(via_abs.gamma_hat, direct.gamma_hat, "{}", cfg.kind);
        assert_eq!(via_abs.x_hat, direct.x_hat, "{}", cfg.kind);
        assert_eq!(via_abs.iterations, direct.iterations);
    }
}

#[test]
fn abs_with_synthesis_oracle_matches_analysis_oracle_through_public_api() {
    let op = random_operator(10, 8, 77);
    let inst = make_instance_with_dims(&op, 6, 6, RngSeed(78)).unwrap();
    let report = abs_recover(&op, &inst.m_mat, &inst.y, &SolverConfig::oracle_synthesis(10)).unwrap();
    assert_eq!(report.solver, SolverKind::OracleSynthesis);
    assert!(report.status.is_converged());
    assert!((&report.x_hat - &inst.x).norm() <= 1e-8);
    let analysis = oracle_analysis(&op, &inst.m_mat, &inst.y, 0).unwrap();
    assert!((analysis.x.unwrap() - &report.x_hat).norm() <= 1e-8);
}

#[test]
fn solvers_recover_easy_instance_through_augmented_system() {
    // d = 40, N = 48, m = 30, l = 36: well inside the recoverable region.
    let op = random_operator(48, 40, 9);
    let inst = make_instance_with_dims(&op, 30, 36, RngSeed(10)).unwrap();
    let k = op.n_rows() - inst.l();
    for cfg in [SolverConfig::omp_eps(), SolverConfig::tst(k), SolverConfig::bp()] {
        let report = abs_recover(&op, &inst.m_mat, &inst.y, &cfg).unwrap();
        let err = (&report.x_hat - &inst.x).norm() / inst.x.norm();
        assert!(err < 1e-6, "{} relative error {err}", cfg.kind);
        assert_eq!(report.x_hat, op.dict() * &report.gamma_hat);
    }
    let _: &Matrix = op.dict();
}
