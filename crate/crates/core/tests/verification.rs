//! Cross-module verification: refinement ladders for the manufactured
//! solutions and a Monte Carlo / finite-element agreement check at reduced
//! scale. The refinement ladder itself is the oracle: each level halves `h`
//! and the observed order is read off consecutive errors.

use confine_fp::fem::{LoadSpec, Method};
use confine_fp::potential::{ConfinementModel, DriftKind, PotentialKind};
use confine_fp::sde::{compare, simulate, SdeConfig};
use confine_fp::solver::{convergence_study, solve_fokker_planck, ManufacturedField};

#[test]
fn linear_reference_converges_superquadratically() {
    // 1 + Q1 lies in the P1 space, so the remaining error is the quadrature
    // consistency error of the assembled forms; it decays at order ~4 here
    // and must stay above the second-order floor required of the solver
    let model = ConfinementModel::new(PotentialKind::Fene { ell: 5.0 }, DriftKind::None).unwrap();
    let star = ManufacturedField {
        value: &|q: [f64; 2]| 1.0 + q[0],
        gradient: &|_| [1.0, 0.0],
    };
    let table = convergence_study(&model, &star, &[8, 16, 32]).unwrap();
    let errs: Vec<f64> = table.rows.iter().map(|r| r.error_l2m).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    let order = table.final_order().unwrap();
    assert!(order >= 1.8, "observed order {order}");
}

#[test]
fn bilinear_reference_converges_at_second_order() {
    let model = ConfinementModel::new(
        PotentialKind::Fene { ell: 5.0 },
        DriftKind::Shear {
            de: 1.0,
            gamma_dot: 0.1,
        },
    )
    .unwrap();
    let star = ManufacturedField {
        value: &|q: [f64; 2]| 1.0 + q[0] * q[1],
        gradient: &|q: [f64; 2]| [q[1], q[0]],
    };
    let table = convergence_study(&model, &star, &[8, 16, 32]).unwrap();
    let order = table.final_order().unwrap();
    assert!((1.5..=2.5).contains(&order), "observed order {order}");
    // H1 errors decay too, one order slower
    let h1: Vec<f64> = table.rows.iter().map(|r| r.error_h1m).collect();
    assert!(h1[0] > h1[1] && h1[1] > h1[2], "{h1:?}");
}

#[test]
fn monte_carlo_and_fem_agree_under_shear_at_reduced_scale() {
    let mut config = SdeConfig::new(10.0, 0.2, 5.0);
    config.n_paths = 30_000;
    config.burn_in_steps = 4000;
    config.sample_steps = 1050;
    config.thinning = 15;
    config.grid = 32;
    let hist = simulate(&config).unwrap();
    let model = ConfinementModel::new(
        PotentialKind::Fene { ell: 5.0 },
        DriftKind::Shear {
            de: 10.0,
            gamma_dot: 0.2,
        },
    )
    .unwrap();
    let sol = solve_fokker_planck(&model, 24, 1.0, &LoadSpec::Zero, Method::Lagrange, false)
        .unwrap();
    let report = compare(&hist, &sol).unwrap();
    assert!(report.l1_distance <= 0.08, "{report:?}");
    assert!(report.moment_gaps.q12 <= 0.15, "{report:?}");
}
