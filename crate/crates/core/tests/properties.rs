//! Property tests for the algebraic invariants: linearity of quadrature,
//! homogeneity of the weighted norms, CSR consistency against a dense
//! reference, and linearity of the constrained solver.

use confine_fp::analysis::weighted_norms;
use confine_fp::fem::{assemble, solve_constrained, LoadSpec, Method};
use confine_fp::geometry::{build_disk_mesh, integrate, QuadratureRule};
use confine_fp::potential::{ConfinementModel, DriftKind, PotentialKind};
use confine_fp::sde::Histogram2D;
use confine_fp::sparse::SparseMatrix;
use proptest::prelude::*;

fn small_coeff() -> impl Strategy<Value = f64> {
    prop_oneof![(-8.0f64..8.0).prop_filter("nonzero", |v| v.abs() > 1e-3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integrate_is_linear_in_the_integrand(a in small_coeff(), b in small_coeff()) {
        let mesh = build_disk_mesh(1.0, 6).unwrap();
        let rule = QuadratureRule::default();
        let f = |p: [f64; 2]| (1.3 * p[0]).sin() + p[1];
        let g = |p: [f64; 2]| (p[0] * p[1]).cos();
        let lhs = integrate(&mesh, &rule, |p| a * f(p) + b * g(p)).unwrap();
        let rhs = a * integrate(&mesh, &rule, f).unwrap() + b * integrate(&mesh, &rule, g).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (a.abs() + b.abs()) * scale);
    }

    #[test]
    fn weighted_norms_are_homogeneous(scale in small_coeff()) {
        let mesh = build_disk_mesh(5.0, 6).unwrap();
        let rule = QuadratureRule::default();
        let mut model =
            ConfinementModel::new(PotentialKind::Fene { ell: 5.0 }, DriftKind::None).unwrap();
        model.normalize(&mesh, &rule).unwrap();
        let u: Vec<f64> = mesh.vertices().iter().map(|v| 0.5 + v[0] - 0.3 * v[1]).collect();
        let scaled: Vec<f64> = u.iter().map(|v| scale * v).collect();
        let n1 = weighted_norms(&mesh, &model, &u).unwrap();
        let n2 = weighted_norms(&mesh, &model, &scaled).unwrap();
        let s = scale.abs();
        prop_assert!((n2.l2m - s * n1.l2m).abs() <= 1e-10 * s * n1.l2m.max(1.0));
        prop_assert!(
            (n2.hardy_functional - scale * scale * n1.hardy_functional).abs()
                <= 1e-9 * scale * scale * n1.hardy_functional.max(1.0)
        );
    }

    #[test]
    fn csr_matches_a_dense_accumulation(
        triplets in prop::collection::vec((0usize..12, 0usize..12, -3.0f64..3.0), 1..60),
        x in prop::collection::vec(-2.0f64..2.0, 12),
    ) {
        let a = SparseMatrix::from_triplets(12, 12, triplets.clone()).unwrap();
        let mut dense = vec![vec![0.0f64; 12]; 12];
        for &(i, j, v) in &triplets {
            dense[i][j] += v;
        }
        for i in 0..12 {
            for j in 0..12 {
                prop_assert!((a.get(i, j) - dense[i][j]).abs() <= 1e-12);
            }
        }
        let y = a.matvec(&x).unwrap();
        for i in 0..12 {
            let want: f64 = (0..12).map(|j| dense[i][j] * x[j]).sum();
            prop_assert!((y[i] - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn histogram_density_is_normalized(counts in prop::collection::vec(0u64..50, 256)) {
        prop_assume!(counts.iter().enumerate().any(|(i, &c)| {
            // some mass inside the disk: cell centers of a 16x16 grid
            let (ix, iy) = (i % 16, i / 16);
            let cell = 2.0 / 16.0;
            let x = -1.0 + (ix as f64 + 0.5) * cell;
            let y = -1.0 + (iy as f64 + 0.5) * cell;
            c > 0 && x.hypot(y) < 1.0
        }));
        let hist = Histogram2D::from_counts(16, 1.0, counts).unwrap();
        let total: f64 = hist.density().iter().map(|d| d * hist.cell_area()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn constrained_solve_is_linear(scale in 0.25f64..4.0, rho in -2.0f64..2.0) {
        let mesh = build_disk_mesh(5.0, 5).unwrap();
        let rule = QuadratureRule::default();
        let mut model =
            ConfinementModel::new(PotentialKind::Fene { ell: 5.0 }, DriftKind::None).unwrap();
        model.normalize(&mesh, &rule).unwrap();
        let b: Vec<f64> = (0..mesh.n_vertices()).map(|i| ((i * 7 % 13) as f64 - 6.0) / 13.0).collect();
        let b_scaled: Vec<f64> = b.iter().map(|v| scale * v).collect();
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Raw(b)).unwrap();
        let sys_scaled = assemble(&mesh, &model, &rule, &LoadSpec::Raw(b_scaled)).unwrap();
        let s1 = solve_constrained(&sys, rho, Method::Lagrange).unwrap();
        let s2 = solve_constrained(&sys_scaled, scale * rho, Method::Lagrange).unwrap();
        let sup = s1.u.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for (a, b) in s1.u.iter().zip(&s2.u) {
            prop_assert!((scale * a - b).abs() <= 1e-9 * scale * sup);
        }
    }
}
