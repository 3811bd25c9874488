//! P1 finite-element assembly of the Maxwellian-weighted bilinear forms and
//! the mean-constrained solve.
//!
//! The discrete unknown is `u = φ/M` at the vertices. In that variable the
//! weak operator needs no boundary condition of any kind: the weight `M`
//! vanishing on the boundary circle enforces `φ = 0` there on its own, and
//! well-posedness comes from prescribing the weighted mean `∫φ = mᵀu = ρ`.
//!
//! Assembled blocks, all integrated with the same per-triangle rule:
//!
//! - `K_ij = ∫ M ∇φ_j·∇φ_i` (weighted stiffness; `K·1 = 0`),
//! - `D_ij = ∫ M φ_j κ·∇φ_i` (drift),
//! - `B_ij = ∫ M φ_j φ_i` (weighted mass),
//! - `m_i  = ∫ M φ_i` (mean functional),
//! - `b_i  = ∫ f M φ_i` (load, for density-type `f`).

use crate::error::{Error, Result};
use crate::geometry::{quad_point, Point, QuadratureRule, TriMesh};
use crate::potential::ConfinementModel;
use crate::sparse::{SparseLu, SparseMatrix};

/// Right-hand-side specification.
pub enum LoadSpec {
    /// No source term.
    Zero,
    /// Density `f(Q)`; assembled as `b_i = ∫ f M φ_i`.
    Density(Box<dyn Fn(Point) -> f64 + Sync>),
    /// Nodal density values, P1-interpolated before weighting.
    NodalDensity(Vec<f64>),
    /// Raw dual vector, used verbatim.
    Raw(Vec<f64>),
}

/// Constraint enforcement for the mean value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Exact saddle-point system with a Lagrange multiplier.
    Lagrange,
    /// Quadratic penalty `(1/ε)(mᵀu - ρ)²` added to the system.
    Penalization { epsilon: f64 },
}

/// Assembled sparse blocks of the weighted weak form.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// Weighted stiffness `K`.
    pub stiffness: SparseMatrix,
    /// Drift matrix `D`.
    pub drift: SparseMatrix,
    /// Weighted mass `B`.
    pub mass: SparseMatrix,
    /// Mean functional `m`.
    pub mean: Vec<f64>,
    /// Load vector `b`.
    pub load: Vec<f64>,
    pub n_dof: usize,
    /// Maxwellian at the mesh vertices, for reconstructing `φ = M·u`.
    pub maxwellian_at_vertices: Vec<f64>,
    /// `max_T |κ|·h_T/2`, the element Péclet guard value.
    pub peclet_max: f64,
}

impl AssembledSystem {
    /// `K - D`, the full discrete operator.
    pub fn operator(&self) -> Result<SparseMatrix> {
        self.stiffness.add_scaled(&self.drift, -1.0)
    }
}

/// Assembles all blocks with the model's own drift field.
pub fn assemble(
    mesh: &TriMesh,
    model: &ConfinementModel,
    rule: &QuadratureRule,
    load: &LoadSpec,
) -> Result<AssembledSystem> {
    assemble_with_kappa(mesh, model, rule, load, &|q| model.kappa(q))
}

/// Assembly with an explicit drift field `κ`, overriding the model's drift.
/// This is the seam used to study perturbed drifts without touching the
/// model itself; `assemble` is the common entry point.
pub fn assemble_with_kappa(
    mesh: &TriMesh,
    model: &ConfinementModel,
    rule: &QuadratureRule,
    load: &LoadSpec,
    kappa: &(dyn Fn(Point) -> Point + Sync),
) -> Result<AssembledSystem> {
    let n = mesh.n_vertices();
    match load {
        LoadSpec::NodalDensity(f) if f.len() != n => {
            return Err(Error::DimensionMismatch(format!(
                "nodal density has {} entries for {} vertices",
                f.len(),
                n
            )));
        }
        LoadSpec::Raw(b) if b.len() != n => {
            return Err(Error::DimensionMismatch(format!(
                "raw load has {} entries for {} vertices",
                b.len(),
                n
            )));
        }
        _ => {}
    }

    let nt = mesh.n_triangles();
    let mut k_trip = Vec::with_capacity(9 * nt);
    let mut d_trip = Vec::new();
    let mut b_trip = Vec::with_capacity(9 * nt);
    let mut mean = vec![0.0; n];
    let mut b_vec = vec![0.0; n];
    let mut peclet_max = 0.0f64;

    let drift_is_zero = {
        // probe a few points so the drift block stays empty for κ ≡ 0
        let probe = [[0.0, 0.0], [0.3 * mesh.radius(), -0.2 * mesh.radius()]];
        probe.iter().all(|&q| kappa(q) == [0.0, 0.0])
    };

    for t in 0..nt {
        let [i0, i1, i2] = mesh.triangles()[t];
        let idx = [i0, i1, i2];
        let (p0, p1, p2) = (mesh.vertex(i0), mesh.vertex(i1), mesh.vertex(i2));
        let area = mesh.signed_area(t);
        let inv = 1.0 / (2.0 * area);
        let g0 = [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv];
        let g1 = [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv];
        // third gradient closes the partition of unity exactly
        let g2 = [-g0[0] - g1[0], -g0[1] - g1[1]];
        let grads = [g0, g1, g2];
        let mut kappa_sup = 0.0f64;

        for (bary, &w) in rule.points().iter().zip(rule.weights()) {
            let x = quad_point(mesh, t, *bary);
            let m_val = model.maxwellian(x).map_err(|e| Error::Evaluation {
                triangle: t,
                reason: e.to_string(),
            })?;
            if !m_val.is_finite() {
                return Err(Error::Evaluation {
                    triangle: t,
                    reason: format!("Maxwellian is not finite at ({}, {})", x[0], x[1]),
                });
            }
            let c = w * area * m_val;
            for a in 0..3 {
                for b in 0..3 {
                    let kv = c * (grads[b][0] * grads[a][0] + grads[b][1] * grads[a][1]);
                    k_trip.push((idx[a], idx[b], kv));
                    b_trip.push((idx[a], idx[b], c * bary[a] * bary[b]));
                }
                mean[idx[a]] += c * bary[a];
            }
            if !drift_is_zero {
                let kap = kappa(x);
                kappa_sup = kappa_sup.max(kap[0].hypot(kap[1]));
                for a in 0..3 {
                    let conv = kap[0] * grads[a][0] + kap[1] * grads[a][1];
                    for b in 0..3 {
                        d_trip.push((idx[a], idx[b], c * bary[b] * conv));
                    }
                }
            }
            match load {
                LoadSpec::Density(f) => {
                    let fv = f(x);
                    if fv.is_nan() {
                        return Err(Error::Evaluation {
                            triangle: t,
                            reason: "load density returned NaN".to_string(),
                        });
                    }
                    for a in 0..3 {
                        b_vec[idx[a]] += c * fv * bary[a];
                    }
                }
                LoadSpec::NodalDensity(f) => {
                    let fv = bary[0] * f[i0] + bary[1] * f[i1] + bary[2] * f[i2];
                    for a in 0..3 {
                        b_vec[idx[a]] += c * fv * bary[a];
                    }
                }
                LoadSpec::Zero | LoadSpec::Raw(_) => {}
            }
        }
        peclet_max = peclet_max.max(kappa_sup * mesh.triangle_diameter(t) / 2.0);
    }

    if let LoadSpec::Raw(b) = load {
        b_vec.copy_from_slice(b);
    }

    let maxwellian_at_vertices = mesh
        .vertices()
        .iter()
        .map(|&v| model.maxwellian(v))
        .collect::<Result<Vec<f64>>>()?;

    Ok(AssembledSystem {
        stiffness: SparseMatrix::from_triplets(n, n, k_trip)?,
        drift: SparseMatrix::from_triplets(n, n, d_trip)?,
        mass: SparseMatrix::from_triplets(n, n, b_trip)?,
        mean,
        load: b_vec,
        n_dof: n,
        maxwellian_at_vertices,
        peclet_max,
    })
}

/// Result of a mean-constrained solve in the `u = φ/M` variable.
#[derive(Debug, Clone)]
pub struct ConstrainedSolve {
    pub u: Vec<f64>,
    /// `φ_i = M(v_i)·u_i`.
    pub phi: Vec<f64>,
    /// Reported Lagrange multiplier; zero for penalization by convention.
    pub lambda: f64,
    /// Multiplier actually entering the optimality system (equals `lambda`
    /// for the Lagrange method, `(mᵀu - ρ)/ε` for penalization).
    pub effective_multiplier: f64,
    /// `‖(K-D)u + μm - b‖₂` with the effective multiplier `μ`.
    pub residual_norm: f64,
    /// `|mᵀu - ρ|`.
    pub constraint_defect: f64,
    /// Set when a penalized solve misses the constraint by more than
    /// `1e-6·(1+|ρ|)`; never set for the Lagrange method.
    pub defect_flagged: bool,
    pub method: Method,
}

/// Solves the mean-constrained system `(K-D)u + μm = b`, `mᵀu = ρ` exactly
/// (Lagrange) or with a quadratic mean penalty.
///
/// Both methods factor one bordered sparse system `[[K-D, m], [mᵀ, -ε]]`
/// with `ε = 0` for the Lagrange method; for penalization this is the
/// algebraic equivalent of `(K-D + mmᵀ/ε)u = b + (ρ/ε)m` without forming
/// the dense rank-one term.
pub fn solve_constrained(sys: &AssembledSystem, rho: f64, method: Method) -> Result<ConstrainedSolve> {
    if !rho.is_finite() {
        return Err(Error::invalid(format!("rho must be finite, got {rho}")));
    }
    let corner = match method {
        Method::Lagrange => 0.0,
        Method::Penalization { epsilon } => {
            if !(epsilon > 0.0 && epsilon <= 1e-2) {
                return Err(Error::invalid(format!(
                    "penalization parameter must lie in (0, 1e-2], got {epsilon}"
                )));
            }
            -epsilon
        }
    };

    let n = sys.n_dof;
    let op = sys.operator()?;
    let mut triplets: Vec<(usize, usize, f64)> = op.iter().collect();
    for (i, &mi) in sys.mean.iter().enumerate() {
        if mi != 0.0 {
            triplets.push((i, n, mi));
            triplets.push((n, i, mi));
        }
    }
    if corner != 0.0 {
        triplets.push((n, n, corner));
    }
    let bordered = SparseMatrix::from_triplets(n + 1, n + 1, triplets)?;
    let lu = SparseLu::factorize(&bordered)?;

    let mut rhs = Vec::with_capacity(n + 1);
    rhs.extend_from_slice(&sys.load);
    rhs.push(rho);
    let x = lu.solve_refined(&bordered, &rhs, 2)?;

    let u = x[..n].to_vec();
    let mu = x[n];
    let phi: Vec<f64> = sys
        .maxwellian_at_vertices
        .iter()
        .zip(&u)
        .map(|(&m, &ui)| m * ui)
        .collect();

    let opu = op.matvec(&u)?;
    let residual_norm = opu
        .iter()
        .zip(&sys.mean)
        .zip(&sys.load)
        .map(|((&a, &mi), &bi)| {
            let r = a + mu * mi - bi;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    let mean_value: f64 = sys.mean.iter().zip(&u).map(|(&mi, &ui)| mi * ui).sum();
    let constraint_defect = (mean_value - rho).abs();

    let (lambda, defect_flagged) = match method {
        Method::Lagrange => (mu, false),
        Method::Penalization { .. } => (0.0, constraint_defect > 1e-6 * (1.0 + rho.abs())),
    };

    Ok(ConstrainedSolve {
        u,
        phi,
        lambda,
        effective_multiplier: mu,
        residual_norm,
        constraint_defect,
        defect_flagged,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;
    use crate::potential::{DriftKind, PotentialKind};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn normalized_fene(ell: f64, drift: DriftKind, mesh: &TriMesh, rule: &QuadratureRule) -> ConfinementModel {
        let mut model = ConfinementModel::new(PotentialKind::Fene { ell }, drift).unwrap();
        model.normalize(mesh, rule).unwrap();
        model
    }

    #[test]
    fn zero_drift_gives_empty_drift_block() {
        let mesh = build_disk_mesh(5.0, 8).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(5.0, DriftKind::None, &mesh, &rule);
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();
        assert_eq!(sys.drift.nnz(), 0);
        assert_eq!(sys.peclet_max, 0.0);
    }

    #[test]
    fn mean_vector_sums_to_unit_mass() {
        let mesh = build_disk_mesh(5.0, 12).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(5.0, DriftKind::None, &mesh, &rule);
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();
        let total: f64 = sys.mean.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12, "sum m = {total}");
    }

    #[test]
    fn unweighted_stiffness_matches_cotangent_formula() {
        // M ≡ 1: un-normalized quadratic potential with zero curvature
        let mesh = build_disk_mesh(1.0, 6).unwrap();
        let rule = QuadratureRule::default();
        let model =
            ConfinementModel::unnormalized(PotentialKind::Quadratic { gamma0: 0.0 }, DriftKind::None)
                .unwrap();
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();

        // textbook P1 stiffness: K_ab = area·∇φ_a·∇φ_b per triangle
        let n = mesh.n_vertices();
        let mut triplets = Vec::new();
        for t in 0..mesh.n_triangles() {
            let [i0, i1, i2] = mesh.triangles()[t];
            let (p0, p1, p2) = (mesh.vertex(i0), mesh.vertex(i1), mesh.vertex(i2));
            let area = mesh.signed_area(t);
            let inv = 1.0 / (2.0 * area);
            let g = [
                [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
                [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv],
                [(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv],
            ];
            let idx = [i0, i1, i2];
            for a in 0..3 {
                for b in 0..3 {
                    triplets.push((
                        idx[a],
                        idx[b],
                        area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]),
                    ));
                }
            }
        }
        let reference = SparseMatrix::from_triplets(n, n, triplets).unwrap();
        let scale = reference.max_abs();
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (sys.stiffness.get(i, j) - reference.get(i, j)).abs() <= 1e-12 * scale,
                    "K({i},{j})"
                );
            }
        }
    }

    #[test]
    fn assembled_system_invariants() {
        let mesh = build_disk_mesh(5.0, 10).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(
            5.0,
            DriftKind::Shear {
                de: 10.0,
                gamma_dot: 0.2,
            },
            &mesh,
            &rule,
        );
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();
        let n = sys.n_dof;

        // K symmetric
        let kt = sys.stiffness.transpose();
        let diff = sys.stiffness.add_scaled(&kt, -1.0).unwrap();
        assert!(diff.max_abs() <= 1e-12 * sys.stiffness.max_abs());

        // K·1 = 0
        let ones = vec![1.0; n];
        let k1 = sys.stiffness.matvec(&ones).unwrap();
        let kmax = sys.stiffness.max_abs();
        assert!(k1.iter().all(|v| v.abs() <= 1e-12 * kmax));

        // K positive semidefinite on random vectors
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let kx = sys.stiffness.matvec(&x).unwrap();
            let quad: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
            assert!(quad >= -1e-10 * kmax);
            let bx = sys.mass.matvec(&x).unwrap();
            let mass_quad: f64 = x.iter().zip(&bx).map(|(a, b)| a * b).sum();
            assert!(mass_quad > 0.0);
        }

        // B·1 = m componentwise
        let b1 = sys.mass.matvec(&ones).unwrap();
        for (bi, mi) in b1.iter().zip(&sys.mean) {
            assert!((bi - mi).abs() <= 1e-12);
        }

        // 1ᵀD ≈ 0 (partition of unity in the gradients)
        let col_sums = sys.drift.column_sums();
        let dmax = sys.drift.max_abs();
        for s in col_sums {
            assert!(s.abs() <= 1e-12 * dmax.max(1.0) * 10.0, "column sum {s}");
        }

        assert!(sys.peclet_max > 0.0);
    }

    #[test]
    fn maxwellian_is_exact_discrete_solution() {
        let mesh = build_disk_mesh(5.0, 16).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(5.0, DriftKind::None, &mesh, &rule);
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();
        let sol = solve_constrained(&sys, 1.0, Method::Lagrange).unwrap();
        for &ui in &sol.u {
            assert!((ui - 1.0).abs() <= 1e-9, "u = {ui}");
        }
        assert!(sol.lambda.abs() <= 1e-12);
        assert!(sol.residual_norm <= 1e-12);
        assert!(sol.constraint_defect <= 1e-12);
        // boundary vertices carry φ = 0 because M vanishes there
        for i in 0..mesh.n_vertices() {
            if mesh.is_boundary(i) {
                assert_eq!(sol.phi[i], 0.0);
            }
        }
    }

    #[test]
    fn penalization_approximates_lagrange_on_the_exact_case() {
        let mesh = build_disk_mesh(5.0, 12).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(5.0, DriftKind::None, &mesh, &rule);
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();
        let sol = solve_constrained(&sys, 1.0, Method::Penalization { epsilon: 1e-8 }).unwrap();
        for &ui in &sol.u {
            assert!((ui - 1.0).abs() <= 1e-6, "u = {ui}");
        }
        assert_eq!(sol.lambda, 0.0);
        assert!(!sol.defect_flagged);
    }

    #[test]
    fn solution_scales_linearly_with_the_load() {
        let mesh = build_disk_mesh(5.0, 8).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(5.0, DriftKind::None, &mesh, &rule);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b: Vec<f64> = (0..mesh.n_vertices()).map(|_| rng.random::<f64>() - 0.5).collect();
        let b2: Vec<f64> = b.iter().map(|v| 2.0 * v).collect();
        let sys1 = assemble(&mesh, &model, &rule, &LoadSpec::Raw(b)).unwrap();
        let sys2 = assemble(&mesh, &model, &rule, &LoadSpec::Raw(b2)).unwrap();
        let s1 = solve_constrained(&sys1, 0.0, Method::Lagrange).unwrap();
        let s2 = solve_constrained(&sys2, 0.0, Method::Lagrange).unwrap();
        let scale = s1.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in s1.u.iter().zip(&s2.u) {
            assert!((2.0 * a - b).abs() <= 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn penalization_converges_monotonically_to_lagrange() {
        let mesh = build_disk_mesh(5.0, 10).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(5.0, DriftKind::None, &mesh, &rule);
        // density load with a nonzero multiplier
        let load = LoadSpec::Density(Box::new(|q: [f64; 2]| 1.0 + q[0] + 0.5 * q[1] * q[1]));
        let sys = assemble(&mesh, &model, &rule, &load).unwrap();
        let exact = solve_constrained(&sys, 1.0, Method::Lagrange).unwrap();
        assert!(exact.lambda.abs() > 1e-6, "test needs a nonzero multiplier");
        // saddle consistency in its normalized form
        let b_norm: f64 = sys.load.iter().map(|v| v * v).sum::<f64>().sqrt();
        let m_norm: f64 = sys.mean.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(
            exact.residual_norm <= 1e-10 * (b_norm + m_norm * exact.lambda.abs() + 1.0),
            "residual {}",
            exact.residual_norm
        );
        assert!(exact.constraint_defect <= 1e-10);
        let sup = |u: &[f64]| -> f64 {
            u.iter()
                .zip(&exact.u)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        let errs: Vec<f64> = [1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&epsilon| {
                sup(&solve_constrained(&sys, 1.0, Method::Penalization { epsilon })
                    .unwrap()
                    .u)
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "errors {errs:?}");
    }

    #[test]
    fn corotational_residual_shrinks_under_refinement() {
        let rule = QuadratureRule::default();
        let drift = DriftKind::CoRotational {
            de: 10.0,
            gamma_dot: 1.0,
        };
        let mut norms = Vec::new();
        for rings in [12usize, 24] {
            let mesh = build_disk_mesh(5.0, rings).unwrap();
            let model = normalized_fene(5.0, drift, &mesh, &rule);
            let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();
            let ones = vec![1.0; sys.n_dof];
            let r = sys.operator().unwrap().matvec(&ones).unwrap();
            norms.push(r.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        assert!(norms[1] / norms[0] <= 0.5, "norms {norms:?}");
    }

    #[test]
    fn solve_is_permutation_equivariant() {
        let rule = QuadratureRule::default();
        let mesh = build_disk_mesh(5.0, 6).unwrap();
        let n = mesh.n_vertices();
        // deterministic shuffle of vertex labels
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let mut inv = vec![0usize; n];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let vertices_p: Vec<[f64; 2]> = (0..n).map(|newi| mesh.vertex(inv[newi])).collect();
        let triangles_p: Vec<[usize; 3]> = mesh
            .triangles()
            .iter()
            .map(|t| t.map(|i| perm[i]))
            .collect();
        let mesh_p = TriMesh::new(vertices_p, triangles_p, 5.0).unwrap();

        let model = normalized_fene(5.0, DriftKind::None, &mesh, &rule);
        let model_p = normalized_fene(5.0, DriftKind::None, &mesh_p, &rule);

        let mut rng2 = ChaCha8Rng::seed_from_u64(17);
        let b: Vec<f64> = (0..n).map(|_| rng2.random::<f64>() - 0.5).collect();
        let b_p: Vec<f64> = (0..n).map(|newi| b[inv[newi]]).collect();

        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Raw(b)).unwrap();
        let sys_p = assemble(&mesh_p, &model_p, &rule, &LoadSpec::Raw(b_p)).unwrap();
        let s = solve_constrained(&sys, 1.0, Method::Lagrange).unwrap();
        let s_p = solve_constrained(&sys_p, 1.0, Method::Lagrange).unwrap();
        let scale = s.u.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for old in 0..n {
            assert!(
                (s.u[old] - s_p.u[perm[old]]).abs() <= 1e-9 * scale,
                "vertex {old}"
            );
        }
    }

    #[test]
    fn penalization_epsilon_is_validated() {
        let mesh = build_disk_mesh(2.0, 4).unwrap();
        let rule = QuadratureRule::default();
        let model = normalized_fene(2.0, DriftKind::None, &mesh, &rule);
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero).unwrap();
        assert!(solve_constrained(&sys, 1.0, Method::Penalization { epsilon: 0.0 }).is_err());
        assert!(solve_constrained(&sys, 1.0, Method::Penalization { epsilon: 0.5 }).is_err());
    }
}
