//! Numerical verification of the weighted-space structure on the discrete
//! operator: weighted norms, the boundary-weighted Hardy functional, the
//! kernel of the self-adjoint operator, and its Poincaré spectral gap.
//!
//! Constants measured here are empirical: the continuous theory only
//! guarantees their existence, so the audits check finiteness and stability
//! under refinement rather than reference values.

use crate::error::{Error, Result};
use crate::fem::AssembledSystem;
use crate::geometry::{quad_point, QuadratureRule, TriMesh};
use crate::potential::ConfinementModel;
use crate::sparse::{SparseLu, SparseMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Weighted norms of a nodal field `u = φ/M`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormReport {
    /// `‖φ‖_{L²_M} = (∫ M u²)^{1/2}`
    pub l2m: f64,
    /// `|φ|_{H¹_{M,0}} = (∫ M |∇u|²)^{1/2}`
    pub h1m0_seminorm: f64,
    /// `∫ (M/δ_Γ²) u²` with the analytic boundary distance.
    pub hardy_functional: f64,
    /// `∫ M u = ∫ φ`
    pub mean: f64,
}

/// Weighted norms with the assembly quadrature; the Hardy weight uses the
/// analytic distance to the boundary circle, not a mesh-derived one.
pub fn weighted_norms(
    mesh: &TriMesh,
    model: &ConfinementModel,
    u: &[f64],
) -> Result<NormReport> {
    if u.len() != mesh.n_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "nodal field has {} entries for {} vertices",
            u.len(),
            mesh.n_vertices()
        )));
    }
    let rule = QuadratureRule::default();
    let radius = mesh.radius();
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    let mut hardy = 0.0;
    let mut mean = 0.0;
    for t in 0..mesh.n_triangles() {
        let [i0, i1, i2] = mesh.triangles()[t];
        let (p0, p1, p2) = (mesh.vertex(i0), mesh.vertex(i1), mesh.vertex(i2));
        let area = mesh.signed_area(t);
        let inv = 1.0 / (2.0 * area);
        let g0 = [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv];
        let g1 = [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv];
        let g2 = [-g0[0] - g1[0], -g0[1] - g1[1]];
        let grad = [
            u[i0] * g0[0] + u[i1] * g1[0] + u[i2] * g2[0],
            u[i0] * g0[1] + u[i1] * g1[1] + u[i2] * g2[1],
        ];
        let grad_sq = grad[0] * grad[0] + grad[1] * grad[1];
        for (bary, &w) in rule.points().iter().zip(rule.weights()) {
            let x = quad_point(mesh, t, *bary);
            let m_val = model.maxwellian(x).map_err(|e| Error::Evaluation {
                triangle: t,
                reason: e.to_string(),
            })?;
            let c = w * area * m_val;
            let u_val = bary[0] * u[i0] + bary[1] * u[i1] + bary[2] * u[i2];
            let delta = radius - x[0].hypot(x[1]);
            l2 += c * u_val * u_val;
            h1 += c * grad_sq;
            hardy += c * u_val * u_val / (delta * delta);
            mean += c * u_val;
        }
    }
    Ok(NormReport {
        l2m: l2.sqrt(),
        h1m0_seminorm: h1.sqrt(),
        hardy_functional: hardy,
        mean,
    })
}

/// Result of a Hardy-functional audit over a family of fields.
#[derive(Debug, Clone, Serialize)]
pub struct HardyAudit {
    /// `max_i hardy_i / (l2m_i² + h1m0_i²)` over the usable family.
    pub worst_ratio: f64,
    /// Per-field ratios; `None` marks zero-norm members that were skipped.
    pub ratios: Vec<Option<f64>>,
    pub skipped: usize,
}

/// Measures the worst ratio of the Hardy functional against the full
/// weighted `H¹` norm over a family of nodal fields.
pub fn hardy_audit(
    mesh: &TriMesh,
    model: &ConfinementModel,
    family: &[Vec<f64>],
) -> Result<HardyAudit> {
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::with_capacity(family.len());
    let mut skipped = 0;
    for u in family {
        let norms = weighted_norms(mesh, model, u)?;
        let denom = norms.l2m * norms.l2m + norms.h1m0_seminorm * norms.h1m0_seminorm;
        if denom == 0.0 {
            ratios.push(None);
            skipped += 1;
            continue;
        }
        let ratio = norms.hardy_functional / denom;
        worst = worst.max(ratio);
        ratios.push(Some(ratio));
    }
    if ratios.iter().all(Option::is_none) {
        return Err(Error::invalid("hardy audit family has no nonzero member"));
    }
    Ok(HardyAudit {
        worst_ratio: worst,
        ratios,
        skipped,
    })
}

/// The default audit family: low-order polynomial modes plus seeded smooth
/// bumps (polynomial × Gaussian), all as nodal interpolants.
pub fn default_hardy_family(mesh: &TriMesh, seed: u64) -> Vec<Vec<f64>> {
    let radius = mesh.radius();
    let polys: Vec<Box<dyn Fn([f64; 2]) -> f64>> = vec![
        Box::new(|_| 1.0),
        Box::new(|q| q[0]),
        Box::new(|q| q[1]),
        Box::new(|q| q[0] * q[1]),
        Box::new(|q| q[0] * q[0] - q[1] * q[1]),
    ];
    let mut family: Vec<Vec<f64>> = polys
        .iter()
        .map(|f| mesh.vertices().iter().map(|&v| f(v)).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..3 {
        let cr = 0.6 * radius * rng.random::<f64>();
        let ca = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let center = [cr * ca.cos(), cr * ca.sin()];
        let width = radius * (0.2 + 0.3 * rng.random::<f64>());
        let coeffs = [
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        ];
        family.push(
            mesh.vertices()
                .iter()
                .map(|&v| {
                    let dx = v[0] - center[0];
                    let dy = v[1] - center[1];
                    (coeffs[0] + coeffs[1] * v[0] + coeffs[2] * v[1])
                        * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
                })
                .collect(),
        );
    }
    family
}

/// Two smallest eigenpairs of `K x = λ B x` and the kernel/gap verdicts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralReport {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Relative spread `(max v₁ - min v₁)/max|v₁|` of the first eigenvector.
    pub v1_spread: f64,
    /// The curvature constant the gap is compared against.
    pub gamma_estimate: f64,
    /// `‖Kv - λBv‖₂ / ‖Bv‖₂` for the two pairs.
    pub residuals: [f64; 2],
    /// `λ₁ ≤ 1e-8` with a constant eigenvector (spread ≤ 1e-6).
    pub kernel_ok: bool,
    /// `λ₂ ≥ 0.95·γ_estimate`.
    pub gap_ok: bool,
}

// accepted residual matches the report invariant; iterations push further
// down to the target until they stagnate, because a loosely converged first
// eigenvector poisons the deflated second pass through its kernel component
const EIGEN_RESIDUAL_ACCEPT: f64 = 1e-8;
const EIGEN_RESIDUAL_TARGET: f64 = 1e-12;
const EIGEN_MAX_ITERATIONS: usize = 500;
const EIGEN_STALL_ITERATIONS: usize = 30;

/// Computes the two smallest eigenpairs of the self-adjoint pencil
/// `K x = λ B x` by shift-inverted inverse iteration, deflating the first
/// eigenvector in the `B` inner product to reach the second.
///
/// Requires a drift-free assembly (the pencil must be symmetric).
pub fn kernel_and_gap(sys: &AssembledSystem, gamma_estimate: f64) -> Result<SpectralReport> {
    if sys.drift.nnz() != 0 {
        return Err(Error::invalid(
            "kernel/gap audit requires a drift-free (self-adjoint) assembly",
        ));
    }
    if !(gamma_estimate > 0.0) || !gamma_estimate.is_finite() {
        return Err(Error::invalid(format!(
            "gamma estimate must be positive, got {gamma_estimate}"
        )));
    }
    let n = sys.n_dof;
    let shift = -0.2 * gamma_estimate;
    let shifted = sys.stiffness.add_scaled(&sys.mass, -shift)?;
    let lu = SparseLu::factorize(&shifted)?;

    let b_dot = |x: &[f64], y: &[f64]| -> Result<f64> {
        let by = sys.mass.matvec(y)?;
        Ok(x.iter().zip(&by).map(|(a, b)| a * b).sum())
    };

    let eigen = |deflate: Option<&Vec<f64>>| -> Result<(f64, Vec<f64>, f64)> {
        let mut x: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).sin() + 1.0).collect();
        let mut history = Vec::new();
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        let mut stale = 0usize;
        for _ in 0..EIGEN_MAX_ITERATIONS {
            if let Some(v) = deflate {
                let proj = b_dot(&x, v)? / b_dot(v, v)?;
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= proj * vi;
                }
            }
            let bx = sys.mass.matvec(&x)?;
            let mut y = lu.solve(&bx)?;
            if let Some(v) = deflate {
                let proj = b_dot(&y, v)? / b_dot(v, v)?;
                for (yi, vi) in y.iter_mut().zip(v) {
                    *yi -= proj * vi;
                }
            }
            let norm = b_dot(&y, &y)?.sqrt();
            if norm == 0.0 {
                return Err(Error::SpectralFailure { residuals: history });
            }
            for yi in &mut y {
                *yi /= norm;
            }
            x = y;
            // Rayleigh quotient and residual
            let kx = sys.stiffness.matvec(&x)?;
            let bx = sys.mass.matvec(&x)?;
            let lambda: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
            let bnorm: f64 = bx.iter().map(|v| v * v).sum::<f64>().sqrt();
            let res: f64 = kx
                .iter()
                .zip(&bx)
                .map(|(k, b)| (k - lambda * b) * (k - lambda * b))
                .sum::<f64>()
                .sqrt();
            let rel = res / bnorm;
            history.push(rel);
            match &best {
                Some((r, _, _)) if rel >= 0.9 * r => stale += 1,
                _ => {
                    best = Some((rel, x.clone(), lambda));
                    stale = 0;
                }
            }
            if rel <= EIGEN_RESIDUAL_TARGET || stale >= EIGEN_STALL_ITERATIONS {
                break;
            }
        }
        match best {
            Some((rel, v, lambda)) if rel <= EIGEN_RESIDUAL_ACCEPT => Ok((lambda, v, rel)),
            _ => {
                let tail = history.split_off(history.len().saturating_sub(10));
                Err(Error::SpectralFailure { residuals: tail })
            }
        }
    };

    let (lambda1, v1, res1) = eigen(None)?;
    let (lambda2, _v2, res2) = eigen(Some(&v1))?;

    let vmax = v1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = v1.iter().cloned().fold(f64::INFINITY, f64::min);
    let vabs = v1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let v1_spread = (vmax - vmin) / vabs;

    let kernel_ok = lambda1.abs() <= 1e-8 && v1_spread <= 1e-6;
    let gap_ok = lambda2 >= 0.95 * gamma_estimate;
    Ok(SpectralReport {
        lambda1,
        lambda2,
        v1_spread,
        gamma_estimate,
        residuals: [res1, res2],
        kernel_ok,
        gap_ok,
    })
}

/// Dense generalized symmetric eigenvalues for small systems, used as an
/// independent oracle in tests: reduces `K x = λ B x` with a Cholesky-like
/// factorization of `B` and runs cyclic Jacobi on the reduced matrix.
pub fn dense_generalized_eigenvalues(k: &SparseMatrix, b: &SparseMatrix) -> Result<Vec<f64>> {
    let n = k.n_rows();
    if n != b.n_rows() || n != k.n_cols() || n != b.n_cols() {
        return Err(Error::DimensionMismatch("pencil matrices must be square and matching".into()));
    }
    if n > 2000 {
        return Err(Error::invalid("dense eigen oracle is limited to n <= 2000"));
    }
    let kd = k.to_dense();
    let bd = b.to_dense();
    // Cholesky of B
    let mut l = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = bd[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::invalid("mass matrix is not positive definite"));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // C = L⁻¹ K L⁻ᵀ via two triangular solves
    let mut c = kd;
    // forward solve on columns: L X = K
    for col in 0..n {
        for i in 0..n {
            let mut s = c[i][col];
            for p in 0..i {
                s -= l[i][p] * c[p][col];
            }
            c[i][col] = s / l[i][i];
        }
    }
    // right solve: C L⁻ᵀ, i.e. forward solve on rows
    for row in 0..n {
        for j in 0..n {
            let mut s = c[row][j];
            for p in 0..j {
                s -= l[j][p] * c[row][p];
            }
            c[row][j] = s / l[j][j];
        }
    }
    // cyclic Jacobi
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(c[i][j].abs());
            }
        }
        if off <= 1e-12 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if c[p][q].abs() <= 1e-15 {
                    continue;
                }
                let theta = 0.5 * (c[q][q] - c[p][p]) / c[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                for i in 0..n {
                    let cip = c[i][p];
                    let ciq = c[i][q];
                    c[i][p] = cos * cip - sin * ciq;
                    c[i][q] = sin * cip + cos * ciq;
                }
                for i in 0..n {
                    let cpi = c[p][i];
                    let cqi = c[q][i];
                    c[p][i] = cos * cpi - sin * cqi;
                    c[q][i] = sin * cpi + cos * cqi;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| c[i][i]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eigs)
}
