//! Disk geometry: concentric-ring triangulations, the analytic boundary
//! distance, and quadrature over triangles.
//!
//! The computational domain is always the disk `B(0, radius)`. Meshes are
//! built as `n_rings` concentric rings with `6k` vertices on ring `k`, which
//! keeps construction deterministic and makes refinement studies trivial
//! (`h` halves when `n_rings` doubles).

use crate::error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

/// Conforming triangulation of a disk with boundary markers.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    normals: Vec<Point>,
    radius: f64,
}

impl TriMesh {
    /// Builds a mesh from raw vertex and connectivity data, deriving the
    /// boundary markers from the disk radius and validating all structural
    /// invariants (positive areas, containment, conformity).
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("mesh radius must be positive, got {radius}")));
        }
        let boundary: Vec<bool> = vertices
            .iter()
            .map(|v| (norm(*v) - radius).abs() <= 1e-12)
            .collect();
        let normals: Vec<Point> = vertices
            .iter()
            .zip(&boundary)
            .map(|(v, &b)| {
                if b {
                    let r = norm(*v);
                    [v[0] / r, v[1] / r]
                } else {
                    [0.0, 0.0]
                }
            })
            .collect();
        let mesh = TriMesh {
            vertices,
            triangles,
            boundary,
            normals,
            radius,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            if norm(*v) > self.radius + 1e-12 {
                return Err(Error::invalid(format!(
                    "vertex {i} lies outside the disk: |v| = {} > {}",
                    norm(*v),
                    self.radius
                )));
            }
        }
        let mut edges: std::collections::HashMap<(usize, usize), u32> =
            std::collections::HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri {
                if i >= self.vertices.len() {
                    return Err(Error::invalid(format!("triangle {t} references vertex {i}")));
                }
            }
            if self.signed_area(t) <= 0.0 {
                return Err(Error::invalid(format!(
                    "triangle {t} has non-positive signed area {}",
                    self.signed_area(t)
                )));
            }
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                let key = (a.min(b), a.max(b));
                *edges.entry(key).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &edges {
            match count {
                2 => {}
                1 => {
                    // hull edges must connect two boundary vertices
                    if !(self.boundary[a] && self.boundary[b]) {
                        return Err(Error::invalid(format!(
                            "interior edge ({a},{b}) belongs to a single triangle"
                        )));
                    }
                }
                c => {
                    return Err(Error::invalid(format!(
                        "edge ({a},{b}) shared by {c} triangles"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Outward unit normal at a boundary vertex, `None` for interior vertices.
    pub fn outward_normal(&self, i: usize) -> Option<Point> {
        self.boundary[i].then(|| self.normals[i])
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    }

    /// Longest edge of triangle `t`.
    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        let e = |u: Point, v: Point| (u[0] - v[0]).hypot(u[1] - v[1]);
        e(p, q).max(e(q, r)).max(e(r, p))
    }

    pub fn h_max(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| self.triangle_diameter(t))
            .fold(0.0, f64::max)
    }

    /// Total mesh area (the area of the inscribed polygon).
    pub fn area(&self) -> f64 {
        pairwise_sum(&(0..self.n_triangles()).map(|t| self.signed_area(t)).collect::<Vec<_>>())
    }
}

/// Start index of ring `k` (ring 0 is the center vertex).
fn ring_start(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        1 + 3 * k * (k - 1)
    }
}

/// Builds the concentric-ring triangulation of the disk `B(0, radius)`:
/// ring `k` carries `6k` equally spaced vertices at radius `k·radius/n_rings`,
/// for `1 + 3·n_rings·(n_rings+1)` vertices and `6·n_rings²` triangles in all.
pub fn build_disk_mesh(radius: f64, n_rings: usize) -> Result<TriMesh> {
    if n_rings == 0 {
        return Err(Error::invalid("n_rings must be at least 1"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }

    let n_vertices = 1 + 3 * n_rings * (n_rings + 1);
    let mut vertices = Vec::with_capacity(n_vertices);
    vertices.push([0.0, 0.0]);
    for k in 1..=n_rings {
        let r = radius * k as f64 / n_rings as f64;
        let m = 6 * k;
        for j in 0..m {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            vertices.push([r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut triangles = Vec::with_capacity(6 * n_rings * n_rings);
    for k in 1..=n_rings {
        let outer = |j: usize| ring_start(k) + j % (6 * k);
        for s in 0..6 {
            if k == 1 {
                triangles.push([0, outer(s), outer(s + 1)]);
                continue;
            }
            let inner = |j: usize| ring_start(k - 1) + j % (6 * (k - 1));
            let o = |j: usize| outer(s * k + j);
            let i = |j: usize| inner(s * (k - 1) + j);
            // strip of 2k-1 triangles between ring k-1 and ring k
            for j in 0..k {
                triangles.push([o(j), o(j + 1), i(j)]);
            }
            for j in 0..k - 1 {
                triangles.push([i(j), o(j + 1), i(j + 1)]);
            }
        }
    }

    TriMesh::new(vertices, triangles, radius)
}

/// Analytic distance from a point of the closed disk to its boundary circle.
pub fn distance_to_boundary(mesh: &TriMesh, point: Point) -> Result<f64> {
    let r = norm(point);
    if r > mesh.radius() + 1e-12 {
        return Err(Error::invalid(format!(
            "point ({}, {}) lies outside the disk of radius {}",
            point[0],
            point[1],
            mesh.radius()
        )));
    }
    Ok((mesh.radius() - r).max(0.0))
}

/// Quadrature rule on the reference triangle in barycentric coordinates.
/// Weights sum to one; the physical integral over a triangle is
/// `area · Σ w_q f(x_q)`. All supported rules have strictly interior points,
/// so boundary-singular integrands are never evaluated on the boundary.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    degree: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Rule exact for polynomials up to (at least) the requested degree.
    /// Supported: 1 (centroid), 2 (3-point), 4 (6-point), 6 (12-point).
    pub fn with_degree(degree: usize) -> Result<Self> {
        let (degree, points, weights): (usize, Vec<[f64; 3]>, Vec<f64>) = match degree {
            0 | 1 => (
                1,
                vec![[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]],
                vec![1.0],
            ),
            2 => {
                let a = 2.0 / 3.0;
                let b = 1.0 / 6.0;
                (
                    2,
                    vec![[a, b, b], [b, a, b], [b, b, a]],
                    vec![1.0 / 3.0; 3],
                )
            }
            3 | 4 => {
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for (a, w) in [
                    (0.108103018168070, 0.223381589678011),
                    (0.816847572980459, 0.109951743655322),
                ] {
                    let b = (1.0 - a) / 2.0;
                    points.push([a, b, b]);
                    points.push([b, a, b]);
                    points.push([b, b, a]);
                    weights.extend_from_slice(&[w, w, w]);
                }
                (4, points, weights)
            }
            5 | 6 => {
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for (a, w) in [
                    (0.501426509658179, 0.116786275726379),
                    (0.873821971016996, 0.050844906370207),
                ] {
                    let b = (1.0 - a) / 2.0;
                    points.push([a, b, b]);
                    points.push([b, a, b]);
                    points.push([b, b, a]);
                    weights.extend_from_slice(&[w, w, w]);
                }
                let (a, b, w) = (0.053145049844816, 0.310352451033785, 0.082851075618374);
                let c = 1.0 - a - b;
                for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    points.push(p);
                    weights.push(w);
                }
                (6, points, weights)
            }
            d => {
                return Err(Error::invalid(format!("unsupported quadrature degree {d}")));
            }
        };
        Ok(QuadratureRule {
            degree,
            points,
            weights,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::with_degree(2).expect("degree 2 rule exists")
    }
}

/// Physical coordinates of a barycentric quadrature point on triangle `t`.
pub fn quad_point(mesh: &TriMesh, t: usize, bary: [f64; 3]) -> Point {
    let [a, b, c] = mesh.triangles()[t];
    let (p, q, r) = (mesh.vertex(a), mesh.vertex(b), mesh.vertex(c));
    [
        bary[0] * p[0] + bary[1] * q[0] + bary[2] * r[0],
        bary[0] * p[1] + bary[1] * q[1] + bary[2] * r[1],
    ]
}

/// Integrates a scalar field over the mesh: `Σ_T area_T Σ_q w_q f(x_q)`.
/// The per-triangle contributions are reduced with pairwise summation in
/// triangle-index order, so the result is independent of any partitioning.
pub fn integrate<F>(mesh: &TriMesh, rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(Point) -> f64,
{
    let mut contributions = Vec::with_capacity(mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let area = mesh.signed_area(t);
        let mut acc = 0.0;
        for (bary, w) in rule.points().iter().zip(rule.weights()) {
            let x = quad_point(mesh, t, *bary);
            let v = f(x);
            if v.is_nan() {
                return Err(Error::Evaluation {
                    triangle: t,
                    reason: format!("integrand returned NaN at ({}, {})", x[0], x[1]),
                });
            }
            acc += w * v;
        }
        contributions.push(area * acc);
    }
    Ok(pairwise_sum(&contributions))
}

/// Pairwise (cascade) summation; deterministic and accurate for long sums.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Uniform-grid spatial index for point location in a mesh.
pub struct TriLocator<'a> {
    mesh: &'a TriMesh,
    nx: usize,
    x0: f64,
    cell: f64,
    buckets: Vec<Vec<u32>>,
}

impl<'a> TriLocator<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        let nx = ((mesh.n_triangles() as f64).sqrt() as usize).clamp(8, 512);
        let x0 = -mesh.radius();
        let cell = 2.0 * mesh.radius() / nx as f64;
        let mut buckets = vec![Vec::new(); nx * nx];
        let clampi = |v: f64| -> usize { ((v - x0) / cell).floor().clamp(0.0, (nx - 1) as f64) as usize };
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let xs = tri.map(|i| mesh.vertex(i)[0]);
            let ys = tri.map(|i| mesh.vertex(i)[1]);
            let (ix0, ix1) = (
                clampi(xs.iter().cloned().fold(f64::INFINITY, f64::min)),
                clampi(xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
            );
            let (iy0, iy1) = (
                clampi(ys.iter().cloned().fold(f64::INFINITY, f64::min)),
                clampi(ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
            );
            for iy in iy0..=iy1 {
                for ix in ix0..=ix1 {
                    buckets[iy * nx + ix].push(t as u32);
                }
            }
        }
        TriLocator {
            mesh,
            nx,
            x0,
            cell,
            buckets,
        }
    }

    /// Finds the triangle containing `p` and its barycentric coordinates.
    /// Returns `None` when `p` lies outside the triangulated polygon.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let idx = |v: f64| -> Option<usize> {
            let i = ((v - self.x0) / self.cell).floor();
            (i >= 0.0 && i < self.nx as f64).then(|| i as usize)
        };
        let (ix, iy) = (idx(p[0])?, idx(p[1])?);
        for &t in &self.buckets[iy * self.nx + ix] {
            if let Some(bary) = self.barycentric(t as usize, p) {
                return Some((t as usize, bary));
            }
        }
        None
    }

    fn barycentric(&self, t: usize, p: Point) -> Option<[f64; 3]> {
        let [a, b, c] = self.mesh.triangles()[t];
        let (pa, pb, pc) = (self.mesh.vertex(a), self.mesh.vertex(b), self.mesh.vertex(c));
        let area = self.mesh.signed_area(t);
        let cross = |u: Point, v: Point, w: Point| {
            (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])
        };
        let l0 = 0.5 * cross(pb, pc, p) / area;
        let l1 = 0.5 * cross(pc, pa, p) / area;
        let l2 = 1.0 - l0 - l1;
        let tol = -1e-12;
        (l0 >= tol && l1 >= tol && l2 >= tol).then(|| [l0, l1, l2])
    }

    /// Evaluates a P1 nodal field at `p`.
    pub fn eval_p1(&self, nodal: &[f64], p: Point) -> Option<f64> {
        let (t, bary) = self.locate(p)?;
        let [a, b, c] = self.mesh.triangles()[t];
        Some(bary[0] * nodal[a] + bary[1] * nodal[b] + bary[2] * nodal[c])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Area of the regular 6n-gon inscribed in a circle of radius `r`.
    fn inscribed_polygon_area(r: f64, n_rings: usize) -> f64 {
        let m = (6 * n_rings) as f64;
        0.5 * m * r * r * (2.0 * std::f64::consts::PI / m).sin()
    }

    #[test]
    fn hexagon_fan() {
        let mesh = build_disk_mesh(1.0, 1).unwrap();
        assert_eq!(mesh.n_vertices(), 7);
        assert_eq!(mesh.n_triangles(), 6);
        assert_eq!(mesh.boundary_mask().iter().filter(|&&b| b).count(), 6);
    }

    #[test]
    fn two_ring_mesh_counts() {
        let mesh = build_disk_mesh(5.0, 2).unwrap();
        assert_eq!(mesh.n_vertices(), 19);
        assert_eq!(mesh.n_triangles(), 24);
        assert!(mesh.vertices().iter().all(|v| norm(*v) <= 5.0 + 1e-12));
        assert_eq!(mesh.boundary_mask().iter().filter(|&&b| b).count(), 12);
    }

    #[test]
    fn zero_rings_rejected() {
        assert!(matches!(
            build_disk_mesh(1.0, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mesh_area_matches_polygon_oracle() {
        let mesh = build_disk_mesh(1.0, 40).unwrap();
        let total = mesh.area();
        let oracle = inscribed_polygon_area(1.0, 40);
        assert_relative_eq!(total, oracle, max_relative = 1e-12);
        assert!((total - std::f64::consts::PI).abs() / std::f64::consts::PI < 2e-3);
    }

    #[test]
    fn refinement_halves_area_error() {
        let pi = std::f64::consts::PI;
        let errors: Vec<f64> = [10usize, 20, 40]
            .iter()
            .map(|&n| (build_disk_mesh(1.0, n).unwrap().area() - pi).abs())
            .collect();
        assert!(errors[1] / errors[0] <= 0.5);
        assert!(errors[2] / errors[1] <= 0.5);
    }

    #[test]
    fn mesh_is_deterministic() {
        let a = build_disk_mesh(3.0, 7).unwrap();
        let b = build_disk_mesh(3.0, 7).unwrap();
        assert_eq!(a.n_vertices(), b.n_vertices());
        for (u, v) in a.vertices().iter().zip(b.vertices()) {
            assert_eq!(u[0].to_bits(), v[0].to_bits());
            assert_eq!(u[1].to_bits(), v[1].to_bits());
        }
        assert_eq!(a.triangles(), b.triangles());
    }

    #[test]
    fn boundary_normals_are_radial_units() {
        let mesh = build_disk_mesh(2.0, 3).unwrap();
        for i in 0..mesh.n_vertices() {
            match mesh.outward_normal(i) {
                Some(n) => {
                    let v = mesh.vertex(i);
                    assert_relative_eq!(norm(n), 1.0, max_relative = 1e-12);
                    let dot = n[0] * v[0] + n[1] * v[1];
                    assert_relative_eq!(dot, norm(v), max_relative = 1e-12);
                }
                None => assert!(!mesh.is_boundary(i)),
            }
        }
    }

    #[test]
    fn distance_examples() {
        let mesh = build_disk_mesh(5.0, 4).unwrap();
        assert_eq!(distance_to_boundary(&mesh, [0.0, 0.0]).unwrap(), 5.0);
        assert_relative_eq!(
            distance_to_boundary(&mesh, [5.0, 0.0]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            distance_to_boundary(&mesh, [0.0, 3.0]).unwrap(),
            2.0,
            max_relative = 1e-12
        );
        assert!(distance_to_boundary(&mesh, [6.0, 0.0]).is_err());
    }

    #[test]
    fn quadrature_exactness_on_reference_triangle() {
        // ∫_ref x^a y^b = a! b! / (a+b+2)!
        fn factorial(n: usize) -> f64 {
            (1..=n).map(|k| k as f64).product()
        }
        for degree in [1usize, 2, 4, 6] {
            let rule = QuadratureRule::with_degree(degree).unwrap();
            assert_relative_eq!(rule.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-13);
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let approx: f64 = rule
                        .points()
                        .iter()
                        .zip(rule.weights())
                        .map(|(l, w)| {
                            let x = l[1];
                            let y = l[2];
                            w * x.powi(a as i32) * y.powi(b as i32)
                        })
                        .sum::<f64>()
                        * 0.5;
                    assert_relative_eq!(approx, exact, epsilon = 1e-14, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn quadrature_points_strictly_interior() {
        for degree in [1usize, 2, 4, 6] {
            let rule = QuadratureRule::with_degree(degree).unwrap();
            for p in rule.points() {
                assert!(p.iter().all(|&l| l > 0.02), "{p:?}");
            }
            assert!(rule.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn integrate_constant_gives_disk_area() {
        let mesh = build_disk_mesh(1.0, 40).unwrap();
        let rule = QuadratureRule::default();
        let v = integrate(&mesh, &rule, |_| 1.0).unwrap();
        assert!((v - std::f64::consts::PI).abs() / std::f64::consts::PI < 2e-3);
    }

    #[test]
    fn integrate_odd_function_vanishes() {
        let mesh = build_disk_mesh(1.0, 16).unwrap();
        let rule = QuadratureRule::default();
        let v = integrate(&mesh, &rule, |p| p[0]).unwrap();
        assert!(v.abs() <= 1e-12, "got {v}");
    }

    #[test]
    fn integrate_fene_weight_closed_form() {
        // ∫_{B(0,ℓ)} (1-|q|²/ℓ²)^{ℓ²/2} = πℓ²/(ℓ²/2+1); for ℓ=2 this is 4π/3.
        let ell = 2.0f64;
        let mesh = build_disk_mesh(ell, 40).unwrap();
        let rule = QuadratureRule::default();
        let k = ell * ell / 2.0;
        let v = integrate(&mesh, &rule, |p| {
            (1.0 - (p[0] * p[0] + p[1] * p[1]) / (ell * ell)).powf(k)
        })
        .unwrap();
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        assert!((v - exact).abs() / exact < 5e-3, "got {v}, want {exact}");
    }

    #[test]
    fn integrate_reports_nan_with_triangle_index() {
        let mesh = build_disk_mesh(1.0, 2).unwrap();
        let rule = QuadratureRule::default();
        let err = integrate(&mesh, &rule, |p| if p[0] > 0.4 { f64::NAN } else { 1.0 }).unwrap_err();
        assert!(matches!(err, Error::Evaluation { .. }));
    }

    #[test]
    fn integrate_is_linear() {
        let mesh = build_disk_mesh(1.0, 12).unwrap();
        let rule = QuadratureRule::default();
        let f = |p: Point| (p[0] * 1.3).sin() + p[1];
        let g = |p: Point| (p[0] * p[1]).cos();
        for (a, b) in [(2.0, -3.0), (0.5, 0.25), (-1.5, 7.0)] {
            let lhs = integrate(&mesh, &rule, |p| a * f(p) + b * g(p)).unwrap();
            let rhs = a * integrate(&mesh, &rule, f).unwrap() + b * integrate(&mesh, &rule, g).unwrap();
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!((lhs - rhs).abs() <= 1e-12 * (a.abs() + b.abs()) * scale);
        }
    }

    #[test]
    fn locator_finds_containing_triangle() {
        let mesh = build_disk_mesh(2.0, 9).unwrap();
        let locator = TriLocator::new(&mesh);
        for (r, th) in [(0.0, 0.0), (0.3, 1.0), (1.2, 2.5), (1.95, 4.0), (1.0, 6.0)] {
            let p = [r * f64::cos(th), r * f64::sin(th)];
            let (t, bary) = locator.locate(p).expect("point should be inside");
            let [a, b, c] = mesh.triangles()[t];
            let x = bary[0] * mesh.vertex(a)[0] + bary[1] * mesh.vertex(b)[0] + bary[2] * mesh.vertex(c)[0];
            let y = bary[0] * mesh.vertex(a)[1] + bary[1] * mesh.vertex(b)[1] + bary[2] * mesh.vertex(c)[1];
            assert_relative_eq!(x, p[0], epsilon = 1e-12);
            assert_relative_eq!(y, p[1], epsilon = 1e-12);
        }
        assert!(locator.locate([2.5, 0.0]).is_none());
    }

    #[test]
    fn invalid_meshes_rejected() {
        // flipped triangle
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(TriMesh::new(vertices.clone(), vec![[0, 2, 1]], 1.0).is_err());
        // dangling interior edge: single triangle with an interior vertex is fine,
        // but a vertex outside the disk is not
        assert!(TriMesh::new(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], 1.0).is_err());
    }
}
