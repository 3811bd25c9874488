//! File formats emitted by the command line: CSV tables, MatrixMarket
//! matrices, JSON summaries and PGM heatmaps. All output is deterministic
//! for fixed inputs (Rust's shortest-roundtrip float formatting).

use confine_fp::geometry::TriLocator;
use confine_fp::solver::{Moments, Solution};
use confine_fp::sparse::SparseMatrix;
use confine_fp::TriMesh;
use serde::Serialize;

/// Mesh as CSV with a vertex section and a triangle section.
pub fn mesh_to_csv(mesh: &TriMesh) -> String {
    let mut out = String::from("#vertices x,y,boundary\n");
    for (i, v) in mesh.vertices().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            v[0],
            v[1],
            if mesh.is_boundary(i) { 1 } else { 0 }
        ));
    }
    out.push_str("#triangles i,j,k\n");
    for t in mesh.triangles() {
        out.push_str(&format!("{},{},{}\n", t[0], t[1], t[2]));
    }
    out
}

/// Nodal solution as `x,y,u,phi` rows.
pub fn solution_to_csv(sol: &Solution) -> String {
    let mut out = String::from("x,y,u,phi\n");
    for (i, v) in sol.mesh.vertices().iter().enumerate() {
        out.push_str(&format!("{},{},{},{}\n", v[0], v[1], sol.u[i], sol.phi[i]));
    }
    out
}

/// Sparse matrix in MatrixMarket coordinate format (1-based indices).
pub fn matrix_to_matrix_market(m: &SparseMatrix, comment: &str) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    if !comment.is_empty() {
        out.push_str(&format!("% {comment}\n"));
    }
    out.push_str(&format!("{} {} {}\n", m.n_rows(), m.n_cols(), m.nnz()));
    for (i, j, v) in m.iter() {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, v));
    }
    out
}

/// Vector as a single-column CSV.
pub fn vector_to_csv(v: &[f64]) -> String {
    let mut out = String::new();
    for x in v {
        out.push_str(&format!("{x}\n"));
    }
    out
}

/// JSON summary of a solve.
#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub rho: f64,
    pub lambda: f64,
    pub residual: f64,
    pub defect: f64,
    pub moments: Moments,
    pub peclet_max: f64,
}

impl SolveSummary {
    pub fn from_solution(sol: &Solution) -> Self {
        SolveSummary {
            rho: sol.rho,
            lambda: sol.lambda,
            residual: sol.residual_norm,
            defect: sol.constraint_defect,
            moments: sol.moments,
            peclet_max: sol.peclet_max,
        }
    }
}

pub const HEATMAP_SIZE: usize = 256;

/// 8-bit grayscale raster of `φ` on a `size × size` grid over the bounding
/// square, linearly scaled from 0 to `max φ`; pixels outside the disk are 0.
/// Row 0 is the top of the image (largest `Q₂`).
pub fn heatmap_pgm(sol: &Solution, size: usize) -> Vec<u8> {
    let radius = sol.mesh.radius();
    let locator = TriLocator::new(&sol.mesh);
    let cell = 2.0 * radius / size as f64;
    let mut values = vec![0.0f64; size * size];
    let mut max = 0.0f64;
    for iy in 0..size {
        let y = radius - (iy as f64 + 0.5) * cell;
        for ix in 0..size {
            let x = -radius + (ix as f64 + 0.5) * cell;
            if x.hypot(y) >= radius {
                continue;
            }
            if let Some(v) = locator.eval_p1(&sol.phi, [x, y]) {
                let v = v.max(0.0);
                values[iy * size + ix] = v;
                max = max.max(v);
            }
        }
    }
    let mut out = format!("P5\n{size} {size}\n255\n").into_bytes();
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    out.extend(values.iter().map(|&v| (v * scale).round().clamp(0.0, 255.0) as u8));
    out
}

/// Histogram as a CSV grid: a metadata header line, then one row of
/// comma-separated density values per grid row.
pub fn histogram_to_csv(hist: &confine_fp::Histogram2D) -> String {
    let g = hist.grid();
    let mut out = format!("# ell={} grid={}\n", hist.ell(), g);
    for iy in 0..g {
        let row: Vec<String> = (0..g)
            .map(|ix| hist.density()[iy * g + ix].to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One row of a shear sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrendRow {
    pub gamma_dot: f64,
    /// `⟨Q₁²⟩ - ⟨Q₂²⟩`, the normal-stress observable.
    pub q11_minus_q22: f64,
    /// `⟨Q₁Q₂⟩`, the alignment observable.
    pub q1q2: f64,
    pub peclet_max: f64,
}

pub fn trend_to_csv(rows: &[TrendRow]) -> String {
    let mut out = String::from("gamma_dot,q11_minus_q22,q1q2,peclet_max\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.gamma_dot, r.q11_minus_q22, r.q1q2, r.peclet_max
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use confine_fp::build_disk_mesh;

    #[test]
    fn mesh_csv_has_both_sections() {
        let mesh = build_disk_mesh(1.0, 2).unwrap();
        let csv = mesh_to_csv(&mesh);
        assert!(csv.starts_with("#vertices x,y,boundary\n"));
        assert!(csv.contains("#triangles i,j,k\n"));
        let vertex_lines = csv
            .lines()
            .skip(1)
            .take_while(|l| !l.starts_with('#'))
            .count();
        assert_eq!(vertex_lines, mesh.n_vertices());
        let tri_lines = csv
            .lines()
            .skip(2 + mesh.n_vertices())
            .count();
        assert_eq!(tri_lines, mesh.n_triangles());
    }

    #[test]
    fn histogram_csv_is_a_grid_with_metadata() {
        let mut counts = vec![0u64; 16 * 16];
        counts[8 * 16 + 8] = 3;
        counts[7 * 16 + 7] = 1;
        let hist = confine_fp::Histogram2D::from_counts(16, 1.0, counts).unwrap();
        let csv = histogram_to_csv(&hist);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# ell=1 grid=16");
        assert_eq!(lines.count(), 16);
        assert!(csv.lines().nth(1).unwrap().split(',').count() == 16);
    }

    #[test]
    fn matrix_market_roundtrip_shape() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 0, 1.5), (1, 2, -2.0)]).unwrap();
        let s = matrix_to_matrix_market(&m, "test");
        let mut lines = s.lines();
        assert_eq!(
            lines.next().unwrap(),
            "%%MatrixMarket matrix coordinate real general"
        );
        assert_eq!(lines.next().unwrap(), "% test");
        assert_eq!(lines.next().unwrap(), "2 3 2");
        assert_eq!(lines.next().unwrap(), "1 1 1.5");
        assert_eq!(lines.next().unwrap(), "2 3 -2");
    }
}
