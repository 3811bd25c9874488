//! Compressed-row sparse matrices and a direct LU factorization with
//! partial pivoting, sized for desk-scale systems (≤ ~3·10⁴ unknowns).
//!
//! The factorization is the left-looking column algorithm: each column is
//! scattered into a dense work vector, updated by all previous pivot
//! columns, and split into its L and U parts after choosing the largest
//! remaining entry as pivot. With the near-banded orderings produced by the
//! ring meshes the fill stays moderate, and the dense per-column sweep is
//! cheap at this scale.

use crate::error::{Error, Result};

/// Sparse matrix in compressed row storage. Column indices are sorted and
/// unique within each row; entries with magnitude at or below `1e-300` are
/// dropped during assembly.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

pub const ASSEMBLY_DROP_TOLERANCE: f64 = 1e-300;

impl SparseMatrix {
    /// Builds a CSR matrix from (row, col, value) triplets, summing
    /// duplicates. Triplets are combined in a deterministic order.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(i, j, _) in &triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({i}, {j}) outside {n_rows}x{n_cols} matrix"
                )));
            }
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut k = 0;
        for row in 0..n_rows {
            while k < triplets.len() && triplets[k].0 == row {
                let col = triplets[k].1;
                let mut sum = 0.0;
                while k < triplets.len() && triplets[k].0 == row && triplets[k].1 == col {
                    sum += triplets[k].2;
                    k += 1;
                }
                if sum.abs() > ASSEMBLY_DROP_TOLERANCE {
                    col_idx.push(col);
                    values.push(sum);
                }
            }
            row_ptr[row + 1] = col_idx.len();
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Identity-pattern matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry accessor by binary search; zero if not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    /// Sparse matrix-vector product with deterministic summation order.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: vector length {} vs {} columns",
                x.len(),
                self.n_cols
            )));
        }
        let mut y = vec![0.0; self.n_rows];
        for i in 0..self.n_rows {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let triplets: Vec<(usize, usize, f64)> = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        SparseMatrix::from_triplets(self.n_cols, self.n_rows, triplets)
            .expect("transpose of a valid matrix is valid")
    }

    /// `self + factor · other`, combining sparsity patterns.
    pub fn add_scaled(&self, other: &SparseMatrix, factor: f64) -> Result<SparseMatrix> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut triplets: Vec<(usize, usize, f64)> = self.iter().collect();
        triplets.extend(other.iter().map(|(i, j, v)| (i, j, factor * v)));
        SparseMatrix::from_triplets(self.n_rows, self.n_cols, triplets)
    }

    /// Column sums, i.e. `1ᵀA`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_cols];
        for (_, j, v) in self.iter() {
            sums[j] += v;
        }
        sums
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Applies `f` to every stored value.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> SparseMatrix {
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.iter() {
            dense[i][j] = v;
        }
        dense
    }
}

/// LU factors of a square sparse matrix with row partial pivoting.
#[derive(Debug)]
pub struct SparseLu {
    n: usize,
    /// `pivot_row[k]` is the original row chosen at elimination step `k`.
    pivot_row: Vec<usize>,
    /// Columns of unit-lower L; entries `(original_row, value)` below the pivot.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Columns of U; entries `(pivot_step, value)` strictly above the diagonal.
    u_cols: Vec<Vec<(usize, f64)>>,
    /// Diagonal of U per pivot step.
    u_diag: Vec<f64>,
}

impl SparseLu {
    /// Factorizes a square matrix. Fails with the offending column index
    /// when no usable pivot remains (structural or numerical singularity).
    pub fn factorize(a: &SparseMatrix) -> Result<SparseLu> {
        if a.n_rows() != a.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        let n = a.n_rows();
        // column access pattern
        let at = a.transpose();

        let mut pivot_row = vec![usize::MAX; n];
        // pivot_of[r] = elimination step at which row r became pivotal
        let mut pivot_of = vec![usize::MAX; n];
        let mut l_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut u_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut u_diag = vec![0.0; n];

        let mut work = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::with_capacity(n);

        for j in 0..n {
            // scatter A(:, j)
            for k in at.row_ptr[j]..at.row_ptr[j + 1] {
                let row = at.col_idx[k];
                work[row] = at.values[k];
                touched.push(row);
            }

            // eliminate with previous pivot columns in order
            let mut u_col: Vec<(usize, f64)> = Vec::new();
            for k in 0..j {
                let ukj = work[pivot_row[k]];
                if ukj != 0.0 {
                    u_col.push((k, ukj));
                    work[pivot_row[k]] = 0.0;
                    for &(row, l) in &l_cols[k] {
                        if work[row] == 0.0 {
                            touched.push(row);
                        }
                        work[row] -= ukj * l;
                    }
                }
            }

            // partial pivot among not-yet-pivotal rows
            let mut best = (usize::MAX, 0.0f64);
            for &row in &touched {
                if pivot_of[row] == usize::MAX {
                    let v = work[row].abs();
                    if v > best.1 {
                        best = (row, v);
                    }
                }
            }
            let (prow, pmax) = best;
            if prow == usize::MAX || pmax == 0.0 {
                return Err(Error::SolverFailure { pivot: j });
            }
            let diag = work[prow];
            pivot_row[j] = prow;
            pivot_of[prow] = j;
            u_diag[j] = diag;

            let mut l_col: Vec<(usize, f64)> = Vec::new();
            for &row in &touched {
                let v = work[row];
                if v != 0.0 && pivot_of[row] == usize::MAX {
                    l_col.push((row, v / diag));
                }
                work[row] = 0.0;
            }
            touched.clear();
            l_col.sort_by_key(|e| e.0);
            l_cols.push(l_col);
            u_cols.push(u_col);
        }

        Ok(SparseLu {
            n,
            pivot_row,
            l_cols,
            u_cols,
            u_diag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "solve: vector length {} vs system size {}",
                b.len(),
                self.n
            )));
        }
        // forward: L y = P b
        let mut c = b.to_vec();
        let mut y = vec![0.0; self.n];
        for k in 0..self.n {
            let t = c[self.pivot_row[k]];
            y[k] = t;
            if t != 0.0 {
                for &(row, l) in &self.l_cols[k] {
                    c[row] -= t * l;
                }
            }
        }
        // backward: U x = y (columns hold the strictly-upper entries)
        let mut x = y;
        for k in (0..self.n).rev() {
            let xk = x[k] / self.u_diag[k];
            x[k] = xk;
            if xk != 0.0 {
                for &(i, u) in &self.u_cols[k] {
                    x[i] -= u * xk;
                }
            }
        }
        Ok(x)
    }

    /// Solves `A x = b` with a few passes of iterative refinement against
    /// the original matrix; this recovers componentwise accuracy on badly
    /// row-scaled systems (Maxwellian weights span hundreds of decades).
    pub fn solve_refined(&self, a: &SparseMatrix, b: &[f64], passes: usize) -> Result<Vec<f64>> {
        let mut x = self.solve(b)?;
        for _ in 0..passes {
            let ax = a.matvec(&x)?;
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            if r.iter().all(|v| *v == 0.0) {
                break;
            }
            let dx = self.solve(&r)?;
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        Ok(x)
    }

    /// Fill (stored entries) of the factors, for diagnostics.
    pub fn fill(&self) -> usize {
        self.l_cols.iter().map(Vec::len).sum::<usize>()
            + self.u_cols.iter().map(Vec::len).sum::<usize>()
            + self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(n: usize, fill: f64, rng: &mut ChaCha8Rng) -> SparseMatrix {
        let mut triplets = Vec::new();
        for i in 0..n {
            // keep the diagonal so the matrix is comfortably nonsingular
            triplets.push((i, i, 2.0 + rng.random::<f64>()));
            for j in 0..n {
                if i != j && rng.random::<f64>() < fill {
                    triplets.push((i, j, rng.random::<f64>() - 0.5));
                }
            }
        }
        SparseMatrix::from_triplets(n, n, triplets).unwrap()
    }

    #[test]
    fn triplets_are_summed_and_sorted() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 1, 1.0), (0, 0, 2.0), (0, 1, 3.0), (1, 1, -1.0), (1, 0, 0.0)],
        )
        .unwrap();
        assert_eq!(a.get(0, 1), 4.0);
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.nnz(), 3); // exact zero dropped
        for i in 0..2 {
            let cols = &a.col_idx()[a.row_ptr()[i]..a.row_ptr()[i + 1]];
            assert!(cols.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn identity_matvec_is_identity() {
        let a = SparseMatrix::identity(5);
        let x = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        assert_eq!(a.matvec(&x).unwrap(), x);
    }

    #[test]
    fn matvec_matches_dense_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 40;
        let a = random_sparse(n, 0.15, &mut rng);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let dense = a.to_dense();
        let y = a.matvec(&x).unwrap();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += dense[i][j] * x[j];
            }
            assert!((y[i] - acc).abs() <= 1e-13 * acc.abs().max(1.0));
        }
    }

    #[test]
    fn matvec_checks_dimensions() {
        let a = SparseMatrix::identity(3);
        assert!(a.matvec(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn lu_solves_random_systems_against_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [5usize, 23, 80] {
            let a = random_sparse(n, 0.2, &mut rng);
            let x_true: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let b = a.matvec(&x_true).unwrap();
            let lu = SparseLu::factorize(&a).unwrap();
            let x = lu.solve(&b).unwrap();

            // dense LU oracle
            let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
            for (i, j, v) in a.iter() {
                dense[(i, j)] = v;
            }
            let oracle = dense
                .lu()
                .solve(&nalgebra::DVector::from_vec(b.clone()))
                .expect("oracle solve");
            for i in 0..n {
                assert!(
                    (x[i] - oracle[i]).abs() <= 1e-10 * oracle[i].abs().max(1.0),
                    "n={n} i={i}: {} vs {}",
                    x[i],
                    oracle[i]
                );
                assert!((x[i] - x_true[i]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn lu_requires_pivoting() {
        // zero diagonal forces a row exchange
        let a = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (0, 2, 2.0)],
        )
        .unwrap();
        let lu = SparseLu::factorize(&a).unwrap();
        let b = vec![3.0, 2.0, 1.0];
        let x = lu.solve(&b).unwrap();
        let r = a.matvec(&x).unwrap();
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn singular_matrix_reports_pivot_column() {
        // column 2 is identically zero
        let a = SparseMatrix::from_triplets(3, 3, vec![(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        match SparseLu::factorize(&a) {
            Err(Error::SolverFailure { pivot }) => assert_eq!(pivot, 2),
            other => panic!("expected solver failure, got {other:?}"),
        }
    }

    #[test]
    fn add_scaled_combines_patterns() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        let b = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 3.0), (1, 0, -1.0)]).unwrap();
        let c = a.add_scaled(&b, 2.0).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(0, 1), 6.0);
        assert_eq!(c.get(1, 0), 0.0); // cancelled exactly -> dropped
        assert_eq!(c.nnz(), 2);
    }

    #[test]
    fn column_sums_match_transpose_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_sparse(12, 0.3, &mut rng);
        let sums = a.column_sums();
        let ones = vec![1.0; 12];
        let via_transpose = a.transpose().matvec(&ones).unwrap();
        for (s, t) in sums.iter().zip(&via_transpose) {
            assert!((s - t).abs() <= 1e-13);
        }
    }
}
