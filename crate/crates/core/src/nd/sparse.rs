//! Compressed sparse row matrices, used for graph propagation operators.

use crate::error::{Error, Result};
use crate::nd::DenseMatrix;

/// CSR matrix of 64-bit floats. Column indices are strictly increasing within
/// each row; explicit zeros are permitted but constructors avoid them.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 || indptr[0] != 0 {
            return Err(Error::Validation(format!(
                "csr indptr must have length rows+1={} and start at 0",
                rows + 1
            )));
        }
        if indptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation("csr indptr must be non-decreasing".into()));
        }
        let nnz = *indptr.last().unwrap();
        if indices.len() != nnz || values.len() != nnz {
            return Err(Error::Validation(format!(
                "csr arrays must have length {nnz} (indices {}, values {})",
                indices.len(),
                values.len()
            )));
        }
        for r in 0..rows {
            let row = &indices[indptr[r]..indptr[r + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation(format!(
                    "csr row {r} column indices must be strictly increasing"
                )));
            }
            if row.last().is_some_and(|c| *c >= cols) {
                return Err(Error::Validation(format!(
                    "csr row {r} has a column index >= {cols}"
                )));
            }
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::numeric("sparse matrix construction"));
        }
        Ok(SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Builds from (row, col, value) triplets. Duplicate coordinates are rejected.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<&(usize, usize, f64)> = triplets.iter().collect();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut prev: Option<(usize, usize)> = None;
        for &&(r, c, v) in &sorted {
            if r >= rows || c >= cols {
                return Err(Error::Validation(format!(
                    "triplet ({r},{c}) outside {rows}x{cols}"
                )));
            }
            if prev == Some((r, c)) {
                return Err(Error::Validation(format!("duplicate triplet at ({r},{c})")));
            }
            prev = Some((r, c));
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Self::new(rows, cols, indptr, indices, values)
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.get(i, j);
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), &triplets).expect("dense conversion is well-formed")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.iter_row(i) {
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter_row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.indptr[i]..self.indptr[i + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.indptr[i]..self.indptr[i + 1];
        match self.indices[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.iter_row(i).map(|(_, v)| v).sum())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let indptr = counts.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut next = counts;
        for i in 0..self.rows {
            for (j, v) in self.iter_row(i) {
                let slot = next[j];
                indices[slot] = i;
                values[slot] = v;
                next[j] += 1;
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            indptr,
            indices,
            values,
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let t = self.transpose();
        if t.indptr != self.indptr || t.indices != self.indices {
            return false;
        }
        self.values
            .iter()
            .zip(&t.values)
            .all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn values_all(&self, pred: impl Fn(f64) -> bool) -> bool {
        self.values.iter().all(|v| pred(*v))
    }

    /// `self · b` with a dense right-hand side.
    pub fn mul_dense(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != b.rows() {
            return Err(Error::dim("spmm", self.shape(), b.shape()));
        }
        let w = b.cols();
        let mut out = DenseMatrix::zeros(self.rows, w);
        for i in 0..self.rows {
            let out_row = &mut out.data_mut()[i * w..(i + 1) * w];
            for (j, v) in self.indices[self.indptr[i]..self.indptr[i + 1]]
                .iter()
                .zip(&self.values[self.indptr[i]..self.indptr[i + 1]])
            {
                let b_row = b.row(*j);
                for (o, x) in out_row.iter_mut().zip(b_row) {
                    *o += v * x;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · g`, the adjoint of [`SparseMatrix::mul_dense`] in its dense argument.
    pub fn transpose_mul_dense(&self, g: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != g.rows() {
            return Err(Error::dim("spmm_t", self.shape(), g.shape()));
        }
        let w = g.cols();
        let mut out = DenseMatrix::zeros(self.cols, w);
        for i in 0..self.rows {
            let g_row = g.row(i).to_vec();
            for (j, v) in self.iter_row(i) {
                let out_row = &mut out.data_mut()[j * w..(j + 1) * w];
                for (o, x) in out_row.iter_mut().zip(&g_row) {
                    *o += v * x;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise mean of several same-shaped matrices; the output pattern is
    /// the union of the input patterns.
    pub fn mean_of(views: &[SparseMatrix]) -> Result<SparseMatrix> {
        let first = views
            .first()
            .ok_or_else(|| Error::Validation("mean of zero matrices".into()))?;
        for v in views {
            if v.shape() != first.shape() {
                return Err(Error::dim("average_graphs", first.shape(), v.shape()));
            }
        }
        let m = views.len() as f64;
        let mut indptr = vec![0usize];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut cursors = vec![0usize; views.len()];
        for i in 0..first.rows {
            for (k, view) in views.iter().enumerate() {
                cursors[k] = view.indptr[i];
            }
            loop {
                // Smallest pending column across the views for this row.
                let mut col = usize::MAX;
                for (k, view) in views.iter().enumerate() {
                    if cursors[k] < view.indptr[i + 1] {
                        col = col.min(view.indices[cursors[k]]);
                    }
                }
                if col == usize::MAX {
                    break;
                }
                let mut acc = 0.0;
                for (k, view) in views.iter().enumerate() {
                    if cursors[k] < view.indptr[i + 1] && view.indices[cursors[k]] == col {
                        acc += view.values[cursors[k]];
                        cursors[k] += 1;
                    }
                }
                indices.push(col);
                values.push(acc / m);
            }
            indptr.push(indices.len());
        }
        SparseMatrix::new(first.rows, first.cols, indptr, indices, values)
    }
}
