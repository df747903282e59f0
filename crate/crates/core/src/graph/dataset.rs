//! Multi-graph dataset containers and propagation-operator construction.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::nd::{DenseMatrix, SparseMatrix};

const SYMMETRY_TOL: f64 = 1e-12;

/// One node set with node features, `m` adjacency structures and labels.
#[derive(Debug, Clone)]
pub struct MultiGraphDataset {
    pub x: DenseMatrix,
    pub views: Vec<SparseMatrix>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl MultiGraphDataset {
    pub fn new(
        x: DenseMatrix,
        views: Vec<SparseMatrix>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let ds = MultiGraphDataset {
            x,
            views,
            labels,
            num_classes,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_nodes();
        if n == 0 {
            return Err(Error::Validation("dataset has no nodes".into()));
        }
        if self.views.is_empty() {
            return Err(Error::Validation("dataset needs at least one view".into()));
        }
        if self.num_classes < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 classes, got {}",
                self.num_classes
            )));
        }
        if self.labels.len() != n {
            return Err(Error::Validation(format!(
                "label count {} does not match node count {n}",
                self.labels.len()
            )));
        }
        if let Some(bad) = self.labels.iter().find(|l| **l >= self.num_classes) {
            return Err(Error::Validation(format!(
                "label {bad} outside 0..{}",
                self.num_classes
            )));
        }
        for (v, a) in self.views.iter().enumerate() {
            validate_adjacency(a, n).map_err(|e| Error::Validation(format!("view {v}: {e}")))?;
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.x.rows()
    }

    pub fn feature_dim(&self) -> usize {
        self.x.cols()
    }

    pub fn num_views(&self) -> usize {
        self.views.len()
    }

    /// Copy of this dataset restricted to the given views (in the given order).
    pub fn select_views(&self, views: &[usize]) -> Result<MultiGraphDataset> {
        let mut selected = Vec::with_capacity(views.len());
        for &v in views {
            if v >= self.views.len() {
                return Err(Error::Index {
                    what: "view",
                    index: v,
                    len: self.views.len(),
                });
            }
            selected.push(self.views[v].clone());
        }
        MultiGraphDataset::new(self.x.clone(), selected, self.labels.clone(), self.num_classes)
    }

    /// Number of nodes carrying each class label.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_classes];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

fn validate_adjacency(a: &SparseMatrix, n: usize) -> std::result::Result<String, String> {
    if a.shape() != (n, n) {
        return Err(format!("adjacency is {}x{}, expected {n}x{n}", a.rows(), a.cols()));
    }
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err("adjacency is not symmetric".into());
    }
    if !a.values_all(|v| v >= 0.0) {
        return Err("adjacency has negative weights".into());
    }
    // A nonzero diagonal would double-count self-loops once the identity is
    // added during renormalization, so it is rejected rather than zeroed.
    if a.diagonal().iter().any(|d| *d != 0.0) {
        return Err("adjacency has nonzero diagonal entries".into());
    }
    Ok(String::new())
}

/// Renormalized propagation operator `D^(-1/2) (A + I) D^(-1/2)`.
#[derive(Debug, Clone)]
pub struct NormalizedGraph {
    s: Rc<SparseMatrix>,
}

impl NormalizedGraph {
    pub fn matrix(&self) -> &Rc<SparseMatrix> {
        &self.s
    }
}

/// Builds the renormalized filter for a symmetric, nonnegative, zero-diagonal
/// adjacency matrix. The degree is taken from `A + I`, so isolated nodes get a
/// unit self-loop.
pub fn renormalize(a: &SparseMatrix) -> Result<NormalizedGraph> {
    if a.rows() != a.cols() {
        return Err(Error::Validation(format!(
            "renormalize needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    validate_adjacency(a, a.rows()).map_err(Error::Validation)?;

    let n = a.rows();
    // Degrees of A + I.
    let degrees: Vec<f64> = a.row_sums().iter().map(|s| s + 1.0).collect();
    let mut triplets = Vec::with_capacity(a.nnz() + n);
    for i in 0..n {
        for (j, v) in a.iter_row(i) {
            triplets.push((i, j, v / (degrees[i] * degrees[j]).sqrt()));
        }
        triplets.push((i, i, 1.0 / degrees[i]));
    }
    let s = SparseMatrix::from_triplets(n, n, &triplets)?;
    debug_assert!(s.is_symmetric(SYMMETRY_TOL));
    Ok(NormalizedGraph { s: Rc::new(s) })
}

/// Entrywise mean of several same-shaped adjacency matrices.
pub fn average_graphs(views: &[SparseMatrix]) -> Result<SparseMatrix> {
    SparseMatrix::mean_of(views)
}

/// Labeled / validation / test partition of the node set.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub labeled: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub label_ratio: f64,
}

impl DataSplit {
    /// Checks that the three index sets are disjoint and cover `0..n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        let total = self.labeled.len() + self.validation.len() + self.test.len();
        if total != n {
            return Err(Error::Validation(format!(
                "split covers {total} nodes, expected {n}"
            )));
        }
        for &i in self
            .labeled
            .iter()
            .chain(&self.validation)
            .chain(&self.test)
        {
            if i >= n {
                return Err(Error::Index {
                    what: "split node",
                    index: i,
                    len: n,
                });
            }
            if seen[i] {
                return Err(Error::Validation(format!("node {i} appears in two split sets")));
            }
            seen[i] = true;
        }
        Ok(())
    }
}
