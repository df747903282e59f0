//! Symmetrized k-nearest-neighbor graphs from feature vectors.

use crate::error::{Error, Result};
use crate::nd::{DenseMatrix, SparseMatrix};

/// Default neighbor count when nothing better is known for a dataset.
pub const DEFAULT_KNN_K: usize = 10;
/// Default metric to pair with [`DEFAULT_KNN_K`].
pub const DEFAULT_KNN_METRIC: KnnMetric = KnnMetric::Cosine;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnMetric {
    Cosine,
    Euclidean,
}

impl KnnMetric {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            KnnMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            KnnMetric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    // Zero vectors carry no direction; treat as orthogonal.
                    1.0
                } else {
                    1.0 - dot / (na * nb)
                }
            }
        }
    }
}

/// Links every node to its `k` nearest neighbors (self excluded), then
/// symmetrizes by union. Edges are binary, the diagonal zero. Distance ties
/// break toward the lower node index.
pub fn knn_graph(x: &DenseMatrix, k: usize, metric: KnnMetric) -> Result<SparseMatrix> {
    let n = x.rows();
    if k >= n {
        return Err(Error::Validation(format!(
            "k = {k} must be smaller than the node count {n}"
        )));
    }
    let mut edges = vec![false; n * n];
    let mut candidates: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        candidates.clear();
        for j in 0..n {
            if j != i {
                candidates.push((metric.distance(x.row(i), x.row(j)), j));
            }
        }
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(_, j) in candidates.iter().take(k) {
            edges[i * n + j] = true;
            edges[j * n + i] = true;
        }
    }
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if edges[i * n + j] {
                triplets.push((i, j, 1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_single_mutual_edge() {
        let x = DenseMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let g = knn_graph(&x, 1, KnnMetric::Euclidean).unwrap();
        assert_eq!(g.nnz(), 2);
        assert_eq!(g.get(0, 1), 1.0);
        assert_eq!(g.get(1, 0), 1.0);
    }

    #[test]
    fn collinear_points_union_symmetrization() {
        // Points at 0, 1, 10: node 2 picks node 1, which symmetrizes in.
        let x = DenseMatrix::from_rows(&[vec![0.0], vec![1.0], vec![10.0]]).unwrap();
        let g = knn_graph(&x, 1, KnnMetric::Euclidean).unwrap();
        assert_eq!(g.get(0, 1), 1.0);
        assert_eq!(g.get(1, 2), 1.0);
        assert_eq!(g.get(0, 2), 0.0);
        assert!(g.is_symmetric(0.0));
    }

    #[test]
    fn duplicate_points_tie_break_low_index() {
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let g = knn_graph(&x, 1, KnnMetric::Euclidean).unwrap();
        // Every node is at distance 0 from both others; each picks the
        // lowest-indexed one.
        assert_eq!(g.get(1, 0), 1.0);
        assert_eq!(g.get(2, 0), 1.0);
        assert_eq!(g.get(1, 2), 0.0);
    }

    #[test]
    fn documented_defaults() {
        assert_eq!(DEFAULT_KNN_K, 10);
        assert_eq!(DEFAULT_KNN_METRIC, KnnMetric::Cosine);
    }

    #[test]
    fn k_too_large_rejected() {
        let x = DenseMatrix::zeros(3, 2);
        assert!(knn_graph(&x, 3, KnnMetric::Cosine).is_err());
    }

    #[test]
    fn cosine_ignores_magnitude() {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![100.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let g = knn_graph(&x, 1, KnnMetric::Cosine).unwrap();
        // Node 0 is nearly parallel to node 1 despite the scale difference.
        assert_eq!(g.get(0, 1), 1.0);
    }

    #[test]
    fn zero_diagonal_and_min_degree() {
        let x = DenseMatrix::from_rows(&[
            vec![0.0],
            vec![3.0],
            vec![7.0],
            vec![8.0],
        ])
        .unwrap();
        let g = knn_graph(&x, 2, KnnMetric::Euclidean).unwrap();
        for i in 0..4 {
            assert_eq!(g.get(i, i), 0.0);
            assert!(g.iter_row(i).count() >= 1);
        }
    }
}
