//! Property tests for the structural invariants.

use std::rc::Rc;

use proptest::prelude::*;

use mgal::graph::{average_graphs, knn_graph, renormalize, stratified_split, KnnMetric};
use mgal::nd::{DenseMatrix, RngState, SparseMatrix, Tape};
use mgal::train::{adversarial_loss, label_indicator, semi_loss};

fn dense_strategy(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-50.0f64..50.0, rows * cols)
        .prop_map(move |data| DenseMatrix::from_vec(rows, cols, data).unwrap())
}

/// Random symmetric zero-diagonal adjacency over n nodes.
fn adjacency_strategy(n: usize) -> impl Strategy<Value = SparseMatrix> {
    let pairs = n * (n - 1) / 2;
    prop::collection::vec(prop::bool::ANY, pairs).prop_map(move |mask| {
        let mut triplets = Vec::new();
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if mask[idx] {
                    triplets.push((i, j, 1.0));
                    triplets.push((j, i, 1.0));
                }
                idx += 1;
            }
        }
        SparseMatrix::from_triplets(n, n, &triplets).unwrap()
    })
}

proptest! {
    #[test]
    fn softmax_rows_are_distributions(m in dense_strategy(4, 5)) {
        let mut tape = Tape::new();
        let x = tape.leaf(m);
        let y = tape.softmax_rows(x);
        let out = tape.value(y);
        for i in 0..out.rows() {
            let row = out.row(i);
            let sum: f64 = row.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn spmm_matches_dense_matmul_oracle(a in adjacency_strategy(6), b in dense_strategy(6, 3)) {
        let via_sparse = a.mul_dense(&b).unwrap();
        let via_dense = a.to_dense().matmul(&b).unwrap();
        prop_assert!(via_sparse.bits_eq(&via_dense) || via_sparse.max_abs_diff(&via_dense) == 0.0);

        let mut tape = Tape::new();
        let bv = tape.leaf(b);
        let out = tape.spmm(Rc::new(a), bv).unwrap();
        prop_assert_eq!(tape.value(out).data(), via_dense.data());
    }

    #[test]
    fn renormalize_is_symmetric(a in adjacency_strategy(7)) {
        let s = renormalize(&a).unwrap();
        prop_assert!(s.matrix().is_symmetric(1e-12));
        // Diagonal entries are 1/(deg+1), always positive.
        prop_assert!(s.matrix().diagonal().iter().all(|d| *d > 0.0));
    }

    #[test]
    fn averaging_commutes_with_view_permutation(
        a in adjacency_strategy(5),
        b in adjacency_strategy(5),
        c in adjacency_strategy(5),
    ) {
        let forward = average_graphs(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let shuffled = average_graphs(&[c, a, b]).unwrap();
        let (fw, sh) = (forward.to_dense(), shuffled.to_dense());
        prop_assert_eq!(fw.data(), sh.data());
    }

    #[test]
    fn averaging_identical_binary_graphs_is_identity(a in adjacency_strategy(5)) {
        let mean = average_graphs(&[a.clone(), a.clone(), a.clone()]).unwrap();
        let (md, ad) = (mean.to_dense(), a.to_dense());
        prop_assert_eq!(md.data(), ad.data());
    }

    #[test]
    fn knn_graph_structure(points in prop::collection::vec(-10.0f64..10.0, 6 * 2), k in 1usize..4) {
        let x = DenseMatrix::from_vec(6, 2, points).unwrap();
        let g = knn_graph(&x, k, KnnMetric::Euclidean).unwrap();
        prop_assert!(g.is_symmetric(0.0));
        prop_assert!(g.diagonal().iter().all(|d| *d == 0.0));
        for i in 0..6 {
            prop_assert!(g.iter_row(i).count() >= 1, "node {} isolated", i);
        }
    }

    #[test]
    fn split_partitions_and_counts(
        seed in 0u64..1000,
        ratio in 0.05f64..0.5,
        class_sizes in prop::collection::vec(3usize..20, 2..5),
    ) {
        let mut labels = Vec::new();
        for (class, &size) in class_sizes.iter().enumerate() {
            labels.extend(std::iter::repeat_n(class, size));
        }
        let n = labels.len();
        let mut rng = RngState::from_seed(seed);
        let split = stratified_split(&labels, class_sizes.len(), ratio, 0.1, &mut rng).unwrap();
        split.validate(n).unwrap();
        let mut per_class = vec![0usize; class_sizes.len()];
        for &i in &split.labeled {
            per_class[labels[i]] += 1;
        }
        for (class, &size) in class_sizes.iter().enumerate() {
            let expected = (ratio * size as f64).ceil() as usize;
            prop_assert_eq!(per_class[class], expected);
        }
    }

    #[test]
    fn adversarial_loss_never_positive(rows in prop::collection::vec(0.01f64..10.0, 2 * 3 * 3)) {
        // Normalize arbitrary positives into row distributions for 3 views.
        let mut tape = Tape::new();
        let mut outputs = Vec::new();
        for v in 0..3 {
            let mut p = DenseMatrix::zeros(2, 3);
            for i in 0..2 {
                let base = v * 6 + i * 3;
                let total: f64 = rows[base..base + 3].iter().sum();
                for j in 0..3 {
                    p.set(i, j, rows[base + j] / total);
                }
            }
            outputs.push(tape.leaf(p));
        }
        let loss = adversarial_loss(&mut tape, &outputs).unwrap();
        prop_assert!(tape.scalar(loss).unwrap() <= 0.0);
    }

    #[test]
    fn semi_loss_nonnegative(values in prop::collection::vec(0.01f64..10.0, 4 * 3)) {
        let mut tape = Tape::new();
        let mut u = DenseMatrix::zeros(4, 3);
        for i in 0..4 {
            let base = i * 3;
            let total: f64 = values[base..base + 3].iter().sum();
            for j in 0..3 {
                u.set(i, j, values[base + j] / total);
            }
        }
        let u = tape.leaf(u);
        let y = label_indicator(&[0, 1, 2, 0], 3);
        let loss = semi_loss(&mut tape, u, &y, &[0, 1, 2, 3]).unwrap();
        prop_assert!(tape.scalar(loss).unwrap() >= 0.0);
    }
}
