//! View-origin probing: how recoverable is the view a representation came
//! from? Chance level means the representations are structure-invariant.

use crate::error::{Error, Result};
use crate::model::{discriminator_forward, DiscriminatorParams};
use crate::nd::{DenseMatrix, RngState, Tape, Var};
use crate::train::{evaluate_accuracy, label_indicator, semi_loss, AdamState};

const PROBE_HIDDEN: [usize; 2] = [64, 16];
const PROBE_EPOCHS: usize = 300;
const PROBE_LR: f64 = 0.01;

/// Trains a fresh MLP (discriminator architecture) to classify which view a
/// node's embedding came from, on half the nodes, and reports accuracy on the
/// held-out half. Values near `1/m` mean the views are indistinguishable.
pub fn probe_alignment(embeddings: &[DenseMatrix], rng: &mut RngState) -> Result<f64> {
    let m = embeddings.len();
    if m < 2 {
        return Err(Error::Config("probing needs at least two views".into()));
    }
    let n = embeddings[0].rows();
    let k = embeddings[0].cols();
    for z in embeddings {
        if z.shape() != (n, k) {
            return Err(Error::dim("probe_alignment", (n, k), z.shape()));
        }
    }
    if n < 2 {
        return Err(Error::Config("probing needs at least two nodes".into()));
    }

    // Held-out split by node, so the probe never sees any copy of a holdout
    // node during training.
    let mut nodes: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut nodes);
    let train_nodes = &nodes[..n / 2];
    let holdout_nodes = &nodes[n / 2..];

    let stack = |node_set: &[usize]| {
        let mut x = DenseMatrix::zeros(node_set.len() * m, k);
        let mut labels = Vec::with_capacity(node_set.len() * m);
        for (v, z) in embeddings.iter().enumerate() {
            for (row, &node) in node_set.iter().enumerate() {
                x.row_mut(v * node_set.len() + row).copy_from_slice(z.row(node));
                labels.push(v);
            }
        }
        (x, labels)
    };
    let (train_x, train_labels) = stack(train_nodes);
    let (holdout_x, holdout_labels) = stack(holdout_nodes);
    let train_y = label_indicator(&train_labels, m);
    let all_train: Vec<usize> = (0..train_labels.len()).collect();

    let mut probe = DiscriminatorParams::init(k, &PROBE_HIDDEN, m, rng);
    let shapes: Vec<(usize, usize)> = probe
        .weights
        .iter()
        .chain(&probe.biases)
        .map(DenseMatrix::shape)
        .collect();
    let mut adam = AdamState::new(&shapes);

    for _ in 0..PROBE_EPOCHS {
        let mut tape = Tape::new();
        let x = tape.leaf(train_x.clone());
        let w_vars: Vec<Var> = probe.weights.iter().map(|m| tape.leaf(m.clone())).collect();
        let b_vars: Vec<Var> = probe.biases.iter().map(|m| tape.leaf(m.clone())).collect();
        let out = discriminator_forward(&mut tape, x, &w_vars, &b_vars)?;
        let loss = semi_loss(&mut tape, out, &train_y, &all_train)?;
        if !tape.scalar(loss)?.is_finite() {
            return Err(Error::numeric("probe training loss"));
        }
        tape.backward(loss)?;
        let grads: Vec<DenseMatrix> = w_vars
            .iter()
            .chain(&b_vars)
            .map(|v| tape.grad(*v).clone())
            .collect();
        let mut refs: Vec<&mut DenseMatrix> = probe
            .weights
            .iter_mut()
            .chain(probe.biases.iter_mut())
            .collect();
        adam.step(PROBE_LR, 0.0, &mut refs, &grads)?;
    }

    let mut tape = Tape::new();
    let x = tape.leaf(holdout_x);
    let w_vars: Vec<Var> = probe.weights.iter().map(|m| tape.leaf(m.clone())).collect();
    let b_vars: Vec<Var> = probe.biases.iter().map(|m| tape.leaf(m.clone())).collect();
    let out = discriminator_forward(&mut tape, x, &w_vars, &b_vars)?;
    let all_holdout: Vec<usize> = (0..holdout_labels.len()).collect();
    evaluate_accuracy(tape.value(out), &holdout_labels, &all_holdout)
}
