//! Forward passes of the generator, discriminator and prediction heads.
//!
//! These are pure functions over a [`Tape`]; parameters enter as tape leaves
//! so one backward pass yields every gradient.

use crate::error::Result;
use crate::graph::NormalizedGraph;
use crate::nd::{DenseMatrix, RngState, Tape, Var};

/// Inverted-dropout setting for generator hidden layers during training.
pub struct Dropout<'a> {
    pub rate: f64,
    pub rng: &'a mut RngState,
}

/// Shared-parameter graph-convolutional generator: `H_0 = X`,
/// `H_{l+1} = act(S · H_l · Θ_l)`, returning `Z = H_L`. The activation is
/// relu on every layer except the last, which stays linear unless
/// `final_activation` is set.
pub fn generator_forward(
    tape: &mut Tape,
    x: Var,
    graph: &NormalizedGraph,
    thetas: &[Var],
    final_activation: bool,
    mut dropout: Option<Dropout<'_>>,
) -> Result<Var> {
    assert!(!thetas.is_empty(), "generator needs at least one layer");
    let mut h = x;
    let last = thetas.len() - 1;
    for (l, &theta) in thetas.iter().enumerate() {
        let pre = tape.matmul(h, theta)?;
        h = tape.spmm(graph.matrix().clone(), pre)?;
        if l < last || final_activation {
            h = tape.relu(h);
        }
        if l < last {
            if let Some(d) = dropout.as_mut() {
                if d.rate > 0.0 {
                    h = apply_dropout(tape, h, d.rate, d.rng)?;
                }
            }
        }
    }
    Ok(h)
}

fn apply_dropout(tape: &mut Tape, h: Var, rate: f64, rng: &mut RngState) -> Result<Var> {
    let (rows, cols) = tape.value(h).shape();
    let keep = 1.0 - rate;
    let mut mask = DenseMatrix::zeros(rows, cols);
    for v in mask.data_mut() {
        if rng.bernoulli(keep) {
            *v = 1.0 / keep;
        }
    }
    let mask = tape.leaf(mask);
    tape.mul(h, mask)
}

/// MLP view-origin discriminator: relu hidden layers, linear output layer,
/// row-wise softmax. Every output row is a probability vector over views.
pub fn discriminator_forward(
    tape: &mut Tape,
    z: Var,
    weights: &[Var],
    biases: &[Var],
) -> Result<Var> {
    assert!(!weights.is_empty(), "discriminator needs at least one layer");
    debug_assert_eq!(weights.len(), biases.len());
    let mut h = z;
    let last = weights.len() - 1;
    for (l, (&w, &b)) in weights.iter().zip(biases).enumerate() {
        h = tape.matmul(h, w)?;
        h = tape.add_row_vec(h, b)?;
        if l < last {
            h = tape.relu(h);
        }
    }
    Ok(tape.softmax_rows(h))
}

/// Fully-connected label head over the concatenated per-view representations:
/// `U = softmax([Z^(1) ‖ ... ‖ Z^(m)] W)`.
pub fn head_forward_fc(tape: &mut Tape, z_list: &[Var], w: Var) -> Result<Var> {
    let z = tape.concat_cols(z_list)?;
    let logits = tape.matmul(z, w)?;
    Ok(tape.softmax_rows(logits))
}

/// Graph-convolutional label head: one propagation step over the renormalized
/// averaged graph before the softmax.
pub fn head_forward_gconv(
    tape: &mut Tape,
    z_list: &[Var],
    w: Var,
    averaged: &NormalizedGraph,
) -> Result<Var> {
    let z = tape.concat_cols(z_list)?;
    let logits = tape.matmul(z, w)?;
    let propagated = tape.spmm(averaged.matrix().clone(), logits)?;
    Ok(tape.softmax_rows(propagated))
}
