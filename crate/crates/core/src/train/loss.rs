//! The two training objectives: cross-graph adversarial alignment and
//! semi-supervised classification.

use crate::error::{Error, Result};
use crate::nd::{DenseMatrix, Tape, Var};

/// One-hot label indicator matrix: row i is the unit vector of node i's class.
pub fn label_indicator(labels: &[usize], num_classes: usize) -> DenseMatrix {
    let mut y = DenseMatrix::zeros(labels.len(), num_classes);
    for (i, &l) in labels.iter().enumerate() {
        y.set(i, l, 1.0);
    }
    y
}

fn column_mask(rows: usize, cols: usize, column: usize, inside: f64, outside: f64) -> DenseMatrix {
    let mut m = DenseMatrix::filled(rows, cols, outside);
    for i in 0..rows {
        m.set(i, column, inside);
    }
    m
}

fn check_disc_outputs(tape: &Tape, disc_outputs: &[Var]) -> Result<(usize, usize)> {
    let m = disc_outputs.len();
    if m < 2 {
        return Err(Error::Config(
            "adversarial alignment needs at least two views".into(),
        ));
    }
    let n = tape.value(disc_outputs[0]).rows();
    for &out in disc_outputs {
        let shape = tape.value(out).shape();
        if shape != (n, m) {
            return Err(Error::dim("adversarial_loss", (n, m), shape));
        }
    }
    Ok((n, m))
}

/// Cross-graph discrimination objective, a scalar that is never positive:
/// the per-view mean log-probability the discriminator assigns to the true
/// view of origin, plus the mean log-probability of "not u" over the other
/// views, averaged over views. The discriminator ascends it; the generator
/// descends it.
///
/// `disc_outputs[v]` must be the discriminator's n x m row-probability output
/// for the view-v representations. The expectation over nodes is the mean
/// over all n rows.
pub fn adversarial_loss(tape: &mut Tape, disc_outputs: &[Var]) -> Result<Var> {
    let (n, m) = check_disc_outputs(tape, disc_outputs)?;
    let ones = tape.leaf(DenseMatrix::filled(n, m, 1.0));
    let mut total: Option<Var> = None;
    for (v, &probs) in disc_outputs.iter().enumerate() {
        let own_mask = tape.leaf(column_mask(n, m, v, 1.0, 0.0));
        let ln_p = tape.ln(probs);
        let own = tape.mul(ln_p, own_mask)?;
        let own_sum = tape.sum(own);
        let own_term = tape.scale(own_sum, 1.0 / n as f64);

        let other_mask = tape.leaf(column_mask(n, m, v, 0.0, 1.0));
        let complement = tape.sub(ones, probs)?;
        let ln_q = tape.ln(complement);
        let other = tape.mul(ln_q, other_mask)?;
        let other_sum = tape.sum(other);
        let other_term = tape.scale(other_sum, 1.0 / (n as f64 * (m - 1) as f64));

        let view_total = tape.add(own_term, other_term)?;
        total = Some(match total {
            Some(acc) => tape.add(acc, view_total)?,
            None => view_total,
        });
    }
    Ok(tape.scale(total.expect("m >= 2"), 1.0 / m as f64))
}

/// Non-saturating alternative for the generator: instead of descending the
/// saturating objective above, it maximizes the log-probability the
/// discriminator assigns to the *other* views. Returned already negated so
/// the generator can minimize it alongside the classification loss.
pub fn generator_confusion_loss(tape: &mut Tape, disc_outputs: &[Var]) -> Result<Var> {
    let (n, m) = check_disc_outputs(tape, disc_outputs)?;
    let mut total: Option<Var> = None;
    for (v, &probs) in disc_outputs.iter().enumerate() {
        let other_mask = tape.leaf(column_mask(n, m, v, 0.0, 1.0));
        let ln_p = tape.ln(probs);
        let other = tape.mul(ln_p, other_mask)?;
        let other_sum = tape.sum(other);
        let term = tape.scale(other_sum, 1.0 / (n as f64 * (m - 1) as f64));
        total = Some(match total {
            Some(acc) => tape.add(acc, term)?,
            None => term,
        });
    }
    Ok(tape.scale(total.expect("m >= 2"), -1.0 / m as f64))
}

/// Cross-entropy over the labeled nodes: `-Σ_{i∈L} Σ_j Y_ij ln U_ij`.
pub fn semi_loss(tape: &mut Tape, u: Var, y: &DenseMatrix, labeled: &[usize]) -> Result<Var> {
    if labeled.is_empty() {
        return Err(Error::Config("semi-supervised loss needs labeled nodes".into()));
    }
    let (rows, cols) = tape.value(u).shape();
    if y.shape() != (rows, cols) {
        return Err(Error::dim("semi_loss", (rows, cols), y.shape()));
    }
    let u_sel = tape.row_select(u, labeled)?;
    let mut y_sel = DenseMatrix::zeros(labeled.len(), cols);
    for (row, &i) in labeled.iter().enumerate() {
        y_sel.row_mut(row).copy_from_slice(y.row(i));
    }
    let y_sel = tape.leaf(y_sel);
    let ln_u = tape.ln(u_sel);
    let picked = tape.mul(y_sel, ln_u)?;
    let total = tape.sum(picked);
    Ok(tape.scale(total, -1.0))
}
