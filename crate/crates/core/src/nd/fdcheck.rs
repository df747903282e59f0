//! Central finite-difference gradient checking.
//!
//! `finite_diff_check` is the independent oracle used by the gradient suites:
//! it perturbs every parameter entry, forms the central difference of the loss
//! and compares it against the gradient the tape reports at the base point.

use crate::error::{Error, Result};
use crate::nd::DenseMatrix;

#[derive(Debug, Clone)]
pub struct FdReport {
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub entries_checked: usize,
    /// Entries excluded because the probe detected a kink (relu corner, log
    /// clamp boundary) inside the difference interval.
    pub entries_skipped: usize,
}

/// Compares tape gradients against central finite differences.
///
/// `f` evaluates the scalar loss and its tape gradients (one matrix per
/// parameter, same shapes) at the supplied parameter values. The loss must be
/// smooth at the base point except possibly at isolated kinks; entries whose
/// probe interval straddles a kink are detected through the second difference
/// `|f(x+h) + f(x-h) - 2 f(x)|`, which is O(h²) for smooth f but O(h) across a
/// slope discontinuity, and are skipped rather than failed.
pub fn finite_diff_check<F>(
    params: &[DenseMatrix],
    step: f64,
    tolerance: f64,
    mut f: F,
) -> Result<FdReport>
where
    F: FnMut(&[DenseMatrix]) -> Result<(f64, Vec<DenseMatrix>)>,
{
    if step <= 0.0 {
        return Err(Error::Validation(format!("step must be positive, got {step}")));
    }
    let mut work: Vec<DenseMatrix> = params.to_vec();
    let (f0, grads) = f(&work)?;
    if !f0.is_finite() {
        return Err(Error::numeric("finite_diff_check base loss"));
    }
    if grads.len() != params.len() {
        return Err(Error::Validation(format!(
            "gradient count {} does not match parameter count {}",
            grads.len(),
            params.len()
        )));
    }
    for (g, p) in grads.iter().zip(params) {
        if g.shape() != p.shape() {
            return Err(Error::dim("finite_diff_check", p.shape(), g.shape()));
        }
    }

    let kink_threshold = step.powf(1.5) * f0.abs().max(1.0);
    let mut max_rel_err: f64 = 0.0;
    let mut checked = 0;
    let mut skipped = 0;

    for pi in 0..params.len() {
        for e in 0..params[pi].len() {
            let base = work[pi].data()[e];

            work[pi].data_mut()[e] = base + step;
            let (f_plus, _) = f(&work)?;
            work[pi].data_mut()[e] = base - step;
            let (f_minus, _) = f(&work)?;
            work[pi].data_mut()[e] = base;

            if !f_plus.is_finite() || !f_minus.is_finite() {
                return Err(Error::numeric("finite_diff_check probe loss"));
            }

            if (f_plus + f_minus - 2.0 * f0).abs() > kink_threshold {
                skipped += 1;
                continue;
            }

            let fd = (f_plus - f_minus) / (2.0 * step);
            let g = grads[pi].data()[e];
            // The floor in the denominator keeps central-difference roundoff
            // (~1e-10 absolute at step 1e-6) from dominating tiny gradients.
            let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-3);
            max_rel_err = max_rel_err.max(rel);
            checked += 1;
        }
    }

    Ok(FdReport {
        max_rel_err,
        tolerance,
        passed: max_rel_err < tolerance,
        entries_checked: checked,
        entries_skipped: skipped,
    })
}
