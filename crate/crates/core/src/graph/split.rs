//! Stratified labeled/validation/test splitting.

use crate::error::{Error, Result};
use crate::graph::DataSplit;
use crate::nd::RngState;

/// Draws `ceil(ratio * class_size)` labeled nodes per class, then a
/// class-agnostic validation pool of `round(validation_fraction * n)` nodes
/// from the remaining ones; everything else is test.
pub fn stratified_split(
    labels: &[usize],
    num_classes: usize,
    ratio: f64,
    validation_fraction: f64,
    rng: &mut RngState,
) -> Result<DataSplit> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Validation(format!(
            "label ratio must be in (0, 1), got {ratio}"
        )));
    }
    if !(0.0..1.0 - ratio).contains(&validation_fraction) {
        return Err(Error::Validation(format!(
            "validation fraction {validation_fraction} must be in [0, {})",
            1.0 - ratio
        )));
    }
    let n = labels.len();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &l) in labels.iter().enumerate() {
        if l >= num_classes {
            return Err(Error::Validation(format!("label {l} outside 0..{num_classes}")));
        }
        by_class[l].push(i);
    }

    let mut labeled = Vec::new();
    let mut remainder = Vec::new();
    for (class, mut members) in by_class.into_iter().enumerate() {
        if members.is_empty() {
            return Err(Error::Validation(format!(
                "class {class} has no nodes to label"
            )));
        }
        let take = (ratio * members.len() as f64).ceil() as usize;
        rng.shuffle(&mut members);
        labeled.extend_from_slice(&members[..take]);
        remainder.extend_from_slice(&members[take..]);
    }

    let val_count = (validation_fraction * n as f64).round() as usize;
    if val_count > remainder.len() {
        return Err(Error::Validation(format!(
            "validation pool of {val_count} exceeds the {} unlabeled nodes",
            remainder.len()
        )));
    }
    remainder.sort_unstable();
    rng.shuffle(&mut remainder);
    let validation = remainder[..val_count].to_vec();
    let test = remainder[val_count..].to_vec();

    let mut split = DataSplit {
        labeled,
        validation,
        test,
        label_ratio: ratio,
    };
    split.labeled.sort_unstable();
    split.validation.sort_unstable();
    split.test.sort_unstable();
    split.validate(n)?;
    Ok(split)
}
