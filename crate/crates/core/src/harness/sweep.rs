//! Accuracy as a function of how many views the model sees.

use crate::error::{Error, Result};
use crate::graph::MultiGraphDataset;
use crate::harness::methods::{run_experiment, ExperimentSpec, Method, RunResult};
use crate::nd::RngState;

#[derive(Debug, Clone)]
pub struct SubsetResult {
    /// View indices of this subset, ascending.
    pub views: Vec<usize>,
    pub result: RunResult,
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub size: usize,
    /// Mean accuracy pooled over every subset and run of this size.
    pub mean: f64,
    pub subsets: Vec<SubsetResult>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
}

/// All size-`s` subsets of `0..m` in lexicographic order.
fn combinations(m: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..s).collect();
    if s == 0 || s > m {
        return out;
    }
    loop {
        out.push(current.clone());
        // Advance the rightmost index that can still move.
        let mut i = s;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < m - s + i {
                current[i] += 1;
                for j in i + 1..s {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// For every subset size, trains the spec's method on each view subset and
/// averages the accuracies. Size-one subsets fall back to the single-view
/// GCN since the adversarial model is undefined there. Sizes with more than
/// `spec.subset_cap` subsets are uniformly subsampled with the base seed.
pub fn graph_count_sweep(dataset: &MultiGraphDataset, spec: &ExperimentSpec) -> Result<SweepResult> {
    let m = dataset.num_views();
    if m < 2 {
        return Err(Error::Config(
            "a graph-count sweep needs at least two views".into(),
        ));
    }
    spec.validate(dataset)?;

    let mut entries = Vec::with_capacity(m);
    for size in 1..=m {
        let mut subsets = combinations(m, size);
        if subsets.len() > spec.subset_cap {
            let mut rng = RngState::from_seed(spec.base_seed).derive(1000 + size as u64);
            let mut picked = Vec::with_capacity(spec.subset_cap);
            for _ in 0..spec.subset_cap {
                picked.push(subsets.remove(rng.below(subsets.len())));
            }
            picked.sort();
            subsets = picked;
        }

        let mut results = Vec::with_capacity(subsets.len());
        let mut acc_sum = 0.0;
        let mut acc_count = 0usize;
        for views in subsets {
            let sub = dataset.select_views(&views)?;
            let mut sub_spec = spec.clone();
            sub_spec.method = if size == 1 {
                Method::GcnSingle(0)
            } else {
                spec.method
            };
            let out = run_experiment(&sub, &sub_spec)?;
            acc_sum += out.result.accuracies.iter().sum::<f64>();
            acc_count += out.result.accuracies.len();
            results.push(SubsetResult {
                views,
                result: out.result,
            });
        }
        entries.push(SweepEntry {
            size,
            mean: acc_sum / acc_count as f64,
            subsets: results,
        });
    }
    Ok(SweepResult { entries })
}
