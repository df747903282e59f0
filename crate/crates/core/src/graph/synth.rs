//! Synthetic multi-view datasets from stochastic block models.
//!
//! Each view is an SBM over the same class blocks, but a view only "sees" the
//! class pairs listed in its informative mask: for those pairs the cross-block
//! edge probability drops to `inter`, while every unmasked pair keeps the
//! within-block probability `intra`, leaving those classes structurally
//! exchangeable in that view. Complementary masks across views make the
//! multi-graph benefit testable by construction.

use crate::error::{Error, Result};
use crate::graph::MultiGraphDataset;
use crate::nd::{DenseMatrix, RngState, SparseMatrix};

#[derive(Debug, Clone)]
pub struct SbmViewSpec {
    /// Edge probability inside a block and across indistinguishable blocks.
    pub intra: f64,
    /// Edge probability across blocks of an informative pair.
    pub inter: f64,
    /// Unordered class pairs this view can distinguish.
    pub informative_pairs: Vec<(usize, usize)>,
}

impl SbmViewSpec {
    /// Marks every class pair that crosses the given partition groups as
    /// informative.
    pub fn from_partition(groups: &[Vec<usize>], intra: f64, inter: f64) -> Self {
        let mut pairs = Vec::new();
        for (gi, a) in groups.iter().enumerate() {
            for b in groups.iter().skip(gi + 1) {
                for &ca in a {
                    for &cb in b {
                        pairs.push((ca.min(cb), ca.max(cb)));
                    }
                }
            }
        }
        pairs.sort_unstable();
        SbmViewSpec {
            intra,
            inter,
            informative_pairs: pairs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SbmSpec {
    /// Nodes per class; block b carries class label b.
    pub block_sizes: Vec<usize>,
    pub views: Vec<SbmViewSpec>,
    /// Standard deviation of the Gaussian noise added to the one-hot class
    /// mean features.
    pub feature_noise: f64,
    pub seed: u64,
}

impl SbmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return Err(Error::Validation("block sizes must be positive".into()));
        }
        if self.views.is_empty() {
            return Err(Error::Validation("need at least one view".into()));
        }
        let c = self.block_sizes.len();
        for (vi, view) in self.views.iter().enumerate() {
            for p in [view.intra, view.inter] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Validation(format!(
                        "view {vi}: probability {p} outside [0, 1]"
                    )));
                }
            }
            for &(a, b) in &view.informative_pairs {
                if a >= b || b >= c {
                    return Err(Error::Validation(format!(
                        "view {vi}: invalid class pair ({a}, {b}) for {c} classes"
                    )));
                }
            }
        }
        if self.feature_noise < 0.0 {
            return Err(Error::Validation("feature noise must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn num_classes(&self) -> usize {
        self.block_sizes.len()
    }
}

/// Samples the multi-view dataset described by `spec`, deterministically in
/// `spec.seed`.
pub fn synth_multiview(spec: &SbmSpec) -> Result<MultiGraphDataset> {
    spec.validate()?;
    let n = spec.num_nodes();
    let c = spec.num_classes();

    let mut labels = Vec::with_capacity(n);
    for (class, &size) in spec.block_sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(class, size));
    }

    let base = RngState::from_seed(spec.seed);
    let mut views = Vec::with_capacity(spec.views.len());
    for (vi, view) in spec.views.iter().enumerate() {
        let mut rng = base.derive(vi as u64 + 1);
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                let p = if a == b || !view.informative_pairs.contains(&(a, b)) {
                    view.intra
                } else {
                    view.inter
                };
                if rng.bernoulli(p) {
                    triplets.push((i, j, 1.0));
                    triplets.push((j, i, 1.0));
                }
            }
        }
        views.push(SparseMatrix::from_triplets(n, n, &triplets)?);
    }

    let mut rng = base.derive(0);
    let mut x = DenseMatrix::zeros(n, c);
    for (i, &label) in labels.iter().enumerate() {
        for k in 0..c {
            let mean = if k == label { 1.0 } else { 0.0 };
            let noise = if spec.feature_noise > 0.0 {
                spec.feature_noise * rng.normal()
            } else {
                0.0
            };
            x.set(i, k, mean + noise);
        }
    }

    MultiGraphDataset::new(x, views, labels, c)
}

/// Named presets for the command line and the experiment harness.
pub fn preset(name: &str) -> Result<SbmSpec> {
    match name {
        // Canonical benchmark: 4 classes seen as two-group partitions, one
        // partition bit per view, so no single view separates everything but
        // any two views jointly do.
        "default" => Ok(SbmSpec {
            block_sizes: vec![100; 4],
            views: vec![
                SbmViewSpec::from_partition(&[vec![0, 1], vec![2, 3]], 0.1, 0.01),
                SbmViewSpec::from_partition(&[vec![0, 2], vec![1, 3]], 0.1, 0.01),
                SbmViewSpec::from_partition(&[vec![0, 3], vec![1, 2]], 0.1, 0.01),
            ],
            feature_noise: 1.0,
            seed: 1234,
        }),
        // Small two-view fixture for quick runs.
        "small" => Ok(SbmSpec {
            block_sizes: vec![40; 3],
            views: vec![
                SbmViewSpec::from_partition(&[vec![0], vec![1, 2]], 0.15, 0.015),
                SbmViewSpec::from_partition(&[vec![0, 1], vec![2]], 0.15, 0.015),
            ],
            feature_noise: 1.0,
            seed: 99,
        }),
        other => Err(Error::Config(format!(
            "unknown synthetic preset '{other}' (available: default, small)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_probabilities_give_two_cliques() {
        let spec = SbmSpec {
            block_sizes: vec![3, 3],
            views: vec![SbmViewSpec {
                intra: 1.0,
                inter: 0.0,
                informative_pairs: vec![(0, 1)],
            }],
            feature_noise: 0.0,
            seed: 7,
        };
        let ds = synth_multiview(&spec).unwrap();
        let a = &ds.views[0];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(a.get(i, j), 1.0);
                    assert_eq!(a.get(i + 3, j + 3), 1.0);
                }
                assert_eq!(a.get(i, j + 3), 0.0);
            }
        }
    }

    #[test]
    fn zero_noise_features_are_exact_class_means() {
        let spec = SbmSpec {
            block_sizes: vec![2, 2],
            views: vec![SbmViewSpec {
                intra: 0.5,
                inter: 0.1,
                informative_pairs: vec![(0, 1)],
            }],
            feature_noise: 0.0,
            seed: 3,
        };
        let ds = synth_multiview(&spec).unwrap();
        for i in 0..4 {
            for k in 0..2 {
                let expected = if ds.labels[i] == k { 1.0 } else { 0.0 };
                assert_eq!(ds.x.get(i, k), expected);
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = preset("small").unwrap();
        let a = synth_multiview(&spec).unwrap();
        let b = synth_multiview(&spec).unwrap();
        assert!(a.x.bits_eq(&b.x));
        assert_eq!(a.views[0], b.views[0]);
        assert_eq!(a.labels, b.labels);

        let mut other = spec;
        other.seed += 1;
        let c = synth_multiview(&other).unwrap();
        assert_ne!(a.views[0], c.views[0]);
    }

    #[test]
    fn partition_pairs_enumerated() {
        let v = SbmViewSpec::from_partition(&[vec![0, 1], vec![2, 3]], 0.1, 0.01);
        assert_eq!(v.informative_pairs, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
    }

    #[test]
    fn default_preset_is_valid_and_complementary() {
        let spec = preset("default").unwrap();
        assert_eq!(spec.num_nodes(), 400);
        assert_eq!(spec.num_classes(), 4);
        assert_eq!(spec.views.len(), 3);
        let ds = synth_multiview(&spec).unwrap();
        ds.validate().unwrap();
        // Every class pair is informative in exactly two of the three views.
        for a in 0..4 {
            for b in (a + 1)..4 {
                let count = spec
                    .views
                    .iter()
                    .filter(|v| v.informative_pairs.contains(&(a, b)))
                    .count();
                assert_eq!(count, 2, "pair ({a},{b})");
            }
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(preset("nope").is_err());
        let mut spec = preset("small").unwrap();
        spec.views[0].intra = 1.5;
        assert!(spec.validate().is_err());
        let mut spec = preset("small").unwrap();
        spec.views[0].informative_pairs = vec![(1, 1)];
        assert!(spec.validate().is_err());
        let mut spec = preset("small").unwrap();
        spec.block_sizes = vec![];
        assert!(spec.validate().is_err());
    }
}
