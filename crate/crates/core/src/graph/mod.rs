//! Graph containers, propagation operators, kNN construction, synthetic
//! datasets and data splits.

mod dataset;
mod knn;
mod split;
mod synth;

pub use dataset::{average_graphs, renormalize, DataSplit, MultiGraphDataset, NormalizedGraph};
pub use knn::{knn_graph, KnnMetric, DEFAULT_KNN_K, DEFAULT_KNN_METRIC};
pub use split::stratified_split;
pub use synth::{preset, synth_multiview, SbmSpec, SbmViewSpec};
