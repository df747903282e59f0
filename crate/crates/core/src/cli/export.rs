//! Embedding export for external projection/plotting tools.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{renormalize, MultiGraphDataset};
use crate::model::{generator_forward, ModelParams};
use crate::nd::{DenseMatrix, Tape, Var};

/// Writes one CSV per view plus the concatenated representation, one node per
/// row with the class label appended. Values use shortest-round-trip decimal
/// formatting, so parsing them back reproduces the in-memory floats exactly.
pub fn export_embeddings(
    params: &ModelParams,
    dataset: &MultiGraphDataset,
    out_dir: &Path,
) -> Result<()> {
    let d = params.generator.layers[0].rows();
    if d != dataset.feature_dim() {
        return Err(Error::Validation(format!(
            "checkpoint expects {d}-dimensional features, dataset has {}",
            dataset.feature_dim()
        )));
    }
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let mut zs = Vec::with_capacity(dataset.num_views());
    for a in &dataset.views {
        let graph = renormalize(a)?;
        let mut tape = Tape::new();
        let x = tape.leaf(dataset.x.clone());
        let thetas: Vec<Var> = params
            .generator
            .layers
            .iter()
            .map(|m| tape.leaf(m.clone()))
            .collect();
        let z = generator_forward(&mut tape, x, &graph, &thetas, false, None)?;
        zs.push(tape.value(z).clone());
    }

    for (v, z) in zs.iter().enumerate() {
        let path = out_dir.join(format!("z_view{v}.csv"));
        let text = embedding_csv(&[(v, z)], &dataset.labels);
        fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
    }
    let concat: Vec<(usize, &DenseMatrix)> = zs.iter().enumerate().collect();
    let path = out_dir.join("z_concat.csv");
    let text = embedding_csv(&concat, &dataset.labels);
    fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
    Ok(())
}

fn embedding_csv(parts: &[(usize, &DenseMatrix)], labels: &[usize]) -> String {
    let mut out = String::new();
    let mut header = Vec::new();
    for (v, z) in parts {
        for j in 0..z.cols() {
            header.push(format!("view{v}_z{j}"));
        }
    }
    header.push("label".into());
    let _ = writeln!(out, "{}", header.join(","));
    for (i, &label) in labels.iter().enumerate() {
        let mut row = Vec::new();
        for (_, z) in parts {
            row.extend(z.row(i).iter().map(|x| format!("{x}")));
        }
        row.push(format!("{label}"));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
