//! On-disk dataset format: a flat manifest pointing at a delimited feature
//! table, per-view edge lists and a label file.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::MultiGraphDataset;
use crate::nd::{DenseMatrix, SparseMatrix};

/// Parsed manifest: file locations plus the declared dimensions, which are
/// checked against the actual file contents on load.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub features: PathBuf,
    pub labels: PathBuf,
    pub views: Vec<PathBuf>,
    pub num_nodes: usize,
    pub feature_dim: usize,
    pub num_views: usize,
    pub num_classes: usize,
}

impl DatasetManifest {
    /// Reads a `key = value` manifest. Relative paths resolve against the
    /// manifest's directory. Repeated `view` keys list the edge files in
    /// order.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let mut features = None;
        let mut labels = None;
        let mut views = Vec::new();
        let (mut n, mut d, mut m, mut c) = (None, None, None, None);
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: "expected 'key = value'".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let parse_count = |v: &str| -> Result<usize> {
                v.parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("expected a count, found '{v}'"),
                })
            };
            match key {
                "features" => features = Some(dir.join(value)),
                "labels" => labels = Some(dir.join(value)),
                "view" => views.push(dir.join(value)),
                "n" => n = Some(parse_count(value)?),
                "d" => d = Some(parse_count(value)?),
                "m" => m = Some(parse_count(value)?),
                "c" => c = Some(parse_count(value)?),
                other => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: idx + 1,
                        msg: format!("unknown manifest key '{other}'"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Validation(format!("manifest is missing '{what}'"));
        let manifest = DatasetManifest {
            features: features.ok_or_else(|| missing("features"))?,
            labels: labels.ok_or_else(|| missing("labels"))?,
            num_views: m.unwrap_or(views.len()),
            views,
            num_nodes: n.ok_or_else(|| missing("n"))?,
            feature_dim: d.ok_or_else(|| missing("d"))?,
            num_classes: c.ok_or_else(|| missing("c"))?,
        };
        if manifest.views.is_empty() {
            return Err(Error::Validation("manifest lists no views".into()));
        }
        if manifest.num_views != manifest.views.len() {
            return Err(Error::Validation(format!(
                "manifest declares m = {} but lists {} views",
                manifest.num_views,
                manifest.views.len()
            )));
        }
        Ok(manifest)
    }
}

/// Loads and validates the dataset a manifest describes.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<MultiGraphDataset> {
    let x = read_features(&manifest.features)?;
    if x.shape() != (manifest.num_nodes, manifest.feature_dim) {
        return Err(Error::Validation(format!(
            "features are {}x{}, manifest declares {}x{}",
            x.rows(),
            x.cols(),
            manifest.num_nodes,
            manifest.feature_dim
        )));
    }
    let labels = read_labels(&manifest.labels, manifest.num_classes)?;
    if labels.len() != manifest.num_nodes {
        return Err(Error::Validation(format!(
            "label file has {} entries, manifest declares {} nodes",
            labels.len(),
            manifest.num_nodes
        )));
    }
    let views = manifest
        .views
        .iter()
        .map(|p| read_edge_list(p, manifest.num_nodes))
        .collect::<Result<Vec<_>>>()?;
    MultiGraphDataset::new(x, views, labels, manifest.num_classes)
}

/// Delimited numeric table, one node per row; commas and whitespace both
/// separate columns.
fn read_features(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("bad feature value '{t}'"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

/// One class id per line.
fn read_labels(path: &Path, num_classes: usize) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let label: usize = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg: format!("bad label '{line}'"),
        })?;
        if label >= num_classes {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("label {label} outside 0..{num_classes}"),
            });
        }
        labels.push(label);
    }
    Ok(labels)
}

/// Whitespace-separated `i j [w]` lines with 0-based node ids. The edge set
/// is symmetrized and deduplicated; self-loops are rejected, as are repeated
/// edges whose weights disagree.
fn read_edge_list(path: &Path, n: usize) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut weights: std::collections::BTreeMap<(usize, usize), f64> =
        std::collections::BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            msg,
        };
        let mut parts = line.split_whitespace();
        let i: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err("missing source node".into()))?;
        let j: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err("missing target node".into()))?;
        let w: f64 = match parts.next() {
            Some(t) => t
                .parse()
                .map_err(|_| parse_err(format!("bad edge weight '{t}'")))?,
            None => 1.0,
        };
        if parts.next().is_some() {
            return Err(parse_err("trailing tokens after 'i j w'".into()));
        }
        if i == j {
            return Err(parse_err(format!("self-loop on node {i}")));
        }
        if i >= n || j >= n {
            return Err(parse_err(format!("edge ({i}, {j}) outside 0..{n}")));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(parse_err(format!("edge weight {w} must be finite and nonnegative")));
        }
        let key = (i.min(j), i.max(j));
        if let Some(prev) = weights.get(&key) {
            if (prev - w).abs() > 1e-12 {
                return Err(parse_err(format!(
                    "edge ({}, {}) repeated with conflicting weights {prev} and {w}",
                    key.0, key.1
                )));
            }
        } else {
            weights.insert(key, w);
        }
    }
    let mut triplets = Vec::with_capacity(weights.len() * 2);
    for (&(i, j), &w) in &weights {
        triplets.push((i, j, w));
        triplets.push((j, i, w));
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

/// Writes a dataset plus its manifest into `dir` (used by the synth command).
pub fn write_dataset(dataset: &MultiGraphDataset, dir: &Path) -> Result<()> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source: std::io::Error| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let features_path = dir.join("features.csv");
    let mut features = String::new();
    for i in 0..dataset.num_nodes() {
        let row: Vec<String> = dataset.x.row(i).iter().map(|v| format!("{v}")).collect();
        features.push_str(&row.join(","));
        features.push('\n');
    }
    fs::write(&features_path, features).map_err(io_err(&features_path))?;

    let labels_path = dir.join("labels.txt");
    let labels: String = dataset.labels.iter().map(|l| format!("{l}\n")).collect();
    fs::write(&labels_path, labels).map_err(io_err(&labels_path))?;

    let mut view_names = Vec::new();
    for (v, a) in dataset.views.iter().enumerate() {
        let name = format!("view{v}.edges");
        let mut edges = String::new();
        for i in 0..a.rows() {
            for (j, w) in a.iter_row(i) {
                if i < j {
                    if w == 1.0 {
                        edges.push_str(&format!("{i} {j}\n"));
                    } else {
                        edges.push_str(&format!("{i} {j} {w}\n"));
                    }
                }
            }
        }
        let path = dir.join(&name);
        fs::write(&path, edges).map_err(io_err(&path))?;
        view_names.push(name);
    }

    let manifest_path = dir.join("manifest.txt");
    let mut manifest = String::new();
    manifest.push_str("features = features.csv\n");
    manifest.push_str("labels = labels.txt\n");
    for name in &view_names {
        manifest.push_str(&format!("view = {name}\n"));
    }
    manifest.push_str(&format!("n = {}\n", dataset.num_nodes()));
    manifest.push_str(&format!("d = {}\n", dataset.feature_dim()));
    manifest.push_str(&format!("m = {}\n", dataset.num_views()));
    manifest.push_str(&format!("c = {}\n", dataset.num_classes));
    fs::write(&manifest_path, manifest).map_err(io_err(&manifest_path))?;
    Ok(())
}
