//! Command implementations shared by the binary and the tests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cli::config::CliConfig;
use crate::cli::export::export_embeddings;
use crate::cli::manifest::{load_dataset, write_dataset, DatasetManifest};
use crate::error::{Error, Result};
use crate::graph::{preset, synth_multiview, MultiGraphDataset};
use crate::harness::{graph_count_sweep, run_experiment, RunResult};
use crate::model::{load_checkpoint, save_checkpoint};

/// Materializes the configured dataset source.
pub fn resolve_dataset(cfg: &CliConfig) -> Result<MultiGraphDataset> {
    match (&cfg.synthetic, &cfg.manifest) {
        (Some(name), None) => synth_multiview(&preset(name)?),
        (None, Some(path)) => load_dataset(&DatasetManifest::read(path)?),
        (Some(_), Some(_)) => Err(Error::Config(
            "synthetic preset and manifest are mutually exclusive".into(),
        )),
        (None, None) => Err(Error::Config(
            "no dataset: pass --synthetic <preset> or --manifest <path>".into(),
        )),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_out_dir(cfg: &CliConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|source| Error::Io {
        path: cfg.out.clone(),
        source,
    })?;
    write_file(&cfg.out.join("config.resolved"), &cfg.snapshot())
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn join_usize(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn metrics_table(method: &str, ratio: f64, result: &RunResult) -> String {
    let mut out = String::from("method\tratio\truns\tmean\tstd\taccuracies\tstopped_epochs\n");
    let _ = writeln!(
        out,
        "{method}\t{ratio}\t{}\t{}\t{}\t{}\t{}",
        result.accuracies.len(),
        result.mean,
        result.std,
        join_f64(&result.accuracies),
        join_usize(&result.stopped_epochs),
    );
    out
}

/// Runs one experiment and writes the metrics table, per-run curves, per-run
/// checkpoints and the resolved config snapshot.
pub fn cmd_train(cfg: &CliConfig) -> Result<()> {
    let dataset = resolve_dataset(cfg)?;
    let spec = cfg.experiment_spec()?;
    ensure_out_dir(cfg)?;

    let output = run_experiment(&dataset, &spec)?;
    write_file(
        &cfg.out.join("metrics.tsv"),
        &metrics_table(&spec.method.name(), spec.label_ratio, &output.result),
    )?;
    for (i, report) in output.reports.iter().enumerate() {
        let mut buf = Vec::new();
        report
            .write_log(&mut buf)
            .expect("writing to a Vec cannot fail");
        write_file(
            &cfg.out.join(format!("curves_run{i}.tsv")),
            &String::from_utf8(buf).expect("log output is utf-8"),
        )?;
    }
    for (i, params) in output.params.iter().enumerate() {
        save_checkpoint(params, &cfg.out.join(format!("run{i}.ckpt")))?;
    }
    println!(
        "{} ratio {}: mean accuracy {:.4} ± {:.4} over {} runs",
        spec.method.name(),
        spec.label_ratio,
        output.result.mean,
        output.result.std,
        output.result.accuracies.len()
    );
    Ok(())
}

/// Runs the view-count sweep and writes the size table plus per-subset raw
/// accuracies.
pub fn cmd_sweep(cfg: &CliConfig) -> Result<()> {
    let dataset = resolve_dataset(cfg)?;
    let spec = cfg.experiment_spec()?;
    ensure_out_dir(cfg)?;

    let sweep = graph_count_sweep(&dataset, &spec)?;
    let mut sizes = String::from("size\tmean\n");
    let mut subsets = String::from("size\tviews\tmean\tstd\taccuracies\n");
    for entry in &sweep.entries {
        let _ = writeln!(sizes, "{}\t{}", entry.size, entry.mean);
        for subset in &entry.subsets {
            let _ = writeln!(
                subsets,
                "{}\t{}\t{}\t{}\t{}",
                entry.size,
                join_usize(&subset.views),
                subset.result.mean,
                subset.result.std,
                join_f64(&subset.result.accuracies),
            );
        }
    }
    write_file(&cfg.out.join("sweep.tsv"), &sizes)?;
    write_file(&cfg.out.join("sweep_subsets.tsv"), &subsets)?;
    for entry in &sweep.entries {
        println!("{} views: mean accuracy {:.4}", entry.size, entry.mean);
    }
    Ok(())
}

/// Loads a checkpoint and exports per-view and concatenated embeddings.
pub fn cmd_export(cfg: &CliConfig, checkpoint: &Path) -> Result<()> {
    let dataset = resolve_dataset(cfg)?;
    let params = load_checkpoint(checkpoint)?;
    fs::create_dir_all(&cfg.out).map_err(|source| Error::Io {
        path: cfg.out.clone(),
        source,
    })?;
    export_embeddings(&params, &dataset, &cfg.out)?;
    println!(
        "exported {} views for {} nodes to {}",
        dataset.num_views(),
        dataset.num_nodes(),
        cfg.out.display()
    );
    Ok(())
}

/// Samples the configured synthetic dataset and writes it with its manifest.
pub fn cmd_synth(cfg: &CliConfig) -> Result<()> {
    let name = cfg
        .synthetic
        .as_deref()
        .ok_or_else(|| Error::Config("synth needs --synthetic <preset>".into()))?;
    let dataset = synth_multiview(&preset(name)?)?;
    write_dataset(&dataset, &cfg.out)?;
    write_file(&cfg.out.join("config.resolved"), &cfg.snapshot())?;
    println!(
        "wrote preset '{name}' ({} nodes, {} views, {} classes) to {}",
        dataset.num_nodes(),
        dataset.num_views(),
        dataset.num_classes,
        cfg.out.display()
    );
    Ok(())
}
