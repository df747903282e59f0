//! The comparative methods: per-view GCN, averaged-graph GCN, shared-weights
//! multi-GCN, the non-adversarial ablation and the full adversarial model.

use crate::error::{Error, Result};
use crate::graph::{average_graphs, stratified_split, MultiGraphDataset};
use crate::model::{ModelConfig, ModelParams};
use crate::nd::RngState;
use crate::train::{train, TrainConfig, TrainReport, TrainVariant};

/// Distinct random streams hung off each run seed.
const SPLIT_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Plain GCN on one view.
    GcnSingle(usize),
    /// Plain GCN on the entrywise-averaged graph.
    GcnM,
    /// Shared generator weights, one head per view, evaluate the head with
    /// the lowest final training loss.
    MultiGcn,
    /// Concatenated multi-view model without the adversarial module.
    Mgl,
    /// Full adversarial model.
    Mgal,
}

impl Method {
    pub fn parse(name: &str, view: usize) -> Result<Method> {
        match name {
            "gcn_single" => Ok(Method::GcnSingle(view)),
            "gcn_m" => Ok(Method::GcnM),
            "multi_gcn" => Ok(Method::MultiGcn),
            "mgl" => Ok(Method::Mgl),
            "mgal" => Ok(Method::Mgal),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected gcn_single, gcn_m, multi_gcn, mgl or mgal)"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Method::GcnSingle(v) => format!("gcn_single({v})"),
            Method::GcnM => "gcn_m".into(),
            Method::MultiGcn => "multi_gcn".into(),
            Method::Mgl => "mgl".into(),
            Method::Mgal => "mgal".into(),
        }
    }
}

/// One experiment: a method, a labeling protocol and repetition settings.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub method: Method,
    pub label_ratio: f64,
    pub validation_fraction: f64,
    pub runs: usize,
    pub base_seed: u64,
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// Sweep guard: sizes with more view subsets than this are subsampled.
    pub subset_cap: usize,
}

impl ExperimentSpec {
    pub fn new(method: Method) -> Self {
        ExperimentSpec {
            method,
            label_ratio: 0.1,
            validation_fraction: 0.05,
            runs: 5,
            base_seed: 0,
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            subset_cap: 64,
        }
    }

    pub fn validate(&self, dataset: &MultiGraphDataset) -> Result<()> {
        self.model.validate()?;
        self.train.validate()?;
        if self.runs == 0 {
            return Err(Error::Config("need at least one run".into()));
        }
        if self.subset_cap == 0 {
            return Err(Error::Config("subset cap must be at least 1".into()));
        }
        match self.method {
            Method::GcnSingle(v) if v >= dataset.num_views() => Err(Error::Config(format!(
                "view {v} out of range for {} views",
                dataset.num_views()
            ))),
            Method::Mgal if dataset.num_views() < 2 => Err(Error::Config(
                "the adversarial method needs at least two views".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Accuracy aggregate over the runs of one experiment.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over the runs.
    pub std: f64,
    pub stopped_epochs: Vec<usize>,
}

impl RunResult {
    pub fn from_runs(accuracies: Vec<f64>, stopped_epochs: Vec<usize>) -> Self {
        let n = accuracies.len() as f64;
        let mean = accuracies.iter().sum::<f64>() / n;
        let var = accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
        RunResult {
            accuracies,
            mean,
            std: var.sqrt(),
            stopped_epochs,
        }
    }
}

/// Result plus the per-run artifacts the command line exports.
pub struct RunOutput {
    pub result: RunResult,
    pub reports: Vec<TrainReport>,
    pub params: Vec<ModelParams>,
}

/// Seed for run `run_idx` of an experiment, shared by every method so that
/// comparisons are paired on identical splits.
pub fn run_seed(base_seed: u64, run_idx: usize) -> u64 {
    base_seed + run_idx as u64
}

/// Runs one experiment: `runs` trainings on freshly drawn splits, seeds
/// derived as base_seed + run index.
pub fn run_experiment(dataset: &MultiGraphDataset, spec: &ExperimentSpec) -> Result<RunOutput> {
    spec.validate(dataset)?;
    dataset.validate()?;

    // Method-specific dataset and training assembly.
    let (train_dataset, variant, force_lambda_zero) = match spec.method {
        Method::GcnSingle(v) => (
            dataset.select_views(&[v])?,
            TrainVariant::Concat { adversarial: false },
            true,
        ),
        Method::GcnM => {
            let averaged = average_graphs(&dataset.views)?;
            (
                MultiGraphDataset::new(
                    dataset.x.clone(),
                    vec![averaged],
                    dataset.labels.clone(),
                    dataset.num_classes,
                )?,
                TrainVariant::Concat { adversarial: false },
                true,
            )
        }
        Method::MultiGcn => (dataset.clone(), TrainVariant::PerView, true),
        Method::Mgl => (
            dataset.clone(),
            TrainVariant::Concat { adversarial: false },
            true,
        ),
        Method::Mgal => (
            dataset.clone(),
            TrainVariant::Concat { adversarial: true },
            false,
        ),
    };

    let mut accuracies = Vec::with_capacity(spec.runs);
    let mut epochs = Vec::with_capacity(spec.runs);
    let mut reports = Vec::with_capacity(spec.runs);
    let mut params = Vec::with_capacity(spec.runs);
    for run_idx in 0..spec.runs {
        let seed = run_seed(spec.base_seed, run_idx);
        let streams = RngState::from_seed(seed);
        let mut split_rng = streams.derive(SPLIT_STREAM);
        let split = stratified_split(
            &train_dataset.labels,
            train_dataset.num_classes,
            spec.label_ratio,
            spec.validation_fraction,
            &mut split_rng,
        )?;

        let mut tc = spec.train.clone();
        tc.seed = streams.derive(TRAIN_STREAM).seed();
        if force_lambda_zero {
            tc.lambda = 0.0;
        }

        let outcome = train(&train_dataset, &split, &spec.model, &tc, variant)?;
        accuracies.push(outcome.report.test_accuracy);
        epochs.push(outcome.report.stopped_epoch);
        reports.push(outcome.report);
        params.push(outcome.params);
    }

    Ok(RunOutput {
        result: RunResult::from_runs(accuracies, epochs),
        reports,
        params,
    })
}
