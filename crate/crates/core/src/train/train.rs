//! The alternating adversarial training loop.
//!
//! Each epoch runs the configured number of discriminator ascent steps on the
//! cross-graph objective, then one Adam step on the generator and head
//! against classification loss plus the weighted alignment term. Validation
//! loss drives patience-based early stopping and the best snapshot is
//! restored at the end.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{average_graphs, renormalize, DataSplit, MultiGraphDataset, NormalizedGraph};
use crate::model::{
    discriminator_forward, generator_forward, head_forward_fc, head_forward_gconv, Dropout,
    HeadKind, ModelConfig, ModelParams,
};
use crate::nd::{DenseMatrix, RngState, Tape, Var};
use crate::train::earlystop::EarlyStop;
use crate::train::loss::{
    adversarial_loss, generator_confusion_loss, label_indicator, semi_loss,
};
use crate::train::optim::{sgd_step, AdamState};

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Adam learning rate for the generator and head.
    pub gen_lr: f64,
    /// SGD learning rate for the discriminator. Zero freezes it.
    pub disc_lr: f64,
    pub patience: usize,
    /// Weight of the adversarial term in the generator objective.
    pub lambda: f64,
    /// Discriminator updates per generator update.
    pub disc_steps: usize,
    /// L2 penalty applied in the generator/head update. Off by default.
    pub weight_decay: f64,
    /// Inverted dropout on generator hidden layers. Off by default.
    pub dropout: f64,
    /// Use the non-saturating confusion objective for the generator instead
    /// of descending the discriminator's own objective.
    pub non_saturating: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 500,
            gen_lr: 0.005,
            disc_lr: 0.01,
            patience: 50,
            lambda: 1.0,
            disc_steps: 1,
            weight_decay: 0.0,
            dropout: 0.0,
            non_saturating: false,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be at least 1".into()));
        }
        if self.gen_lr <= 0.0 {
            return Err(Error::Config("generator learning rate must be positive".into()));
        }
        // The discriminator rate may be zero: the adversarial ablations
        // freeze the discriminator exactly this way.
        if self.disc_lr < 0.0 {
            return Err(Error::Config("discriminator learning rate must be nonnegative".into()));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::Config("lambda must be nonnegative".into()));
        }
        if self.disc_steps == 0 {
            return Err(Error::Config("disc_steps must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config("dropout must lie in [0, 1)".into()));
        }
        if self.weight_decay < 0.0 {
            return Err(Error::Config("weight decay must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Which assembly the loop trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainVariant {
    /// Concatenated-representation head; with `adversarial` the view-origin
    /// discriminator trains against the generator.
    Concat { adversarial: bool },
    /// Shared generator with one independent head per view and no
    /// discriminator (the shared-weights baseline).
    PerView,
}

impl TrainVariant {
    fn adversarial(&self) -> bool {
        matches!(self, TrainVariant::Concat { adversarial: true })
    }
}

/// Normalized operators and constant matrices shared across epochs.
pub struct PreparedData {
    pub x: DenseMatrix,
    pub graphs: Vec<NormalizedGraph>,
    pub averaged: Option<NormalizedGraph>,
    pub y: DenseMatrix,
}

impl PreparedData {
    pub fn new(dataset: &MultiGraphDataset, head: HeadKind) -> Result<Self> {
        let graphs = dataset
            .views
            .iter()
            .map(renormalize)
            .collect::<Result<Vec<_>>>()?;
        let averaged = match head {
            HeadKind::GraphConv => Some(renormalize(&average_graphs(&dataset.views)?)?),
            HeadKind::FullyConnected => None,
        };
        Ok(PreparedData {
            x: dataset.x.clone(),
            graphs,
            averaged,
            y: label_indicator(&dataset.labels, dataset.num_classes),
        })
    }

    fn num_views(&self) -> usize {
        self.graphs.len()
    }
}

/// Per-epoch curves and final evaluation of one training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Total generator objective per epoch.
    pub gen_loss: Vec<f64>,
    /// Classification part of the objective per epoch.
    pub semi_loss: Vec<f64>,
    /// Cross-graph objective per epoch (adversarial runs only).
    pub disc_loss: Option<Vec<f64>>,
    /// Discriminator view-origin accuracy per epoch (adversarial runs only).
    pub disc_accuracy: Option<Vec<f64>>,
    /// Validation loss per epoch; NaN when the validation set is empty.
    pub val_loss: Vec<f64>,
    pub stopped_epoch: usize,
    pub test_accuracy: f64,
    /// Per-view training losses at the final epoch (per-view-head runs only).
    pub final_per_view_train_loss: Option<Vec<f64>>,
    /// View whose head was evaluated (per-view-head runs only).
    pub selected_view: Option<usize>,
}

impl TrainReport {
    /// Line-oriented log: `#` metadata lines, then one tab-separated row per
    /// epoch.
    pub fn write_log(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# stopped_epoch {}", self.stopped_epoch)?;
        writeln!(w, "# test_accuracy {}", self.test_accuracy)?;
        if let Some(v) = self.selected_view {
            writeln!(w, "# selected_view {v}")?;
        }
        writeln!(w, "epoch\tgen_loss\tsemi_loss\tdisc_loss\tdisc_acc\tval_loss")?;
        for e in 0..self.stopped_epoch {
            let fmt = |x: f64| {
                if x.is_nan() {
                    "na".to_string()
                } else {
                    format!("{x}")
                }
            };
            let opt = |curve: &Option<Vec<f64>>| match curve {
                Some(c) => fmt(c[e]),
                None => "na".to_string(),
            };
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}",
                e + 1,
                fmt(self.gen_loss[e]),
                fmt(self.semi_loss[e]),
                opt(&self.disc_loss),
                opt(&self.disc_accuracy),
                fmt(self.val_loss[e]),
            )?;
        }
        Ok(())
    }
}

pub struct TrainOutcome {
    pub report: TrainReport,
    pub params: ModelParams,
}

/// Trains one model on one split. Deterministic in `train_cfg.seed`.
pub fn train(
    dataset: &MultiGraphDataset,
    split: &DataSplit,
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    variant: TrainVariant,
) -> Result<TrainOutcome> {
    model_cfg.validate()?;
    train_cfg.validate()?;
    dataset.validate()?;
    split.validate(dataset.num_nodes())?;
    if variant.adversarial() && dataset.num_views() < 2 {
        return Err(Error::Config(
            "adversarial training needs at least two views".into(),
        ));
    }
    if split.labeled.is_empty() {
        return Err(Error::Config("training needs labeled nodes".into()));
    }

    let prepared = PreparedData::new(dataset, model_cfg.head)?;
    let mut rng = RngState::from_seed(train_cfg.seed);
    let mut params = match variant {
        TrainVariant::Concat { adversarial } => ModelParams::init_concat(
            model_cfg,
            dataset.feature_dim(),
            dataset.num_views(),
            dataset.num_classes,
            adversarial,
            &mut rng,
        )?,
        TrainVariant::PerView => ModelParams::init_per_view(
            model_cfg,
            dataset.feature_dim(),
            dataset.num_views(),
            dataset.num_classes,
            &mut rng,
        )?,
    };

    let shapes: Vec<(usize, usize)> = params
        .generator
        .layers
        .iter()
        .map(DenseMatrix::shape)
        .chain(params.heads.iter().map(|h| h.w.shape()))
        .collect();
    let mut adam = AdamState::new(&shapes);
    let mut early = EarlyStop::new(train_cfg.patience);

    let mut gen_curve = Vec::new();
    let mut semi_curve = Vec::new();
    let mut disc_curve = Vec::new();
    let mut disc_acc_curve = Vec::new();
    let mut val_curve = Vec::new();
    let mut per_view_final = None;
    let mut stopped_epoch = 0;

    for epoch in 1..=train_cfg.max_epochs {
        if variant.adversarial() {
            let mut last = (f64::NAN, f64::NAN);
            for _ in 0..train_cfg.disc_steps {
                last = discriminator_step(&prepared, &mut params, train_cfg)
                    .map_err(|e| at_epoch(e, epoch))?;
            }
            disc_curve.push(last.0);
            disc_acc_curve.push(last.1);
        }

        let step = generator_step(
            &prepared,
            split,
            &mut params,
            &mut adam,
            model_cfg,
            train_cfg,
            variant,
            &mut rng,
        )
        .map_err(|e| at_epoch(e, epoch))?;
        if !step.total.is_finite() {
            return Err(Error::numeric_at("generator objective", epoch));
        }
        gen_curve.push(step.total);
        semi_curve.push(step.semi);
        per_view_final = step.per_view;

        let val = validation_loss(&prepared, split, &params, model_cfg, variant)
            .map_err(|e| at_epoch(e, epoch))?;
        val_curve.push(val);
        stopped_epoch = epoch;

        if !val.is_finite() && !split.validation.is_empty() {
            return Err(Error::numeric_at("validation loss", epoch));
        }
        if val.is_finite() && early.observe(val, &params) {
            break;
        }
    }

    if let Some(best) = early.into_best() {
        params = best;
    }

    let prediction = predict_prepared(&prepared, &params, model_cfg, variant)?;
    let (test_accuracy, selected_view) = match variant {
        TrainVariant::Concat { .. } => (
            evaluate_accuracy(&prediction.us[0], &dataset.labels, &split.test)?,
            None,
        ),
        TrainVariant::PerView => {
            let losses = per_view_final
                .as_ref()
                .expect("per-view losses recorded every epoch");
            let selected = select_lowest_loss_view(losses);
            (
                evaluate_accuracy(&prediction.us[selected], &dataset.labels, &split.test)?,
                Some(selected),
            )
        }
    };

    let adversarial = variant.adversarial();
    Ok(TrainOutcome {
        report: TrainReport {
            gen_loss: gen_curve,
            semi_loss: semi_curve,
            disc_loss: adversarial.then_some(disc_curve),
            disc_accuracy: adversarial.then_some(disc_acc_curve),
            val_loss: val_curve,
            stopped_epoch,
            test_accuracy,
            final_per_view_train_loss: per_view_final.filter(|_| variant == TrainVariant::PerView),
            selected_view,
        },
        params,
    })
}

/// View with the lowest final training loss; ties break toward the lower
/// view index.
fn select_lowest_loss_view(losses: &[f64]) -> usize {
    let mut selected = 0;
    for (i, l) in losses.iter().enumerate().skip(1) {
        if *l < losses[selected] {
            selected = i;
        }
    }
    selected
}

fn at_epoch(e: Error, epoch: usize) -> Error {
    match e {
        Error::Numeric { what, epoch: None } => Error::Numeric {
            what,
            epoch: Some(epoch),
        },
        other => other,
    }
}

/// Generator representations for every view with the current parameters,
/// evaluated without recording generator gradients.
fn representations_detached(
    prepared: &PreparedData,
    params: &ModelParams,
) -> Result<Vec<DenseMatrix>> {
    let mut zs = Vec::with_capacity(prepared.num_views());
    for graph in &prepared.graphs {
        let mut scratch = Tape::new();
        let x = scratch.leaf(prepared.x.clone());
        let thetas: Vec<Var> = params
            .generator
            .layers
            .iter()
            .map(|m| scratch.leaf(m.clone()))
            .collect();
        let z = generator_forward(&mut scratch, x, graph, &thetas, false, None)?;
        zs.push(scratch.value(z).clone());
    }
    Ok(zs)
}

/// One SGD ascent step on the cross-graph objective. Only discriminator
/// parameters change. Returns the objective value and the discriminator's
/// view-origin accuracy before the update.
fn discriminator_step(
    prepared: &PreparedData,
    params: &mut ModelParams,
    cfg: &TrainConfig,
) -> Result<(f64, f64)> {
    let zs = representations_detached(prepared, params)?;
    let disc = params
        .discriminator
        .as_mut()
        .expect("adversarial training initializes the discriminator");

    let mut tape = Tape::new();
    let w_vars: Vec<Var> = disc.weights.iter().map(|m| tape.leaf(m.clone())).collect();
    let b_vars: Vec<Var> = disc.biases.iter().map(|m| tape.leaf(m.clone())).collect();
    let mut outputs = Vec::with_capacity(zs.len());
    for z in &zs {
        let z_var = tape.leaf(z.clone());
        outputs.push(discriminator_forward(&mut tape, z_var, &w_vars, &b_vars)?);
    }
    let objective = adversarial_loss(&mut tape, &outputs)?;
    let value = tape.scalar(objective)?;
    if !value.is_finite() {
        return Err(Error::numeric("cross-graph objective"));
    }

    let mut correct = 0usize;
    let mut total = 0usize;
    for (v, &out) in outputs.iter().enumerate() {
        let probs = tape.value(out);
        for i in 0..probs.rows() {
            if probs.argmax_row(i) == v {
                correct += 1;
            }
            total += 1;
        }
    }
    let accuracy = correct as f64 / total as f64;

    // Ascend the objective: descend its negation.
    let negated = tape.scale(objective, -1.0);
    tape.backward(negated)?;
    let grads: Vec<DenseMatrix> = w_vars
        .iter()
        .chain(&b_vars)
        .map(|v| tape.grad(*v).clone())
        .collect();
    let mut refs: Vec<&mut DenseMatrix> = disc
        .weights
        .iter_mut()
        .chain(disc.biases.iter_mut())
        .collect();
    sgd_step(cfg.disc_lr, 0.0, &mut refs, &grads)?;
    Ok((value, accuracy))
}

struct GenStep {
    total: f64,
    semi: f64,
    per_view: Option<Vec<f64>>,
}

/// One Adam step on the generator and head parameters jointly. The
/// discriminator participates as a constant.
#[allow(clippy::too_many_arguments)]
fn generator_step(
    prepared: &PreparedData,
    split: &DataSplit,
    params: &mut ModelParams,
    adam: &mut AdamState,
    model_cfg: &ModelConfig,
    cfg: &TrainConfig,
    variant: TrainVariant,
    rng: &mut RngState,
) -> Result<GenStep> {
    let mut tape = Tape::new();
    let x = tape.leaf(prepared.x.clone());
    let thetas: Vec<Var> = params
        .generator
        .layers
        .iter()
        .map(|m| tape.leaf(m.clone()))
        .collect();
    let head_vars: Vec<Var> = params.heads.iter().map(|h| tape.leaf(h.w.clone())).collect();

    let mut zs = Vec::with_capacity(prepared.num_views());
    for graph in &prepared.graphs {
        let dropout = if cfg.dropout > 0.0 {
            Some(Dropout {
                rate: cfg.dropout,
                rng: &mut *rng,
            })
        } else {
            None
        };
        let z = generator_forward(
            &mut tape,
            x,
            graph,
            &thetas,
            model_cfg.final_activation,
            dropout,
        )?;
        zs.push(z);
    }

    let (semi, per_view) = match variant {
        TrainVariant::Concat { .. } => {
            let u = match model_cfg.head {
                HeadKind::FullyConnected => head_forward_fc(&mut tape, &zs, head_vars[0])?,
                HeadKind::GraphConv => head_forward_gconv(
                    &mut tape,
                    &zs,
                    head_vars[0],
                    prepared.averaged.as_ref().expect("prepared for gconv head"),
                )?,
            };
            (semi_loss(&mut tape, u, &prepared.y, &split.labeled)?, None)
        }
        TrainVariant::PerView => {
            let mut acc: Option<Var> = None;
            let mut values = Vec::with_capacity(zs.len());
            for (&z, &w) in zs.iter().zip(&head_vars) {
                let u = head_forward_fc(&mut tape, &[z], w)?;
                let l = semi_loss(&mut tape, u, &prepared.y, &split.labeled)?;
                values.push(tape.scalar(l)?);
                acc = Some(match acc {
                    Some(a) => tape.add(a, l)?,
                    None => l,
                });
            }
            (acc.expect("at least one view"), Some(values))
        }
    };

    // Skip the adversarial branch entirely at lambda 0 so the ablation runs
    // the exact same tape as the non-adversarial baseline.
    let total = if variant.adversarial() && cfg.lambda > 0.0 {
        let disc = params.discriminator.as_ref().expect("adversarial params");
        let w_vars: Vec<Var> = disc.weights.iter().map(|m| tape.leaf(m.clone())).collect();
        let b_vars: Vec<Var> = disc.biases.iter().map(|m| tape.leaf(m.clone())).collect();
        let mut outputs = Vec::with_capacity(zs.len());
        for &z in &zs {
            outputs.push(discriminator_forward(&mut tape, z, &w_vars, &b_vars)?);
        }
        let alignment = if cfg.non_saturating {
            generator_confusion_loss(&mut tape, &outputs)?
        } else {
            adversarial_loss(&mut tape, &outputs)?
        };
        let weighted = tape.scale(alignment, cfg.lambda);
        tape.add(semi, weighted)?
    } else {
        semi
    };

    let total_value = tape.scalar(total)?;
    let semi_value = tape.scalar(semi)?;
    tape.backward(total)?;

    let grads: Vec<DenseMatrix> = thetas
        .iter()
        .chain(&head_vars)
        .map(|v| tape.grad(*v).clone())
        .collect();
    let mut refs: Vec<&mut DenseMatrix> = params
        .generator
        .layers
        .iter_mut()
        .chain(params.heads.iter_mut().map(|h| &mut h.w))
        .collect();
    adam.step(cfg.gen_lr, cfg.weight_decay, &mut refs, &grads)?;

    Ok(GenStep {
        total: total_value,
        semi: semi_value,
        per_view,
    })
}

/// Classification loss over the given node set with the current parameters,
/// evaluated in inference mode (no dropout). NaN for an empty set.
fn semi_loss_on(
    prepared: &PreparedData,
    params: &ModelParams,
    model_cfg: &ModelConfig,
    variant: TrainVariant,
    indices: &[usize],
) -> Result<f64> {
    if indices.is_empty() {
        return Ok(f64::NAN);
    }
    let prediction = predict_prepared(prepared, params, model_cfg, variant)?;
    let mut total = 0.0;
    for u in &prediction.us {
        let mut tape = Tape::new();
        let u_var = tape.leaf(u.clone());
        let l = semi_loss(&mut tape, u_var, &prepared.y, indices)?;
        total += tape.scalar(l)?;
    }
    Ok(total)
}

fn validation_loss(
    prepared: &PreparedData,
    split: &DataSplit,
    params: &ModelParams,
    model_cfg: &ModelConfig,
    variant: TrainVariant,
) -> Result<f64> {
    semi_loss_on(prepared, params, model_cfg, variant, &split.validation)
}

/// Forward outputs with fixed parameters: per-view representations and the
/// head's probability predictions (one matrix, or one per view for per-view
/// heads).
pub struct Prediction {
    pub zs: Vec<DenseMatrix>,
    pub us: Vec<DenseMatrix>,
}

pub fn predict_prepared(
    prepared: &PreparedData,
    params: &ModelParams,
    model_cfg: &ModelConfig,
    variant: TrainVariant,
) -> Result<Prediction> {
    let mut tape = Tape::new();
    let x = tape.leaf(prepared.x.clone());
    let thetas: Vec<Var> = params
        .generator
        .layers
        .iter()
        .map(|m| tape.leaf(m.clone()))
        .collect();
    let head_vars: Vec<Var> = params.heads.iter().map(|h| tape.leaf(h.w.clone())).collect();
    let mut zs = Vec::with_capacity(prepared.num_views());
    for graph in &prepared.graphs {
        zs.push(generator_forward(
            &mut tape,
            x,
            graph,
            &thetas,
            model_cfg.final_activation,
            None,
        )?);
    }
    let us = match variant {
        TrainVariant::Concat { .. } => {
            let u = match model_cfg.head {
                HeadKind::FullyConnected => head_forward_fc(&mut tape, &zs, head_vars[0])?,
                HeadKind::GraphConv => head_forward_gconv(
                    &mut tape,
                    &zs,
                    head_vars[0],
                    prepared.averaged.as_ref().expect("prepared for gconv head"),
                )?,
            };
            vec![tape.value(u).clone()]
        }
        TrainVariant::PerView => {
            let mut us = Vec::with_capacity(zs.len());
            for (&z, &w) in zs.iter().zip(&head_vars) {
                let u = head_forward_fc(&mut tape, &[z], w)?;
                us.push(tape.value(u).clone());
            }
            us
        }
    };
    Ok(Prediction {
        zs: zs.into_iter().map(|z| tape.value(z).clone()).collect(),
        us,
    })
}

/// Convenience wrapper that prepares the dataset first.
pub fn predict(
    dataset: &MultiGraphDataset,
    params: &ModelParams,
    model_cfg: &ModelConfig,
    variant: TrainVariant,
) -> Result<Prediction> {
    let prepared = PreparedData::new(dataset, model_cfg.head)?;
    predict_prepared(&prepared, params, model_cfg, variant)
}

/// Fraction of `indices` whose argmax prediction matches the label. Argmax
/// ties break toward the lower class index.
pub fn evaluate_accuracy(u: &DenseMatrix, labels: &[usize], indices: &[usize]) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::Config("accuracy over an empty index set".into()));
    }
    let mut correct = 0usize;
    for &i in indices {
        if i >= u.rows() {
            return Err(Error::Index {
                what: "prediction rows",
                index: i,
                len: u.rows(),
            });
        }
        if u.argmax_row(i) == labels[i] {
            correct += 1;
        }
    }
    Ok(correct as f64 / indices.len() as f64)
}
