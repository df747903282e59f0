//! Patience-based early stopping with best-parameter snapshots.

use crate::model::ModelParams;

pub struct EarlyStop {
    patience: usize,
    best: f64,
    since_improvement: usize,
    snapshot: Option<ModelParams>,
}

impl EarlyStop {
    pub fn new(patience: usize) -> Self {
        EarlyStop {
            patience,
            best: f64::INFINITY,
            since_improvement: 0,
            snapshot: None,
        }
    }

    /// Feeds one validation loss. Returns true when the loss has failed to
    /// improve for `patience` consecutive epochs and training should stop.
    /// The first observation always counts as an improvement.
    pub fn observe(&mut self, val_loss: f64, params: &ModelParams) -> bool {
        if val_loss < self.best {
            self.best = val_loss;
            self.since_improvement = 0;
            self.snapshot = Some(params.clone());
            false
        } else {
            self.since_improvement += 1;
            self.since_improvement >= self.patience
        }
    }

    pub fn best_loss(&self) -> f64 {
        self.best
    }

    pub fn epochs_since_improvement(&self) -> usize {
        self.since_improvement
    }

    /// Parameters at the best epoch seen so far, if any epoch improved.
    pub fn into_best(self) -> Option<ModelParams> {
        self.snapshot
    }
}
