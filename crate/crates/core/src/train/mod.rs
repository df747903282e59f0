//! Losses, optimizers and the alternating adversarial training loop.

mod earlystop;
mod loss;
mod optim;
#[allow(clippy::module_inception)]
mod train;

pub use earlystop::EarlyStop;
pub use loss::{adversarial_loss, generator_confusion_loss, label_indicator, semi_loss};
pub use optim::{sgd_step, AdamState};
pub use train::{
    evaluate_accuracy, predict, predict_prepared, train, PreparedData, Prediction, TrainConfig,
    TrainOutcome, TrainReport, TrainVariant,
};
