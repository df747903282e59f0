//! The three networks: shared-parameter graph-convolutional generator,
//! view-origin discriminator and label-prediction head.

mod checkpoint;
mod config;
mod forward;
mod params;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use config::{HeadKind, ModelConfig};
pub use forward::{
    discriminator_forward, generator_forward, head_forward_fc, head_forward_gconv, Dropout,
};
pub use params::{init_glorot, DiscriminatorParams, GeneratorParams, HeadParams, ModelParams};
