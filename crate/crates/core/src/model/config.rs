//! Model architecture configuration.

use crate::error::{Error, Result};

/// Which label-prediction head sits on top of the concatenated representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadKind {
    /// `U = softmax(Z W)`.
    FullyConnected,
    /// `U = softmax(S̄ Z W)` with `S̄` the renormalized averaged graph.
    GraphConv,
}

impl HeadKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fc" => Ok(HeadKind::FullyConnected),
            "gconv" => Ok(HeadKind::GraphConv),
            other => Err(Error::Config(format!(
                "unknown head '{other}' (expected fc or gconv)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            HeadKind::FullyConnected => "fc",
            HeadKind::GraphConv => "gconv",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelConfig {
    /// Generator layer widths after the input layer; the last entry is the
    /// representation width k.
    pub gen_hidden: Vec<usize>,
    /// Discriminator hidden widths (its input is k, its output m).
    pub disc_hidden: Vec<usize>,
    pub head: HeadKind,
    /// Apply the activation after the final generator layer too. Off by
    /// default: clipping the representation to the nonnegative orthant would
    /// needlessly restrict the common subspace.
    pub final_activation: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            gen_hidden: vec![64, 16],
            disc_hidden: vec![64, 16],
            head: HeadKind::FullyConnected,
            final_activation: false,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gen_hidden.is_empty() || self.disc_hidden.is_empty() {
            return Err(Error::Config("hidden size lists must be non-empty".into()));
        }
        if self.gen_hidden.iter().chain(&self.disc_hidden).any(|s| *s == 0) {
            return Err(Error::Config("hidden sizes must be at least 1".into()));
        }
        Ok(())
    }

    /// Representation width k (the generator's output width).
    pub fn representation_dim(&self) -> usize {
        *self.gen_hidden.last().expect("validated non-empty")
    }
}
