//! Trainable parameter containers and Glorot initialization.

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::nd::{DenseMatrix, RngState};

/// Uniform Glorot initialization on `[-b, b]` with `b = sqrt(6 / (fan_in + fan_out))`.
pub fn init_glorot(rows: usize, cols: usize, rng: &mut RngState) -> DenseMatrix {
    assert!(rows > 0 && cols > 0, "weight matrices need positive dimensions");
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let mut m = DenseMatrix::zeros(rows, cols);
    for v in m.data_mut() {
        *v = rng.uniform(-bound, bound);
    }
    m
}

/// Generator weights `Θ`, one matrix per layer, shared across all graphs.
#[derive(Debug, Clone)]
pub struct GeneratorParams {
    pub layers: Vec<DenseMatrix>,
}

impl GeneratorParams {
    pub fn init(input_dim: usize, hidden: &[usize], rng: &mut RngState) -> Self {
        let mut layers = Vec::with_capacity(hidden.len());
        let mut fan_in = input_dim;
        for &out in hidden {
            layers.push(init_glorot(fan_in, out, rng));
            fan_in = out;
        }
        GeneratorParams { layers }
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("at least one layer").cols()
    }
}

/// Discriminator MLP: weights and biases for the chain k -> hidden... -> m.
#[derive(Debug, Clone)]
pub struct DiscriminatorParams {
    pub weights: Vec<DenseMatrix>,
    pub biases: Vec<DenseMatrix>,
}

impl DiscriminatorParams {
    pub fn init(input_dim: usize, hidden: &[usize], num_views: usize, rng: &mut RngState) -> Self {
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        let mut fan_in = input_dim;
        for &out in hidden.iter().chain(std::iter::once(&num_views)) {
            weights.push(init_glorot(fan_in, out, rng));
            biases.push(DenseMatrix::zeros(1, out));
            fan_in = out;
        }
        DiscriminatorParams { weights, biases }
    }

    pub fn num_views(&self) -> usize {
        self.weights.last().expect("at least one layer").cols()
    }
}

/// Label-prediction head weight.
#[derive(Debug, Clone)]
pub struct HeadParams {
    pub w: DenseMatrix,
}

impl HeadParams {
    pub fn init(input_dim: usize, num_classes: usize, rng: &mut RngState) -> Self {
        HeadParams {
            w: init_glorot(input_dim, num_classes, rng),
        }
    }
}

/// Everything the training loop owns. `heads` holds one entry for the
/// concatenated head, or one per view for the shared-weights baseline that
/// keeps per-view heads.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub generator: GeneratorParams,
    pub heads: Vec<HeadParams>,
    pub discriminator: Option<DiscriminatorParams>,
}

impl ModelParams {
    /// Initializes for the concatenated-head model. Draw order is generator,
    /// head, then discriminator, so configurations without a discriminator
    /// consume an identical prefix of the random stream.
    pub fn init_concat(
        config: &ModelConfig,
        input_dim: usize,
        num_views: usize,
        num_classes: usize,
        adversarial: bool,
        rng: &mut RngState,
    ) -> Result<Self> {
        config.validate()?;
        let generator = GeneratorParams::init(input_dim, &config.gen_hidden, rng);
        let k = generator.output_dim();
        let heads = vec![HeadParams::init(num_views * k, num_classes, rng)];
        let discriminator = adversarial
            .then(|| DiscriminatorParams::init(k, &config.disc_hidden, num_views, rng));
        Ok(ModelParams {
            generator,
            heads,
            discriminator,
        })
    }

    /// Initializes with one independent k -> c head per view.
    pub fn init_per_view(
        config: &ModelConfig,
        input_dim: usize,
        num_views: usize,
        num_classes: usize,
        rng: &mut RngState,
    ) -> Result<Self> {
        config.validate()?;
        let generator = GeneratorParams::init(input_dim, &config.gen_hidden, rng);
        let k = generator.output_dim();
        let heads = (0..num_views)
            .map(|_| HeadParams::init(k, num_classes, rng))
            .collect();
        Ok(ModelParams {
            generator,
            heads,
            discriminator: None,
        })
    }

    /// Flat name -> matrix listing in a stable order.
    pub fn named(&self) -> Vec<(String, &DenseMatrix)> {
        let mut out = Vec::new();
        for (l, m) in self.generator.layers.iter().enumerate() {
            out.push((format!("gen.{l}"), m));
        }
        for (h, head) in self.heads.iter().enumerate() {
            out.push((format!("head.{h}"), &head.w));
        }
        if let Some(disc) = &self.discriminator {
            for (l, m) in disc.weights.iter().enumerate() {
                out.push((format!("disc.w{l}"), m));
            }
            for (l, m) in disc.biases.iter().enumerate() {
                out.push((format!("disc.b{l}"), m));
            }
        }
        out
    }

    /// Rebuilds the structured container from named matrices, the inverse of
    /// [`ModelParams::named`].
    pub fn from_named(entries: Vec<(String, DenseMatrix)>) -> Result<Self> {
        let mut gen: Vec<(usize, DenseMatrix)> = Vec::new();
        let mut heads: Vec<(usize, DenseMatrix)> = Vec::new();
        let mut disc_w: Vec<(usize, DenseMatrix)> = Vec::new();
        let mut disc_b: Vec<(usize, DenseMatrix)> = Vec::new();
        for (name, m) in entries {
            if let Some(idx) = name.strip_prefix("gen.") {
                gen.push((parse_index(&name, idx)?, m));
            } else if let Some(idx) = name.strip_prefix("head.") {
                heads.push((parse_index(&name, idx)?, m));
            } else if let Some(idx) = name.strip_prefix("disc.w") {
                disc_w.push((parse_index(&name, idx)?, m));
            } else if let Some(idx) = name.strip_prefix("disc.b") {
                disc_b.push((parse_index(&name, idx)?, m));
            } else {
                return Err(Error::Validation(format!("unknown parameter name '{name}'")));
            }
        }
        let generator = GeneratorParams {
            layers: in_index_order("gen", gen)?,
        };
        if generator.layers.is_empty() {
            return Err(Error::Validation("checkpoint has no generator layers".into()));
        }
        let heads = in_index_order("head", heads)?
            .into_iter()
            .map(|w| HeadParams { w })
            .collect::<Vec<_>>();
        if heads.is_empty() {
            return Err(Error::Validation("checkpoint has no head".into()));
        }
        let discriminator = if disc_w.is_empty() && disc_b.is_empty() {
            None
        } else {
            let weights = in_index_order("disc.w", disc_w)?;
            let biases = in_index_order("disc.b", disc_b)?;
            if weights.len() != biases.len() {
                return Err(Error::Validation(
                    "discriminator weight/bias counts differ".into(),
                ));
            }
            Some(DiscriminatorParams { weights, biases })
        };
        Ok(ModelParams {
            generator,
            heads,
            discriminator,
        })
    }
}

fn parse_index(name: &str, idx: &str) -> Result<usize> {
    idx.parse()
        .map_err(|_| Error::Validation(format!("bad parameter name '{name}'")))
}

fn in_index_order(what: &str, mut entries: Vec<(usize, DenseMatrix)>) -> Result<Vec<DenseMatrix>> {
    entries.sort_by_key(|(i, _)| *i);
    for (expected, (actual, _)) in entries.iter().enumerate() {
        if *actual != expected {
            return Err(Error::Validation(format!(
                "{what} indices are not contiguous (missing {expected})"
            )));
        }
    }
    Ok(entries.into_iter().map(|(_, m)| m).collect())
}
