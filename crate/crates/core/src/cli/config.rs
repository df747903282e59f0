//! Flat key-value run configuration.
//!
//! Every knob has a default, can be set in a `key = value` config file and
//! overridden by a command-line flag. The fully resolved configuration is
//! written next to the results; feeding that snapshot back through
//! `--config` reproduces the run byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{ExperimentSpec, Method};
use crate::model::{HeadKind, ModelConfig};
use crate::train::TrainConfig;

#[derive(Debug, Clone)]
pub struct CliConfig {
    // Experiment
    pub method: String,
    pub view: usize,
    pub ratio: f64,
    pub runs: usize,
    pub seed: u64,
    pub validation_fraction: f64,
    pub subset_cap: usize,
    // Model
    pub gen_hidden: Vec<usize>,
    pub disc_hidden: Vec<usize>,
    pub head: String,
    pub final_activation: bool,
    // Training
    pub max_epochs: usize,
    pub gen_lr: f64,
    pub disc_lr: f64,
    pub patience: usize,
    pub lambda: f64,
    pub disc_steps: usize,
    pub weight_decay: f64,
    pub dropout: f64,
    pub non_saturating: bool,
    // Data source and output
    pub synthetic: Option<String>,
    pub manifest: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for CliConfig {
    fn default() -> Self {
        let model = ModelConfig::default();
        let train = TrainConfig::default();
        CliConfig {
            method: "mgal".into(),
            view: 0,
            ratio: 0.1,
            runs: 5,
            seed: 0,
            validation_fraction: 0.05,
            subset_cap: 64,
            gen_hidden: model.gen_hidden,
            disc_hidden: model.disc_hidden,
            head: "fc".into(),
            final_activation: model.final_activation,
            max_epochs: train.max_epochs,
            gen_lr: train.gen_lr,
            disc_lr: train.disc_lr,
            patience: train.patience,
            lambda: train.lambda,
            disc_steps: train.disc_steps,
            weight_decay: train.weight_decay,
            dropout: train.dropout,
            non_saturating: train.non_saturating,
            synthetic: None,
            manifest: None,
            out: PathBuf::from("out"),
        }
    }
}

impl CliConfig {
    /// Applies `key = value` lines from a config file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
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
            self.set(key.trim(), value.trim()).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Sets one knob from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value '{value}' for '{key}'")))
        }
        fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
            value
                .split(',')
                .map(|t| parse::<usize>(key, t.trim()))
                .collect()
        }
        match key {
            "method" => self.method = value.to_string(),
            "view" => self.view = parse(key, value)?,
            "ratio" => self.ratio = parse(key, value)?,
            "runs" => self.runs = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "validation_fraction" => self.validation_fraction = parse(key, value)?,
            "subset_cap" => self.subset_cap = parse(key, value)?,
            "gen_hidden" => self.gen_hidden = parse_list(key, value)?,
            "disc_hidden" => self.disc_hidden = parse_list(key, value)?,
            "head" => self.head = value.to_string(),
            "final_activation" => self.final_activation = parse(key, value)?,
            "max_epochs" => self.max_epochs = parse(key, value)?,
            "gen_lr" => self.gen_lr = parse(key, value)?,
            "disc_lr" => self.disc_lr = parse(key, value)?,
            "patience" => self.patience = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "disc_steps" => self.disc_steps = parse(key, value)?,
            "weight_decay" => self.weight_decay = parse(key, value)?,
            "dropout" => self.dropout = parse(key, value)?,
            "non_saturating" => self.non_saturating = parse(key, value)?,
            "synthetic" => self.synthetic = Some(value.to_string()),
            "manifest" => self.manifest = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Serializes every knob, alphabetically, in the same format `set`
    /// accepts.
    pub fn snapshot(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut pairs: Vec<(&str, String)> = vec![
            ("disc_hidden", join(&self.disc_hidden)),
            ("disc_lr", format!("{}", self.disc_lr)),
            ("disc_steps", format!("{}", self.disc_steps)),
            ("dropout", format!("{}", self.dropout)),
            ("final_activation", format!("{}", self.final_activation)),
            ("gen_hidden", join(&self.gen_hidden)),
            ("gen_lr", format!("{}", self.gen_lr)),
            ("head", self.head.clone()),
            ("lambda", format!("{}", self.lambda)),
            ("max_epochs", format!("{}", self.max_epochs)),
            ("method", self.method.clone()),
            ("non_saturating", format!("{}", self.non_saturating)),
            ("out", self.out.display().to_string()),
            ("patience", format!("{}", self.patience)),
            ("ratio", format!("{}", self.ratio)),
            ("runs", format!("{}", self.runs)),
            ("seed", format!("{}", self.seed)),
            ("subset_cap", format!("{}", self.subset_cap)),
            ("validation_fraction", format!("{}", self.validation_fraction)),
            ("view", format!("{}", self.view)),
        ];
        if let Some(s) = &self.synthetic {
            pairs.push(("synthetic", s.clone()));
        }
        if let Some(p) = &self.manifest {
            pairs.push(("manifest", p.display().to_string()));
        }
        pairs.sort_by_key(|(k, _)| *k);
        let mut out = String::new();
        for (k, v) in pairs {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn model_config(&self) -> Result<ModelConfig> {
        let cfg = ModelConfig {
            gen_hidden: self.gen_hidden.clone(),
            disc_hidden: self.disc_hidden.clone(),
            head: HeadKind::parse(&self.head)?,
            final_activation: self.final_activation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            max_epochs: self.max_epochs,
            gen_lr: self.gen_lr,
            disc_lr: self.disc_lr,
            patience: self.patience,
            lambda: self.lambda,
            disc_steps: self.disc_steps,
            weight_decay: self.weight_decay,
            dropout: self.dropout,
            non_saturating: self.non_saturating,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn experiment_spec(&self) -> Result<ExperimentSpec> {
        Ok(ExperimentSpec {
            method: Method::parse(&self.method, self.view)?,
            label_ratio: self.ratio,
            validation_fraction: self.validation_fraction,
            runs: self.runs,
            base_seed: self.seed,
            model: self.model_config()?,
            train: self.train_config()?,
            subset_cap: self.subset_cap,
        })
    }
}
