//! Experiment configuration files.
//!
//! A config is a TOML document with one section per field group. Every key
//! is optional and unknown keys are rejected:
//!
//! ```toml
//! [problem]
//! kind = "oscillator"      # decay | oscillator | laplace | poisson
//! omega = 1.0              # oscillator: omega, x0, v0; decay: rate, x0
//!
//! [sampling]
//! strategies = ["equidistant", "random", "random_sorted", "chebyshev", "sine_based"]
//! grid_sizes = [100, 200, 400]   # ODE: point counts, PDE: points per axis
//! boundary_per_edge = 30
//!
//! [network]
//! architectures = [[100], [50, 50]]
//!
//! [seeds]
//! fixed = 42               # or: start = 0, count = 200
//!
//! [training]
//! epochs = 100000          # defaults to the problem's epoch budget
//! log_every = 100
//!
//! [output]
//! dir = "results"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::network::NetLayout;
use crate::problems::{default_config, ProblemKind, ProblemSpec, DEFAULT_DECAY_RATE};
use crate::sampler::Strategy;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BOUNDARY_PER_EDGE: usize = 30;
pub const DEFAULT_LOG_EVERY: usize = 100;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: RawProblem,
    #[serde(default)]
    sampling: RawSampling,
    #[serde(default)]
    network: RawNetwork,
    #[serde(default)]
    seeds: RawSeeds,
    #[serde(default)]
    training: RawTraining,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: String,
    rate: Option<f64>,
    x0: Option<f64>,
    omega: Option<f64>,
    v0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    strategies: Option<Vec<String>>,
    grid_sizes: Option<Vec<usize>>,
    boundary_per_edge: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    architectures: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeeds {
    fixed: Option<u64>,
    start: Option<u64>,
    count: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTraining {
    epochs: Option<usize>,
    log_every: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

/// Fully resolved experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub strategies: Vec<Strategy>,
    pub grid_sizes: Vec<usize>,
    pub architectures: Vec<NetLayout>,
    pub seeds: Vec<u64>,
    pub epochs: usize,
    pub boundary_per_edge: usize,
    pub log_every: usize,
    pub out_dir: PathBuf,
}

/// One point of the configuration's Cartesian product.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub index: usize,
    pub strategy: Strategy,
    pub grid: usize,
    pub layout: NetLayout,
    pub seed: u64,
}

impl ExperimentConfig {
    /// All five strategies, the default grid sizes, both default
    /// architectures (1x100 and 2x50) and seed 42.
    pub fn standard(kind: ProblemKind) -> Self {
        let defaults = default_config(kind);
        let dim = kind.dim();
        Self {
            problem: ProblemSpec::standard(kind),
            strategies: Strategy::ALL.to_vec(),
            grid_sizes: defaults.training_sizes,
            architectures: vec![
                NetLayout::new(dim, vec![100]).expect("valid"),
                NetLayout::new(dim, vec![50, 50]).expect("valid"),
            ],
            seeds: vec![DEFAULT_SEED],
            epochs: defaults.epochs,
            boundary_per_edge: DEFAULT_BOUNDARY_PER_EDGE,
            log_every: DEFAULT_LOG_EVERY,
            out_dir: PathBuf::from("results"),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        let kind: ProblemKind = raw.problem.kind.parse()?;
        let mut cfg = Self::standard(kind);

        let p = &raw.problem;
        cfg.problem = match kind {
            ProblemKind::Decay => {
                reject(&[("omega", p.omega.is_some()), ("v0", p.v0.is_some())], kind)?;
                ProblemSpec::decay(p.rate.unwrap_or(DEFAULT_DECAY_RATE), p.x0.unwrap_or(100.0))?
            }
            ProblemKind::Oscillator => {
                reject(&[("rate", p.rate.is_some())], kind)?;
                ProblemSpec::oscillator(p.omega.unwrap_or(1.0), p.x0.unwrap_or(1.0), p.v0.unwrap_or(0.0))?
            }
            ProblemKind::Laplace | ProblemKind::Poisson => {
                reject(
                    &[
                        ("rate", p.rate.is_some()),
                        ("x0", p.x0.is_some()),
                        ("omega", p.omega.is_some()),
                        ("v0", p.v0.is_some()),
                    ],
                    kind,
                )?;
                ProblemSpec::standard(kind)
            }
        };

        if let Some(names) = &raw.sampling.strategies {
            cfg.strategies = names.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        if let Some(sizes) = raw.sampling.grid_sizes {
            cfg.grid_sizes = sizes;
        }
        if let Some(n) = raw.sampling.boundary_per_edge {
            cfg.boundary_per_edge = n;
        }
        if let Some(archs) = raw.network.architectures {
            cfg.architectures =
                archs.into_iter().map(|w| NetLayout::new(kind.dim(), w)).collect::<Result<_>>()?;
        }
        cfg.seeds = match (raw.seeds.fixed, raw.seeds.start, raw.seeds.count) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(Error::config("seeds: give either `fixed` or `start`/`count`, not both"))
            }
            (Some(s), None, None) => vec![s],
            (None, None, None) => vec![DEFAULT_SEED],
            (None, start, Some(count)) => {
                let start = start.unwrap_or(0);
                (start..start.checked_add(count).ok_or_else(|| Error::config("seed range overflows"))?).collect()
            }
            (None, Some(_), None) => return Err(Error::config("seeds: `start` needs `count`")),
        };
        if let Some(e) = raw.training.epochs {
            cfg.epochs = e;
        }
        if let Some(l) = raw.training.log_every {
            cfg.log_every = l;
        }
        if let Some(dir) = raw.output.dir {
            cfg.out_dir = dir;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("strategies", self.strategies.is_empty()),
            ("grid_sizes", self.grid_sizes.is_empty()),
            ("architectures", self.architectures.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::config(format!("{name} must not be empty")));
        }
        if let Some(n) = self.grid_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::config(format!("grid sizes must be at least 2, got {n}")));
        }
        if self.problem.dim() == 2 && self.boundary_per_edge < 2 {
            return Err(Error::config("boundary_per_edge must be at least 2"));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1"));
        }
        if self.log_every == 0 {
            return Err(Error::config("log_every must be at least 1"));
        }
        if let Some(l) = self.architectures.iter().find(|l| l.input_dim() != self.problem.dim()) {
            return Err(Error::config(format!("architecture {l} does not match the problem dimension")));
        }
        Ok(())
    }

    /// Runs in iteration order: strategy, then grid, then architecture, then seed.
    pub fn runs(&self) -> Vec<RunSpec> {
        let mut out = Vec::with_capacity(self.run_count());
        for &strategy in &self.strategies {
            for &grid in &self.grid_sizes {
                for layout in &self.architectures {
                    for &seed in &self.seeds {
                        out.push(RunSpec { index: out.len(), strategy, grid, layout: layout.clone(), seed });
                    }
                }
            }
        }
        out
    }

    pub fn run_count(&self) -> usize {
        self.strategies.len() * self.grid_sizes.len() * self.architectures.len() * self.seeds.len()
    }
}

fn reject(keys: &[(&str, bool)], kind: ProblemKind) -> Result<()> {
    match keys.iter().find(|(_, present)| *present) {
        Some((k, _)) => Err(Error::config(format!("key `{k}` does not apply to {kind}"))),
        None => Ok(()),
    }
}
