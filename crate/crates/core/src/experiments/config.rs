//! JSON experiment configuration.
//!
//! Every config carries an `"experiment"` tag selecting the run, the parameters
//! of that run, and the shared sampling settings (`seed`, `shards`, `batches`,
//! `bootstrap`, `output`). Noise may be written as `"bit_flip:0.2"`, as
//! `{"kind": "bit_flip", "p": 0.2}`, or as a list of either; `"none"` disables it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::ReadoutChannel;

/// Shard count used when the config does not pick one. Output depends on the shard count.
pub const DEFAULT_SHARDS: usize = 8;

fn default_seed() -> u64 {
    1
}
fn default_batches() -> usize {
    20
}
fn default_bootstrap() -> usize {
    200
}
fn default_hopping() -> f64 {
    1.0
}
fn default_interaction() -> f64 {
    4.0
}
fn default_delta() -> f64 {
    1.5
}
fn default_fit_min() -> u64 {
    10_000
}
fn default_states() -> usize {
    10
}
fn default_checkpoints() -> Vec<u64> {
    vec![1_000, 3_000, 10_000, 30_000, 100_000, 300_000]
}
fn default_trials() -> usize {
    20
}

/// A noise entry as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Text(String),
    Channel(ReadoutChannel),
}

impl NoiseSpec {
    /// `None` for a disabled channel.
    pub fn resolve(&self) -> Result<Option<ReadoutChannel>> {
        let ch = match self {
            NoiseSpec::Text(t) if matches!(t.trim(), "" | "none" | "noiseless") => return Ok(None),
            NoiseSpec::Text(t) => t.parse::<ReadoutChannel>().map_err(|e| Error::Config(e.to_string()))?,
            NoiseSpec::Channel(c) => {
                c.validate().map_err(|e| Error::Config(e.to_string()))?;
                c.clone()
            }
        };
        Ok(if ch.p == 0.0 && ch.per_qubit.is_none() { None } else { Some(ch) })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn no_noise() -> OneOrMany<NoiseSpec> {
    OneOrMany::One(NoiseSpec::Text("none".into()))
}

/// Random Slater determinants, 2-RDM error versus sample count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterParams {
    pub n: usize,
    pub eta: usize,
    #[serde(default = "default_states")]
    pub states: usize,
    /// Sample counts; each one is an independent run.
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<u64>,
    pub noise: NoiseSpec,
    /// Smallest sample count included in the log-log slope fit.
    #[serde(default = "default_fit_min")]
    pub fit_min_samples: u64,
}

/// Open-chain Fermi-Hubbard energy per particle at half filling per spin sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams {
    /// Chain lengths `L`.
    #[serde(rename = "L", alias = "sites")]
    pub sites: OneOrMany<usize>,
    #[serde(default = "default_hopping")]
    pub t: f64,
    #[serde(rename = "U", alias = "u", default = "default_interaction")]
    pub u: f64,
    #[serde(default = "no_noise")]
    pub noise: OneOrMany<NoiseSpec>,
    pub samples: u64,
}

/// Open XXZ chain energy per site in the zero-magnetization sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XxzParams {
    pub n: OneOrMany<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "no_noise")]
    pub noise: OneOrMany<NoiseSpec>,
    pub samples: u64,
}

/// Noisy-eigenvalue calibration: symmetry adjustment against robust shadows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationParams {
    pub n: usize,
    pub eta: usize,
    pub noise: NoiseSpec,
    pub samples: u64,
}

/// Improved versus naive Gaussian-unitary compilation on Haar-random inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileBenchParams {
    pub n: OneOrMany<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    #[serde(rename = "slater_2rdm")]
    Slater2Rdm(SlaterParams),
    HubbardEnergy(HubbardParams),
    XxzEnergy(XxzParams),
    Calibration(CalibrationParams),
    CompileBench(CompileBenchParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Slater2Rdm(_) => "slater_2rdm",
            Experiment::HubbardEnergy(_) => "hubbard_energy",
            Experiment::XxzEnergy(_) => "xxz_energy",
            Experiment::Calibration(_) => "calibration",
            Experiment::CompileBench(_) => "compile_bench",
        }
    }
}

/// Sampling settings shared by every experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSettings {
    pub seed: u64,
    pub shards: usize,
    /// Batch count `K`.
    pub batches: usize,
    /// Bootstrap resamples `B`.
    pub bootstrap: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            seed: default_seed(),
            shards: DEFAULT_SHARDS,
            batches: default_batches(),
            bootstrap: default_bootstrap(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub shards: Option<usize>,
    #[serde(default = "default_batches")]
    pub batches: usize,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn settings(&self) -> RunSettings {
        RunSettings {
            seed: self.seed,
            shards: self.shards.unwrap_or(DEFAULT_SHARDS),
            batches: self.batches,
            bootstrap: self.bootstrap,
        }
    }

    /// Check ranges before any sampling starts.
    pub fn validate(&self) -> Result<()> {
        if self.bootstrap == 0 {
            return Err(config_err("bootstrap must be at least 1"));
        }
        if self.shards == Some(0) {
            return Err(config_err("shards must be at least 1"));
        }
        let needs_batches = !matches!(self.experiment, Experiment::CompileBench(_));
        if needs_batches && self.batches < 2 {
            return Err(config_err("batches must be at least 2 for the bootstrap"));
        }
        let check_samples = |t: u64| -> Result<()> {
            if t < self.batches as u64 {
                return Err(config_err(format!(
                    "sample count {t} is below the batch count {}",
                    self.batches
                )));
            }
            Ok(())
        };
        match &self.experiment {
            Experiment::Slater2Rdm(p) => {
                if p.n < 2 || p.eta > p.n {
                    return Err(config_err("slater_2rdm needs n >= 2 and 0 <= eta <= n"));
                }
                if p.n > 24 {
                    return Err(config_err("slater_2rdm supports n <= 24"));
                }
                if p.states == 0 || p.checkpoints.is_empty() {
                    return Err(config_err("slater_2rdm needs states >= 1 and checkpoints"));
                }
                p.checkpoints.iter().try_for_each(|&t| check_samples(t))?;
                p.noise.resolve()?;
            }
            Experiment::HubbardEnergy(p) => {
                for l in p.sites.to_vec() {
                    if l < 2 || l % 2 != 0 || l > 16 {
                        return Err(config_err(format!("L = {l} must be even and in 2..=16")));
                    }
                }
                if !p.t.is_finite() || !p.u.is_finite() {
                    return Err(config_err("t and U must be finite"));
                }
                check_samples(p.samples)?;
                p.noise.to_vec().iter().try_for_each(|s| s.resolve().map(|_| ()))?;
            }
            Experiment::XxzEnergy(p) => {
                for n in p.n.to_vec() {
                    if n < 2 || n % 2 != 0 || n > 14 {
                        return Err(config_err(format!("n = {n} must be even and in 2..=14")));
                    }
                }
                if !p.delta.is_finite() {
                    return Err(config_err("delta must be finite"));
                }
                check_samples(p.samples)?;
                p.noise.to_vec().iter().try_for_each(|s| s.resolve().map(|_| ()))?;
            }
            Experiment::Calibration(p) => {
                if p.n < 2 || p.eta > p.n || p.n > 24 {
                    return Err(config_err("calibration needs 2 <= n <= 24 and eta <= n"));
                }
                check_samples(p.samples)?;
                p.noise.resolve()?;
            }
            Experiment::CompileBench(p) => {
                for n in p.n.to_vec() {
                    if n == 0 || n > 64 {
                        return Err(config_err(format!("n = {n} outside 1..=64")));
                    }
                }
                if p.trials == 0 {
                    return Err(config_err("trials must be at least 1"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_slater_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "slater_2rdm", "n": 8, "eta": 2, "noise": "bit_flip:0.2"}"#,
        )
        .unwrap();
        assert_eq!(cfg.batches, 20);
        assert_eq!(cfg.settings().shards, DEFAULT_SHARDS);
        match cfg.experiment {
            Experiment::Slater2Rdm(p) => {
                assert_eq!(p.checkpoints.len(), 6);
                assert!(p.noise.resolve().unwrap().is_some());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_noise_lists() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "xxz_energy", "n": [4, 6], "samples": 1000,
                "noise": ["none", {"kind": "bit_flip", "p": 0.05}]}"#,
        )
        .unwrap();
        match cfg.experiment {
            Experiment::XxzEnergy(p) => {
                let levels: Vec<_> = p.noise.to_vec().iter().map(|s| s.resolve().unwrap()).collect();
                assert!(levels[0].is_none());
                assert_eq!(levels[1].as_ref().unwrap().p, 0.05);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"experiment": "nope"}"#,
            r#"{"experiment": "xxz_energy", "n": 3, "samples": 100}"#,
            r#"{"experiment": "xxz_energy", "n": 4, "samples": 10, "batches": 20}"#,
            r#"{"experiment": "slater_2rdm", "n": 4, "eta": 2, "noise": "bit_flip:1.5"}"#,
            r#"{"experiment": "hubbard_energy", "L": 4, "samples": 100, "batches": 1}"#,
        ] {
            let err = ExperimentConfig::from_json(text).unwrap_err();
            assert!(err.is_usage(), "{text}: {err}");
        }
    }
}
