//! Experiment configuration: a flat TOML file of `key = value` pairs.
//!
//! ```toml
//! regime = "mixing"
//! family = "crossing"
//! d = 1
//! alpha = 1.0
//! beta = 2.0
//! rho = 0.5
//! n_grid = [1024, 2048, 4096]
//! replicates = 10
//! n_test = 2000
//! base_seed = 42
//! output = "mixing.csv"
//! ```
//!
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use ovaplug::datagen::{
    make_crossing_distribution, make_hard_margin_distribution, DriftSchedule, MixingChainSpec,
    SyntheticDistribution, TrainingRegime,
};
use serde::Deserialize;

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    Iid,
    Mixing,
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Crossing,
    HardMargin,
}

/// Distribution and training-regime parameters shared by every subcommand.
#[derive(Debug, Clone, PartialEq, clap::Args)]
pub struct ProblemSpec {
    /// Training regime
    #[arg(long, value_enum, default_value = "iid")]
    pub regime: RegimeKind,
    #[arg(long, value_enum, default_value = "crossing")]
    pub family: FamilyKind,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Number of classes (hard-margin family only)
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Gap floor (hard-margin family only)
    #[arg(long, default_value_t = 0.2)]
    pub g0: f64,
    /// Hold probability of the mixing chain
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Drift amplitude
    #[arg(long, default_value_t = 0.2)]
    pub amplitude: f64,
}

fn default_family() -> FamilyKind {
    FamilyKind::Crossing
}
fn default_d() -> usize {
    1
}
fn default_m() -> usize {
    2
}
fn default_alpha() -> f64 {
    1.0
}
fn default_beta() -> f64 {
    2.0
}
fn default_g0() -> f64 {
    0.2
}
fn default_rho() -> f64 {
    0.5
}
fn default_amplitude() -> f64 {
    0.2
}
fn default_replicates() -> usize {
    10
}
fn default_n_test() -> usize {
    2000
}

impl ProblemSpec {
    pub fn distribution(&self) -> LabResult<SyntheticDistribution> {
        let dist = match self.family {
            FamilyKind::Crossing => {
                if self.m != 2 {
                    return Err(LabError::Config("the crossing family has exactly two classes".into()));
                }
                make_crossing_distribution(self.d, self.alpha, self.beta)
            }
            FamilyKind::HardMargin => make_hard_margin_distribution(self.d, self.m, self.g0, self.beta)
                .and_then(|d| d.with_margin_exponent(self.alpha)),
        };
        dist.map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn training_regime(&self, dist: &SyntheticDistribution) -> LabResult<TrainingRegime> {
        let regime = match self.regime {
            RegimeKind::Iid => Ok(TrainingRegime::Iid),
            RegimeKind::Mixing => MixingChainSpec::new(self.rho).map(TrainingRegime::Mixing),
            RegimeKind::Drift => DriftSchedule::new(dist, self.amplitude).map(TrainingRegime::Drift),
        };
        regime.map_err(|e| LabError::Config(e.to_string()))
    }
}

/// A full rate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub n_test: usize,
    pub base_seed: u64,
    /// CSV destination; the summary goes next to it.
    pub output: Option<PathBuf>,
}

// On-disk layout: every key at top level.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    regime: RegimeKind,
    #[serde(default = "default_family")]
    family: FamilyKind,
    #[serde(default = "default_d")]
    d: usize,
    #[serde(default = "default_m")]
    m: usize,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_beta")]
    beta: f64,
    #[serde(default = "default_g0")]
    g0: f64,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default = "default_amplitude")]
    amplitude: f64,
    n_grid: Vec<usize>,
    #[serde(default = "default_replicates")]
    replicates: usize,
    #[serde(default = "default_n_test")]
    n_test: usize,
    #[serde(default)]
    base_seed: u64,
    output: Option<PathBuf>,
}

impl From<RawConfig> for ExperimentConfig {
    fn from(r: RawConfig) -> Self {
        ExperimentConfig {
            problem: ProblemSpec {
                regime: r.regime,
                family: r.family,
                d: r.d,
                m: r.m,
                alpha: r.alpha,
                beta: r.beta,
                g0: r.g0,
                rho: r.rho,
                amplitude: r.amplitude,
            },
            n_grid: r.n_grid,
            replicates: r.replicates,
            n_test: r.n_test,
            base_seed: r.base_seed,
            output: r.output,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| LabError::Config(e.message().to_string()))?;
        let config = ExperimentConfig::from(raw);
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; a relative `output` is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::parse(&text)?;
        if let (Some(out), Some(dir)) = (&config.output, path.parent()) {
            if out.is_relative() {
                config.output = Some(dir.join(out));
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> LabResult<()> {
        if self.n_grid.is_empty() {
            return Err(LabError::Config("n_grid is empty".into()));
        }
        if self.n_grid[0] == 0 {
            return Err(LabError::Config("n_grid entries must be positive".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Config("n_grid must be strictly increasing".into()));
        }
        if self.replicates == 0 {
            return Err(LabError::Config("replicates must be at least 1".into()));
        }
        if self.n_test == 0 {
            return Err(LabError::Config("n_test must be at least 1".into()));
        }
        let dist = self.problem.distribution()?;
        self.problem.training_regime(&dist)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "regime = \"iid\"\nn_grid = [256, 512, 1024]\n";

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.problem.family, FamilyKind::Crossing);
        assert_eq!(c.problem.beta, 2.0);
        assert_eq!(c.replicates, 10);
        assert_eq!(c.n_test, 2000);
        assert_eq!(c.output, None);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ExperimentConfig::parse(&format!("{MINIMAL}bandwidth = 0.3\n")).unwrap_err();
        assert!(err.to_string().contains("bandwidth"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn grid_must_increase() {
        let text = "regime = \"iid\"\nn_grid = [512, 256, 1024]\n";
        assert!(ExperimentConfig::parse(text).is_err());
        let text = "regime = \"iid\"\nn_grid = [256, 256]\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn invalid_distribution_is_config_error() {
        let text = format!("{MINIMAL}alpha = 2.0\n");
        assert_eq!(ExperimentConfig::parse(&text).unwrap_err().exit_code(), 1);
        let text = "regime = \"drift\"\namplitude = 5.0\nn_grid = [8, 16, 32]\n";
        assert!(ExperimentConfig::parse(text).is_err());
        let text = "regime = \"iid\"\nreplicates = 0\nn_grid = [8, 16, 32]\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn hard_margin_config() {
        let text = "regime = \"mixing\"\nfamily = \"hard_margin\"\nm = 3\nd = 2\ng0 = 0.3\n\
                    rho = 0.25\nn_grid = [100, 200, 400]\n";
        let c = ExperimentConfig::parse(text).unwrap();
        let dist = c.problem.distribution().unwrap();
        assert_eq!(dist.classes(), 3);
        assert_eq!(dist.gap_floor(), Some(0.3));
    }
}
