//! Declarative experiment configuration: a TOML file with network, model,
//! run, analysis, and output sections. Every run is reproducible from
//! (config, master seed).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cascade::poisson_kmax;
use crate::contagion::{PressureScaling, ResponseSpec, SeedMode, SimConfig, Threshold, UpdateMode};
use crate::graph::{DegreeDistribution, JointDegreeDistribution};
use crate::theory::NetworkModel;

use super::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkConfig,
    pub model: ModelConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub kind: NetworkKind,
    #[serde(default)]
    pub n: Option<usize>,
    /// Mean degree for `er` networks.
    #[serde(default)]
    pub z: Option<f64>,
    /// `[degree, weight]` rows for `uncorrelated` networks; weights are
    /// normalized.
    #[serde(default)]
    pub degrees: Option<Vec<(usize, f64)>>,
    /// `[k, k', weight]` rows for `correlated` networks; missing mirror
    /// entries are filled by symmetry and weights normalized.
    #[serde(default)]
    pub joint: Option<Vec<(usize, usize, f64)>>,
    /// Edge-list path for `edge_list` networks.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Er,
    Uncorrelated,
    Correlated,
    EdgeList,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub scaling: ScalingConfig,
    pub r1: ThresholdSpec,
    pub r2: ThresholdSpec,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingConfig {
    Fraction,
    Count,
}

/// A threshold is either a plain value (TOML `inf` disables the stage) or
/// a Gaussian `{ mean, sd }`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSpec {
    Value(f64),
    Gaussian { mean: f64, sd: f64 },
}

impl ThresholdSpec {
    pub fn to_threshold(self) -> Threshold {
        match self {
            ThresholdSpec::Value(v) => Threshold::Uniform(v),
            ThresholdSpec::Gaussian { mean, sd } => Threshold::Gaussian { mean, sd },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub phi1: f64,
    pub phi2: f64,
    #[serde(default = "default_update")]
    pub update: UpdateConfig,
    pub t_max: f64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_seed_mode")]
    pub seed_mode: SeedModeConfig,
    #[serde(default = "default_network_mode")]
    pub network_mode: NetworkModeConfig,
}

fn default_update() -> UpdateConfig {
    UpdateConfig::Asynchronous
}

fn default_realizations() -> usize {
    1
}

fn default_seed_mode() -> SeedModeConfig {
    SeedModeConfig::Resampled
}

fn default_network_mode() -> NetworkModeConfig {
    NetworkModeConfig::Fixed
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateConfig {
    Asynchronous,
    Synchronous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedModeConfig {
    Fixed,
    Resampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkModeConfig {
    /// One network, shared by all realizations.
    Fixed,
    /// A fresh network per realization.
    Ensemble,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Emit a combined simulation + theory CSV with gap columns
    /// (`theory` command).
    #[serde(default)]
    pub overlay: bool,
    /// ODE step for the theory command.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Sweep axes for the `cascade` command.
    #[serde(default)]
    pub p1: Option<AxisConfig>,
    #[serde(default)]
    pub p2: Option<AxisConfig>,
    /// Trace the saddle-node curve (`cascade` command); requires a start.
    #[serde(default)]
    pub continuation: Option<ContinuationConfig>,
}

fn default_dt() -> f64 {
    0.01
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Z,
    Beta,
    R1,
    R2,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationConfig {
    /// p2 value at which the start point is located.
    pub start_p2: f64,
    /// p1 bracket straddling the cascade boundary at `start_p2`.
    pub start_bracket: (f64, f64),
    /// Signed initial p2 step (defaults to -0.01: sweep downward).
    #[serde(default = "default_continuation_step")]
    pub step: f64,
}

fn default_continuation_step() -> f64 {
    -0.01
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub svg: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{e}")))?;
        config.validate()?;
        Ok((config, text))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = &self.network;
        match n.kind {
            NetworkKind::Er => {
                let (Some(nodes), Some(z)) = (n.n, n.z) else {
                    return Err(CliError::Config("er network requires `n` and `z`".into()));
                };
                if !(z > 0.0) || z >= (nodes.max(2) - 1) as f64 {
                    return Err(CliError::Config(format!(
                        "mean degree z = {z} must lie in (0, n-1)"
                    )));
                }
            }
            NetworkKind::Uncorrelated => {
                if n.n.is_none() || n.degrees.is_none() {
                    return Err(CliError::Config(
                        "uncorrelated network requires `n` and `degrees`".into(),
                    ));
                }
            }
            NetworkKind::Correlated => {
                if n.n.is_none() || n.joint.is_none() {
                    return Err(CliError::Config(
                        "correlated network requires `n` and `joint`".into(),
                    ));
                }
            }
            NetworkKind::EdgeList => {
                if n.path.is_none() {
                    return Err(CliError::Config("edge_list network requires `path`".into()));
                }
            }
        }
        if let (ThresholdSpec::Value(r1), ThresholdSpec::Value(r2)) = (self.model.r1, self.model.r2)
        {
            if r2 < r1 {
                return Err(CliError::Config(format!(
                    "model.r2 = {r2} must be at least model.r1 = {r1}"
                )));
            }
        }
        if !(self.model.beta >= 0.0) {
            return Err(CliError::Config("model.beta must be nonnegative".into()));
        }
        let r = &self.run;
        if !(0.0..=1.0).contains(&r.phi1) || !(0.0..=1.0).contains(&r.phi2) {
            return Err(CliError::Config(
                "run.phi1 and run.phi2 must lie in [0, 1]".into(),
            ));
        }
        if r.phi2 > r.phi1 {
            return Err(CliError::Config(format!(
                "run.phi2 = {} exceeds run.phi1 = {}",
                r.phi2, r.phi1
            )));
        }
        if !(r.t_max > 0.0) {
            return Err(CliError::Config("run.t_max must be positive".into()));
        }
        if r.realizations == 0 {
            return Err(CliError::Config("run.realizations must be positive".into()));
        }
        if r.network_mode == NetworkModeConfig::Ensemble && r.seed_mode == SeedModeConfig::Fixed {
            return Err(CliError::Config(
                "fixed seed nodes require a fixed network (seed ids are not stable \
                 across regenerated networks)"
                    .into(),
            ));
        }
        if let Some(axis) = &self.analysis.p1 {
            validate_axis(axis)?;
        }
        if let Some(axis) = &self.analysis.p2 {
            validate_axis(axis)?;
        }
        Ok(())
    }

    pub fn response_spec(&self) -> Result<ResponseSpec, CliError> {
        let scaling = match self.model.scaling {
            ScalingConfig::Fraction => PressureScaling::Fraction,
            ScalingConfig::Count => PressureScaling::Count,
        };
        ResponseSpec::new(
            scaling,
            self.model.r1.to_threshold(),
            self.model.r2.to_threshold(),
            self.model.beta,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn sim_config(&self, seed_override: Option<u64>) -> SimConfig {
        SimConfig {
            phi1: self.run.phi1,
            phi2: self.run.phi2,
            update_mode: match self.run.update {
                UpdateConfig::Asynchronous => UpdateMode::Asynchronous,
                UpdateConfig::Synchronous => UpdateMode::Synchronous,
            },
            t_max: self.run.t_max,
            realizations: self.run.realizations,
            rng_seed: seed_override.unwrap_or(self.run.seed),
            seed_mode: match self.run.seed_mode {
                SeedModeConfig::Fixed => SeedMode::FixedAcrossRealizations,
                SeedModeConfig::Resampled => SeedMode::Resampled,
            },
        }
    }

    /// The analytical network statistics implied by the network block.
    /// Edge-list networks are measured; generated kinds use their target
    /// distributions.
    pub fn network_model(&self) -> Result<NetworkModel, CliError> {
        match self.network.kind {
            NetworkKind::Er => {
                let z = self.network.z.unwrap();
                let dist = DegreeDistribution::poisson(z, poisson_kmax(z))
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(NetworkModel::Factorized(dist))
            }
            NetworkKind::Uncorrelated => {
                let dist = DegreeDistribution::from_weights(self.network.degrees.as_ref().unwrap())
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(NetworkModel::Factorized(dist))
            }
            NetworkKind::Correlated => {
                let joint = JointDegreeDistribution::new(self.network.joint.as_ref().unwrap())
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(NetworkModel::Correlated(joint))
            }
            NetworkKind::EdgeList => {
                let path = self.network.path.as_ref().unwrap();
                let file = std::fs::File::open(path)
                    .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
                let (g, _) = crate::graph::load_edge_list(file)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                let joint = crate::graph::joint_degree_distribution(&g)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(NetworkModel::Correlated(joint))
            }
        }
    }
}

fn validate_axis(axis: &AxisConfig) -> Result<(), CliError> {
    if axis.steps == 0 {
        return Err(CliError::Config("axis steps must be positive".into()));
    }
    if axis.steps > 1 && !(axis.max > axis.min) {
        return Err(CliError::Config(format!(
            "axis range [{}, {}] is empty",
            axis.min, axis.max
        )));
    }
    Ok(())
}
