//! Experiment configuration files.
//!
//! The format is TOML with one table per parameter group and units spelled
//! out in key names. Every key is required except `cache.unirand_span` and
//! `experiment.grid`; unknown keys are rejected.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use hetsim_core::analytics::{DelayParams, Intensities};
use hetsim_core::channel::{db_to_linear, RadioParams};
use hetsim_core::{B3Variant, CacheConfig, CachePolicy, DistanceMode, PopularityModel, Scenario, UniformSpan, Window};

use crate::error::ConfigError;

const OPTIONAL_KEYS: [&str; 2] = ["cache.unirand_span", "experiment.grid"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSection,
    pub radio: RadioSection,
    pub delay: DelaySection,
    pub cache: CacheSection,
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub lambda_cr_per_m2: f64,
    pub lambda_mc_per_m2: f64,
    pub lambda_sc_per_m2: f64,
    pub lambda_ut_per_m2: f64,
    pub window_radius_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    pub power_macro_w: f64,
    pub power_small_w: f64,
    pub pathloss_exponent: f64,
    pub target_sir_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySection {
    pub t0_ms: f64,
    pub max_attempts: u32,
    pub beta_ms_per_m_per_bs: f64,
    pub cache_read_mean_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheSection {
    pub storage_total_gb: f64,
    pub storage_popular_gb: f64,
    pub storage_overhead_gb: f64,
    pub storage_uniform_gb: f64,
    pub catalogue_bound: f64,
    pub eta0: f64,
    pub b3_variant: B3Choice,
    #[serde(default)]
    pub unirand_span: SpanChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub scenarios: Vec<String>,
    pub replications: usize,
    pub master_seed: u64,
    pub distance_mode: DistanceChoice,
    pub sweep: SweepVariable,
    /// Values of the swept variable; defaults to multiples of its base value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum B3Choice {
    Printed,
    Integral,
}

impl From<B3Choice> for B3Variant {
    fn from(c: B3Choice) -> Self {
        match c {
            B3Choice::Printed => B3Variant::AsPrinted,
            B3Choice::Integral => B3Variant::IntegralConsistent,
        }
    }
}

impl FromStr for B3Choice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "printed" => Ok(B3Choice::Printed),
            "integral" => Ok(B3Choice::Integral),
            other => Err(format!("unknown B3 variant `{other}` (expected printed or integral)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanChoice {
    #[default]
    Catalogue,
    MixpopRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceChoice {
    Averaged,
    PerUser,
}

impl From<DistanceChoice> for DistanceMode {
    fn from(c: DistanceChoice) -> Self {
        match c {
            DistanceChoice::Averaged => DistanceMode::Averaged,
            DistanceChoice::PerUser => DistanceMode::PerUser,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "lambda_mc")]
    LambdaMc,
    #[serde(rename = "lambda_sc")]
    LambdaSc,
    #[serde(rename = "target_sir")]
    TargetSir,
    #[serde(rename = "storage_S")]
    StorageS,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 4] = [
        SweepVariable::LambdaMc,
        SweepVariable::LambdaSc,
        SweepVariable::TargetSir,
        SweepVariable::StorageS,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::LambdaMc => "lambda_mc",
            SweepVariable::LambdaSc => "lambda_sc",
            SweepVariable::TargetSir => "target_sir",
            SweepVariable::StorageS => "storage_S",
        }
    }

    /// Multipliers applied to the base value when no grid is given. The
    /// small-cell density stays below the user density so that the
    /// load-dependent steepness remains above one.
    pub fn default_multipliers(&self) -> [f64; 4] {
        match self {
            SweepVariable::LambdaSc => [0.25, 0.5, 1.0, 1.5],
            _ => [0.5, 1.0, 2.0, 4.0],
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepVariable::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown sweep variable `{s}` (expected lambda_mc, lambda_sc, target_sir or storage_S)"))
    }
}

/// A scenario as named in configs and CSV output: `MU`, `SU-NoCache`, or
/// `SU-<StdPop|UniRand|MixPop>-<Fixed|Distance|Load>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioSpec {
    Macro,
    Small { policy: CachePolicy, model: ModelKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Fixed,
    Distance,
    Load,
}

impl ScenarioSpec {
    pub fn label(&self) -> String {
        match self {
            ScenarioSpec::Macro => "MU".to_string(),
            ScenarioSpec::Small {
                policy: CachePolicy::NoCache,
                ..
            } => "SU-NoCache".to_string(),
            ScenarioSpec::Small { policy, model } => format!("SU-{}-{}", policy.name(), model.name()),
        }
    }

    pub fn model(&self, eta0: f64) -> PopularityModel {
        match self {
            ScenarioSpec::Small {
                model: ModelKind::Distance,
                ..
            } => PopularityModel::DistanceDependent,
            ScenarioSpec::Small {
                model: ModelKind::Load, ..
            } => PopularityModel::LoadDependent,
            _ => PopularityModel::Fixed(eta0),
        }
    }

    pub fn scenario(&self, eta0: f64, distance_mode: DistanceMode) -> Scenario {
        match *self {
            ScenarioSpec::Macro => Scenario::MacroUser,
            ScenarioSpec::Small { policy, .. } => Scenario::SmallUser {
                policy,
                model: self.model(eta0),
                distance_mode,
            },
        }
    }
}

impl ModelKind {
    fn name(&self) -> &'static str {
        match self {
            ModelKind::Fixed => "Fixed",
            ModelKind::Distance => "Distance",
            ModelKind::Load => "Load",
        }
    }
}

impl FromStr for ScenarioSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("unknown scenario `{s}`");
        match s {
            "MU" => return Ok(ScenarioSpec::Macro),
            "SU-NoCache" => {
                return Ok(ScenarioSpec::Small {
                    policy: CachePolicy::NoCache,
                    model: ModelKind::Fixed,
                })
            }
            _ => {}
        }
        let mut parts = s.split('-');
        let (Some("SU"), Some(policy), Some(model), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let policy = match policy {
            "StdPop" => CachePolicy::StdPop,
            "UniRand" => CachePolicy::UniRand,
            "MixPop" => CachePolicy::MixPop,
            _ => return Err(bad()),
        };
        let model = match model {
            "Fixed" => ModelKind::Fixed,
            "Distance" => ModelKind::Distance,
            "Load" => ModelKind::Load,
            _ => return Err(bad()),
        };
        Ok(ScenarioSpec::Small { policy, model })
    }
}

impl Default for ExperimentConfig {
    /// The parameter set of the reference evaluation, with
    /// `beta = 1e-3 ms/m/BS`.
    fn default() -> Self {
        ExperimentConfig {
            network: NetworkSection {
                lambda_cr_per_m2: 1.4e-6,
                lambda_mc_per_m2: 2.8e-6,
                lambda_sc_per_m2: 3.6e-6,
                lambda_ut_per_m2: 7.2e-6,
                window_radius_m: 20_000.0,
            },
            radio: RadioSection {
                power_macro_w: 20.0,
                power_small_w: 2.0,
                pathloss_exponent: 4.0,
                target_sir_db: 3.0,
            },
            delay: DelaySection {
                t0_ms: 0.1,
                max_attempts: 4,
                beta_ms_per_m_per_bs: 1e-3,
                cache_read_mean_ms: 0.01,
            },
            cache: CacheSection {
                storage_total_gb: 100.0,
                storage_popular_gb: 9.5,
                storage_overhead_gb: 0.5,
                storage_uniform_gb: 90.0,
                catalogue_bound: 500.0,
                eta0: 1.45,
                b3_variant: B3Choice::Printed,
                unirand_span: SpanChoice::Catalogue,
            },
            experiment: ExperimentSection {
                scenarios: ["MU", "SU-NoCache", "SU-MixPop-Fixed", "SU-MixPop-Distance", "SU-MixPop-Load"]
                    .map(String::from)
                    .to_vec(),
                replications: 20_000,
                master_seed: 1,
                distance_mode: DistanceChoice::Averaged,
                sweep: SweepVariable::StorageS,
                grid: None,
            },
        }
    }
}

impl ExperimentConfig {
    pub fn delay_params(&self) -> hetsim_core::Result<DelayParams> {
        let params = DelayParams {
            slot_ms: self.delay.t0_ms,
            max_attempts: self.delay.max_attempts,
            backhaul_scale: self.delay.beta_ms_per_m_per_bs,
            cache_read_mean_ms: self.delay.cache_read_mean_ms,
            intensities: Intensities {
                central_router: self.network.lambda_cr_per_m2,
                macro_bs: self.network.lambda_mc_per_m2,
                small_cell: self.network.lambda_sc_per_m2,
                user: self.network.lambda_ut_per_m2,
            },
            radio: RadioParams::new(
                self.radio.power_macro_w,
                self.radio.power_small_w,
                self.radio.pathloss_exponent,
                db_to_linear(self.radio.target_sir_db),
            )?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn cache_config(&self) -> CacheConfig {
        let c = &self.cache;
        CacheConfig {
            uniform_span: match c.unirand_span {
                SpanChoice::Catalogue => UniformSpan::Catalogue,
                SpanChoice::MixpopRule => UniformSpan::MixPopRule,
            },
            ..CacheConfig::new(
                c.storage_total_gb,
                c.storage_popular_gb,
                c.storage_overhead_gb,
                c.storage_uniform_gb,
                c.catalogue_bound,
            )
        }
    }

    pub fn window(&self) -> hetsim_core::Result<Window> {
        Window::new(self.network.window_radius_m)
    }

    pub fn b3_variant(&self) -> B3Variant {
        self.cache.b3_variant.into()
    }

    pub fn distance_mode(&self) -> DistanceMode {
        self.experiment.distance_mode.into()
    }

    pub fn scenarios(&self) -> Result<Vec<ScenarioSpec>, ConfigError> {
        self.experiment
            .scenarios
            .iter()
            .map(|s| s.parse().map_err(ConfigError::Invalid))
            .collect()
    }

    /// Current value of `variable` (target SIR in dB).
    pub fn value_of(&self, variable: SweepVariable) -> f64 {
        match variable {
            SweepVariable::LambdaMc => self.network.lambda_mc_per_m2,
            SweepVariable::LambdaSc => self.network.lambda_sc_per_m2,
            SweepVariable::TargetSir => self.radio.target_sir_db,
            SweepVariable::StorageS => self.cache.storage_total_gb,
        }
    }

    /// A copy with `variable` set to `value`. Storage changes are absorbed
    /// by the uniform segment (see [`CacheConfig::with_total`]).
    pub fn with_value(&self, variable: SweepVariable, value: f64) -> ExperimentConfig {
        let mut out = self.clone();
        match variable {
            SweepVariable::LambdaMc => out.network.lambda_mc_per_m2 = value,
            SweepVariable::LambdaSc => out.network.lambda_sc_per_m2 = value,
            SweepVariable::TargetSir => out.radio.target_sir_db = value,
            SweepVariable::StorageS => {
                let resized = self.cache_config().with_total(value);
                out.cache.storage_total_gb = resized.total;
                out.cache.storage_popular_gb = resized.popular;
                out.cache.storage_overhead_gb = resized.overhead;
                out.cache.storage_uniform_gb = resized.uniform;
            }
        }
        out
    }

    /// The grid for `variable`: the configured one when it targets this
    /// variable, otherwise multiples of the base value.
    pub fn grid_for(&self, variable: SweepVariable) -> Vec<f64> {
        match &self.experiment.grid {
            Some(grid) if self.experiment.sweep == variable => grid.clone(),
            _ => {
                let base = self.value_of(variable);
                variable.default_multipliers().iter().map(|m| m * base).collect()
            }
        }
    }

    /// Structural checks that do not depend on the sweep value.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenarios()?;
        if self.experiment.scenarios.is_empty() {
            return Err(ConfigError::Invalid("experiment.scenarios is empty".into()));
        }
        if self.experiment.replications == 0 {
            return Err(ConfigError::Invalid("experiment.replications must be at least 1".into()));
        }
        if let Some(grid) = &self.experiment.grid {
            if grid.is_empty() {
                return Err(ConfigError::Invalid("experiment.grid is empty".into()));
            }
            if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConfigError::Invalid(format!(
                    "experiment.grid must be finite and strictly increasing: {grid:?}"
                )));
            }
        }
        self.delay_params().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.window().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}

/// Parses a configuration, listing every missing required key at once.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let missing = missing_keys(&table);
    if !missing.is_empty() {
        return Err(ConfigError::MissingFields(missing));
    }
    toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
}

fn missing_keys(table: &toml::Table) -> Vec<String> {
    let reference = toml::Table::try_from(ExperimentConfig::default()).expect("default config serializes");
    let mut missing = Vec::new();
    for (section, keys) in &reference {
        let Some(keys) = keys.as_table() else { continue };
        let present = table.get(section).and_then(|v| v.as_table());
        for key in keys.keys() {
            let path = format!("{section}.{key}");
            if OPTIONAL_KEYS.contains(&path.as_str()) {
                continue;
            }
            if !present.is_some_and(|t| t.contains_key(key)) {
                missing.push(path);
            }
        }
    }
    missing
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| e.in_file(path))
}

pub fn to_toml(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("config serializes")
}

pub fn write_config(path: &Path, config: &ExperimentConfig) -> Result<(), ConfigError> {
    fs::write(path, to_toml(config)).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))
}
