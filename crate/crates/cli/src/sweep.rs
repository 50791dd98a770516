//! Parameter sweeps and their CSV output.

use std::io::Write;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use hetsim_core::analytics::{avg_delay_macro, avg_delay_small};
use hetsim_core::simulator::estimate;
use hetsim_core::ClosedFormDelay;

use crate::config::{ExperimentConfig, ScenarioSpec, SweepVariable};
use crate::error::SweepError;

pub const CSV_HEADER: [&str; 12] = [
    "sweep_var",
    "value",
    "scenario",
    "theory_ms",
    "sim_ms",
    "ci_low",
    "ci_high",
    "hit_rate_theory",
    "hit_rate_sim",
    "outage_rate",
    "reps",
    "seed",
];

/// One (sweep value, scenario) result. Simulation columns are empty in
/// theory-only runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_var: String,
    pub value: f64,
    pub scenario: String,
    pub theory_ms: f64,
    pub sim_ms: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub hit_rate_theory: f64,
    pub hit_rate_sim: Option<f64>,
    pub outage_rate: Option<f64>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
}

/// Closed-form delay for one scenario under `config`.
pub fn theory(config: &ExperimentConfig, spec: &ScenarioSpec) -> hetsim_core::Result<ClosedFormDelay> {
    let params = config.delay_params()?;
    match *spec {
        ScenarioSpec::Macro => avg_delay_macro(&params),
        ScenarioSpec::Small { policy, .. } => avg_delay_small(
            policy,
            spec.model(config.cache.eta0),
            &config.cache_config().for_policy(policy),
            &params,
            config.b3_variant(),
        ),
    }
}

fn evaluate(
    config: &ExperimentConfig,
    spec: &ScenarioSpec,
    variable: SweepVariable,
    value: f64,
    theory_only: bool,
) -> hetsim_core::Result<SweepRow> {
    let closed = theory(config, spec)?;
    let mut row = SweepRow {
        sweep_var: variable.name().to_string(),
        value,
        scenario: spec.label(),
        theory_ms: closed.total,
        sim_ms: None,
        ci_low: None,
        ci_high: None,
        hit_rate_theory: closed.hit_probability,
        hit_rate_sim: None,
        outage_rate: None,
        reps: None,
        seed: None,
    };
    if theory_only {
        return Ok(row);
    }

    let exp = &config.experiment;
    let scenario = spec.scenario(config.cache.eta0, config.distance_mode());
    let cache = match *spec {
        ScenarioSpec::Small { policy, .. } => config.cache_config().for_policy(policy),
        ScenarioSpec::Macro => config.cache_config(),
    };
    let est = estimate(
        &scenario,
        &config.delay_params()?,
        &cache,
        &config.window()?,
        exp.replications,
        exp.master_seed,
    )?;
    row.sim_ms = Some(est.mean);
    row.ci_low = Some(est.ci_low);
    row.ci_high = Some(est.ci_high);
    row.hit_rate_sim = Some(est.hit_rate);
    row.outage_rate = Some(est.outage_rate);
    row.reps = Some(est.replications);
    row.seed = Some(exp.master_seed);
    Ok(row)
}

/// Runs `variable` over its grid for every configured scenario. Rows come
/// out ordered by value, then by scenario as listed in the config. All
/// points share the master seed.
pub fn run_sweep(
    config: &ExperimentConfig,
    variable: SweepVariable,
    theory_only: bool,
) -> Result<Vec<SweepRow>, SweepError> {
    config.validate()?;
    let specs = config.scenarios()?;
    let mut rows = Vec::new();
    for value in config.grid_for(variable) {
        let point = config.with_value(variable, value);
        if let Ok(params) = point.delay_params() {
            for w in params.warnings() {
                warn!("{variable} = {value}: {w}");
            }
        }
        for spec in &specs {
            let row = evaluate(&point, spec, variable, value, theory_only).map_err(|source| SweepError::Point {
                variable: variable.name(),
                value,
                scenario: spec.label(),
                source,
            })?;
            if row.theory_ms <= 0.0 {
                warn!(
                    "{variable} = {value} {}: closed-form delay {:.4} ms is not positive (hit probability {:.4})",
                    row.scenario, row.theory_ms, row.hit_rate_theory
                );
            }
            info!("{variable} = {value} {}: theory {:.6} ms", row.scenario, row.theory_ms);
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), SweepError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let err = |e: csv::Error| SweepError::Output(e.to_string());
    writer.write_record(CSV_HEADER).map_err(err)?;
    for row in rows {
        writer.serialize(row).map_err(err)?;
    }
    writer.flush().map_err(|e| SweepError::Output(e.to_string()))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
