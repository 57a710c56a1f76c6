//! Runs scenarios and sweeps: independent seeded runs per setting, averaged
//! pointwise.

use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::run_model;
use crate::metrics::{aggregate, AggregateSeries, MetricsError};
use crate::scenario::{Engine, Scenario, ScenarioError, SweepParam};
use crate::simulator::{simulate, EngineError, RunOutput};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("scenario `{0}` has no [sweep] section")]
    NoSweep(String),
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    /// Mean over runs at every measurement tick.
    pub series: AggregateSeries,
    /// `series` after block smoothing, when the scenario asks for it.
    pub smoothed: Option<AggregateSeries>,
    /// Mean synchronization messages per run.
    pub sync_messages: f64,
    pub executions: usize,
}

impl ScenarioResult {
    /// Series to write out.
    pub fn output_series(&self) -> &AggregateSeries {
        self.smoothed.as_ref().unwrap_or(&self.series)
    }
}

pub fn run_once(scenario: &Scenario, run: u32) -> Result<RunOutput, ExperimentError> {
    let cfg = scenario.run_config(run)?;
    Ok(match scenario.engine {
        Engine::EventSim => simulate(&cfg)?,
        Engine::AnalyticModel => run_model(&cfg, scenario.lag_mode)?,
    })
}

pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioResult, ExperimentError> {
    let outputs: Vec<RunOutput> = (0..scenario.runs)
        .into_par_iter()
        .map(|r| run_once(scenario, r))
        .collect::<Result<_, _>>()?;
    let sync_messages = outputs.iter().map(|o| o.sync_messages as f64).sum::<f64>() / outputs.len() as f64;
    let samples: Vec<_> = outputs.into_iter().map(|o| o.samples).collect();
    let series = aggregate(&samples, scenario.window, None)?;
    let smoothed = scenario.smoothing.map(|s| series.smoothed(s)).transpose()?;
    Ok(ScenarioResult {
        series,
        smoothed,
        sync_messages,
        executions: samples.len(),
    })
}

/// Time-averaged metrics for one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub value: f64,
    pub xi_f: Option<f64>,
    pub xi_b: Option<f64>,
    pub sigma_f: f64,
    pub sigma_b: f64,
    pub runs: usize,
    pub sync_messages: f64,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    /// Setting of the averaged-over parameter, if any.
    pub inner: Option<f64>,
    pub result: ScenarioResult,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: SweepParam,
    pub inner: Option<SweepParam>,
    pub points: Vec<SweepPoint>,
    pub rows: Vec<SummaryRow>,
    pub executions: usize,
    /// False when an error stopped the sweep early.
    pub complete: bool,
}

#[derive(Debug, Error)]
#[error("sweep stopped after {} of its values: {error}", partial.rows.len())]
pub struct SweepFailure {
    pub partial: SweepResult,
    #[source]
    pub error: ExperimentError,
}

fn mean_opt(xs: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = xs.collect();
    v.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

fn summarize(value: f64, results: &[&ScenarioResult]) -> SummaryRow {
    let n = results.len() as f64;
    SummaryRow {
        value,
        xi_f: mean_opt(results.iter().map(|r| r.series.mean_xi_f())),
        xi_b: mean_opt(results.iter().map(|r| r.series.mean_xi_b())),
        sigma_f: results.iter().map(|r| r.series.mean_sigma_f()).sum::<f64>() / n,
        sigma_b: results.iter().map(|r| r.series.mean_sigma_b()).sum::<f64>() / n,
        runs: results.iter().map(|r| r.executions).sum(),
        sync_messages: results.iter().map(|r| r.sync_messages).sum::<f64>() / n,
    }
}

pub fn run_sweep(scenario: &Scenario) -> Result<SweepResult, SweepFailure> {
    let mut out = SweepResult {
        parameter: SweepParam::SyncPeriod,
        inner: None,
        points: Vec::new(),
        rows: Vec::new(),
        executions: 0,
        complete: false,
    };
    let Some(sweep) = &scenario.sweep else {
        return Err(SweepFailure {
            partial: out,
            error: ExperimentError::NoSweep(scenario.name.clone()),
        });
    };
    out.parameter = sweep.parameter;
    out.inner = sweep.average_over.as_ref().map(|(p, _)| *p);

    for &value in &sweep.values {
        let settings: Vec<Option<(SweepParam, f64)>> = match &sweep.average_over {
            None => vec![None],
            Some((p, vals)) => vals.iter().map(|&v| Some((*p, v))).collect(),
        };
        let first = out.points.len();
        for inner in settings {
            let result = scenario
                .with(sweep.parameter, value)
                .and_then(|s| match inner {
                    Some((p, v)) => s.with(p, v),
                    None => Ok(s),
                })
                .map_err(ExperimentError::from)
                .and_then(|s| run_scenario(&s));
            match result {
                Ok(result) => {
                    out.executions += result.executions;
                    out.points.push(SweepPoint {
                        value,
                        inner: inner.map(|(_, v)| v),
                        result,
                    });
                }
                Err(error) => return Err(SweepFailure { partial: out, error }),
            }
        }
        let results: Vec<&ScenarioResult> = out.points[first..].iter().map(|p| &p.result).collect();
        out.rows.push(summarize(value, &results));
    }
    out.complete = true;
    Ok(out)
}
