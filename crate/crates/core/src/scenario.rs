//! Scenario files.
//!
//! A scenario is a small TOML document: top-level run settings plus
//! `[topology]`, `[traffic]`, `[collection]`, `[distribution]` and an
//! optional `[sweep]` section. Every semantic error is reported with the line
//! of the offending key.

pub mod bundled;

use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::analytic::LagMode;
use crate::controlplane::{Collection, Distribution};
use crate::dataplane::Topology;
use crate::simulator::RunConfig;
use crate::traffic::presets::{self, Family, Variation};
use crate::traffic::{PacketProcess, SwitchTraffic, TrafficProfile};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("{0}")]
    Apply(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[serde(alias = "event")]
    EventSim,
    #[serde(alias = "model")]
    AnalyticModel,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::EventSim => "event-sim",
            Engine::AnalyticModel => "analytic-model",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "event" | "event-sim" => Ok(Engine::EventSim),
            "model" | "analytic-model" => Ok(Engine::AnalyticModel),
            other => Err(format!("unknown engine `{other}` (expected event or model)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    SyncPeriod,
    PollingPeriod,
    Threshold,
    ControllerCount,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::SyncPeriod => "sync_period",
            SweepParam::PollingPeriod => "polling_period",
            SweepParam::Threshold => "threshold",
            SweepParam::ControllerCount => "controllers",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrafficSpec {
    Preset { family: Family, variation: Variation },
    Custom(TrafficProfile),
}

impl TrafficSpec {
    pub fn resolve(&self, domains: usize) -> Result<TrafficProfile, String> {
        match self {
            TrafficSpec::Preset { family, variation } => presets::profile(*family, *variation, domains)
                .ok_or_else(|| format!("traffic profile {family:?}/{variation:?} has no parameters for {domains} domains")),
            TrafficSpec::Custom(p) if p.switches.len() == domains => Ok(p.clone()),
            TrafficSpec::Custom(p) => Err(format!(
                "custom traffic lists {} switches but the topology has {domains} domains",
                p.switches.len()
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
    /// Each summary row is the mean over these settings of a second parameter.
    pub average_over: Option<(SweepParam, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub engine: Engine,
    pub lag_mode: LagMode,
    pub topology: Topology,
    pub traffic: TrafficSpec,
    pub collection: Collection,
    pub distribution: Distribution,
    pub horizon: f64,
    pub window: f64,
    /// Block average applied to written time series.
    pub smoothing: Option<f64>,
    pub runs: u32,
    pub seed: u64,
    pub sweep: Option<SweepSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default = "default_engine")]
    engine: Engine,
    #[serde(default)]
    lag: Option<Spanned<String>>,
    #[serde(default = "default_horizon")]
    horizon: Spanned<f64>,
    #[serde(default = "default_window")]
    window: Spanned<f64>,
    #[serde(default)]
    smoothing: Option<Spanned<f64>>,
    #[serde(default = "default_runs")]
    runs: Spanned<i64>,
    #[serde(default = "default_seed")]
    seed: u64,
    topology: RawTopology,
    traffic: RawTraffic,
    collection: RawCollection,
    #[serde(default)]
    distribution: Option<RawDistribution>,
    #[serde(default)]
    sweep: Option<RawSweep>,
}

fn default_engine() -> Engine {
    Engine::EventSim
}
fn default_horizon() -> Spanned<f64> {
    Spanned::new(0..0, 300.0)
}
fn default_window() -> Spanned<f64> {
    Spanned::new(0..0, 2.0)
}
fn default_runs() -> Spanned<i64> {
    Spanned::new(0..0, 10)
}
fn default_seed() -> u64 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    domains: Spanned<i64>,
    #[serde(default)]
    single_controller: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTraffic {
    profile: Spanned<String>,
    ttl: Option<f64>,
    payload: Option<u64>,
    flow_rates: Option<Vec<f64>>,
    packet_rates: Option<Vec<f64>>,
    process: Option<String>,
    shape: Option<f64>,
    burst: Option<Vec<f64>>,
    idle: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCollection {
    kind: Spanned<String>,
    poll: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    kind: Spanned<String>,
    period: Option<Spanned<f64>>,
    threshold: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: SweepParam,
    values: Spanned<Vec<f64>>,
    average_over: Option<SweepParam>,
    average_values: Option<Spanned<Vec<f64>>>,
}

fn line_of(source: &str, span: &Range<usize>) -> usize {
    source[..span.start.min(source.len())].matches('\n').count() + 1
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, span: &Range<usize>, message: impl Into<String>) -> Result<T, ScenarioError> {
        Err(ScenarioError::Invalid {
            line: line_of(self.source, span),
            message: message.into(),
        })
    }

    fn positive(&self, v: &Spanned<f64>, what: &str) -> Result<f64, ScenarioError> {
        let x = *v.get_ref();
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            self.err(&v.span(), format!("{what} must be positive, got {x}"))
        }
    }
}

fn preset_id(id: &str) -> Option<(Family, Variation)> {
    Some(match id {
        "simple-lv" => (Family::Simple, Variation::Low),
        "simple-hv" => (Family::Simple, Variation::High),
        "pareto-lv" => (Family::Pareto, Variation::Low),
        "pareto-hv" => (Family::Pareto, Variation::High),
        "pareto-multi-lv" => (Family::ParetoMulti, Variation::Low),
        "pareto-multi-hv" => (Family::ParetoMulti, Variation::High),
        _ => return None,
    })
}

pub const PRESET_PROFILES: [&str; 6] = [
    "simple-lv",
    "simple-hv",
    "pareto-lv",
    "pareto-hv",
    "pareto-multi-lv",
    "pareto-multi-hv",
];

fn custom_traffic(ctx: &Ctx, raw: &RawTraffic, domains: usize) -> Result<TrafficProfile, ScenarioError> {
    let span = raw.profile.span();
    let need = |v: &Option<Vec<f64>>, what: &str| -> Result<Vec<f64>, ScenarioError> {
        match v {
            Some(v) if v.len() == domains => Ok(v.clone()),
            Some(v) => ctx.err(&span, format!("custom traffic: `{what}` has {} entries, expected {domains}", v.len())),
            None => ctx.err(&span, format!("custom traffic needs `{what}`")),
        }
    };
    let flow_rates = need(&raw.flow_rates, "flow_rates")?;
    let packet_rates = need(&raw.packet_rates, "packet_rates")?;
    let process = raw.process.as_deref().unwrap_or("poisson");
    let switches = match process {
        "poisson" => flow_rates
            .iter()
            .zip(&packet_rates)
            .map(|(&f, &p)| SwitchTraffic {
                flow_rate: f,
                packet_rate: p,
                process: PacketProcess::Poisson,
            })
            .collect(),
        "pareto" => {
            let burst = need(&raw.burst, "burst")?;
            let idle = need(&raw.idle, "idle")?;
            let alpha = raw.shape.unwrap_or(presets::PARETO_SHAPE);
            (0..domains)
                .map(|k| SwitchTraffic {
                    flow_rate: flow_rates[k],
                    packet_rate: packet_rates[k],
                    process: PacketProcess::ParetoOnOff {
                        alpha,
                        burst: burst[k],
                        idle: idle[k],
                    },
                })
                .collect()
        }
        other => return ctx.err(&span, format!("unknown packet process `{other}` (poisson or pareto)")),
    };
    let profile = TrafficProfile {
        switches,
        ttl: raw.ttl.unwrap_or(presets::TTL),
        payload: raw.payload.unwrap_or(presets::PAYLOAD),
    };
    if let Err(e) = profile.validate() {
        return ctx.err(&span, e.to_string());
    }
    Ok(profile)
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(source: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = toml::from_str(source).map_err(|e| {
            let msg = e.message().to_string();
            match e.span() {
                Some(span) => ScenarioError::Invalid {
                    line: line_of(source, &span),
                    message: msg,
                },
                None => ScenarioError::Parse(msg),
            }
        })?;
        let ctx = Ctx { source };

        let runs = *raw.runs.get_ref();
        if runs < 1 || runs > i64::from(u32::MAX) {
            return ctx.err(&raw.runs.span(), format!("runs must be at least 1, got {runs}"));
        }
        let horizon = ctx.positive(&raw.horizon, "horizon")?;
        let window = ctx.positive(&raw.window, "window")?;
        let smoothing = match &raw.smoothing {
            Some(s) => {
                let v = ctx.positive(s, "smoothing")?;
                let k = v / window;
                if (k - k.round()).abs() > 1e-9 {
                    return ctx.err(&s.span(), "smoothing must be a multiple of the window");
                }
                Some(v)
            }
            None => None,
        };
        let lag_mode = match raw.lag.as_ref().map(|l| (l.get_ref().as_str(), l.span())) {
            None | Some(("last-tick", _)) => LagMode::LastTick,
            Some(("sliding", _)) => LagMode::Sliding,
            Some((other, span)) => return ctx.err(&span, format!("unknown lag mode `{other}`")),
        };

        let domains = *raw.topology.domains.get_ref();
        if domains < 1 {
            return ctx.err(&raw.topology.domains.span(), format!("domains must be at least 1, got {domains}"));
        }
        let topology = Topology {
            domains: domains as usize,
            single_controller: raw.topology.single_controller,
        };

        let profile_id = raw.traffic.profile.get_ref().as_str();
        let traffic = match (profile_id, preset_id(profile_id)) {
            (_, Some((family, variation))) => TrafficSpec::Preset { family, variation },
            ("custom", None) => TrafficSpec::Custom(custom_traffic(&ctx, &raw.traffic, topology.domains)?),
            (other, None) => {
                return ctx.err(
                    &raw.traffic.profile.span(),
                    format!("unknown traffic profile `{other}` (known: {}, custom)", PRESET_PROFILES.join(", ")),
                )
            }
        };

        let collection = match raw.collection.kind.get_ref().as_str() {
            "passive" => Collection::Passive,
            "active" => match &raw.collection.poll {
                Some(p) => Collection::Active {
                    poll: ctx.positive(p, "poll")?,
                },
                None => return ctx.err(&raw.collection.kind.span(), "active collection needs `poll`"),
            },
            other => return ctx.err(&raw.collection.kind.span(), format!("unknown collection `{other}`")),
        };

        let distribution = match &raw.distribution {
            None => Distribution::None,
            Some(d) => match d.kind.get_ref().as_str() {
                "none" => Distribution::None,
                "periodic" => match &d.period {
                    Some(p) => Distribution::Periodic {
                        period: ctx.positive(p, "period")?,
                    },
                    None => return ctx.err(&d.kind.span(), "periodic distribution needs `period`"),
                },
                "lsvs" => match &d.threshold {
                    Some(t) if *t.get_ref() >= 0.0 => Distribution::Lsvs {
                        threshold: *t.get_ref(),
                    },
                    Some(t) => return ctx.err(&t.span(), "threshold must be non-negative"),
                    None => return ctx.err(&d.kind.span(), "lsvs distribution needs `threshold`"),
                },
                other => return ctx.err(&d.kind.span(), format!("unknown distribution `{other}`")),
            },
        };

        let sweep = match &raw.sweep {
            None => None,
            Some(s) => {
                let check = |values: &Spanned<Vec<f64>>| -> Result<Vec<f64>, ScenarioError> {
                    let v = values.get_ref();
                    if v.is_empty() {
                        return ctx.err(&values.span(), "sweep values must not be empty");
                    }
                    if let Some(bad) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                        return ctx.err(&values.span(), format!("sweep values must be positive, got {bad}"));
                    }
                    Ok(v.clone())
                };
                let values = check(&s.values)?;
                let average_over = match (s.average_over, &s.average_values) {
                    (None, None) => None,
                    (Some(p), Some(v)) => Some((p, check(v)?)),
                    _ => return ctx.err(&s.values.span(), "`average_over` and `average_values` go together"),
                };
                Some(SweepSpec {
                    parameter: s.parameter,
                    values,
                    average_over,
                })
            }
        };

        let scenario = Scenario {
            name: raw.name,
            description: raw.description,
            engine: raw.engine,
            lag_mode,
            topology,
            traffic,
            collection,
            distribution,
            horizon,
            window,
            smoothing,
            runs: runs as u32,
            seed: raw.seed,
            sweep,
        };
        // every swept setting must produce a runnable scenario
        let settings: Vec<(SweepParam, f64)> = match &scenario.sweep {
            None => Vec::new(),
            Some(s) => {
                let mut all: Vec<_> = s.values.iter().map(|&v| (s.parameter, v)).collect();
                if let Some((p, vals)) = &s.average_over {
                    all.extend(vals.iter().map(|&v| (*p, v)));
                }
                all
            }
        };
        let span = raw.traffic.profile.span();
        if let Err(e) = scenario.traffic.resolve(scenario.topology.domains) {
            return ctx.err(&span, e);
        }
        for (p, v) in settings {
            if let Err(e) = scenario.with(p, v).and_then(|s| s.run_config(0).map(|_| ())) {
                let span = raw.sweep.as_ref().map(|s| s.values.span()).unwrap_or(span.clone());
                return ctx.err(&span, e.to_string());
            }
        }
        if let Err(e) = scenario.run_config(0).and_then(|c| c.validate().map_err(|e| ScenarioError::Apply(e.to_string()))) {
            return ctx.err(&raw.collection.kind.span(), e.to_string());
        }
        Ok(scenario)
    }

    /// Copy of the scenario with one parameter set to `value`.
    pub fn with(&self, parameter: SweepParam, value: f64) -> Result<Self, ScenarioError> {
        let mut s = self.clone();
        match parameter {
            SweepParam::SyncPeriod => {
                if !matches!(s.distribution, Distribution::Periodic { .. }) {
                    return Err(ScenarioError::Apply("sync-period sweep needs periodic distribution".into()));
                }
                s.distribution = Distribution::Periodic { period: value };
            }
            SweepParam::PollingPeriod => {
                if !matches!(s.collection, Collection::Active { .. }) {
                    return Err(ScenarioError::Apply("polling-period sweep needs active collection".into()));
                }
                s.collection = Collection::Active { poll: value };
            }
            SweepParam::Threshold => {
                if !matches!(s.distribution, Distribution::Lsvs { .. }) {
                    return Err(ScenarioError::Apply("threshold sweep needs lsvs distribution".into()));
                }
                s.distribution = Distribution::Lsvs { threshold: value };
            }
            SweepParam::ControllerCount => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(ScenarioError::Apply(format!("controller count must be a whole number, got {value}")));
                }
                s.topology.domains = value as usize;
            }
        }
        Ok(s)
    }

    pub fn run_config(&self, run: u32) -> Result<RunConfig, ScenarioError> {
        let profile = self.traffic.resolve(self.topology.domains).map_err(ScenarioError::Apply)?;
        Ok(RunConfig {
            topology: self.topology,
            profile,
            collection: self.collection,
            distribution: self.distribution,
            horizon: self.horizon,
            window: self.window,
            seed: self.seed,
            run,
            audit: false,
            trace: false,
        })
    }
}
