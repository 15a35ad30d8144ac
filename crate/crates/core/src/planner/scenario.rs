//! Scenario files.
//!
//! A scenario is a TOML document. Every duration and bandwidth is a string
//! with an explicit unit (`"120s"`, `"7h"`, `"3Mbps"`); bare numbers are
//! rejected for those fields. Request rates are plain numbers (requests per
//! subscribing household per peak period).
//!
//! ```toml
//! name = "example"
//! blocking_target = 0.05
//! population_mode = "fixed_per_cluster"   # or "fixed_total"
//! # total_population = 24000               # households, fixed_total only
//! architectures = ["centralized", "distributed"]
//!
//! [cluster]
//! clusters = 40
//! households = 600
//! penetration = 1.0
//! normal_rate = 2.5
//! interactive_rate = 4
//! normal_hold = "120s"
//! interactive_hold = "6s"
//! peak_period = "7h"
//! multicast_factor = 1
//!
//! [catalog]                  # optional, required for "distributed"
//! total_movies = 1000
//! popular_count = 50
//! zipf_exponent = 0.7
//!
//! [[service]]
//! label = "SD"
//! stream_rate = "3Mbps"
//! # interactive_stream_rate = "3Mbps"
//!
//! [messages]                 # optional, enables the inbound column
//! normal = "400bit"
//! interactive = "200bit"
//!
//! [simulation]               # optional, used by `simulate`
//! seed = 42
//! holding = "exponential"    # or "deterministic"
//! multicast = "thinning"     # or "window"
//! # multicast_window = "30s"
//! horizon = 120000           # stream offers, or a duration such as "70h"
//! # warmup = 12000           # default: 10% of the horizon
//! batches = 20
//! replications = 1
//! tolerance_se = 3.0
//!
//! [[sweep]]
//! path = "cluster.clusters"
//! values = [40, 50, 60]
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Value;

use crate::capacity::{
    Architecture, CapacityError, ClusterParams, MessageSizes, ServiceLabel, ServiceProfile,
};
use crate::erlang::BlockingProb;
use crate::popularity::CatalogModel;
use crate::simulator::{HoldingDist, MulticastMode, RunLength, DEFAULT_BATCHES};
use crate::units::{self, BitRate, Seconds, UnitError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        message: String,
    },
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("unit error in `{field}`: {source}")]
    Unit {
        field: String,
        #[source]
        source: UnitError,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationMode {
    /// `households` is per cluster and stays put as `clusters` changes.
    FixedPerCluster,
    /// The total household count is fixed; each point uses
    /// `h = round(total / x)`.
    FixedTotal { total: u64 },
}

/// A scenario parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    Clusters,
    Households,
    TotalPopulation,
    Penetration,
    NormalRate,
    InteractiveRate,
    NormalHold,
    InteractiveHold,
    PeakPeriod,
    MulticastFactor,
    TotalMovies,
    PopularCount,
    ZipfExponent,
    BlockingTarget,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ValueKind {
    Integer,
    Real,
    Duration,
}

impl SweepParam {
    pub const ALL: [SweepParam; 14] = [
        SweepParam::Clusters,
        SweepParam::Households,
        SweepParam::TotalPopulation,
        SweepParam::Penetration,
        SweepParam::NormalRate,
        SweepParam::InteractiveRate,
        SweepParam::NormalHold,
        SweepParam::InteractiveHold,
        SweepParam::PeakPeriod,
        SweepParam::MulticastFactor,
        SweepParam::TotalMovies,
        SweepParam::PopularCount,
        SweepParam::ZipfExponent,
        SweepParam::BlockingTarget,
    ];

    pub fn path(self) -> &'static str {
        match self {
            SweepParam::Clusters => "cluster.clusters",
            SweepParam::Households => "cluster.households",
            SweepParam::TotalPopulation => "total_population",
            SweepParam::Penetration => "cluster.penetration",
            SweepParam::NormalRate => "cluster.normal_rate",
            SweepParam::InteractiveRate => "cluster.interactive_rate",
            SweepParam::NormalHold => "cluster.normal_hold",
            SweepParam::InteractiveHold => "cluster.interactive_hold",
            SweepParam::PeakPeriod => "cluster.peak_period",
            SweepParam::MulticastFactor => "cluster.multicast_factor",
            SweepParam::TotalMovies => "catalog.total_movies",
            SweepParam::PopularCount => "catalog.popular_count",
            SweepParam::ZipfExponent => "catalog.zipf_exponent",
            SweepParam::BlockingTarget => "blocking_target",
        }
    }

    pub fn from_path(path: &str) -> Option<SweepParam> {
        SweepParam::ALL.into_iter().find(|p| p.path() == path)
    }

    fn kind(self) -> ValueKind {
        match self {
            SweepParam::Clusters
            | SweepParam::Households
            | SweepParam::TotalPopulation
            | SweepParam::TotalMovies
            | SweepParam::PopularCount => ValueKind::Integer,
            SweepParam::NormalHold | SweepParam::InteractiveHold | SweepParam::PeakPeriod => {
                ValueKind::Duration
            }
            _ => ValueKind::Real,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    Integer(u64),
    Real(f64),
    Duration(Seconds),
}

impl SweepValue {
    /// Value in canonical units (seconds for durations).
    pub fn as_f64(self) -> f64 {
        match self {
            SweepValue::Integer(v) => v as f64,
            SweepValue::Real(v) => v,
            SweepValue::Duration(s) => s.0,
        }
    }

    fn to_toml(self) -> Value {
        match self {
            SweepValue::Integer(v) => Value::Integer(v as i64),
            SweepValue::Real(v) => Value::Float(v),
            SweepValue::Duration(s) => Value::String(s.to_string()),
        }
    }
}

/// Canonical plain-number rendering, used for CSV cells.
impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Integer(v) => v.fmt(f),
            SweepValue::Real(v) => v.fmt(f),
            SweepValue::Duration(s) => s.0.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<SweepValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub seed: u64,
    pub holding: HoldingDist,
    pub multicast: MulticastMode,
    pub horizon: RunLength,
    pub warmup: Option<RunLength>,
    pub batches: usize,
    pub replications: u64,
    pub tolerance_se: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            seed: 1,
            holding: HoldingDist::Exponential,
            multicast: MulticastMode::Thinning,
            horizon: RunLength::Offers(120_000),
            warmup: None,
            batches: DEFAULT_BATCHES,
            replications: 1,
            tolerance_se: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub cluster: ClusterParams,
    pub catalog: Option<CatalogModel>,
    pub services: Vec<ServiceProfile>,
    pub blocking_target: BlockingProb,
    pub messages: Option<MessageSizes>,
    pub architectures: Vec<Architecture>,
    pub population: PopulationMode,
    pub sweep: Vec<SweepAxis>,
    pub simulation: SimSettings,
}

// ---- raw TOML layer ------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    blocking_target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    population_mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total_population: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    architectures: Option<Vec<String>>,
    cluster: RawCluster,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    catalog: Option<CatalogModel>,
    service: Vec<RawService>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    messages: Option<RawMessages>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    simulation: Option<RawSimulation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sweep: Vec<RawSweep>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    clusters: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    households: Option<u64>,
    penetration: f64,
    normal_rate: f64,
    interactive_rate: f64,
    normal_hold: Value,
    interactive_hold: Value,
    peak_period: Value,
    multicast_factor: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawService {
    label: String,
    stream_rate: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interactive_stream_rate: Option<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMessages {
    normal: Value,
    interactive: Value,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    holding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multicast: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multicast_window: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    warmup: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    batches: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    replications: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerance_se: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    path: String,
    values: Vec<Value>,
}

fn require_string<'a>(field: &str, v: &'a Value) -> Result<&'a str, ScenarioError> {
    match v {
        Value::String(s) => Ok(s),
        Value::Integer(_) | Value::Float(_) => Err(ScenarioError::Unit {
            field: field.to_string(),
            source: UnitError {
                input: v.to_string(),
                reason: "bare number; add a unit suffix".into(),
            },
        }),
        other => Err(invalid(
            field,
            format!("expected a string with units, got {other}"),
        )),
    }
}

fn duration(field: &str, v: &Value) -> Result<Seconds, ScenarioError> {
    Seconds::parse(require_string(field, v)?).map_err(|source| ScenarioError::Unit {
        field: field.to_string(),
        source,
    })
}

fn bitrate(field: &str, v: &Value) -> Result<BitRate, ScenarioError> {
    BitRate::parse(require_string(field, v)?).map_err(|source| ScenarioError::Unit {
        field: field.to_string(),
        source,
    })
}

fn bits(field: &str, v: &Value) -> Result<u64, ScenarioError> {
    units::parse_bits(require_string(field, v)?).map_err(|source| ScenarioError::Unit {
        field: field.to_string(),
        source,
    })
}

fn run_length(field: &str, v: &Value) -> Result<RunLength, ScenarioError> {
    match v {
        Value::Integer(n) if *n >= 0 => Ok(RunLength::Offers(*n as u64)),
        Value::Integer(_) => Err(invalid(field, "offer count must be non-negative")),
        _ => Ok(RunLength::Time(duration(field, v)?)),
    }
}

fn sweep_value(field: &str, param: SweepParam, v: &Value) -> Result<SweepValue, ScenarioError> {
    match param.kind() {
        ValueKind::Integer => match v {
            Value::Integer(n) if *n >= 0 => Ok(SweepValue::Integer(*n as u64)),
            other => Err(invalid(
                field,
                format!("expected a non-negative integer, got {other}"),
            )),
        },
        ValueKind::Real => match v {
            Value::Integer(n) => Ok(SweepValue::Real(*n as f64)),
            Value::Float(x) => Ok(SweepValue::Real(*x)),
            other => Err(invalid(field, format!("expected a number, got {other}"))),
        },
        ValueKind::Duration => Ok(SweepValue::Duration(duration(field, v)?)),
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

fn cluster_field_error(e: CapacityError) -> ScenarioError {
    match e {
        CapacityError::Cluster { field, reason } => invalid(format!("cluster.{field}"), reason),
        CapacityError::Catalog(c) => invalid("catalog", c.to_string()),
        CapacityError::Service(s) => invalid("service", s),
        CapacityError::Messages(s) => invalid("messages", s),
        other => invalid("scenario", other.to_string()),
    }
}

impl Scenario {
    /// Parse and validate a scenario from TOML text.
    pub fn from_toml(src: &str) -> Result<Scenario, ScenarioError> {
        let raw: RawScenario = toml::from_str(src).map_err(|e| ScenarioError::Parse {
            line: e.span().map(|s| line_of(src, s.start)),
            message: e.message().to_string(),
        })?;
        Scenario::from_raw(raw)
    }

    fn from_raw(raw: RawScenario) -> Result<Scenario, ScenarioError> {
        if raw.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        let blocking_target = BlockingProb::new(raw.blocking_target)
            .ok()
            .filter(|p| p.value() > 0.0 && p.value() < 1.0)
            .ok_or_else(|| invalid("blocking_target", "must lie strictly between 0 and 1"))?;

        let population = match raw
            .population_mode
            .as_deref()
            .unwrap_or("fixed_per_cluster")
        {
            "fixed_per_cluster" => {
                if raw.total_population.is_some() {
                    return Err(invalid(
                        "total_population",
                        "only meaningful with population_mode = \"fixed_total\"",
                    ));
                }
                PopulationMode::FixedPerCluster
            }
            "fixed_total" => {
                let total = raw
                    .total_population
                    .ok_or_else(|| invalid("total_population", "required in fixed_total mode"))?;
                if total == 0 {
                    return Err(invalid("total_population", "must be positive"));
                }
                if raw.cluster.households.is_some() {
                    return Err(invalid(
                        "cluster.households",
                        "derived from total_population in fixed_total mode; remove it",
                    ));
                }
                PopulationMode::FixedTotal { total }
            }
            other => {
                return Err(invalid(
                    "population_mode",
                    format!("expected fixed_per_cluster or fixed_total, got `{other}`"),
                ))
            }
        };

        let rc = &raw.cluster;
        let households = match population {
            PopulationMode::FixedPerCluster => rc
                .households
                .ok_or_else(|| invalid("cluster.households", "required"))?,
            PopulationMode::FixedTotal { total } => households_for(total, rc.clusters.max(1)),
        };
        let cluster = ClusterParams {
            clusters: rc.clusters,
            households,
            penetration: rc.penetration,
            normal_rate: rc.normal_rate,
            interactive_rate: rc.interactive_rate,
            normal_hold: duration("cluster.normal_hold", &rc.normal_hold)?,
            interactive_hold: duration("cluster.interactive_hold", &rc.interactive_hold)?,
            peak_period: duration("cluster.peak_period", &rc.peak_period)?,
            multicast_factor: rc.multicast_factor,
        };
        cluster.validate().map_err(cluster_field_error)?;

        if let Some(c) = &raw.catalog {
            c.validate()
                .map_err(|e| invalid("catalog", e.to_string()))?;
        }

        if raw.service.is_empty() {
            return Err(invalid(
                "service",
                "at least one [[service]] entry is required",
            ));
        }
        let mut services = Vec::with_capacity(raw.service.len());
        for (i, s) in raw.service.iter().enumerate() {
            let svc = ServiceProfile {
                label: ServiceLabel::parse(&s.label),
                stream_rate: bitrate(&format!("service[{i}].stream_rate"), &s.stream_rate)?,
                interactive_stream_rate: s
                    .interactive_stream_rate
                    .as_ref()
                    .map(|v| bitrate(&format!("service[{i}].interactive_stream_rate"), v))
                    .transpose()?,
            };
            svc.validate()
                .map_err(|e| invalid(format!("service[{i}]"), e.to_string()))?;
            services.push(svc);
        }

        let messages = raw
            .messages
            .as_ref()
            .map(|m| -> Result<MessageSizes, ScenarioError> {
                let sizes = MessageSizes {
                    normal_bits: bits("messages.normal", &m.normal)?,
                    interactive_bits: bits("messages.interactive", &m.interactive)?,
                };
                sizes.validate().map_err(cluster_field_error)?;
                Ok(sizes)
            })
            .transpose()?;

        let architectures = match &raw.architectures {
            None => {
                let mut a = vec![Architecture::Centralized];
                if raw.catalog.is_some() {
                    a.push(Architecture::Distributed);
                }
                a
            }
            Some(list) => {
                let mut a = Vec::new();
                for s in list {
                    let arch = match s.as_str() {
                        "centralized" => Architecture::Centralized,
                        "distributed" => Architecture::Distributed,
                        other => {
                            return Err(invalid(
                                "architectures",
                                format!("unknown architecture `{other}`"),
                            ))
                        }
                    };
                    if !a.contains(&arch) {
                        a.push(arch);
                    }
                }
                if a.is_empty() {
                    return Err(invalid(
                        "architectures",
                        "must name at least one architecture",
                    ));
                }
                a
            }
        };
        if architectures.contains(&Architecture::Distributed) && raw.catalog.is_none() {
            return Err(invalid(
                "catalog",
                "required for the distributed architecture",
            ));
        }

        let mut sweep = Vec::new();
        for (i, s) in raw.sweep.iter().enumerate() {
            let field = format!("sweep[{i}].path");
            let param = SweepParam::from_path(&s.path).ok_or_else(|| {
                invalid(
                    &field,
                    format!("`{}` does not name a sweepable field", s.path),
                )
            })?;
            if sweep.iter().any(|a: &SweepAxis| a.param == param) {
                return Err(invalid(&field, format!("`{}` is swept twice", s.path)));
            }
            match (param, population) {
                (SweepParam::Households, PopulationMode::FixedTotal { .. }) => {
                    return Err(invalid(
                        &field,
                        "households are derived in fixed_total mode",
                    ))
                }
                (SweepParam::TotalPopulation, PopulationMode::FixedPerCluster) => {
                    return Err(invalid(&field, "total_population needs fixed_total mode"))
                }
                _ => {}
            }
            if matches!(
                param,
                SweepParam::TotalMovies | SweepParam::PopularCount | SweepParam::ZipfExponent
            ) && raw.catalog.is_none()
            {
                return Err(invalid(
                    &field,
                    "sweeping a catalog field needs a [catalog]",
                ));
            }
            if s.values.is_empty() {
                return Err(invalid(format!("sweep[{i}].values"), "must not be empty"));
            }
            let values = s
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| sweep_value(&format!("sweep[{i}].values[{j}]"), param, v))
                .collect::<Result<Vec<_>, _>>()?;
            sweep.push(SweepAxis { param, values });
        }

        let simulation = match &raw.simulation {
            None => SimSettings::default(),
            Some(rs) => sim_settings(rs)?,
        };

        Ok(Scenario {
            name: raw.name,
            description: raw.description,
            cluster,
            catalog: raw.catalog,
            services,
            blocking_target,
            messages,
            architectures,
            population,
            sweep,
            simulation,
        })
    }

    /// TOML text that [`Scenario::from_toml`] reads back to an equal value.
    pub fn to_toml(&self) -> String {
        let (population_mode, total_population, households) = match self.population {
            PopulationMode::FixedPerCluster => (None, None, Some(self.cluster.households)),
            PopulationMode::FixedTotal { total } => {
                (Some("fixed_total".to_string()), Some(total), None)
            }
        };
        let s = &self.simulation;
        let raw = RawScenario {
            name: self.name.clone(),
            description: self.description.clone(),
            blocking_target: self.blocking_target.value(),
            population_mode,
            total_population,
            architectures: Some(
                self.architectures
                    .iter()
                    .map(|a| a.as_str().to_string())
                    .collect(),
            ),
            cluster: RawCluster {
                clusters: self.cluster.clusters,
                households,
                penetration: self.cluster.penetration,
                normal_rate: self.cluster.normal_rate,
                interactive_rate: self.cluster.interactive_rate,
                normal_hold: Value::String(self.cluster.normal_hold.to_string()),
                interactive_hold: Value::String(self.cluster.interactive_hold.to_string()),
                peak_period: Value::String(self.cluster.peak_period.to_string()),
                multicast_factor: self.cluster.multicast_factor,
            },
            catalog: self.catalog,
            service: self
                .services
                .iter()
                .map(|svc| RawService {
                    label: svc.label.as_str().to_string(),
                    stream_rate: Value::String(svc.stream_rate.to_string()),
                    interactive_stream_rate: svc
                        .interactive_stream_rate
                        .map(|r| Value::String(r.to_string())),
                })
                .collect(),
            messages: self.messages.map(|m| RawMessages {
                normal: Value::String(format!("{}bit", m.normal_bits)),
                interactive: Value::String(format!("{}bit", m.interactive_bits)),
            }),
            simulation: Some(RawSimulation {
                seed: Some(s.seed),
                holding: Some(
                    match s.holding {
                        HoldingDist::Exponential => "exponential",
                        HoldingDist::Deterministic => "deterministic",
                    }
                    .to_string(),
                ),
                multicast: Some(
                    match s.multicast {
                        MulticastMode::Thinning => "thinning",
                        MulticastMode::Window(_) => "window",
                    }
                    .to_string(),
                ),
                multicast_window: match s.multicast {
                    MulticastMode::Window(w) => Some(Value::String(w.to_string())),
                    MulticastMode::Thinning => None,
                },
                horizon: Some(run_length_value(s.horizon)),
                warmup: s.warmup.map(run_length_value),
                batches: Some(s.batches as u64),
                replications: Some(s.replications),
                tolerance_se: Some(s.tolerance_se),
            }),
            sweep: self
                .sweep
                .iter()
                .map(|a| RawSweep {
                    path: a.param.path().to_string(),
                    values: a.values.iter().map(|v| v.to_toml()).collect(),
                })
                .collect(),
        };
        toml::to_string(&raw).expect("scenario serializes")
    }

    /// Households per cluster at `clusters` under this scenario's population mode.
    pub fn households_at(&self, clusters: u64) -> u64 {
        match self.population {
            PopulationMode::FixedPerCluster => self.cluster.households,
            PopulationMode::FixedTotal { total } => households_for(total, clusters),
        }
    }
}

/// `round(total / clusters)`, at least one household.
pub fn households_for(total: u64, clusters: u64) -> u64 {
    let c = clusters.max(1);
    ((total + c / 2) / c).max(1)
}

fn run_length_value(r: RunLength) -> Value {
    match r {
        RunLength::Offers(n) => Value::Integer(n as i64),
        RunLength::Time(t) => Value::String(t.to_string()),
    }
}

fn sim_settings(rs: &RawSimulation) -> Result<SimSettings, ScenarioError> {
    let d = SimSettings::default();
    let seed = rs.seed.unwrap_or(d.seed);
    let holding = match rs.holding.as_deref() {
        None | Some("exponential") => HoldingDist::Exponential,
        Some("deterministic") => HoldingDist::Deterministic,
        Some(other) => {
            return Err(invalid(
                "simulation.holding",
                format!("expected exponential or deterministic, got `{other}`"),
            ))
        }
    };
    let multicast = match (rs.multicast.as_deref(), &rs.multicast_window) {
        (None | Some("thinning"), None) => MulticastMode::Thinning,
        (None | Some("thinning"), Some(_)) => {
            return Err(invalid(
                "simulation.multicast_window",
                "only used with multicast = \"window\"",
            ))
        }
        (Some("window"), Some(w)) => {
            MulticastMode::Window(duration("simulation.multicast_window", w)?)
        }
        (Some("window"), None) => {
            return Err(invalid(
                "simulation.multicast_window",
                "required for window mode",
            ))
        }
        (Some(other), _) => {
            return Err(invalid(
                "simulation.multicast",
                format!("expected thinning or window, got `{other}`"),
            ))
        }
    };
    let horizon = rs
        .horizon
        .as_ref()
        .map(|v| run_length("simulation.horizon", v))
        .transpose()?
        .unwrap_or(d.horizon);
    let warmup = rs
        .warmup
        .as_ref()
        .map(|v| run_length("simulation.warmup", v))
        .transpose()?;
    match (horizon, warmup) {
        (RunLength::Offers(h), Some(RunLength::Offers(w))) if h <= w => {
            return Err(invalid("simulation.horizon", "must exceed warmup"))
        }
        (RunLength::Time(h), Some(RunLength::Time(w))) if h.0 <= w.0 => {
            return Err(invalid("simulation.horizon", "must exceed warmup"))
        }
        (RunLength::Offers(_), Some(RunLength::Time(_)))
        | (RunLength::Time(_), Some(RunLength::Offers(_))) => {
            return Err(invalid(
                "simulation.warmup",
                "must use the same kind (offers or duration) as the horizon",
            ))
        }
        (RunLength::Offers(0), _) => return Err(invalid("simulation.horizon", "must be positive")),
        (RunLength::Time(h), _) if h.0 <= 0.0 => {
            return Err(invalid("simulation.horizon", "must be positive"))
        }
        _ => {}
    }
    let batches = rs.batches.unwrap_or(d.batches as u64);
    if batches < 2 {
        return Err(invalid("simulation.batches", "need at least 2"));
    }
    let replications = rs.replications.unwrap_or(d.replications);
    if replications == 0 {
        return Err(invalid("simulation.replications", "must be at least 1"));
    }
    let tolerance_se = rs.tolerance_se.unwrap_or(d.tolerance_se);
    if !(tolerance_se.is_finite() && tolerance_se >= 0.0) {
        return Err(invalid(
            "simulation.tolerance_se",
            "must be finite and >= 0",
        ));
    }
    Ok(SimSettings {
        seed,
        holding,
        multicast,
        horizon,
        warmup,
        batches: batches as usize,
        replications,
        tolerance_se,
    })
}

/// Read and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_toml(&src)
}

/// Scenario files shipped with the crate.
pub const BUNDLED: &[(&str, &str)] = &[
    ("table1-sd", include_str!("../../scenarios/table1-sd.toml")),
    ("table1-hd", include_str!("../../scenarios/table1-hd.toml")),
    (
        "sec4-centralized",
        include_str!("../../scenarios/sec4-centralized.toml"),
    ),
    (
        "sec4-distributed",
        include_str!("../../scenarios/sec4-distributed.toml"),
    ),
    (
        "sec4-x250-clusters",
        include_str!("../../scenarios/sec4-x250-clusters.toml"),
    ),
    (
        "fixed-total-population",
        include_str!("../../scenarios/fixed-total-population.toml"),
    ),
];

pub fn bundled_scenario(name: &str) -> Option<Result<Scenario, ScenarioError>> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| Scenario::from_toml(src))
}
