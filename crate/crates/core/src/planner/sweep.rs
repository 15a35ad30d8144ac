//! Cartesian parameter sweeps over a scenario.

use rayon::prelude::*;
use thiserror::Error;

use crate::capacity::{
    self, Architecture, CapacityError, CentralizedProvision, ClusterParams, DistributedProvision,
};
use crate::erlang::{BlockingProb, ErlangError, PortCount};
use crate::planner::scenario::{households_for, PopulationMode, Scenario, SweepParam, SweepValue};
use crate::popularity::CatalogModel;
use crate::simulator::{self, PoolLayout, SimConfig, SimError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("cannot build worker pool: {0}")]
    Workers(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// A port pool would exceed the search ceiling.
    Infeasible,
    /// The swept values produce invalid parameters.
    Invalid,
    Simulation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowFailure {
    pub kind: FailureKind,
    pub message: String,
}

impl From<CapacityError> for RowFailure {
    fn from(e: CapacityError) -> Self {
        let kind = match e {
            CapacityError::Erlang(ErlangError::Infeasible { .. }) => FailureKind::Infeasible,
            _ => FailureKind::Invalid,
        };
        RowFailure {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<SimError> for RowFailure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Capacity(c) => c.into(),
            other => RowFailure {
                kind: FailureKind::Simulation,
                message: other.to_string(),
            },
        }
    }
}

/// Measured blocking of one pool against the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolSummary {
    pub name: &'static str,
    pub ports: u64,
    pub analytic_blocking: f64,
    pub measured_blocking: f64,
    pub standard_error: f64,
    pub meets_target: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub architecture: Architecture,
    pub pools: Vec<PoolSummary>,
}

impl SimSummary {
    pub fn meets_target(&self) -> bool {
        self.pools.iter().all(|p| p.meets_target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowValues {
    pub centralized: Option<CentralizedProvision>,
    pub distributed: Option<DistributedProvision>,
    /// Inbound request bandwidth `W_oc`, bits/s.
    pub inbound: Option<f64>,
    pub sim: Vec<SimSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Index of the sweep point (rows of different services share it).
    pub point: usize,
    pub swept: Vec<SweepValue>,
    pub service: String,
    /// Bandwidth per port, bits/s.
    pub port_rate: f64,
    pub cluster: ClusterParams,
    pub catalog: Option<CatalogModel>,
    pub blocking_target: f64,
    pub outcome: Result<RowValues, RowFailure>,
}

impl SweepRow {
    /// Realized total households `x·h`.
    pub fn population(&self) -> u64 {
        self.cluster.clusters * self.cluster.households
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub with_sim: bool,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &RowFailure> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().err())
    }

    /// Rows whose simulation exceeded the blocking target beyond tolerance.
    pub fn disagreements(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| match &r.outcome {
                Ok(v) => v.sim.iter().any(|s| !s.meets_target()),
                Err(_) => false,
            })
            .count()
    }
}

/// All Cartesian sweep points in row-major order (last axis fastest).
pub fn sweep_points(scenario: &Scenario) -> Vec<Vec<SweepValue>> {
    let mut points: Vec<Vec<SweepValue>> = vec![Vec::new()];
    for axis in &scenario.sweep {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    points
}

struct Point {
    cluster: ClusterParams,
    catalog: Option<CatalogModel>,
    target: f64,
}

fn apply_point(scenario: &Scenario, values: &[SweepValue]) -> Point {
    let mut cluster = scenario.cluster;
    let mut catalog = scenario.catalog;
    let mut target = scenario.blocking_target.value();
    let mut total = match scenario.population {
        PopulationMode::FixedTotal { total } => Some(total),
        PopulationMode::FixedPerCluster => None,
    };
    for (axis, v) in scenario.sweep.iter().zip(values) {
        let f = v.as_f64();
        let int = match v {
            SweepValue::Integer(n) => *n,
            _ => f as u64,
        };
        match axis.param {
            SweepParam::Clusters => cluster.clusters = int,
            SweepParam::Households => cluster.households = int,
            SweepParam::TotalPopulation => total = Some(int),
            SweepParam::Penetration => cluster.penetration = f,
            SweepParam::NormalRate => cluster.normal_rate = f,
            SweepParam::InteractiveRate => cluster.interactive_rate = f,
            SweepParam::NormalHold => cluster.normal_hold.0 = f,
            SweepParam::InteractiveHold => cluster.interactive_hold.0 = f,
            SweepParam::PeakPeriod => cluster.peak_period.0 = f,
            SweepParam::MulticastFactor => cluster.multicast_factor = f,
            SweepParam::TotalMovies => {
                if let Some(c) = catalog.as_mut() {
                    c.total_movies = int
                }
            }
            SweepParam::PopularCount => {
                if let Some(c) = catalog.as_mut() {
                    c.popular_count = int
                }
            }
            SweepParam::ZipfExponent => {
                if let Some(c) = catalog.as_mut() {
                    c.zipf_exponent = f
                }
            }
            SweepParam::BlockingTarget => target = f,
        }
    }
    if let Some(total) = total {
        cluster.households = households_for(total, cluster.clusters);
    }
    Point {
        cluster,
        catalog,
        target,
    }
}

fn simulate_point(
    scenario: &Scenario,
    point: &Point,
    target: BlockingProb,
    centralized: Option<&CentralizedProvision>,
    distributed: Option<&DistributedProvision>,
) -> Result<Vec<SimSummary>, RowFailure> {
    let settings = &scenario.simulation;
    let mut layouts = Vec::new();
    if let Some(c) = centralized {
        layouts.push(PoolLayout::Centralized { ports: c.ports });
    }
    if let (Some(d), Some(catalog)) = (distributed, point.catalog) {
        layouts.push(PoolLayout::Distributed {
            catalog,
            local: d.local_ports,
            central: d.central_ports,
        });
    }
    let mut out = Vec::new();
    for pools in layouts {
        let mut runs = Vec::new();
        for replication in 0..settings.replications {
            let config = SimConfig {
                cluster: point.cluster,
                pools,
                holding: settings.holding,
                multicast: settings.multicast,
                seed: settings.seed,
                replication,
                horizon: settings.horizon,
                warmup: settings.warmup,
                batches: settings.batches,
            };
            runs.push(simulator::validate_against_analytic(
                &config,
                target,
                settings.tolerance_se,
            )?);
        }
        let summaries = if runs.len() == 1 {
            runs[0]
                .pools
                .iter()
                .map(|p| PoolSummary {
                    name: p.pool,
                    ports: p.ports,
                    analytic_blocking: p.analytic_blocking,
                    measured_blocking: p.measured_blocking,
                    standard_error: p.standard_error,
                    meets_target: p.meets_target,
                })
                .collect()
        } else {
            // Independent replications: mean and standard error across runs.
            let n = runs.len() as f64;
            (0..runs[0].pools.len())
                .map(|i| {
                    let xs: Vec<f64> = runs.iter().map(|r| r.pools[i].measured_blocking).collect();
                    let mean = xs.iter().sum::<f64>() / n;
                    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
                    let se = (var / n).sqrt();
                    let first = &runs[0].pools[i];
                    PoolSummary {
                        name: first.pool,
                        ports: first.ports,
                        analytic_blocking: first.analytic_blocking,
                        measured_blocking: mean,
                        standard_error: se,
                        meets_target: mean <= target.value() + settings.tolerance_se * se,
                    }
                })
                .collect()
        };
        out.push(SimSummary {
            architecture: pools.architecture(),
            pools: summaries,
        });
    }
    Ok(out)
}

fn evaluate_point(
    scenario: &Scenario,
    index: usize,
    values: &[SweepValue],
    with_sim: bool,
) -> Vec<SweepRow> {
    let point = apply_point(scenario, values);
    let target = BlockingProb::new(point.target)
        .ok()
        .filter(|p| p.value() > 0.0 && p.value() < 1.0)
        .ok_or_else(|| RowFailure {
            kind: FailureKind::Invalid,
            message: format!("blocking target {} outside (0, 1)", point.target),
        });

    let mut sim: Option<Result<Vec<SimSummary>, RowFailure>> = None;
    let mut rows = Vec::with_capacity(scenario.services.len());
    for svc in &scenario.services {
        let outcome = (|| -> Result<RowValues, RowFailure> {
            let target = target.clone()?;
            let centralized = if scenario.architectures.contains(&Architecture::Centralized) {
                Some(capacity::provision_centralized(
                    &point.cluster,
                    svc,
                    target,
                )?)
            } else {
                None
            };
            let distributed = match (
                scenario.architectures.contains(&Architecture::Distributed),
                &point.catalog,
            ) {
                (true, Some(catalog)) => Some(capacity::provision_distributed(
                    &point.cluster,
                    catalog,
                    svc,
                    target,
                )?),
                _ => None,
            };
            let inbound = scenario
                .messages
                .map(|m| capacity::inbound_bandwidth(&point.cluster, &m))
                .transpose()?;
            // Port counts do not depend on the stream rate, so one simulation
            // serves every service row of this point.
            let sim_rows = if with_sim {
                sim.get_or_insert_with(|| {
                    simulate_point(
                        scenario,
                        &point,
                        target,
                        centralized.as_ref(),
                        distributed.as_ref(),
                    )
                })
                .clone()?
            } else {
                Vec::new()
            };
            Ok(RowValues {
                centralized,
                distributed,
                inbound,
                sim: sim_rows,
            })
        })();
        rows.push(SweepRow {
            point: index,
            swept: values.to_vec(),
            service: svc.label.as_str().to_string(),
            port_rate: svc.port_rate(),
            cluster: point.cluster,
            catalog: point.catalog,
            blocking_target: point.target,
            outcome,
        });
    }
    rows
}

/// Evaluate every sweep point (and every service) on `workers` threads.
/// Rows come back ordered by sweep index, then service order. Points that
/// fail carry a [`RowFailure`] instead of aborting the sweep.
pub fn run_sweep(
    scenario: &Scenario,
    with_sim: bool,
    workers: usize,
) -> Result<SweepResult, SweepError> {
    let points = sweep_points(scenario);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SweepError::Workers(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, values)| evaluate_point(scenario, i, values, with_sim))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    Ok(SweepResult {
        scenario: scenario.clone(),
        with_sim,
        rows,
    })
}

/// Ports needed if every cluster of `cp` had its own centralized-style
/// pool; used to quantify the pooling gain of a shared pool.
pub fn fragmented_ports(
    cp: &ClusterParams,
    target: BlockingProb,
) -> Result<PortCount, CapacityError> {
    let per_cluster = ClusterParams { clusters: 1, ..*cp };
    let s = crate::erlang::min_ports(capacity::centralized_load(&per_cluster)?, target)?;
    Ok(PortCount(s.0 * cp.clusters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::scenario::bundled_scenario;

    #[test]
    fn empty_sweep_is_one_point() {
        let mut s = bundled_scenario("sec4-x250-clusters").unwrap().unwrap();
        s.sweep.clear();
        let r = run_sweep(&s, false, 2).unwrap();
        assert_eq!(r.rows.len(), s.services.len());
        assert!(r
            .rows
            .iter()
            .all(|row| row.point == 0 && row.swept.is_empty()));
    }

    #[test]
    fn cartesian_order() {
        let s = bundled_scenario("sec4-centralized").unwrap().unwrap();
        let pts = sweep_points(&s);
        assert_eq!(pts.len(), 18);
        assert_eq!(pts[0], vec![SweepValue::Integer(40), SweepValue::Real(4.0)]);
        assert_eq!(pts[1], vec![SweepValue::Integer(40), SweepValue::Real(6.0)]);
        assert_eq!(pts[3], vec![SweepValue::Integer(50), SweepValue::Real(4.0)]);
    }

    #[test]
    fn bad_point_marks_row_not_sweep() {
        let mut s = bundled_scenario("sec4-centralized").unwrap().unwrap();
        s.sweep[1].values.push(SweepValue::Real(-1.0));
        let r = run_sweep(&s, false, 4).unwrap();
        assert_eq!(r.rows.len(), 6 * 4 * 2);
        let failed: Vec<_> = r.failures().collect();
        assert_eq!(failed.len(), 6 * 2);
        assert!(failed.iter().all(|f| f.kind == FailureKind::Invalid));
    }

    #[test]
    fn same_result_for_any_worker_count() {
        let s = bundled_scenario("sec4-distributed").unwrap().unwrap();
        assert_eq!(
            run_sweep(&s, false, 1).unwrap(),
            run_sweep(&s, false, 8).unwrap()
        );
    }
}
