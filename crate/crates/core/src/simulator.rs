//! Discrete-event simulation of the port-pool loss system.
//!
//! Normal and interactive requests arrive as two independent Poisson
//! processes. Normal requests are pooled onto multicast streams; every
//! stream start and every interactive request is offered to a finite port
//! pool and is lost when all ports are busy. In distributed mode each stream
//! is routed to the central pool with the catalog's unpopular-request
//! probability and to the cluster's local proxy otherwise.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` with one stream
//! per random process: stream `4·replication + k` with `k` = 0 for normal
//! arrivals, 1 for interactive arrivals, 2 for holding times and 3 for
//! routing. A configuration therefore fully determines its report.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::capacity::{self, Architecture, CapacityError, ClusterParams};
use crate::erlang::{self, BlockingProb, OfferedLoad, PortCount};
use crate::popularity::{self, CatalogModel};
use crate::units::Seconds;

pub const DEFAULT_BATCHES: usize = 20;
/// Fraction of the horizon discarded as warmup when none is given.
pub const DEFAULT_WARMUP_FRACTION: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("event counter overflow; horizon too large")]
    CounterOverflow,
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoldingDist {
    Exponential,
    Deterministic,
}

/// How normal requests share multicast streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MulticastMode {
    /// Each admitted stream serves the next `Z` normal requests, so stream
    /// offers arrive at exactly `1/Z` of the request rate.
    Thinning,
    /// A normal request joins the pool's most recent stream if it started
    /// within the window; otherwise it asks for a new stream. Does not
    /// reproduce the `1/Z` load reduction exactly.
    Window(Seconds),
}

/// Run length, either simulated time or a count of stream offers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunLength {
    Time(Seconds),
    Offers(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoolLayout {
    /// One pool serving all `x` clusters.
    Centralized { ports: PortCount },
    /// One representative cluster with its local proxy pool and its share
    /// of the central pool.
    Distributed {
        catalog: CatalogModel,
        local: PortCount,
        central: PortCount,
    },
}

impl PoolLayout {
    pub fn architecture(&self) -> Architecture {
        match self {
            PoolLayout::Centralized { .. } => Architecture::Centralized,
            PoolLayout::Distributed { .. } => Architecture::Distributed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub cluster: ClusterParams,
    pub pools: PoolLayout,
    pub holding: HoldingDist,
    pub multicast: MulticastMode,
    pub seed: u64,
    /// Selects an independent set of random streams under the same seed.
    pub replication: u64,
    pub horizon: RunLength,
    /// `None` discards the first 10% of the horizon.
    pub warmup: Option<RunLength>,
    pub batches: usize,
}

impl SimConfig {
    pub fn new(cluster: ClusterParams, pools: PoolLayout, horizon: RunLength) -> Self {
        SimConfig {
            cluster,
            pools,
            holding: HoldingDist::Exponential,
            multicast: MulticastMode::Thinning,
            seed: 0,
            replication: 0,
            horizon,
            warmup: None,
            batches: DEFAULT_BATCHES,
        }
    }

    /// A single unicast pool offered `load` Erlangs of Poisson traffic with
    /// mean holding time `hold`.
    pub fn single_pool(
        load: OfferedLoad,
        ports: PortCount,
        hold: Seconds,
        horizon: RunLength,
    ) -> Self {
        let peak = Seconds::from_hours(1.0);
        let cluster = ClusterParams {
            clusters: 1,
            households: 1,
            penetration: 1.0,
            normal_rate: load.erlangs() * peak.0 / hold.0,
            interactive_rate: 0.0,
            normal_hold: hold,
            interactive_hold: Seconds(0.0),
            peak_period: peak,
            multicast_factor: 1.0,
        };
        SimConfig::new(cluster, PoolLayout::Centralized { ports }, horizon)
    }

    /// Pools sized by the closed-form model at blocking `target`.
    pub fn provisioned(
        cluster: ClusterParams,
        catalog: Option<CatalogModel>,
        architecture: Architecture,
        target: BlockingProb,
        horizon: RunLength,
    ) -> Result<Self, SimError> {
        let pools = match architecture {
            Architecture::Centralized => PoolLayout::Centralized {
                ports: erlang::min_ports(capacity::centralized_load(&cluster)?, target)
                    .map_err(CapacityError::from)?,
            },
            Architecture::Distributed => {
                let catalog = catalog.ok_or_else(|| {
                    SimError::InvalidConfig("distributed mode needs a catalog".into())
                })?;
                let (ml, mcl) = capacity::distributed_loads(&cluster, &catalog)?;
                PoolLayout::Distributed {
                    catalog,
                    local: erlang::min_ports(ml, target).map_err(CapacityError::from)?,
                    central: erlang::min_ports(mcl, target).map_err(CapacityError::from)?,
                }
            }
        };
        Ok(SimConfig::new(cluster, pools, horizon))
    }

    fn resolved_warmup(&self) -> Result<RunLength, SimError> {
        let warmup = match (self.warmup, self.horizon) {
            (Some(w), _) => w,
            (None, RunLength::Time(h)) => RunLength::Time(Seconds(h.0 * DEFAULT_WARMUP_FRACTION)),
            (None, RunLength::Offers(n)) => {
                RunLength::Offers((n as f64 * DEFAULT_WARMUP_FRACTION).floor() as u64)
            }
        };
        match (warmup, self.horizon) {
            (RunLength::Time(w), RunLength::Time(h)) => {
                if !(h.0.is_finite() && w.0 >= 0.0 && h.0 > w.0) {
                    return Err(SimError::InvalidConfig(format!(
                        "horizon {h} must exceed warmup {w}"
                    )));
                }
            }
            (RunLength::Offers(w), RunLength::Offers(h)) => {
                if h <= w {
                    return Err(SimError::InvalidConfig(format!(
                        "horizon of {h} offers must exceed warmup of {w}"
                    )));
                }
            }
            _ => {
                return Err(SimError::InvalidConfig(
                    "horizon and warmup must both be durations or both be offer counts".into(),
                ))
            }
        }
        Ok(warmup)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.cluster.validate()?;
        if let PoolLayout::Distributed { catalog, .. } = &self.pools {
            catalog.validate().map_err(CapacityError::from)?;
        }
        if let MulticastMode::Window(w) = self.multicast {
            if !(w.0.is_finite() && w.0 >= 0.0) {
                return Err(SimError::InvalidConfig(
                    "multicast window must be >= 0".into(),
                ));
            }
        }
        if self.batches < 2 {
            return Err(SimError::InvalidConfig("need at least 2 batches".into()));
        }
        self.resolved_warmup()?;
        Ok(())
    }
}

/// Measured statistics of one port pool, after warmup.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolReport {
    pub name: &'static str,
    pub ports: u64,
    pub offered: u64,
    pub streams_started: u64,
    pub blocked: u64,
    pub blocking_fraction: f64,
    pub mean_busy_ports: f64,
    /// Batch-means standard error of `blocking_fraction`.
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub arrivals_normal: u64,
    pub arrivals_interactive: u64,
    /// Normal requests served by an already running multicast stream.
    pub joined_normal: u64,
    pub pools: Vec<PoolReport>,
    /// Share of stream offers routed to the central pool (distributed only).
    pub central_share: Option<f64>,
    pub central_share_standard_error: Option<f64>,
    /// Simulated seconds covered by the statistics.
    pub observed_time: f64,
}

impl SimReport {
    pub fn pool(&self, name: &str) -> Option<&PoolReport> {
        self.pools.iter().find(|p| p.name == name)
    }

    pub fn total_offered(&self) -> u64 {
        self.pools.iter().map(|p| p.offered).sum()
    }
}

/// Event time with a total order.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Time(f64);

impl Eq for Time {}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Pool {
    name: &'static str,
    ports: u64,
    departures: BinaryHeap<Reverse<Time>>,
    last_normal_start: f64,
    offered: u64,
    blocked: u64,
    busy_area: f64,
    batch_offered: Vec<u64>,
    batch_blocked: Vec<u64>,
}

impl Pool {
    fn new(name: &'static str, ports: PortCount, batches: usize) -> Self {
        Pool {
            name,
            ports: ports.0,
            departures: BinaryHeap::new(),
            last_normal_start: f64::NEG_INFINITY,
            offered: 0,
            blocked: 0,
            busy_area: 0.0,
            batch_offered: vec![0; batches],
            batch_blocked: vec![0; batches],
        }
    }

    fn next_departure(&self) -> f64 {
        self.departures
            .peek()
            .map_or(f64::INFINITY, |Reverse(t)| t.0)
    }

    fn busy(&self) -> u64 {
        self.departures.len() as u64
    }
}

#[derive(Clone, Copy)]
enum StreamKind {
    Normal,
    Interactive,
}

fn bump(c: &mut u64) -> Result<(), SimError> {
    *c = c.checked_add(1).ok_or(SimError::CounterOverflow)?;
    Ok(())
}

/// Batch-means standard error of a ratio measured per batch; batches with
/// no observations are skipped.
fn batch_standard_error(num: &[u64], den: &[u64]) -> f64 {
    let fractions: Vec<f64> = num
        .iter()
        .zip(den)
        .filter(|(_, &d)| d > 0)
        .map(|(&n, &d)| n as f64 / d as f64)
        .collect();
    let m = fractions.len();
    if m < 2 {
        return 0.0;
    }
    let mean = fractions.iter().sum::<f64>() / m as f64;
    let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    (var / m as f64).sqrt()
}

fn inter_arrival(rate: f64) -> Option<Exp<f64>> {
    if rate > 0.0 {
        Exp::new(rate).ok()
    } else {
        None
    }
}

struct Engine {
    now: f64,
    pools: Vec<Pool>,
    measuring: bool,
    measure_start: f64,
    warmup: RunLength,
    horizon: RunLength,
    batches: usize,
    offers_seen: u64,
}

impl Engine {
    /// Move the clock to `to`, integrating busy ports over the measured part.
    fn advance(&mut self, to: f64) {
        if !self.measuring {
            if let RunLength::Time(w) = self.warmup {
                if to >= w.0 {
                    self.measuring = true;
                    self.measure_start = w.0;
                    self.now = w.0;
                }
            }
        }
        if self.measuring {
            let dt = to - self.now;
            for p in &mut self.pools {
                p.busy_area += p.busy() as f64 * dt;
            }
        }
        self.now = to;
    }

    fn batch_index(&self) -> usize {
        let nb = self.batches;
        let idx = match (self.warmup, self.horizon) {
            (RunLength::Time(w), RunLength::Time(h)) => {
                ((self.now - w.0) / (h.0 - w.0) * nb as f64).floor() as usize
            }
            (RunLength::Offers(w), RunLength::Offers(h)) => {
                ((self.offers_seen - w) as u128 * nb as u128 / (h - w) as u128) as usize
            }
            _ => unreachable!("validated"),
        };
        idx.min(nb - 1)
    }
}

/// Run one simulation.
pub fn run_sim(config: &SimConfig) -> Result<SimReport, SimError> {
    config.validate()?;
    let warmup = config.resolved_warmup()?;
    let cp = &config.cluster;
    let nb = config.batches;

    let (pools, unpopular) = match config.pools {
        PoolLayout::Centralized { ports } => (vec![Pool::new("central", ports, nb)], None),
        PoolLayout::Distributed {
            catalog,
            local,
            central,
        } => (
            vec![
                Pool::new("local", local, nb),
                Pool::new("central", central, nb),
            ],
            Some(popularity::p_unpopular(&catalog).map_err(CapacityError::from)?),
        ),
    };
    // Centralized pools see all clusters; distributed mode models one cluster.
    let scale = match config.pools {
        PoolLayout::Centralized { .. } => cp.clusters as f64,
        PoolLayout::Distributed { .. } => 1.0,
    };
    let normal_gap = inter_arrival(scale * cp.normal_arrival_rate());
    let interactive_gap = inter_arrival(scale * cp.interactive_arrival_rate());

    let stream_base = config.replication.wrapping_mul(4);
    let rng_for = |k: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(config.seed);
        r.set_stream(stream_base.wrapping_add(k));
        r
    };
    let mut rng_normal = rng_for(0);
    let mut rng_interactive = rng_for(1);
    let mut rng_hold = rng_for(2);
    let mut rng_route = rng_for(3);

    let hold_sampler = |mean: f64, rng: &mut ChaCha8Rng| -> f64 {
        match config.holding {
            HoldingDist::Deterministic => mean,
            HoldingDist::Exponential if mean > 0.0 => {
                Exp::new(1.0 / mean).map_or(mean, |d| d.sample(rng))
            }
            HoldingDist::Exponential => 0.0,
        }
    };

    let mut eng = Engine {
        now: 0.0,
        pools,
        measuring: matches!(warmup, RunLength::Offers(0))
            || matches!(warmup, RunLength::Time(w) if w.0 == 0.0),
        measure_start: 0.0,
        warmup,
        horizon: config.horizon,
        batches: nb,
        offers_seen: 0,
    };

    let mut next_normal = normal_gap.map_or(f64::INFINITY, |d| d.sample(&mut rng_normal));
    let mut next_interactive =
        interactive_gap.map_or(f64::INFINITY, |d| d.sample(&mut rng_interactive));
    let mut normal_seen: u64 = 0;
    let mut next_stream_threshold = 0.0_f64;

    let mut arrivals_normal = 0u64;
    let mut arrivals_interactive = 0u64;
    let mut joined_normal = 0u64;

    let time_horizon = match config.horizon {
        RunLength::Time(h) => h.0,
        RunLength::Offers(_) => f64::INFINITY,
    };

    loop {
        let (dep_pool, t_dep) = eng
            .pools
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.next_departure()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one pool");
        let t_arr = next_normal.min(next_interactive);
        let t_next = t_dep.min(t_arr);
        if t_next > time_horizon || !t_next.is_finite() {
            if time_horizon.is_finite() {
                eng.advance(time_horizon);
            }
            break;
        }

        if t_dep <= t_arr {
            eng.advance(t_dep);
            eng.pools[dep_pool].departures.pop();
            continue;
        }

        eng.advance(t_arr);
        let kind = if next_normal <= next_interactive {
            next_normal += normal_gap.map_or(f64::INFINITY, |d| d.sample(&mut rng_normal));
            StreamKind::Normal
        } else {
            next_interactive +=
                interactive_gap.map_or(f64::INFINITY, |d| d.sample(&mut rng_interactive));
            StreamKind::Interactive
        };

        // Offers-mode warmup ends at the first measured offer; arrivals that
        // do not produce an offer are counted once measurement has begun.
        match kind {
            StreamKind::Normal => {
                if eng.measuring {
                    bump(&mut arrivals_normal)?;
                }
            }
            StreamKind::Interactive => {
                if eng.measuring {
                    bump(&mut arrivals_interactive)?;
                }
            }
        }

        let mut pool_idx = 0;
        if let Some(p_un) = unpopular {
            // Route before the multicast decision so window mode looks at the
            // right pool; thinning ignores the pool.
            if rng_route.random::<f64>() < p_un {
                pool_idx = 1;
            }
        }

        if let StreamKind::Normal = kind {
            let starts_stream = match config.multicast {
                MulticastMode::Thinning => {
                    let starts = normal_seen as f64 >= next_stream_threshold;
                    if starts {
                        next_stream_threshold += cp.multicast_factor;
                    }
                    normal_seen += 1;
                    starts
                }
                MulticastMode::Window(w) => {
                    let pool = &eng.pools[pool_idx];
                    !(pool.last_normal_start >= eng.now - w.0 && pool.busy() > 0)
                }
            };
            if !starts_stream {
                if eng.measuring {
                    bump(&mut joined_normal)?;
                }
                continue;
            }
        }

        // This arrival is a stream offer.
        if let RunLength::Offers(w) = eng.warmup {
            if !eng.measuring && eng.offers_seen >= w {
                eng.measuring = true;
                eng.measure_start = eng.now;
                match kind {
                    StreamKind::Normal => bump(&mut arrivals_normal)?,
                    StreamKind::Interactive => bump(&mut arrivals_interactive)?,
                }
            }
        }
        let measuring = eng.measuring;
        let batch = if measuring { eng.batch_index() } else { 0 };
        let now = eng.now;
        let pool = &mut eng.pools[pool_idx];
        let admitted = pool.busy() < pool.ports;
        if measuring {
            bump(&mut pool.offered)?;
            pool.batch_offered[batch] += 1;
            if !admitted {
                bump(&mut pool.blocked)?;
                pool.batch_blocked[batch] += 1;
            }
        }
        if admitted {
            let mean = match kind {
                StreamKind::Normal => cp.normal_hold.0,
                StreamKind::Interactive => cp.interactive_hold.0,
            };
            let hold = hold_sampler(mean, &mut rng_hold);
            pool.departures.push(Reverse(Time(now + hold)));
            if let StreamKind::Normal = kind {
                pool.last_normal_start = now;
            }
        }
        bump(&mut eng.offers_seen)?;
        if let RunLength::Offers(h) = eng.horizon {
            if eng.offers_seen >= h {
                break;
            }
        }
    }

    let observed_time = if eng.measuring {
        eng.now - eng.measure_start
    } else {
        0.0
    };
    let pools: Vec<PoolReport> = eng
        .pools
        .iter()
        .map(|p| PoolReport {
            name: p.name,
            ports: p.ports,
            offered: p.offered,
            streams_started: p.offered - p.blocked,
            blocked: p.blocked,
            blocking_fraction: if p.offered > 0 {
                p.blocked as f64 / p.offered as f64
            } else {
                0.0
            },
            mean_busy_ports: if observed_time > 0.0 {
                p.busy_area / observed_time
            } else {
                0.0
            },
            standard_error: batch_standard_error(&p.batch_blocked, &p.batch_offered),
        })
        .collect();

    let (central_share, central_share_standard_error) = if unpopular.is_some() {
        let total: Vec<u64> = eng.pools[0]
            .batch_offered
            .iter()
            .zip(&eng.pools[1].batch_offered)
            .map(|(a, b)| a + b)
            .collect();
        let all = pools[0].offered + pools[1].offered;
        let share = if all > 0 {
            pools[1].offered as f64 / all as f64
        } else {
            0.0
        };
        (
            Some(share),
            Some(batch_standard_error(&eng.pools[1].batch_offered, &total)),
        )
    } else {
        (None, None)
    };

    Ok(SimReport {
        arrivals_normal,
        arrivals_interactive,
        joined_normal,
        pools,
        central_share,
        central_share_standard_error,
        observed_time,
    })
}

/// Measured vs closed-form blocking for one pool.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolComparison {
    pub pool: &'static str,
    pub ports: u64,
    pub offered_load: f64,
    /// `B(S, A)` at the simulated port count.
    pub analytic_blocking: f64,
    pub measured_blocking: f64,
    pub standard_error: f64,
    /// Measured blocking does not exceed the target by more than the
    /// tolerance.
    pub meets_target: bool,
    /// Measured blocking lies within the tolerance of `B(S, A)`.
    pub matches_erlang_b: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub target: f64,
    pub tolerance_se: f64,
    pub pools: Vec<PoolComparison>,
    pub report: SimReport,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.pools.iter().all(|p| p.meets_target)
    }
}

/// Simulate `config` and compare each pool's measured blocking with the
/// target and with Erlang-B at the configured port counts. A pool meets the
/// target when `measured <= target + tolerance_se · SE`.
pub fn validate_against_analytic(
    config: &SimConfig,
    target: BlockingProb,
    tolerance_se: f64,
) -> Result<Comparison, SimError> {
    let report = run_sim(config)?;
    let loads: Vec<OfferedLoad> = match config.pools {
        PoolLayout::Centralized { .. } => vec![capacity::centralized_load(&config.cluster)?],
        PoolLayout::Distributed { catalog, .. } => {
            let (ml, mcl) = capacity::distributed_loads(&config.cluster, &catalog)?;
            vec![ml, mcl]
        }
    };
    let pools = report
        .pools
        .iter()
        .zip(loads)
        .map(|(p, load)| {
            let analytic = erlang::erlang_b(load, PortCount(p.ports)).value();
            let slack = tolerance_se * p.standard_error;
            PoolComparison {
                pool: p.name,
                ports: p.ports,
                offered_load: load.erlangs(),
                analytic_blocking: analytic,
                measured_blocking: p.blocking_fraction,
                standard_error: p.standard_error,
                meets_target: p.blocking_fraction <= target.value() + slack,
                matches_erlang_b: (p.blocking_fraction - analytic).abs() <= slack,
            }
        })
        .collect();
    Ok(Comparison {
        target: target.value(),
        tolerance_se,
        pools,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool_cfg(a: f64, s: u64, offers: u64) -> SimConfig {
        SimConfig::single_pool(
            OfferedLoad::new(a).unwrap(),
            PortCount(s),
            Seconds(60.0),
            RunLength::Offers(offers),
        )
    }

    #[test]
    fn zero_ports_block_everything() {
        let r = run_sim(&pool_cfg(3.0, 0, 5_000)).unwrap();
        let p = &r.pools[0];
        assert_eq!(p.blocking_fraction, 1.0);
        assert_eq!(p.streams_started, 0);
        assert_eq!(p.blocked, p.offered);
        assert_eq!(p.mean_busy_ports, 0.0);
    }

    #[test]
    fn zero_demand_reports_nothing() {
        let mut cfg = pool_cfg(0.0, 4, 1_000);
        cfg.cluster.normal_rate = 0.0;
        let r = run_sim(&cfg).unwrap();
        assert_eq!(r.arrivals_normal + r.arrivals_interactive, 0);
        assert_eq!(r.pools[0].offered, 0);
        assert_eq!(r.pools[0].blocked, 0);
        assert_eq!(r.pools[0].blocking_fraction, 0.0);

        cfg.horizon = RunLength::Time(Seconds(1000.0));
        let r = run_sim(&cfg).unwrap();
        assert_eq!(r.pools[0].offered, 0);
        assert_eq!(r.observed_time, 900.0);
    }

    #[test]
    fn rejects_bad_run_lengths() {
        let mut cfg = pool_cfg(2.0, 2, 1_000);
        cfg.warmup = Some(RunLength::Offers(1_000));
        assert!(matches!(run_sim(&cfg), Err(SimError::InvalidConfig(_))));
        cfg.warmup = Some(RunLength::Time(Seconds(5.0)));
        assert!(matches!(run_sim(&cfg), Err(SimError::InvalidConfig(_))));
        cfg.warmup = None;
        cfg.batches = 1;
        assert!(matches!(run_sim(&cfg), Err(SimError::InvalidConfig(_))));
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = pool_cfg(5.0, 6, 20_000);
        assert_eq!(run_sim(&cfg).unwrap(), run_sim(&cfg).unwrap());
        let mut other = cfg;
        other.seed = 1;
        assert_ne!(run_sim(&cfg).unwrap(), run_sim(&other).unwrap());
        let mut rep = cfg;
        rep.replication = 1;
        assert_ne!(run_sim(&cfg).unwrap(), run_sim(&rep).unwrap());
    }

    #[test]
    fn offer_count_horizon_is_exact() {
        let cfg = pool_cfg(2.0, 3, 11_000);
        let r = run_sim(&cfg).unwrap();
        assert_eq!(r.total_offered(), 11_000 - 1_100);
        let p = &r.pools[0];
        assert_eq!(p.streams_started + p.blocked, p.offered);
    }

    #[test]
    fn thinning_divides_offers_by_multicast_factor() {
        let mut cfg = pool_cfg(2.0, 1_000, 30_000);
        cfg.cluster.multicast_factor = 4.0;
        let r = run_sim(&cfg).unwrap();
        let offers = r.pools[0].offered as f64;
        let ratio = r.arrivals_normal as f64 / offers;
        assert!((ratio - 4.0).abs() < 0.01, "{ratio}");
        assert_eq!(r.arrivals_normal, r.joined_normal + r.pools[0].offered);
    }

    #[test]
    fn mean_busy_tracks_carried_load() {
        let r = run_sim(&pool_cfg(4.0, 200, 50_000)).unwrap();
        let busy = r.pools[0].mean_busy_ports;
        assert!((busy - 4.0).abs() < 0.2, "{busy}");
    }

    #[test]
    fn window_mode_pools_requests() {
        let mut cfg = pool_cfg(20.0, 1_000, 20_000);
        cfg.multicast = MulticastMode::Window(Seconds(30.0));
        let r = run_sim(&cfg).unwrap();
        assert!(r.joined_normal > 0);
        assert!(r.pools[0].offered < r.arrivals_normal);
    }

    #[test]
    fn batch_error_of_constant_series_is_zero() {
        assert_eq!(batch_standard_error(&[1, 1, 1], &[2, 2, 2]), 0.0);
        assert_eq!(batch_standard_error(&[1], &[2]), 0.0);
        let se = batch_standard_error(&[0, 2], &[2, 2]);
        assert!((se - 0.5).abs() < 1e-12);
    }
}
