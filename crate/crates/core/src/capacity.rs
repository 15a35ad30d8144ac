//! Closed-form port and bandwidth dimensioning for centralized and
//! distributed (local proxy) deployments, plus the inbound request channel.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::erlang::{self, BlockingProb, ErlangError, OfferedLoad, PortCount};
use crate::popularity::{self, CatalogError, CatalogModel};
use crate::units::{BitRate, Seconds};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("invalid cluster parameter `{field}`: {reason}")]
    Cluster { field: &'static str, reason: String },
    #[error("invalid service profile: {0}")]
    Service(String),
    #[error("invalid message sizes: {0}")]
    Messages(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Erlang(#[from] ErlangError),
}

/// Per-cluster demographics and traffic.
///
/// Request rates count requests per subscribing household over one peak
/// period; all durations are canonical seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    /// Number of cluster areas `x`.
    pub clusters: u64,
    /// Households per cluster `h`.
    pub households: u64,
    /// Service penetration `p` in `(0, 1]`.
    pub penetration: f64,
    pub normal_rate: f64,
    pub interactive_rate: f64,
    pub normal_hold: Seconds,
    pub interactive_hold: Seconds,
    pub peak_period: Seconds,
    /// Viewers sharing one multicast stream, `Z >= 1`.
    pub multicast_factor: f64,
}

fn cluster_err(field: &'static str, reason: impl Into<String>) -> CapacityError {
    CapacityError::Cluster {
        field,
        reason: reason.into(),
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<(), CapacityError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(cluster_err(
            field,
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<(), CapacityError> {
        if self.clusters == 0 {
            return Err(cluster_err("clusters", "must be at least 1"));
        }
        if self.households == 0 {
            return Err(cluster_err("households", "must be at least 1"));
        }
        if !(self.penetration > 0.0 && self.penetration <= 1.0) {
            return Err(cluster_err(
                "penetration",
                format!("must lie in (0, 1], got {}", self.penetration),
            ));
        }
        non_negative("normal_rate", self.normal_rate)?;
        non_negative("interactive_rate", self.interactive_rate)?;
        non_negative("normal_hold", self.normal_hold.0)?;
        non_negative("interactive_hold", self.interactive_hold.0)?;
        if !(self.peak_period.0.is_finite() && self.peak_period.0 > 0.0) {
            return Err(cluster_err(
                "peak_period",
                format!("must be positive, got {}", self.peak_period.0),
            ));
        }
        if !(self.multicast_factor.is_finite() && self.multicast_factor >= 1.0) {
            return Err(cluster_err(
                "multicast_factor",
                format!("must be >= 1, got {}", self.multicast_factor),
            ));
        }
        Ok(())
    }

    /// Subscribing households in one cluster, `h·p`.
    fn subscribers(&self) -> f64 {
        self.households as f64 * self.penetration
    }

    /// Multicast stream load of one cluster, `h·p·λn·tn / (Z·T)`.
    fn normal_load_per_cluster(&self) -> f64 {
        self.subscribers() * self.normal_rate * self.normal_hold.0
            / (self.multicast_factor * self.peak_period.0)
    }

    /// Unicast interactive load of one cluster, `h·p·λi·ti / T`.
    fn interactive_load_per_cluster(&self) -> f64 {
        self.subscribers() * self.interactive_rate * self.interactive_hold.0 / self.peak_period.0
    }

    /// Normal request arrival rate (requests/s) in one cluster.
    pub fn normal_arrival_rate(&self) -> f64 {
        self.subscribers() * self.normal_rate / self.peak_period.0
    }

    /// Interactive request arrival rate (requests/s) in one cluster.
    pub fn interactive_arrival_rate(&self) -> f64 {
        self.subscribers() * self.interactive_rate / self.peak_period.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ServiceLabel {
    Sd,
    Hd,
    Custom(String),
}

impl ServiceLabel {
    pub fn parse(s: &str) -> ServiceLabel {
        match s {
            "SD" | "sd" => ServiceLabel::Sd,
            "HD" | "hd" => ServiceLabel::Hd,
            other => ServiceLabel::Custom(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            ServiceLabel::Sd => "SD",
            ServiceLabel::Hd => "HD",
            ServiceLabel::Custom(s) => s,
        }
    }
}

/// Stream bit rate for a class of content.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceProfile {
    pub label: ServiceLabel,
    pub stream_rate: BitRate,
    /// Rate of interactive (trick-play) unicast streams when it differs from
    /// `stream_rate`. Ports are shared, so each port is priced at the larger
    /// of the two rates.
    pub interactive_stream_rate: Option<BitRate>,
}

impl ServiceProfile {
    pub fn new(label: ServiceLabel, stream_rate: BitRate) -> Self {
        ServiceProfile {
            label,
            stream_rate,
            interactive_stream_rate: None,
        }
    }

    /// Standard definition, 3 Mb/s.
    pub fn sd() -> Self {
        ServiceProfile::new(ServiceLabel::Sd, BitRate::mbps(3.0))
    }

    /// High definition, 8 Mb/s.
    pub fn hd() -> Self {
        ServiceProfile::new(ServiceLabel::Hd, BitRate::mbps(8.0))
    }

    pub fn validate(&self) -> Result<(), CapacityError> {
        let ok = |r: BitRate| r.0.is_finite() && r.0 > 0.0;
        if !ok(self.stream_rate) {
            return Err(CapacityError::Service(format!(
                "stream_rate must be positive, got {}",
                self.stream_rate
            )));
        }
        if let Some(r) = self.interactive_stream_rate {
            if !ok(r) {
                return Err(CapacityError::Service(format!(
                    "interactive_stream_rate must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }

    /// Bandwidth provisioned per server port.
    pub fn port_rate(&self) -> f64 {
        match self.interactive_stream_rate {
            Some(ri) => self.stream_rate.0.max(ri.0),
            None => self.stream_rate.0,
        }
    }
}

/// Upstream request message sizes in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageSizes {
    pub normal_bits: u64,
    pub interactive_bits: u64,
}

impl MessageSizes {
    pub fn validate(&self) -> Result<(), CapacityError> {
        if self.normal_bits == 0 || self.interactive_bits == 0 {
            return Err(CapacityError::Messages(
                "message sizes must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Centralized,
    Distributed,
}

impl Architecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Centralized => "centralized",
            Architecture::Distributed => "distributed",
        }
    }
}

/// Provisioning of a single central server pool shared by all clusters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralizedProvision {
    /// `M_c`
    pub load: OfferedLoad,
    /// `S_c`
    pub ports: PortCount,
    /// `W_c = r·S_c`, bits/s.
    pub bandwidth: f64,
    /// `W_ch = r·S_c / (x·h)`, bits/s.
    pub per_household: f64,
}

/// Per-cluster provisioning of a local proxy pool plus a share of the
/// central pool for titles outside the popular set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributedProvision {
    pub unpopular_probability: f64,
    /// `M_L`
    pub local_load: OfferedLoad,
    /// `M_CL`
    pub central_load: OfferedLoad,
    /// `S_L`
    pub local_ports: PortCount,
    /// `S_CL`
    pub central_ports: PortCount,
    /// `W_LL = r·S_L`
    pub local_bandwidth: f64,
    /// `W_LC = r·S_CL`
    pub central_bandwidth: f64,
    /// `TW_LC = r·(S_CL + S_L)`, per cluster.
    pub cluster_bandwidth: f64,
    /// `W_ch = r·(S_CL + S_L) / h`
    pub per_household: f64,
    /// `TW = x·TW_LC`
    pub total_bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProvisionReport {
    Centralized(CentralizedProvision),
    Distributed(DistributedProvision),
}

impl ProvisionReport {
    pub fn architecture(&self) -> Architecture {
        match self {
            ProvisionReport::Centralized(_) => Architecture::Centralized,
            ProvisionReport::Distributed(_) => Architecture::Distributed,
        }
    }
}

/// Total offered load `M_c` of all clusters on a central server pool.
///
/// Only the normal term is divided by the multicast factor; interactive
/// streams are unicast.
pub fn centralized_load(cp: &ClusterParams) -> Result<OfferedLoad, CapacityError> {
    cp.validate()?;
    let x = cp.clusters as f64;
    let m = x * cp.normal_load_per_cluster() + x * cp.interactive_load_per_cluster();
    Ok(OfferedLoad::new(m)?)
}

/// Offered load of a single cluster before the popular/unpopular split.
pub fn cluster_base_load(cp: &ClusterParams) -> Result<OfferedLoad, CapacityError> {
    cp.validate()?;
    Ok(OfferedLoad::new(
        cp.normal_load_per_cluster() + cp.interactive_load_per_cluster(),
    )?)
}

pub fn provision_centralized(
    cp: &ClusterParams,
    svc: &ServiceProfile,
    target: BlockingProb,
) -> Result<CentralizedProvision, CapacityError> {
    svc.validate()?;
    let load = centralized_load(cp)?;
    let ports = erlang::min_ports(load, target)?;
    let r = svc.port_rate();
    let bandwidth = ports.0 as f64 * r;
    Ok(CentralizedProvision {
        load,
        ports,
        bandwidth,
        per_household: r * ports.0 as f64 / (cp.clusters as f64 * cp.households as f64),
    })
}

/// Split `total` into `(total - part, part)` with `part ≈ total·fraction`
/// such that the two components add back to exactly `total` in `f64`.
fn split_exact(total: f64, fraction: f64) -> (f64, f64) {
    let part = (total * fraction).clamp(0.0, total);
    // `total - part` can round so that the sum misses `total` by one ulp,
    // and ties-to-even can make that unfixable by moving `rest` alone; try
    // the neighbouring values of both components.
    for p in [part, part.next_down(), part.next_up()] {
        if !(0.0..=total).contains(&p) {
            continue;
        }
        let rest = total - p;
        for r in [rest, rest.next_up(), rest.next_down()] {
            if r >= 0.0 && r + p == total {
                return (r, p);
            }
        }
    }
    unreachable!("no exact split of {total} at {fraction}")
}

/// Per-cluster local (`M_L`) and central (`M_CL`) offered loads. The two
/// always sum to exactly the cluster's base load.
pub fn distributed_loads(
    cp: &ClusterParams,
    catalog: &CatalogModel,
) -> Result<(OfferedLoad, OfferedLoad), CapacityError> {
    let base = cluster_base_load(cp)?.erlangs();
    let p_un = popularity::p_unpopular(catalog)?;
    let (local, central) = split_exact(base, p_un);
    Ok((OfferedLoad::new(local)?, OfferedLoad::new(central)?))
}

pub fn provision_distributed(
    cp: &ClusterParams,
    catalog: &CatalogModel,
    svc: &ServiceProfile,
    target: BlockingProb,
) -> Result<DistributedProvision, CapacityError> {
    svc.validate()?;
    let (local_load, central_load) = distributed_loads(cp, catalog)?;
    let local_ports = erlang::min_ports(local_load, target)?;
    let central_ports = erlang::min_ports(central_load, target)?;
    let r = svc.port_rate();
    let total_ports = (local_ports.0 + central_ports.0) as f64;
    let cluster_bandwidth = r * total_ports;
    Ok(DistributedProvision {
        unpopular_probability: popularity::p_unpopular(catalog)?,
        local_load,
        central_load,
        local_ports,
        central_ports,
        local_bandwidth: r * local_ports.0 as f64,
        central_bandwidth: r * central_ports.0 as f64,
        cluster_bandwidth,
        per_household: cluster_bandwidth / cp.households as f64,
        total_bandwidth: cp.clusters as f64 * cluster_bandwidth,
    })
}

/// Upstream request bandwidth `W_oc = p·x·h·(λn·Ln + λi·Li) / T`, bits/s.
pub fn inbound_bandwidth(cp: &ClusterParams, msg: &MessageSizes) -> Result<f64, CapacityError> {
    cp.validate()?;
    msg.validate()?;
    let bits_per_household =
        cp.normal_rate * msg.normal_bits as f64 + cp.interactive_rate * msg.interactive_bits as f64;
    Ok(
        cp.penetration * cp.clusters as f64 * cp.households as f64 * bits_per_household
            / cp.peak_period.0,
    )
}
