//! Capacity planning for large video-on-demand networks.
//!
//! * [`erlang`] evaluates Erlang-B blocking and sizes port pools.
//! * [`popularity`] models Zipf-like title popularity.
//! * [`capacity`] turns cluster demographics into offered load, ports and
//!   bandwidth for centralized and local-proxy deployments.
//! * [`simulator`] is a discrete-event loss-system simulator used to
//!   cross-check the closed forms.
//! * [`planner`] loads scenario files, runs parameter sweeps and writes
//!   CSV and text reports.

pub mod capacity;
pub mod erlang;
pub mod planner;
pub mod popularity;
pub mod simulator;
pub mod units;
pub mod validation;

pub use capacity::{
    Architecture, CapacityError, CentralizedProvision, ClusterParams, DistributedProvision,
    MessageSizes, ProvisionReport, ServiceLabel, ServiceProfile,
};
pub use erlang::{BlockingProb, ErlangError, OfferedLoad, PortCount};
pub use popularity::{CatalogError, CatalogModel};
pub use units::{BitRate, Seconds};
