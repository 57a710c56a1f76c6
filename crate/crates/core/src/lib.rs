//! Simulation of how state collection and state distribution in an SDN
//! control plane shape a load balancer's view of server load.
//!
//! Two engines share one configuration: [`simulator::simulate`] runs the
//! discrete-event model of switches, servers and controllers, and
//! [`analytic::run_model`] steps the per-arrival load recurrence. Scenario
//! files, sweeps and CSV output live in [`scenario`], [`experiment`] and
//! [`output`].

pub mod analytic;
pub mod controlplane;
pub mod dataplane;
pub mod experiment;
pub mod metrics;
pub mod output;
pub mod scenario;
pub mod sim;
pub mod simulator;
pub mod traffic;

pub use controlplane::{Collection, Distribution};
pub use dataplane::Topology;
pub use experiment::{run_scenario, run_sweep};
pub use metrics::{AggregateSeries, MetricSample};
pub use scenario::Scenario;
pub use simulator::{EngineError, RunConfig, RunOutput};
pub use traffic::TrafficProfile;
