//! Ground-truth server loads.
//!
//! Each domain has one switch and one server. The data plane owns the active
//! flow table and the per-server counters that the control plane reads.

use std::collections::HashMap;

use thiserror::Error;

use crate::sim::SimTime;
use crate::traffic::{Flow, FlowId, ServerId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataPlaneError {
    #[error("unknown server {0}")]
    UnknownServer(ServerId),
    #[error("flow {0:?} is already installed")]
    AlreadyInstalled(FlowId),
    #[error("unknown flow {0:?}")]
    UnknownFlow(FlowId),
}

/// Domain layout: `domains` switches/servers, and either one controller per
/// domain or a single controller for all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    pub domains: usize,
    pub single_controller: bool,
}

impl Topology {
    pub fn distributed(domains: usize) -> Self {
        Self {
            domains,
            single_controller: false,
        }
    }

    pub fn single(domains: usize) -> Self {
        Self {
            domains,
            single_controller: true,
        }
    }

    pub fn controllers(&self) -> usize {
        if self.single_controller {
            1
        } else {
            self.domains
        }
    }

    /// Controller responsible for a switch or server of domain `domain`.
    pub fn owner(&self, domain: usize) -> usize {
        if self.single_controller {
            0
        } else {
            domain
        }
    }
}

/// Counters of one server.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ServerLoad {
    /// Unexpired flows assigned to this server.
    pub flows: u64,
    /// Bytes received from currently unexpired flows.
    pub active_bytes: u64,
    /// Bytes received since the start of the run.
    pub cumulative_bytes: u64,
    /// Bytes received since the last measurement tick.
    pub window_bytes: u64,
}

#[derive(Debug, Clone)]
pub struct DataPlane {
    payload: u64,
    servers: Vec<ServerLoad>,
    flows: HashMap<FlowId, Flow>,
    delivered_packets: u64,
}

impl DataPlane {
    pub fn new(servers: usize, payload: u64) -> Self {
        Self {
            payload,
            servers: vec![ServerLoad::default(); servers],
            flows: HashMap::new(),
            delivered_packets: 0,
        }
    }

    pub fn payload(&self) -> u64 {
        self.payload
    }

    pub fn servers(&self) -> &[ServerLoad] {
        &self.servers
    }

    pub fn active_flows(&self) -> usize {
        self.flows.len()
    }

    pub fn delivered_packets(&self) -> u64 {
        self.delivered_packets
    }

    pub fn flow(&self, id: FlowId) -> Option<&Flow> {
        self.flows.get(&id)
    }

    fn server_mut(&mut self, server: ServerId) -> Result<&mut ServerLoad, DataPlaneError> {
        self.servers
            .get_mut(server)
            .ok_or(DataPlaneError::UnknownServer(server))
    }

    /// Installs the rule sending `flow` to `server`. Returns the expiry time
    /// at which the caller must call [`DataPlane::expire_flow`].
    pub fn install_flow(&mut self, mut flow: Flow, server: ServerId) -> Result<SimTime, DataPlaneError> {
        if flow.server.is_some() || self.flows.contains_key(&flow.id) {
            return Err(DataPlaneError::AlreadyInstalled(flow.id));
        }
        self.server_mut(server)?.flows += 1;
        flow.server = Some(server);
        let expiry = flow.expiry;
        self.flows.insert(flow.id, flow);
        Ok(expiry)
    }

    /// Delivers one packet of `id` emitted at `now`. Packets of unknown or
    /// expired flows are dropped; returns whether the packet was delivered.
    pub fn on_packet(&mut self, id: FlowId, now: SimTime) -> bool {
        let payload = self.payload;
        let Some(flow) = self.flows.get_mut(&id) else {
            return false;
        };
        if !flow.is_active_at(now) {
            return false;
        }
        let Some(server) = flow.server else {
            return false;
        };
        flow.bytes_sent += payload;
        let s = &mut self.servers[server];
        s.active_bytes += payload;
        s.cumulative_bytes += payload;
        s.window_bytes += payload;
        self.delivered_packets += 1;
        true
    }

    /// Removes an expired flow and its contribution to the active counters.
    pub fn expire_flow(&mut self, id: FlowId) -> Result<Flow, DataPlaneError> {
        let flow = self.flows.remove(&id).ok_or(DataPlaneError::UnknownFlow(id))?;
        if let Some(server) = flow.server {
            let s = &mut self.servers[server];
            s.flows -= 1;
            s.active_bytes -= flow.bytes_sent;
        }
        Ok(flow)
    }

    /// `(flows, active bytes)` of a server, as a statistics reply would report.
    pub fn read_counters(&self, server: ServerId) -> Result<(u64, u64), DataPlaneError> {
        self.servers
            .get(server)
            .map(|s| (s.flows, s.active_bytes))
            .ok_or(DataPlaneError::UnknownServer(server))
    }

    /// Returns the per-server window byte counts and resets them.
    pub fn take_window_bytes(&mut self) -> Vec<u64> {
        self.servers
            .iter_mut()
            .map(|s| std::mem::take(&mut s.window_bytes))
            .collect()
    }

    /// Conservation of flows and bytes against independently kept totals.
    pub fn conservation_holds(&self) -> bool {
        let flows: u64 = self.servers.iter().map(|s| s.flows).sum();
        let bytes: u64 = self.servers.iter().map(|s| s.cumulative_bytes).sum();
        let active: u64 = self.flows.values().map(|f| f.bytes_sent).sum();
        let active_bytes: u64 = self.servers.iter().map(|s| s.active_bytes).sum();
        flows == self.flows.len() as u64
            && bytes == self.payload * self.delivered_packets
            && active == active_bytes
    }
}
