//! Controllers and the least-loaded load balancer.
//!
//! Every controller keeps a view with one entry per server. Entries for the
//! controller's own servers come from state collection:
//!
//! * passive: the controller tracks the flow rules installed in and expired
//!   from its own switch, so its own entries are exact flow counts;
//! * active: the controller polls its switch's byte counters every polling
//!   period, and the entries only change at polls.
//!
//! Entries for other domains' servers only change on state distribution:
//! a periodic exchange, or an LSVS exchange triggered by the controller that
//! currently holds the active role.

use thiserror::Error;

use crate::dataplane::{DataPlane, DataPlaneError, Topology};
use crate::sim::SimTime;
use crate::traffic::{Flow, ServerId, SwitchId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("polling period must be positive, got {0}")]
    PollPeriod(f64),
    #[error("synchronization period must be positive, got {0}")]
    SyncPeriod(f64),
    #[error("LSVS threshold must be non-negative, got {0}")]
    Threshold(f64),
    #[error("topology needs at least one domain")]
    NoDomains,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Collection {
    /// Flow counts tracked from rule installation and removal.
    Passive,
    /// Byte counters polled every `poll` seconds.
    Active { poll: f64 },
}

impl Collection {
    pub fn poll_period(&self) -> Option<f64> {
        match *self {
            Collection::Passive => None,
            Collection::Active { poll } => Some(poll),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    None,
    /// Full view exchange every `period` seconds.
    Periodic { period: f64 },
    /// Exchange when the agreed least-loaded server's load moves by more
    /// than `threshold` (flows under passive collection, bytes under active).
    Lsvs { threshold: f64 },
}

impl Distribution {
    pub fn sync_period(&self) -> Option<f64> {
        match *self {
            Distribution::Periodic { period } => Some(period),
            _ => None,
        }
    }
}

pub fn validate_policies(
    topology: &Topology,
    collection: &Collection,
    distribution: &Distribution,
) -> Result<(), PolicyError> {
    if topology.domains == 0 {
        return Err(PolicyError::NoDomains);
    }
    if let Collection::Active { poll } = *collection {
        if !(poll > 0.0 && poll.is_finite()) {
            return Err(PolicyError::PollPeriod(poll));
        }
    }
    match *distribution {
        Distribution::Periodic { period } if !(period > 0.0 && period.is_finite()) => {
            Err(PolicyError::SyncPeriod(period))
        }
        Distribution::Lsvs { threshold } if !(threshold >= 0.0) => {
            Err(PolicyError::Threshold(threshold))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Active,
    Passive,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ViewEntry {
    /// Flows (passive) or bytes (active).
    pub load: f64,
    /// Time at which `load` was last known to be true.
    pub as_of: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerView {
    pub id: usize,
    pub entries: Vec<ViewEntry>,
    /// Only set under LSVS.
    pub role: Option<Role>,
    /// Load of the agreed least-loaded server at the last LSVS exchange.
    pub last_sync_load: f64,
}

impl ControllerView {
    pub fn loads(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.load)
    }
}

/// Least-loaded server; ties go to the lowest server id.
///
/// Panics on an empty view.
pub fn lb_decide(loads: impl IntoIterator<Item = f64>) -> ServerId {
    let mut best: Option<(ServerId, f64)> = None;
    for (k, load) in loads.into_iter().enumerate() {
        match best {
            Some((_, min)) if load >= min => {}
            _ => best = Some((k, load)),
        }
    }
    best.expect("load balancer needs at least one server").0
}

/// What happened when a flow arrived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub server: ServerId,
    pub controller: usize,
    pub expiry: SimTime,
    /// A view watched by LSVS changed; an LSVS check is due.
    pub lsvs_check: bool,
}

#[derive(Debug, Clone)]
pub struct ControlPlane {
    topology: Topology,
    collection: Collection,
    distribution: Distribution,
    views: Vec<ControllerView>,
    /// Agreed least-loaded server under LSVS.
    agreed_least: ServerId,
    active_controller: usize,
    sync_messages: u64,
    sync_rounds: u64,
}

impl ControlPlane {
    pub fn new(
        topology: Topology,
        collection: Collection,
        distribution: Distribution,
    ) -> Result<Self, PolicyError> {
        validate_policies(&topology, &collection, &distribution)?;
        let lsvs = matches!(distribution, Distribution::Lsvs { .. });
        let active_controller = topology.owner(0);
        let views = (0..topology.controllers())
            .map(|id| ControllerView {
                id,
                entries: vec![ViewEntry::default(); topology.domains],
                role: lsvs.then(|| {
                    if id == active_controller {
                        Role::Active
                    } else {
                        Role::Passive
                    }
                }),
                last_sync_load: 0.0,
            })
            .collect();
        Ok(Self {
            topology,
            collection,
            distribution,
            views,
            agreed_least: 0,
            active_controller,
            sync_messages: 0,
            sync_rounds: 0,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn collection(&self) -> Collection {
        self.collection
    }

    pub fn distribution(&self) -> Distribution {
        self.distribution
    }

    pub fn views(&self) -> &[ControllerView] {
        &self.views
    }

    pub fn view(&self, controller: usize) -> &ControllerView {
        &self.views[controller]
    }

    /// Directed controller-to-controller view transfers so far.
    pub fn sync_messages(&self) -> u64 {
        self.sync_messages
    }

    /// Number of view exchanges (periodic ticks or LSVS triggers).
    pub fn sync_rounds(&self) -> u64 {
        self.sync_rounds
    }

    pub fn agreed_least(&self) -> ServerId {
        self.agreed_least
    }

    pub fn active_controller(&self) -> usize {
        self.active_controller
    }

    fn is_lsvs(&self) -> bool {
        matches!(self.distribution, Distribution::Lsvs { .. })
    }

    /// Server chosen for a new flow entering at `origin`.
    pub fn decide(&self, origin: SwitchId) -> ServerId {
        if self.is_lsvs() {
            // every controller forwards to the server agreed at the last exchange
            self.agreed_least
        } else {
            lb_decide(self.views[self.topology.owner(origin)].loads())
        }
    }

    /// Handles a table miss: picks a server, installs the flow and updates
    /// passive views.
    pub fn on_flow_arrival(
        &mut self,
        now: SimTime,
        flow: Flow,
        dp: &mut DataPlane,
    ) -> Result<Assignment, DataPlaneError> {
        let controller = self.topology.owner(flow.origin);
        let server = self.decide(flow.origin);
        let expiry = dp.install_flow(flow, server)?;
        let mut lsvs_check = false;
        if self.collection == Collection::Passive {
            lsvs_check = self.track(now, server, 1.0);
        }
        Ok(Assignment {
            server,
            controller,
            expiry,
            lsvs_check,
        })
    }

    /// Flow-removed notification. Returns whether an LSVS check is due.
    pub fn on_flow_expiry(&mut self, now: SimTime, server: ServerId) -> bool {
        if self.collection != Collection::Passive {
            return false;
        }
        self.track(now, server, -1.0)
    }

    /// Passive bookkeeping of one rule insertion or removal, seen by the
    /// server's owner. Returns whether an LSVS check is due.
    fn track(&mut self, now: SimTime, server: ServerId, change: f64) -> bool {
        let owner = self.topology.owner(server);
        let entry = &mut self.views[owner].entries[server];
        entry.load += change;
        entry.as_of = now;
        debug_assert!(entry.load >= 0.0, "passive view went negative");
        self.is_lsvs() && owner == self.active_controller
    }

    /// Polls the byte counters of the controller's own servers. Returns
    /// whether an LSVS check is due.
    pub fn on_poll_tick(
        &mut self,
        now: SimTime,
        controller: usize,
        dp: &DataPlane,
    ) -> Result<bool, DataPlaneError> {
        if self.collection == Collection::Passive {
            return Ok(false);
        }
        for server in 0..self.topology.domains {
            if self.topology.owner(server) == controller {
                let (_, bytes) = dp.read_counters(server)?;
                self.views[controller].entries[server] = ViewEntry {
                    load: bytes as f64,
                    as_of: now,
                };
            }
        }
        Ok(self.is_lsvs() && controller == self.active_controller)
    }

    /// Every controller replaces its entries for foreign servers with the
    /// owner's current entry.
    fn exchange(&mut self, now: SimTime) {
        let passive = self.collection == Collection::Passive;
        let owned: Vec<ViewEntry> = (0..self.topology.domains)
            .map(|k| {
                let e = self.views[self.topology.owner(k)].entries[k];
                if passive {
                    ViewEntry { as_of: now, ..e }
                } else {
                    e
                }
            })
            .collect();
        for view in &mut self.views {
            for (k, entry) in owned.iter().enumerate() {
                if self.topology.owner(k) != view.id {
                    view.entries[k] = *entry;
                }
            }
        }
        let c = self.views.len() as u64;
        self.sync_messages += c * (c - 1);
        self.sync_rounds += 1;
    }

    pub fn on_sync_tick(&mut self, now: SimTime) {
        self.exchange(now);
    }

    /// LSVS trigger rule. Returns whether an exchange happened.
    pub fn lsvs_check(&mut self, now: SimTime) -> bool {
        let Distribution::Lsvs { threshold } = self.distribution else {
            return false;
        };
        let active = &self.views[self.active_controller];
        let current = active.entries[self.agreed_least].load;
        if (current - active.last_sync_load).abs() <= threshold {
            return false;
        }
        self.exchange(now);
        // after a full exchange all views agree
        let least = lb_decide(self.views[self.active_controller].loads());
        let new_active = self.topology.owner(least);
        let least_load = self.views[new_active].entries[least].load;
        self.agreed_least = least;
        self.active_controller = new_active;
        for view in &mut self.views {
            view.role = Some(if view.id == new_active {
                Role::Active
            } else {
                Role::Passive
            });
            view.last_sync_load = least_load;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::FlowId;

    fn flow(id: u64, origin: SwitchId, t: f64) -> Flow {
        Flow::new(FlowId(id), origin, t, 2.0)
    }

    fn set_view(cp: &mut ControlPlane, controller: usize, loads: &[f64]) {
        for (k, &l) in loads.iter().enumerate() {
            cp.views[controller].entries[k].load = l;
        }
    }

    #[test]
    fn argmin_with_low_id_ties() {
        assert_eq!(lb_decide([5.0, 3.0]), 1);
        assert_eq!(lb_decide([4.0, 4.0]), 0);
        assert_eq!(lb_decide([0.0, 0.0, 0.0]), 0);
        assert_eq!(lb_decide([2.0, 1.0, 1.0]), 1);
    }

    #[test]
    #[should_panic]
    fn argmin_of_nothing_panics() {
        lb_decide(std::iter::empty());
    }

    #[test]
    fn policy_validation() {
        let t = Topology::distributed(2);
        assert!(validate_policies(&t, &Collection::Active { poll: 0.0 }, &Distribution::None).is_err());
        assert!(validate_policies(
            &t,
            &Collection::Passive,
            &Distribution::Periodic { period: -1.0 }
        )
        .is_err());
        assert!(validate_policies(&t, &Collection::Passive, &Distribution::Lsvs { threshold: -0.5 }).is_err());
        assert!(validate_policies(&t, &Collection::Passive, &Distribution::Lsvs { threshold: 0.0 }).is_ok());
        assert!(validate_policies(&Topology::distributed(0), &Collection::Passive, &Distribution::None).is_err());
    }

    #[test]
    fn single_passive_self_updates() {
        let mut cp = ControlPlane::new(Topology::single(2), Collection::Passive, Distribution::None).unwrap();
        let mut dp = DataPlane::new(2, 4096);
        set_view(&mut cp, 0, &[2.0, 2.0]);
        // seed the data plane so the passive view matches it
        for id in 0..4 {
            dp.install_flow(flow(100 + id, 0, 0.0), (id % 2) as usize).unwrap();
        }
        let a = cp.on_flow_arrival(0.5, flow(1, 1, 0.5), &mut dp).unwrap();
        assert_eq!(a.server, 0);
        assert_eq!(a.expiry, 2.5);
        let loads: Vec<f64> = cp.view(0).loads().collect();
        assert_eq!(loads, [3.0, 2.0]);
        assert_eq!(dp.read_counters(0).unwrap().0, 3);
    }

    #[test]
    fn active_view_waits_for_poll() {
        let mut cp = ControlPlane::new(
            Topology::single(2),
            Collection::Active { poll: 1.0 },
            Distribution::None,
        )
        .unwrap();
        let mut dp = DataPlane::new(2, 4096);
        set_view(&mut cp, 0, &[8192.0, 4096.0]);
        let a = cp.on_flow_arrival(0.2, flow(1, 0, 0.2), &mut dp).unwrap();
        assert_eq!(a.server, 1);
        let loads: Vec<f64> = cp.view(0).loads().collect();
        assert_eq!(loads, [8192.0, 4096.0]);
        for k in 0..3 {
            dp.on_packet(FlowId(1), 0.3 + 0.1 * k as f64);
        }
        cp.on_poll_tick(1.0, 0, &dp).unwrap();
        assert_eq!(cp.view(0).entries[1], ViewEntry { load: 12288.0, as_of: 1.0 });
        assert_eq!(cp.view(0).entries[0], ViewEntry { load: 0.0, as_of: 1.0 });
        // ground truth moves, view does not
        dp.on_packet(FlowId(1), 1.5);
        assert_eq!(cp.view(0).entries[1].load, 12288.0);
    }

    #[test]
    fn distributed_passive_staleness() {
        let mut cp = ControlPlane::new(
            Topology::distributed(2),
            Collection::Passive,
            Distribution::Periodic { period: 4.0 },
        )
        .unwrap();
        let mut dp = DataPlane::new(2, 4096);
        // controller 1 sends its flow to server 0 (tie -> lowest id)
        let a = cp.on_flow_arrival(0.1, flow(1, 1, 0.1), &mut dp).unwrap();
        assert_eq!((a.server, a.controller), (0, 1));
        // owner of server 0 sees it, controller 1 does not until sync
        assert_eq!(cp.view(0).entries[0].load, 1.0);
        assert_eq!(cp.view(1).entries[0].load, 0.0);
        // controller 0 now sees (1, 0): goes to server 1, which it cannot see
        let b = cp.on_flow_arrival(0.2, flow(2, 0, 0.2), &mut dp).unwrap();
        assert_eq!(b.server, 1);
        assert_eq!(cp.view(0).entries[1].load, 0.0);
        assert_eq!(cp.view(1).entries[1].load, 1.0);
        cp.on_sync_tick(4.0);
        for c in 0..2 {
            let loads: Vec<f64> = cp.view(c).loads().collect();
            assert_eq!(loads, [1.0, 1.0]);
        }
        assert_eq!(cp.sync_messages(), 2);
        // a remote expiry leaves the other controller's copy untouched
        cp.on_flow_expiry(2.1, 0);
        assert_eq!(cp.view(0).entries[0].load, 0.0);
        assert_eq!(cp.view(1).entries[0].load, 1.0);
    }

    #[test]
    fn sync_exchange_copies_owner_entries() {
        let mut cp = ControlPlane::new(
            Topology::distributed(2),
            Collection::Passive,
            Distribution::Periodic { period: 1.0 },
        )
        .unwrap();
        set_view(&mut cp, 0, &[5.0, 0.0]);
        set_view(&mut cp, 1, &[0.0, 3.0]);
        cp.on_sync_tick(1.0);
        for c in 0..2 {
            let loads: Vec<f64> = cp.view(c).loads().collect();
            assert_eq!(loads, [5.0, 3.0]);
        }
    }

    #[test]
    fn sync_message_count_scales_with_controllers() {
        let mut cp = ControlPlane::new(
            Topology::distributed(4),
            Collection::Passive,
            Distribution::Periodic { period: 1.0 },
        )
        .unwrap();
        for t in 1..=3 {
            cp.on_sync_tick(t as f64);
        }
        assert_eq!(cp.sync_messages(), 3 * 4 * 3);
        let mut single =
            ControlPlane::new(Topology::single(2), Collection::Passive, Distribution::Periodic { period: 1.0 })
                .unwrap();
        single.on_sync_tick(1.0);
        assert_eq!(single.sync_messages(), 0);
    }

    fn lsvs(threshold: f64) -> ControlPlane {
        ControlPlane::new(Topology::distributed(2), Collection::Passive, Distribution::Lsvs { threshold }).unwrap()
    }

    fn active_roles(cp: &ControlPlane) -> usize {
        cp.views().iter().filter(|v| v.role == Some(Role::Active)).count()
    }

    #[test]
    fn lsvs_initial_roles() {
        let cp = lsvs(1.0);
        assert_eq!(cp.active_controller(), 0);
        assert_eq!(cp.agreed_least(), 0);
        assert_eq!(active_roles(&cp), 1);
    }

    #[test]
    fn lsvs_zero_threshold_triggers_on_every_change() {
        let mut cp = lsvs(0.0);
        let mut dp = DataPlane::new(2, 4096);
        let a = cp.on_flow_arrival(0.1, flow(1, 1, 0.1), &mut dp).unwrap();
        assert_eq!(a.server, 0);
        assert!(a.lsvs_check);
        assert!(cp.lsvs_check(0.1));
        assert_eq!(cp.agreed_least(), 1);
        assert_eq!(cp.active_controller(), 1);
        assert_eq!(active_roles(&cp), 1);
        assert_eq!(cp.view(1).last_sync_load, 0.0);
        // no change since: no trigger
        assert!(!cp.lsvs_check(0.1));
    }

    #[test]
    fn lsvs_threshold_is_strict() {
        let theta = 3.0;
        let mut cp = lsvs(theta);
        for v in &mut cp.views {
            v.last_sync_load = 10.0;
        }
        cp.views[0].entries[0].load = 10.0 + theta;
        assert!(!cp.lsvs_check(1.0));
        cp.views[0].entries[0].load = 10.0 + theta + 1e-9;
        assert!(cp.lsvs_check(1.0));
        assert_eq!(active_roles(&cp), 1);
        assert_eq!(cp.sync_rounds(), 1);
        // absolute variation: a drop also triggers
        let mut cp = lsvs(theta);
        for v in &mut cp.views {
            v.last_sync_load = 10.0;
        }
        cp.views[0].entries[0].load = 5.0;
        assert!(cp.lsvs_check(1.0));
    }

    #[test]
    fn lsvs_routes_everyone_to_agreed_server() {
        let mut cp = lsvs(2.0);
        let mut dp = DataPlane::new(2, 4096);
        for id in 0..3 {
            let origin = (id % 2) as usize;
            let a = cp.on_flow_arrival(0.1 * id as f64, flow(id, origin, 0.1 * id as f64), &mut dp).unwrap();
            assert_eq!(a.server, 0);
            assert!(a.lsvs_check);
            let fired = cp.lsvs_check(0.1 * id as f64);
            assert_eq!(fired, id == 2);
        }
        assert_eq!(cp.agreed_least(), 1);
        for v in cp.views() {
            assert_eq!(v.last_sync_load, 0.0);
        }
        // flows now go to server 1; controller 1 holds the role
        let a = cp.on_flow_arrival(1.0, flow(9, 0, 1.0), &mut dp).unwrap();
        assert_eq!(a.server, 1);
        assert!(a.lsvs_check);
    }

    #[test]
    fn lsvs_active_collection_checks_on_poll() {
        let mut cp = ControlPlane::new(
            Topology::distributed(2),
            Collection::Active { poll: 1.0 },
            Distribution::Lsvs { threshold: 4096.0 },
        )
        .unwrap();
        let mut dp = DataPlane::new(2, 4096);
        let a = cp.on_flow_arrival(0.1, flow(1, 1, 0.1), &mut dp).unwrap();
        assert!(!a.lsvs_check);
        dp.on_packet(FlowId(1), 0.2);
        dp.on_packet(FlowId(1), 0.3);
        assert!(!cp.on_poll_tick(1.0, 1, &dp).unwrap());
        assert!(cp.on_poll_tick(1.0, 0, &dp).unwrap());
        assert!(cp.lsvs_check(1.0));
        assert_eq!(cp.agreed_least(), 1);
        assert_eq!(cp.view(0).last_sync_load, 0.0);
    }
}
