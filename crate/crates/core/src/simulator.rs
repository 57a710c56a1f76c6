//! One run of the event-driven simulation.

use std::collections::HashMap;

use thiserror::Error;

use crate::controlplane::{Collection, ControlPlane, Distribution, PolicyError};
use crate::dataplane::{DataPlane, DataPlaneError, ServerLoad, Topology};
use crate::metrics::MetricSample;
use crate::sim::{EventClass, EventQueue, Purpose, RngStream, SimError, SimTime, StreamLabel};
use crate::traffic::{packet_schedule, ArrivalProcess, Flow, FlowId, ProfileError, ServerId, TrafficProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    DataPlane(#[from] DataPlaneError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("profile has {profile} switches but the topology has {domains} domains")]
    DomainMismatch { profile: usize, domains: usize },
    #[error("horizon and measurement window must be positive")]
    Horizon,
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimEvent {
    FlowArrival { switch: usize },
    FlowExpiry { flow: FlowId },
    PacketEmission { flow: FlowId },
    PollTick { controller: usize },
    SyncTick,
    MeasureTick,
    LsvsCheck,
}

impl EventClass for SimEvent {
    fn class(&self) -> u8 {
        // polls land before an exchange at the same instant, so the exchange
        // carries the fresh counters
        match self {
            SimEvent::PollTick { .. } => 0,
            SimEvent::SyncTick | SimEvent::LsvsCheck => 1,
            SimEvent::FlowArrival { .. } => 2,
            SimEvent::PacketEmission { .. } => 3,
            SimEvent::FlowExpiry { .. } => 4,
            SimEvent::MeasureTick => 5,
        }
    }
}

/// Everything needed to execute one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub topology: Topology,
    pub profile: TrafficProfile,
    pub collection: Collection,
    pub distribution: Distribution,
    pub horizon: f64,
    pub window: f64,
    pub seed: u64,
    pub run: u32,
    /// Check flow and byte conservation at every measurement tick.
    pub audit: bool,
    /// Record a flow/packet log for offline replay.
    pub trace: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        self.profile.validate()?;
        crate::controlplane::validate_policies(&self.topology, &self.collection, &self.distribution)?;
        if self.profile.switches.len() != self.topology.domains {
            return Err(EngineError::DomainMismatch {
                profile: self.profile.switches.len(),
                domains: self.topology.domains,
            });
        }
        if !(self.horizon > 0.0 && self.window > 0.0 && self.horizon.is_finite()) {
            return Err(EngineError::Horizon);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceRecord {
    Installed {
        flow: FlowId,
        server: ServerId,
        arrival: SimTime,
        expiry: SimTime,
    },
    /// Emission attempt; the data plane drops it if the flow is gone.
    Packet {
        flow: FlowId,
        time: SimTime,
    },
    /// Server counters as held at a measurement tick, before the window
    /// counters reset.
    Tick {
        time: SimTime,
        loads: Vec<ServerLoad>,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub ticks_checked: u64,
    pub violations: Vec<SimTime>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub samples: Vec<MetricSample>,
    pub sync_messages: u64,
    pub sync_rounds: u64,
    pub flows_generated: u64,
    pub packets_delivered: u64,
    pub events: u64,
    pub audit: Option<AuditReport>,
    pub trace: Option<Vec<TraceRecord>>,
}

struct PacketCursor {
    times: Vec<SimTime>,
    next: usize,
}

struct Simulator<'a> {
    cfg: &'a RunConfig,
    dp: DataPlane,
    cp: ControlPlane,
    arrivals: Vec<ArrivalProcess>,
    packet_rngs: Vec<RngStream>,
    cursors: HashMap<FlowId, PacketCursor>,
    next_flow: u64,
    samples: Vec<MetricSample>,
    audit: Option<AuditReport>,
    trace: Option<Vec<TraceRecord>>,
}

impl Simulator<'_> {
    fn handle(&mut self, q: &mut EventQueue<SimEvent>, now: SimTime, ev: SimEvent) -> Result<(), EngineError> {
        match ev {
            SimEvent::FlowArrival { switch } => {
                let t = self.arrivals[switch].advance();
                debug_assert_eq!(t, now);
                let id = FlowId(self.next_flow);
                self.next_flow += 1;
                let flow = Flow::new(id, switch, now, self.cfg.profile.ttl);
                let a = self.cp.on_flow_arrival(now, flow, &mut self.dp)?;
                if a.lsvs_check {
                    q.schedule(now, SimEvent::LsvsCheck)?;
                }
                if let Some(trace) = &mut self.trace {
                    trace.push(TraceRecord::Installed {
                        flow: id,
                        server: a.server,
                        arrival: now,
                        expiry: a.expiry,
                    });
                }
                let times = packet_schedule(
                    &self.cfg.profile.switches[switch],
                    now,
                    a.expiry,
                    &mut self.packet_rngs[switch],
                );
                if let Some(&first) = times.first() {
                    q.schedule(first, SimEvent::PacketEmission { flow: id })?;
                    self.cursors.insert(id, PacketCursor { times, next: 0 });
                }
                q.schedule(a.expiry, SimEvent::FlowExpiry { flow: id })?;
                q.schedule(self.arrivals[switch].peek(), SimEvent::FlowArrival { switch })?;
            }
            SimEvent::PacketEmission { flow } => {
                if let Some(trace) = &mut self.trace {
                    trace.push(TraceRecord::Packet { flow, time: now });
                }
                self.dp.on_packet(flow, now);
                if let Some(cursor) = self.cursors.get_mut(&flow) {
                    cursor.next += 1;
                    match cursor.times.get(cursor.next) {
                        Some(&t) => {
                            q.schedule(t, SimEvent::PacketEmission { flow })?;
                        }
                        None => {
                            self.cursors.remove(&flow);
                        }
                    }
                }
            }
            SimEvent::FlowExpiry { flow } => {
                self.cursors.remove(&flow);
                let gone = self.dp.expire_flow(flow)?;
                let server = gone.server.expect("installed flows carry a server");
                if self.cp.on_flow_expiry(now, server) {
                    q.schedule(now, SimEvent::LsvsCheck)?;
                }
            }
            SimEvent::PollTick { controller } => {
                if self.cp.on_poll_tick(now, controller, &self.dp)? {
                    q.schedule(now, SimEvent::LsvsCheck)?;
                }
                if let Some(p) = self.cp.collection().poll_period() {
                    q.schedule(now + p, SimEvent::PollTick { controller })?;
                }
            }
            SimEvent::SyncTick => {
                self.cp.on_sync_tick(now);
                if let Some(s) = self.cp.distribution().sync_period() {
                    q.schedule(now + s, SimEvent::SyncTick)?;
                }
            }
            SimEvent::LsvsCheck => {
                self.cp.lsvs_check(now);
            }
            SimEvent::MeasureTick => {
                self.measure(now);
                q.schedule(now + self.cfg.window, SimEvent::MeasureTick)?;
            }
        }
        Ok(())
    }

    fn measure(&mut self, now: SimTime) {
        if let Some(audit) = &mut self.audit {
            audit.ticks_checked += 1;
            if !self.dp.conservation_holds() {
                audit.violations.push(now);
            }
        }
        if let Some(trace) = &mut self.trace {
            trace.push(TraceRecord::Tick {
                time: now,
                loads: self.dp.servers().to_vec(),
            });
        }
        let flows = self.dp.servers().iter().map(|s| s.flows as f64).collect();
        let bytes = self.dp.take_window_bytes().into_iter().map(|b| b as f64).collect();
        self.samples.push(MetricSample::from_loads(now, flows, bytes));
    }
}

/// Executes one run of the event simulation.
pub fn simulate(cfg: &RunConfig) -> Result<RunOutput, EngineError> {
    cfg.validate()?;
    let cp = ControlPlane::new(cfg.topology, cfg.collection, cfg.distribution)?;
    let label = |switch: usize, purpose| StreamLabel {
        run: cfg.run,
        switch: switch as u32,
        purpose,
    };
    let arrivals = cfg
        .profile
        .switches
        .iter()
        .enumerate()
        .map(|(k, s)| ArrivalProcess::new(s.flow_rate, RngStream::new(cfg.seed, label(k, Purpose::FlowArrivals))))
        .collect::<Vec<_>>();
    let packet_rngs = (0..cfg.topology.domains)
        .map(|k| RngStream::new(cfg.seed, label(k, Purpose::Packets)))
        .collect();

    let mut q = EventQueue::new();
    if cfg.collection.poll_period().is_some() {
        for controller in 0..cfg.topology.controllers() {
            q.schedule(0.0, SimEvent::PollTick { controller })?;
        }
    }
    if let Some(s) = cfg.distribution.sync_period() {
        q.schedule(s, SimEvent::SyncTick)?;
    }
    for (switch, a) in arrivals.iter().enumerate() {
        q.schedule(a.peek(), SimEvent::FlowArrival { switch })?;
    }
    q.schedule(cfg.window, SimEvent::MeasureTick)?;

    let mut sim = Simulator {
        cfg,
        dp: DataPlane::new(cfg.topology.domains, cfg.profile.payload),
        cp,
        arrivals,
        packet_rngs,
        cursors: HashMap::new(),
        next_flow: 0,
        samples: Vec::with_capacity((cfg.horizon / cfg.window) as usize + 1),
        audit: cfg.audit.then(AuditReport::default),
        trace: cfg.trace.then(Vec::new),
    };

    q.run_until(cfg.horizon, |q, now, ev| sim.handle(q, now, ev))?;

    Ok(RunOutput {
        samples: sim.samples,
        sync_messages: sim.cp.sync_messages(),
        sync_rounds: sim.cp.sync_rounds(),
        flows_generated: sim.next_flow,
        packets_delivered: sim.dp.delivered_packets(),
        events: q.dispatched(),
        audit: sim.audit,
        trace: sim.trace,
    })
}
