//! Recurrence model of the load balancer.
//!
//! The model advances once per flow arrival. Between arrival `i` and `i + 1`
//! some flows expire (`E`), the deciding controller computes a decision
//! parameter from the loads it believes in, and exactly one new flow is
//! assigned (`M`). For two servers the relative difference is tracked through
//! `Δ = L1 - L2` and `T = L1 + L2`; for `N` servers the mean is carried by its
//! own recurrence and the standard deviation is evaluated from it.
//!
//! Stale views are resolved against a history of post-step loads: a value "as
//! of" time `τ` is the latest recorded state at or before `τ`.

use std::collections::VecDeque;

use crate::controlplane::{lb_decide, Collection, Distribution};
use crate::metrics::{measurement_grid, MetricSample};
use crate::sim::{Purpose, RngStream, SimTime, StreamLabel};
use crate::simulator::{EngineError, RunConfig, RunOutput};
use crate::traffic::{next_flow_interarrival, ServerId};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    /// Arrival events processed so far.
    pub index: u64,
    pub loads: Vec<f64>,
    /// Sum of loads, advanced by its own recurrence.
    pub total: f64,
    /// `L1 - L2`, advanced by its own recurrence (two servers only).
    pub delta: f64,
    /// Mean load, advanced by its own recurrence.
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiStep {
    pub server: ServerId,
    pub decision: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaStep {
    pub server: ServerId,
    pub sigma: f64,
}

impl ModelState {
    pub fn new(servers: usize) -> Self {
        assert!(servers >= 1);
        Self {
            index: 0,
            loads: vec![0.0; servers],
            total: 0.0,
            delta: 0.0,
            mean: 0.0,
        }
    }

    pub fn servers(&self) -> usize {
        self.loads.len()
    }

    pub fn xi(&self) -> f64 {
        if self.total == 0.0 {
            0.0
        } else {
            self.delta.abs() / self.total
        }
    }

    /// Standard deviation around the recurrence mean.
    pub fn sigma(&self) -> f64 {
        let n = self.servers() as f64;
        (self.loads.iter().map(|l| (l - self.mean).powi(2)).sum::<f64>() / n).sqrt()
    }

    fn apply(&mut self, expired: &[f64], server: ServerId, increment: f64) {
        debug_assert_eq!(expired.len(), self.servers());
        let n = self.servers() as f64;
        let gone: f64 = expired.iter().sum();
        for (k, (load, e)) in self.loads.iter_mut().zip(expired).enumerate() {
            *load = *load - e + if k == server { increment } else { 0.0 };
        }
        self.total = self.total + increment - gone;
        if self.servers() == 2 {
            let m = if server == 0 { increment } else { -increment };
            self.delta = self.delta + m + (expired[1] - expired[0]);
        }
        self.mean = self.mean - gone / n + increment / n;
        self.index += 1;
    }

    /// Two-server step. Without `decision` the decision parameter is the
    /// exact one, `Δ - E1 + E2`; otherwise it is `decision[0] - decision[1]`
    /// (the loads the deciding controller believes in). A non-positive
    /// decision parameter sends the flow to server 0.
    pub fn step_xi(&mut self, expired: [f64; 2], increment: f64, decision: Option<[f64; 2]>) -> XiStep {
        assert_eq!(self.servers(), 2, "step_xi needs two servers");
        let d = match decision {
            None => self.delta - expired[0] + expired[1],
            Some([a, b]) => a - b,
        };
        let server = if d <= 0.0 { 0 } else { 1 };
        self.apply(&expired, server, increment);
        XiStep {
            server,
            decision: d,
            xi: self.xi(),
        }
    }

    /// `N`-server step. The flow goes to the argmin of `decision` (or of
    /// `L - E` when absent), ties to the lowest index.
    pub fn step_sigma(&mut self, expired: &[f64], increment: f64, decision: Option<&[f64]>) -> SigmaStep {
        let server = match decision {
            Some(view) => lb_decide(view.iter().copied()),
            None => lb_decide(self.loads.iter().zip(expired).map(|(l, e)| l - e)),
        };
        self.apply(expired, server, increment);
        SigmaStep {
            server,
            sigma: self.sigma(),
        }
    }

    /// Applies an assignment decided elsewhere (used to carry a second set of
    /// load units alongside the deciding one).
    pub fn advance(&mut self, expired: &[f64], server: ServerId, increment: f64) {
        self.apply(expired, server, increment);
    }
}

/// How a stale value is located in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LagMode {
    /// Value at the most recent poll / exchange instant (`⌊t/s⌋·s`).
    #[default]
    LastTick,
    /// Value exactly one period ago (`t - s`).
    Sliding,
}

impl LagMode {
    fn observe(self, t: SimTime, period: f64) -> SimTime {
        match self {
            LagMode::LastTick => (t / period).floor() * period,
            LagMode::Sliding => (t - period).max(0.0),
        }
    }
}

/// Information age seen by a deciding controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagPolicy {
    /// Polling period; zero means own servers are known exactly.
    pub poll: f64,
    /// Exchange period; `None` means remote values are never refreshed,
    /// `Some(0.0)` means they are always current.
    pub sync: Option<f64>,
    pub mode: LagMode,
}

impl LagPolicy {
    pub fn zero() -> Self {
        Self {
            poll: 0.0,
            sync: Some(0.0),
            mode: LagMode::LastTick,
        }
    }

    pub fn from_policies(collection: Collection, distribution: Distribution, mode: LagMode) -> Result<Self, EngineError> {
        let sync = match distribution {
            Distribution::None => None,
            Distribution::Periodic { period } => Some(period),
            Distribution::Lsvs { .. } => {
                return Err(EngineError::Unsupported(
                    "the analytic model has no LSVS variant; use the event engine".into(),
                ))
            }
        };
        Ok(Self {
            poll: collection.poll_period().unwrap_or(0.0),
            sync,
            mode,
        })
    }

    /// Time at which a server's value is read, or `None` for the exact value.
    pub fn observe_time(&self, t: SimTime, local: bool) -> Option<SimTime> {
        let poll = |at: SimTime| if self.poll > 0.0 { Some(self.mode.observe(at, self.poll)) } else { None };
        if local {
            return poll(t);
        }
        let synced = match self.sync {
            None => 0.0,
            Some(s) if s > 0.0 => self.mode.observe(t, s),
            Some(_) => t,
        };
        match (poll(synced), self.sync) {
            (Some(at), _) => Some(at),
            (None, Some(s)) if s == 0.0 => None,
            (None, _) => Some(synced),
        }
    }
}

/// Loads after every step, for "as of" lookups.
#[derive(Debug, Clone)]
pub struct LoadHistory {
    entries: Vec<(SimTime, Vec<f64>)>,
}

impl LoadHistory {
    pub fn new(servers: usize) -> Self {
        Self {
            entries: vec![(0.0, vec![0.0; servers])],
        }
    }

    pub fn record(&mut self, t: SimTime, loads: &[f64]) {
        debug_assert!(self.entries.last().is_none_or(|(last, _)| *last <= t));
        self.entries.push((t, loads.to_vec()));
    }

    /// Latest entry at or before `t`.
    pub fn at(&self, t: SimTime) -> &[f64] {
        let idx = self.entries.partition_point(|(time, _)| *time <= t);
        &self.entries[idx.saturating_sub(1)].1
    }
}

struct Pending {
    expiry: SimTime,
    server: ServerId,
    bytes: f64,
}

fn arrival_times(cfg: &RunConfig) -> Vec<(SimTime, usize)> {
    let mut out = Vec::new();
    for (k, s) in cfg.profile.switches.iter().enumerate() {
        let mut rng = RngStream::new(
            cfg.seed,
            StreamLabel {
                run: cfg.run,
                switch: k as u32,
                purpose: Purpose::FlowArrivals,
            },
        );
        let mut t = next_flow_interarrival(s.flow_rate, &mut rng);
        while t <= cfg.horizon {
            out.push((t, k));
            t += next_flow_interarrival(s.flow_rate, &mut rng);
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

/// Runs the recurrence over one realization of the arrival process.
///
/// Flow arrivals use the same random streams as the event simulator, so a
/// model run and a simulator run with equal seed and run index see identical
/// arrivals. Expiries are the TTL timeouts between arrivals. Flows count as
/// one unit in flow mode and as their mean byte volume in byte mode; the
/// deciding units follow the collection policy (flows when passive, bytes
/// when active).
pub fn run_model(cfg: &RunConfig, mode: LagMode) -> Result<RunOutput, EngineError> {
    cfg.validate()?;
    let lag = LagPolicy::from_policies(cfg.collection, cfg.distribution, mode)?;
    let n = cfg.topology.domains;
    let bytes_mode = matches!(cfg.collection, Collection::Active { .. });

    let mut flows = ModelState::new(n);
    let mut bytes = ModelState::new(n);
    let mut history = LoadHistory::new(n);
    let mut pending: VecDeque<Pending> = VecDeque::new();
    let grid = measurement_grid(cfg.horizon, cfg.window);
    let mut next_tick = 0usize;
    let mut samples = Vec::with_capacity(grid.len());

    let sample_at = |tick: SimTime, flows: &ModelState, bytes: &ModelState, pending: &VecDeque<Pending>| {
        let mut f = flows.loads.clone();
        let mut b = bytes.loads.clone();
        for p in pending.iter().take_while(|p| p.expiry <= tick) {
            f[p.server] -= 1.0;
            b[p.server] -= p.bytes;
        }
        MetricSample::from_loads(tick, f, b)
    };

    for (t, origin) in arrival_times(cfg) {
        while next_tick < grid.len() && grid[next_tick] < t {
            samples.push(sample_at(grid[next_tick], &flows, &bytes, &pending));
            next_tick += 1;
        }

        let mut e_flows = vec![0.0; n];
        let mut e_bytes = vec![0.0; n];
        while pending.front().is_some_and(|p| p.expiry < t) {
            let p = pending.pop_front().expect("front checked");
            e_flows[p.server] += 1.0;
            e_bytes[p.server] += p.bytes;
        }

        let controller = cfg.topology.owner(origin);
        let (decider, expired) = if bytes_mode { (&bytes, &e_bytes) } else { (&flows, &e_flows) };
        let mut view = Vec::with_capacity(n);
        let mut fresh = true;
        for k in 0..n {
            let local = cfg.topology.owner(k) == controller;
            match lag.observe_time(t, local) {
                None => view.push(decider.loads[k] - expired[k]),
                Some(at) => {
                    fresh = false;
                    view.push(history.at(at)[k]);
                }
            }
        }
        let decision = (!fresh).then_some(view);

        let volume = cfg.profile.mean_bytes_per_flow(origin);
        let (dec_state, other, dec_exp, other_exp, inc, other_inc) = if bytes_mode {
            (&mut bytes, &mut flows, &e_bytes, &e_flows, volume, 1.0)
        } else {
            (&mut flows, &mut bytes, &e_flows, &e_bytes, 1.0, volume)
        };
        let server = if n == 2 {
            let d = decision.as_deref().map(|v| [v[0], v[1]]);
            dec_state.step_xi([dec_exp[0], dec_exp[1]], inc, d).server
        } else {
            dec_state.step_sigma(dec_exp, inc, decision.as_deref()).server
        };
        other.advance(other_exp, server, other_inc);
        history.record(t, &dec_state.loads);
        pending.push_back(Pending {
            expiry: t + cfg.profile.ttl,
            server,
            bytes: volume,
        });
    }
    while next_tick < grid.len() {
        samples.push(sample_at(grid[next_tick], &flows, &bytes, &pending));
        next_tick += 1;
    }

    let rounds = lag
        .sync
        .filter(|s| *s > 0.0 && !cfg.topology.single_controller)
        .map_or(0, |s| (cfg.horizon / s + 1e-9).floor() as u64);
    let c = cfg.topology.controllers() as u64;
    Ok(RunOutput {
        samples,
        sync_messages: rounds * c * (c - 1),
        sync_rounds: rounds,
        flows_generated: flows.index,
        packets_delivered: 0,
        events: flows.index,
        audit: None,
        trace: None,
    })
}
