//! Flow arrivals and per-flow packet processes.
//!
//! Flows arrive at each switch as an independent Poisson process. Within a
//! flow, packets follow either a Poisson process over the flow lifetime or an
//! On/Off process with Pareto-distributed bursts (in packets, emitted at a
//! fixed rate) and Pareto-distributed idle periods (in seconds).

use thiserror::Error;

use crate::sim::{RngStream, SimTime};

pub type SwitchId = usize;
pub type ServerId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowId(pub u64);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("profile has no switches")]
    Empty,
    #[error("switch {switch}: {what} must be positive, got {value}")]
    NonPositive {
        switch: usize,
        what: &'static str,
        value: f64,
    },
    #[error("flow TTL must be positive, got {0}")]
    Ttl(f64),
    #[error("payload must be positive")]
    Payload,
    #[error("switch {switch}: Pareto shape must satisfy 1 < alpha < 2, got {alpha}")]
    Shape { switch: usize, alpha: f64 },
}

/// How packets are emitted within one flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PacketProcess {
    Poisson,
    /// `burst` and `idle` are the mean On and Off durations in seconds.
    ParetoOnOff { alpha: f64, burst: f64, idle: f64 },
}

/// Traffic parameters of one switch (one client population).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchTraffic {
    /// Flow arrivals per second.
    pub flow_rate: f64,
    /// Packets per second while a flow is sending.
    pub packet_rate: f64,
    pub process: PacketProcess,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficProfile {
    pub switches: Vec<SwitchTraffic>,
    /// Hard timeout of every flow rule, seconds.
    pub ttl: f64,
    /// Bytes per packet.
    pub payload: u64,
}

impl TrafficProfile {
    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.switches.is_empty() {
            return Err(ProfileError::Empty);
        }
        if !(self.ttl > 0.0 && self.ttl.is_finite()) {
            return Err(ProfileError::Ttl(self.ttl));
        }
        if self.payload == 0 {
            return Err(ProfileError::Payload);
        }
        for (switch, s) in self.switches.iter().enumerate() {
            let positive = |what, value: f64| {
                if value > 0.0 && value.is_finite() {
                    Ok(())
                } else {
                    Err(ProfileError::NonPositive {
                        switch,
                        what,
                        value,
                    })
                }
            };
            positive("flow rate", s.flow_rate)?;
            positive("packet rate", s.packet_rate)?;
            if let PacketProcess::ParetoOnOff { alpha, burst, idle } = s.process {
                if !(alpha > 1.0 && alpha < 2.0) {
                    return Err(ProfileError::Shape { switch, alpha });
                }
                positive("mean burst", burst)?;
                positive("mean idle", idle)?;
            }
        }
        Ok(())
    }

    /// Long-run mean number of packets a flow from `switch` sends.
    pub fn mean_packets_per_flow(&self, switch: SwitchId) -> f64 {
        let s = &self.switches[switch];
        let duty = match s.process {
            PacketProcess::Poisson => 1.0,
            PacketProcess::ParetoOnOff { burst, idle, .. } => burst / (burst + idle),
        };
        s.packet_rate * self.ttl * duty
    }

    pub fn mean_bytes_per_flow(&self, switch: SwitchId) -> f64 {
        self.mean_packets_per_flow(switch) * self.payload as f64
    }
}

/// A flow from its arrival at a switch until its rule times out.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub id: FlowId,
    pub origin: SwitchId,
    pub arrival: SimTime,
    pub expiry: SimTime,
    pub server: Option<ServerId>,
    pub bytes_sent: u64,
}

impl Flow {
    pub fn new(id: FlowId, origin: SwitchId, arrival: SimTime, ttl: f64) -> Self {
        Self {
            id,
            origin,
            arrival,
            expiry: arrival + ttl,
            server: None,
            bytes_sent: 0,
        }
    }

    /// Lifetime is the half-open interval `[arrival, expiry)`.
    pub fn is_active_at(&self, t: SimTime) -> bool {
        self.arrival <= t && t < self.expiry
    }
}

/// Inverse CDF of the exponential distribution.
pub fn exponential_from_uniform(u: f64, rate: f64) -> f64 {
    -u.ln() / rate
}

/// Exponential inter-arrival time with mean `1 / rate`.
pub fn next_flow_interarrival(rate: f64, rng: &mut RngStream) -> f64 {
    debug_assert!(rate > 0.0);
    exponential_from_uniform(rng.uniform_open0(), rate)
}

/// Next emission of a Poisson packet process, or `None` once it would fall
/// at or past the flow's expiry.
pub fn next_packet_time_poisson(
    previous: SimTime,
    expiry: SimTime,
    rate: f64,
    rng: &mut RngStream,
) -> Option<SimTime> {
    let t = previous + next_flow_interarrival(rate, rng);
    (t < expiry).then_some(t)
}

/// Inverse CDF of the Pareto distribution: `scale * u^(-1/shape)`.
pub fn pareto_from_uniform(u: f64, shape: f64, scale: f64) -> f64 {
    scale * u.powf(-1.0 / shape)
}

pub fn pareto_sample(shape: f64, scale: f64, rng: &mut RngStream) -> f64 {
    debug_assert!(shape > 1.0 && scale > 0.0);
    pareto_from_uniform(rng.uniform_open0(), shape, scale)
}

/// Scale parameters for the On/Off generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoScales {
    /// Minimum burst length, packets.
    pub on_packets: f64,
    /// Minimum idle time, seconds.
    pub off_seconds: f64,
}

/// Pareto scales that give mean burst `burst` seconds (at `packet_rate`) and
/// mean idle `idle` seconds for the given shape.
pub fn pareto_scales(shape: f64, burst: f64, idle: f64, packet_rate: f64) -> ParetoScales {
    let factor = (shape - 1.0) / shape;
    let burst_packets = burst * packet_rate;
    ParetoScales {
        on_packets: burst_packets * factor,
        off_seconds: idle * factor,
    }
}

/// One On/Off cycle: the burst size in packets and the following idle time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffCycle {
    pub packets: u64,
    pub idle: f64,
}

pub fn draw_on_off_cycle(shape: f64, scales: ParetoScales, rng: &mut RngStream) -> OnOffCycle {
    let packets = pareto_sample(shape, scales.on_packets, rng).ceil().max(1.0) as u64;
    let idle = pareto_sample(shape, scales.off_seconds, rng);
    OnOffCycle { packets, idle }
}

/// Emission times of an On/Off flow starting with a burst at `start`.
/// Packets are spaced `1 / packet_rate` apart within a burst; anything at or
/// past `expiry` is dropped.
pub fn on_off_packet_schedule(
    start: SimTime,
    expiry: SimTime,
    packet_rate: f64,
    shape: f64,
    scales: ParetoScales,
    rng: &mut RngStream,
) -> Vec<SimTime> {
    let spacing = 1.0 / packet_rate;
    let mut out = Vec::new();
    let mut burst_start = start;
    while burst_start < expiry {
        let cycle = draw_on_off_cycle(shape, scales, rng);
        for k in 0..cycle.packets {
            let t = burst_start + k as f64 * spacing;
            if t >= expiry {
                return out;
            }
            out.push(t);
        }
        burst_start += cycle.packets as f64 * spacing + cycle.idle;
    }
    out
}

/// Full emission schedule of a flow from `switch`.
pub fn packet_schedule(
    traffic: &SwitchTraffic,
    arrival: SimTime,
    expiry: SimTime,
    rng: &mut RngStream,
) -> Vec<SimTime> {
    match traffic.process {
        PacketProcess::Poisson => {
            let mut out = Vec::with_capacity((traffic.packet_rate * (expiry - arrival)) as usize + 8);
            let mut t = arrival;
            while let Some(next) = next_packet_time_poisson(t, expiry, traffic.packet_rate, rng) {
                out.push(next);
                t = next;
            }
            out
        }
        PacketProcess::ParetoOnOff { alpha, burst, idle } => {
            let scales = pareto_scales(alpha, burst, idle, traffic.packet_rate);
            on_off_packet_schedule(arrival, expiry, traffic.packet_rate, alpha, scales, rng)
        }
    }
}

/// Flow-arrival clock of one switch.
#[derive(Debug, Clone)]
pub struct ArrivalProcess {
    rate: f64,
    rng: RngStream,
    next: SimTime,
}

impl ArrivalProcess {
    pub fn new(rate: f64, mut rng: RngStream) -> Self {
        let next = next_flow_interarrival(rate, &mut rng);
        Self { rate, rng, next }
    }

    pub fn peek(&self) -> SimTime {
        self.next
    }

    /// Returns the pending arrival time and draws the one after it.
    pub fn advance(&mut self) -> SimTime {
        let t = self.next;
        self.next = t + next_flow_interarrival(self.rate, &mut self.rng);
        t
    }
}

/// Parameter tables for the shipped traffic loads.
pub mod presets {
    use super::*;

    pub const PAYLOAD: u64 = 4096;
    pub const TTL: f64 = 2.0;
    pub const PARETO_SHAPE: f64 = 1.5;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Variation {
        Low,
        High,
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Family {
        /// Poisson flows and Poisson packets.
        Simple,
        /// Poisson flows, On/Off packets with the two-domain burst/idle values.
        Pareto,
        /// Poisson flows, On/Off packets with the burst/idle values used for
        /// the controller-count study.
        ParetoMulti,
    }

    const FLOW_LV: [f64; 4] = [6.0, 4.0, 5.0, 4.0];
    const FLOW_HV: [f64; 4] = [8.0, 2.0, 4.0, 6.0];
    const PKT_LV: [f64; 4] = [34.0, 30.0, 32.0, 28.0];
    const PKT_HV: [f64; 4] = [48.0, 16.0, 32.0, 20.0];

    const BURST_LV2: [f64; 2] = [0.6, 0.4];
    const IDLE_LV2: [f64; 2] = [0.4, 0.6];
    const BURST_HV2: [f64; 2] = [0.8, 0.2];
    const IDLE_HV2: [f64; 2] = [0.2, 0.8];
    const BURST_MULTI: [f64; 4] = [0.6, 0.4, 0.5, 0.8];
    const IDLE_MULTI: [f64; 4] = [0.4, 0.6, 0.5, 0.2];

    /// Shipped profile for `domains` switches, or `None` when the tables do
    /// not cover that combination.
    pub fn profile(family: Family, variation: Variation, domains: usize) -> Option<TrafficProfile> {
        let supported = match family {
            Family::Simple | Family::ParetoMulti => (2..=4).contains(&domains),
            Family::Pareto => domains == 2,
        };
        if !supported {
            return None;
        }
        let (flows, pkts) = match variation {
            Variation::Low => (FLOW_LV, PKT_LV),
            Variation::High => (FLOW_HV, PKT_HV),
        };
        let switches = (0..domains)
            .map(|k| {
                let process = match family {
                    Family::Simple => PacketProcess::Poisson,
                    Family::Pareto => {
                        let (burst, idle) = match variation {
                            Variation::Low => (BURST_LV2, IDLE_LV2),
                            Variation::High => (BURST_HV2, IDLE_HV2),
                        };
                        PacketProcess::ParetoOnOff {
                            alpha: PARETO_SHAPE,
                            burst: burst[k],
                            idle: idle[k],
                        }
                    }
                    Family::ParetoMulti => PacketProcess::ParetoOnOff {
                        alpha: PARETO_SHAPE,
                        burst: BURST_MULTI[k],
                        idle: IDLE_MULTI[k],
                    },
                };
                SwitchTraffic {
                    flow_rate: flows[k],
                    packet_rate: pkts[k],
                    process,
                }
            })
            .collect();
        Some(TrafficProfile {
            switches,
            ttl: TTL,
            payload: PAYLOAD,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Purpose, StreamLabel};

    fn rng(seed: u64) -> RngStream {
        RngStream::new(
            seed,
            StreamLabel {
                run: 0,
                switch: 0,
                purpose: Purpose::Test,
            },
        )
    }

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn inverse_cdf_identity() {
        let r = 4.0;
        assert!((exponential_from_uniform((-1.0f64).exp(), r) - 1.0 / r).abs() < 1e-15);
        assert_eq!(pareto_from_uniform(1.0, 1.5, 0.2), 0.2);
    }

    #[test]
    fn exponential_moments() {
        let mut g = rng(11);
        let xs: Vec<f64> = (0..100_000).map(|_| next_flow_interarrival(6.0, &mut g)).collect();
        let (m, _) = mean_var(&xs);
        assert!((m - 1.0 / 6.0).abs() / (1.0 / 6.0) < 0.02, "mean {m}");
        assert!(xs.iter().all(|&x| x >= 0.0));

        let mut g = rng(12);
        let xs: Vec<f64> = (0..100_000).map(|_| next_flow_interarrival(4.0, &mut g)).collect();
        let (_, v) = mean_var(&xs);
        assert!((v - 1.0 / 16.0).abs() / (1.0 / 16.0) < 0.05, "var {v}");
    }

    #[test]
    fn poisson_packets_per_flow() {
        let traffic = SwitchTraffic {
            flow_rate: 6.0,
            packet_rate: 34.0,
            process: PacketProcess::Poisson,
        };
        let mut g = rng(3);
        let n = 20_000;
        let total: usize = (0..n)
            .map(|_| packet_schedule(&traffic, 0.0, 2.0, &mut g).len())
            .sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 68.0).abs() / 68.0 < 0.03, "mean packets {mean}");

        let traffic = SwitchTraffic {
            packet_rate: 30.0,
            ..traffic
        };
        let bytes: u64 = (0..n)
            .map(|_| packet_schedule(&traffic, 5.0, 7.0, &mut g).len() as u64 * 4096)
            .sum();
        let mean = bytes as f64 / n as f64;
        let expected = 30.0 * 2.0 * 4096.0;
        assert!((mean - expected).abs() / expected < 0.03);
    }

    #[test]
    fn poisson_emission_past_expiry_ends_flow() {
        let mut g = rng(5);
        // With expiry equal to the previous emission nothing can follow.
        assert_eq!(next_packet_time_poisson(1.0, 1.0, 34.0, &mut g), None);
        let sched = packet_schedule(
            &SwitchTraffic {
                flow_rate: 1.0,
                packet_rate: 500.0,
                process: PacketProcess::Poisson,
            },
            3.0,
            3.1,
            &mut g,
        );
        assert!(sched.iter().all(|&t| (3.0..3.1).contains(&t)));
        assert!(sched.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pareto_mean_and_tail() {
        let (alpha, m) = (1.5, 0.2);
        let mut g = rng(21);
        let xs: Vec<f64> = (0..100_000).map(|_| pareto_sample(alpha, m, &mut g)).collect();
        assert!(xs.iter().all(|&x| x >= m));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let expected = alpha * m / (alpha - 1.0);
        assert!((expected - 0.6).abs() < 1e-12);
        assert!((mean - expected).abs() / expected < 0.05, "mean {mean}");

        // P(X > 2m) = 2^-1.5; binomial standard error at n = 1e5 is ~1.3e-3.
        let ccdf = xs.iter().filter(|&&x| x > 2.0 * m).count() as f64 / xs.len() as f64;
        let want = 2f64.powf(-1.5);
        assert!((ccdf - want).abs() < 4.0 * (want * (1.0 - want) / 1e5).sqrt());
    }

    #[test]
    fn pareto_scale_formulas() {
        let s = pareto_scales(1.5, 0.6, 0.4, 34.0);
        assert!((s.on_packets - 6.8).abs() < 1e-12);
        assert!((s.off_seconds - 0.4 / 3.0).abs() < 1e-12);
        assert_eq!(pareto_scales(1.5, 0.0, 0.4, 34.0).on_packets, 0.0);
    }

    #[test]
    fn on_off_burst_spacing_and_truncation() {
        // Huge scale forces long bursts; the first burst starts at the flow start.
        let scales = ParetoScales {
            on_packets: 3.0,
            off_seconds: 10.0,
        };
        let mut g = rng(8);
        let sched = on_off_packet_schedule(1.0, 100.0, 34.0, 1.5, scales, &mut g);
        assert!(sched.len() >= 3);
        for k in 0..3 {
            assert!((sched[k] - (1.0 + k as f64 / 34.0)).abs() < 1e-12);
        }
        let short = on_off_packet_schedule(1.0, 1.05, 34.0, 1.5, scales, &mut g);
        assert!(short.iter().all(|&t| t < 1.05));
        assert_eq!(short.len(), 2); // 1.0 and 1.0294
    }

    #[test]
    fn on_off_duty_cycle() {
        let (alpha, burst, idle, p) = (1.5, 0.6, 0.4, 34.0);
        let scales = pareto_scales(alpha, burst, idle, p);
        let mut g = rng(31);
        let (mut on, mut off) = (0.0, 0.0);
        for _ in 0..10_000 {
            let c = draw_on_off_cycle(alpha, scales, &mut g);
            on += c.packets as f64 / p;
            off += c.idle;
        }
        let duty = on / (on + off);
        assert!((duty - 0.6).abs() / 0.6 < 0.05, "duty {duty}");
    }

    #[test]
    fn arrival_counts_match_rate() {
        let horizon = 300.0;
        let mut counts = Vec::new();
        for run in 0..30 {
            let mut a = ArrivalProcess::new(
                6.0,
                RngStream::new(
                    9,
                    StreamLabel {
                        run,
                        switch: 0,
                        purpose: Purpose::FlowArrivals,
                    },
                ),
            );
            let mut n = 0;
            while a.advance() <= horizon {
                n += 1;
            }
            counts.push(n as f64);
        }
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        assert!((mean - 1800.0).abs() / 1800.0 < 0.03);
    }

    #[test]
    fn profile_validation() {
        let mut p = presets::profile(presets::Family::Pareto, presets::Variation::Low, 2).unwrap();
        assert_eq!(p.validate(), Ok(()));
        p.switches[0].process = PacketProcess::ParetoOnOff {
            alpha: 2.0,
            burst: 0.6,
            idle: 0.4,
        };
        assert!(matches!(p.validate(), Err(ProfileError::Shape { .. })));
        p.switches[0].process = PacketProcess::ParetoOnOff {
            alpha: 1.5,
            burst: 0.0,
            idle: 0.4,
        };
        assert!(matches!(p.validate(), Err(ProfileError::NonPositive { .. })));
        p.ttl = 0.0;
        assert_eq!(p.validate(), Err(ProfileError::Ttl(0.0)));
    }

    #[test]
    fn preset_tables() {
        use presets::*;
        let lv4 = profile(Family::Simple, Variation::Low, 4).unwrap();
        let rates: Vec<f64> = lv4.switches.iter().map(|s| s.flow_rate).collect();
        assert_eq!(rates, [6.0, 4.0, 5.0, 4.0]);
        let hv3 = profile(Family::Simple, Variation::High, 3).unwrap();
        let pk: Vec<f64> = hv3.switches.iter().map(|s| s.packet_rate).collect();
        assert_eq!(pk, [48.0, 16.0, 32.0]);
        assert!(profile(Family::Pareto, Variation::High, 3).is_none());
        assert!(profile(Family::Simple, Variation::Low, 1).is_none());
        let hv = profile(Family::Pareto, Variation::High, 2).unwrap();
        assert_eq!(
            hv.switches[1].process,
            PacketProcess::ParetoOnOff {
                alpha: 1.5,
                burst: 0.2,
                idle: 0.8
            }
        );
    }
}
