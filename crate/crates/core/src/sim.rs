//! Event queue, simulated clock and seeded random streams.
//!
//! Events are dispatched in `(time, class, insertion sequence)` order. The
//! class lets simultaneous events of different kinds resolve in a fixed order
//! (ticks before arrivals before expiries before measurements); within a class
//! ties fall back to FIFO.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Simulated seconds.
pub type SimTime = f64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("cannot schedule event at t={at} in the past (now={now})")]
    ScheduleInPast { at: SimTime, now: SimTime },
    #[error("event time {0} is not a finite number")]
    NonFiniteTime(SimTime),
}

/// Monotone simulated clock, starting at zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimClock {
    now: SimTime,
}

impl SimClock {
    pub fn now(&self) -> SimTime {
        self.now
    }

    fn advance_to(&mut self, t: SimTime) {
        debug_assert!(t >= self.now, "clock moved backwards: {} -> {}", self.now, t);
        self.now = t;
    }
}

/// Handle returned by [`EventQueue::schedule`]; the insertion sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventHandle(pub u64);

/// Tie-break class for events scheduled at the same instant. Lower dispatches first.
pub trait EventClass {
    fn class(&self) -> u8 {
        0
    }
}

struct Entry<E> {
    time: SimTime,
    class: u8,
    seq: u64,
    event: E,
}

impl<E> Entry<E> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.class.cmp(&other.class))
            .then(self.seq.cmp(&other.seq))
    }
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap
        other.key_cmp(self)
    }
}

/// Future event set plus the simulated clock.
pub struct EventQueue<E> {
    heap: BinaryHeap<Entry<E>>,
    clock: SimClock,
    next_seq: u64,
    dispatched: u64,
}

impl<E: EventClass> Default for EventQueue<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E: EventClass> EventQueue<E> {
    pub fn new() -> Self {
        Self {
            heap: BinaryHeap::with_capacity(256),
            clock: SimClock::default(),
            next_seq: 0,
            dispatched: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.clock.now()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Total events dispatched since construction.
    pub fn dispatched(&self) -> u64 {
        self.dispatched
    }

    pub fn schedule(&mut self, time: SimTime, event: E) -> Result<EventHandle, SimError> {
        if !time.is_finite() {
            return Err(SimError::NonFiniteTime(time));
        }
        if time < self.clock.now() {
            return Err(SimError::ScheduleInPast {
                at: time,
                now: self.clock.now(),
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry {
            time,
            class: event.class(),
            seq,
            event,
        });
        Ok(EventHandle(seq))
    }

    /// Time of the next pending event, if any.
    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|e| e.time)
    }

    /// Pops the next event if it is due at or before `t_end`, advancing the clock.
    pub fn pop_until(&mut self, t_end: SimTime) -> Option<(SimTime, E)> {
        if self.heap.peek()?.time > t_end {
            return None;
        }
        let entry = self.heap.pop()?;
        self.clock.advance_to(entry.time);
        self.dispatched += 1;
        Some((entry.time, entry.event))
    }

    /// Dispatches every event with `time <= t_end` (inclusive) through
    /// `handler`, then sets the clock to `t_end`. Handlers may schedule more
    /// events; those due within the horizon are dispatched in the same call.
    pub fn run_until<F, Err>(&mut self, t_end: SimTime, mut handler: F) -> Result<u64, Err>
    where
        F: FnMut(&mut Self, SimTime, E) -> Result<(), Err>,
        Err: From<SimError>,
    {
        if t_end < self.clock.now() {
            return Err(SimError::ScheduleInPast {
                at: t_end,
                now: self.clock.now(),
            }
            .into());
        }
        let mut count = 0;
        while let Some((t, ev)) = self.pop_until(t_end) {
            handler(self, t, ev)?;
            count += 1;
        }
        self.clock.advance_to(t_end);
        Ok(count)
    }
}

/// What a random stream is used for. Part of the stream label so that each
/// purpose draws from its own sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    FlowArrivals = 1,
    Packets = 2,
    Test = 0xff,
}

/// Identifies one independent random stream inside an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamLabel {
    pub run: u32,
    pub switch: u32,
    pub purpose: Purpose,
}

/// Seeded ChaCha stream. The 256-bit key is derived from the base seed and
/// the run index; switch and purpose select the ChaCha stream id, so streams
/// never overlap and are platform independent.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, label: StreamLabel) -> Self {
        let mut state = seed ^ (u64::from(label.run) << 32);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream((u64::from(label.switch) << 8) | label.purpose as u64);
        Self { rng }
    }

    /// Uniform draw on the half-open interval (0, 1].
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}
