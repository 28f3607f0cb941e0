//! Deterministic discrete-event engine.
//!
//! Time is kept as integer picoseconds so that both MTU and header
//! serialization times at 100 Gb/s are exact (120 000 ps and 5 120 ps).
//! Events with equal fire time run in the order they were scheduled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PS_PER_NS: u64 = 1_000;
const PS_PER_US: u64 = 1_000_000;
const PS_PER_SEC: u128 = 1_000_000_000_000;

/// A point in (or span of) simulated time, in picoseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_ps(ps: u64) -> Self {
        SimTime(ps)
    }

    pub const fn from_ns(ns: u64) -> Self {
        SimTime(ns * PS_PER_NS)
    }

    pub const fn from_us(us: u64) -> Self {
        SimTime(us * PS_PER_US)
    }

    /// Rounds to the nearest picosecond.
    pub fn from_us_f64(us: f64) -> Self {
        SimTime((us * PS_PER_US as f64).round().max(0.0) as u64)
    }

    pub const fn as_ps(self) -> u64 {
        self.0
    }

    pub fn as_ns(self) -> f64 {
        self.0 as f64 / PS_PER_NS as f64
    }

    pub fn as_us(self) -> f64 {
        self.0 as f64 / PS_PER_US as f64
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_add(rhs.0).expect("simulated time overflow"))
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        *self = *self + rhs;
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_sub(rhs.0).expect("negative simulated duration"))
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ns", self.as_ns())
    }
}

/// Link or meter rate in bits per second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rate(u64);

impl Rate {
    pub const fn bps(bits_per_sec: u64) -> Self {
        Rate(bits_per_sec)
    }

    pub const fn gbps(g: u64) -> Self {
        Rate(g * 1_000_000_000)
    }

    pub const fn as_bps(self) -> u64 {
        self.0
    }

    pub fn as_gbps(self) -> f64 {
        self.0 as f64 / 1e9
    }

    /// `self * num / den`, e.g. a quarter of line rate.
    pub fn scaled(self, num: u64, den: u64) -> Rate {
        Rate(((self.0 as u128 * num as u128) / den as u128) as u64)
    }

    /// Time to put `bytes` on the wire, rounded up to the next picosecond.
    pub fn serialization_time(self, bytes: u32) -> SimTime {
        assert!(self.0 > 0, "serialization on a zero-rate link");
        let bits = bytes as u128 * 8;
        SimTime(((bits * PS_PER_SEC).div_ceil(self.0 as u128)) as u64)
    }
}

/// A point-to-point serializing link.
#[derive(Clone, Debug)]
pub struct Link {
    rate: Rate,
    latency: SimTime,
    busy_until: SimTime,
}

impl Link {
    pub fn new(rate: Rate, latency: SimTime) -> Result<Self> {
        if rate.as_bps() == 0 {
            return Err(Error::Config("link rate must be positive".into()));
        }
        Ok(Link { rate, latency, busy_until: SimTime::ZERO })
    }

    pub fn rate(&self) -> Rate {
        self.rate
    }

    pub fn latency(&self) -> SimTime {
        self.latency
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    pub fn is_idle(&self, now: SimTime) -> bool {
        self.busy_until <= now
    }

    /// Reserves the wire for `bytes` starting no earlier than `now` and
    /// returns the time the last bit leaves.
    pub fn serialize(&mut self, bytes: u32, now: SimTime) -> SimTime {
        assert!(bytes > 0, "zero-byte transmission");
        let start = self.busy_until.max(now);
        self.busy_until = start + self.rate.serialization_time(bytes);
        self.busy_until
    }
}

/// Serde adapter that reads and writes a [`SimTime`] as (possibly
/// fractional) nanoseconds.
pub mod serde_ns {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::SimTime;

    pub fn serialize<S: Serializer>(t: &SimTime, s: S) -> Result<S::Ok, S::Error> {
        if t.as_ps().is_multiple_of(1_000) {
            s.serialize_u64(t.as_ps() / 1_000)
        } else {
            s.serialize_f64(t.as_ns())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SimTime, D::Error> {
        let ns = f64::deserialize(d)?;
        if !(ns >= 0.0 && ns.is_finite()) {
            return Err(serde::de::Error::custom(format!("time must be a non-negative number of ns, got {ns}")));
        }
        Ok(SimTime::from_ps((ns * 1_000.0).round() as u64))
    }
}

struct Scheduled<E> {
    at: SimTime,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Scheduled<E> {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.seq == other.seq
    }
}

impl<E> Eq for Scheduled<E> {}

impl<E> PartialOrd for Scheduled<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Scheduled<E> {
    // BinaryHeap is a max-heap; invert so the earliest (time, seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.at.cmp(&self.at).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Something that reacts to events and may schedule more of them.
pub trait Process<E> {
    fn handle(&mut self, event: E, sched: &mut Scheduler<E>);
}

/// Global event queue and simulation clock.
pub struct Scheduler<E> {
    now: SimTime,
    next_seq: u64,
    executed: u64,
    heap: BinaryHeap<Scheduled<E>>,
}

impl<E> Default for Scheduler<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Scheduler<E> {
    pub fn new() -> Self {
        Scheduler { now: SimTime::ZERO, next_seq: 0, executed: 0, heap: BinaryHeap::new() }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.heap.len()
    }

    pub fn executed(&self) -> u64 {
        self.executed
    }

    /// Schedules `event` at absolute time `at`.
    ///
    /// Panics if `at` lies in the past: that is a bug in the caller, not a
    /// recoverable condition.
    pub fn schedule(&mut self, at: SimTime, event: E) {
        assert!(at >= self.now, "event scheduled in the past: {at} < {}", self.now);
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Scheduled { at, seq, event });
    }

    pub fn schedule_in(&mut self, delay: SimTime, event: E) {
        self.schedule(self.now + delay, event);
    }

    /// Removes the next event and advances the clock to its fire time.
    pub fn pop(&mut self) -> Option<(SimTime, E)> {
        let next = self.heap.pop()?;
        self.now = next.at;
        self.executed += 1;
        Some((next.at, next.event))
    }

    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|s| s.at)
    }

    /// Runs every event with fire time `<= until`, then sets the clock to `until`.
    pub fn run_until<P: Process<E>>(&mut self, until: SimTime, process: &mut P) {
        assert!(until >= self.now, "run_until into the past");
        while self.peek_time().is_some_and(|t| t <= until) {
            let (_, ev) = self.pop().expect("peeked");
            process.handle(ev, self);
        }
        self.now = until;
    }

    /// Runs until the queue is empty.
    pub fn run<P: Process<E>>(&mut self, process: &mut P) {
        while let Some((_, ev)) = self.pop() {
            process.handle(ev, self);
        }
    }
}
