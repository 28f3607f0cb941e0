//! Color-blind two-rate three-color marker (RFC 2698 semantics).
//!
//! Ingress pipelines use these to emulate a virtual output queue for each
//! egress port. Tokens are refilled lazily on every `execute` call.

use serde::{Deserialize, Serialize};

use crate::packet::DEFAULT_MTU;
use crate::sim::{Rate, SimTime};

/// Default committed and peak burst: two MTUs.
pub const DEFAULT_BURST_BYTES: u32 = 2 * DEFAULT_MTU;

// Tokens are held in units of 1/(8e12) byte so that one picosecond at
// `rate` bits/s refills exactly `rate` units. Everything stays integral.
const UNITS_PER_BYTE: u128 = 8 * 1_000_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Color {
    Green,
    Yellow,
    Red,
}

#[derive(Clone, Debug)]
pub struct TrTcmMeter {
    cir: Rate,
    pir: Rate,
    cbs: u32,
    pbs: u32,
    c_tokens: u128,
    p_tokens: u128,
    last_update: SimTime,
}

impl TrTcmMeter {
    /// Buckets start full.
    pub fn new(cir: Rate, pir: Rate, cbs: u32, pbs: u32) -> Self {
        assert!(cir <= pir, "CIR {cir:?} exceeds PIR {pir:?}");
        assert!(pir.as_bps() > 0, "meter rate must be positive");
        TrTcmMeter {
            cir,
            pir,
            cbs,
            pbs,
            c_tokens: cbs as u128 * UNITS_PER_BYTE,
            p_tokens: pbs as u128 * UNITS_PER_BYTE,
            last_update: SimTime::ZERO,
        }
    }

    /// Both rates equal, both bursts `burst` bytes.
    pub fn single_rate(rate: Rate, burst: u32) -> Self {
        Self::new(rate, rate, burst, burst)
    }

    pub fn cir(&self) -> Rate {
        self.cir
    }

    pub fn pir(&self) -> Rate {
        self.pir
    }

    /// Committed-bucket level in bytes (rounded down).
    pub fn c_tokens(&self) -> u64 {
        (self.c_tokens / UNITS_PER_BYTE) as u64
    }

    pub fn p_tokens(&self) -> u64 {
        (self.p_tokens / UNITS_PER_BYTE) as u64
    }

    fn refill(&mut self, now: SimTime) {
        debug_assert!(now >= self.last_update, "meter executed out of order");
        let elapsed = now.saturating_sub(self.last_update).as_ps() as u128;
        self.last_update = self.last_update.max(now);
        let cmax = self.cbs as u128 * UNITS_PER_BYTE;
        let pmax = self.pbs as u128 * UNITS_PER_BYTE;
        self.c_tokens = (self.c_tokens + elapsed * self.cir.as_bps() as u128).min(cmax);
        self.p_tokens = (self.p_tokens + elapsed * self.pir.as_bps() as u128).min(pmax);
    }

    pub fn execute(&mut self, now: SimTime, bytes: u32) -> Color {
        self.refill(now);
        let cost = bytes as u128 * UNITS_PER_BYTE;
        if self.p_tokens < cost {
            Color::Red
        } else if self.c_tokens < cost {
            self.p_tokens -= cost;
            Color::Yellow
        } else {
            self.p_tokens -= cost;
            self.c_tokens -= cost;
            Color::Green
        }
    }
}
