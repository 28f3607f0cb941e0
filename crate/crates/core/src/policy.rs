//! Per-egress-port trimming control loop.
//!
//! Each ingress pipeline keeps, for every egress port, two expiry
//! timestamps. A congestion signal arms both; the port is pessimistic until
//! the first expires, halftimistic until the second, then optimistic again
//! (registers cleared). Trim decisions combine the current mode with the
//! colors of the per-port meters.

use serde::{Deserialize, Serialize};

use crate::meter::Color;
use crate::packet::{CongestionSignal, PipeId};
use crate::sim::{serde_ns, Rate, SimTime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    Optimistic,
    Halftimistic,
    Pessimistic,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Optimistic, Mode::Halftimistic, Mode::Pessimistic];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Optimistic => "OPTIMISTIC",
            Mode::Halftimistic => "HALFTIMISTIC",
            Mode::Pessimistic => "PESSIMISTIC",
        }
    }

    /// Per-pipeline rate the port is trimmed down to in this mode.
    pub fn target_rate(self, line_rate: Rate) -> Rate {
        match self {
            Mode::Optimistic => line_rate,
            Mode::Halftimistic => line_rate.scaled(1, 2),
            Mode::Pessimistic => line_rate.scaled(1, 4),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolicyVariant {
    /// Pessimistic then halftimistic hold, metered.
    Full,
    /// Pessimistic hold only; falls straight back to optimistic.
    PessiOnly,
    /// Trims every packet for the hold, then straight back to optimistic.
    TrimAll,
    /// Every signal adds `trim_n` packets to a per-port trim budget.
    TrimN,
    /// Signals are ignored.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignalFanout {
    AllPipes,
    OriginPipe,
}

/// Meter layout in the ingress pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeterForm {
    /// One single-rate meter per mode (line, 1/2, 1/4).
    ThreeMeter,
    /// `opti` with PIR = line, CIR = line/2 and `pessi` at line/4.
    TwoMeter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicyConfig {
    /// Pessimistic hold after a signal.
    #[serde(rename = "t0_ns", with = "serde_ns")]
    pub t0: SimTime,
    /// Total hold after a signal; halftimistic between `t0` and `t1`.
    #[serde(rename = "t1_ns", with = "serde_ns")]
    pub t1: SimTime,
    pub variant: PolicyVariant,
    pub signal_fanout: SignalFanout,
    pub trim_n: u32,
    pub meter_form: MeterForm,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            t0: SimTime::from_us(6),
            t1: SimTime::from_us(24),
            variant: PolicyVariant::Full,
            signal_fanout: SignalFanout::AllPipes,
            trim_n: 12,
            meter_form: MeterForm::ThreeMeter,
        }
    }
}

impl PolicyConfig {
    /// Holds scaled from a single pessimistic duration, keeping the 1:4
    /// pessimistic-to-total ratio of the defaults. Zero disables the response.
    pub fn with_response_duration(mut self, pessimistic: SimTime) -> Self {
        self.t0 = pessimistic;
        self.t1 = SimTime::from_ps(pessimistic.as_ps() * 4);
        if pessimistic == SimTime::ZERO {
            self.variant = PolicyVariant::None;
        }
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.t0 > self.t1 {
            return Err(crate::Error::Config(format!("t0 ({}) exceeds t1 ({})", self.t0, self.t1)));
        }
        if self.variant == PolicyVariant::TrimN && self.trim_n == 0 {
            return Err(crate::Error::Config("trim_n must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrimVerdict {
    Forward,
    Trim,
}

/// Colors of one packet through the per-port meters. `half` is unused by
/// the two-meter layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeterColors {
    pub opti: Color,
    pub half: Color,
    pub pessi: Color,
}

/// A mode change of one (pipe, port) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeTransition {
    pub time: SimTime,
    pub mode: Mode,
}

/// Control-loop registers for one egress port in one ingress pipeline.
#[derive(Clone, Debug, Default)]
pub struct PortTrimState {
    t0_reg: SimTime,
    t1_reg: SimTime,
    pending_trims: u64,
    // Shadow copies for the transition trace; `classify` clears the real
    // registers lazily and must not erase the history.
    traced: Option<Mode>,
    trace_t0: SimTime,
    trace_t1: SimTime,
}

impl PortTrimState {
    pub fn t0_reg(&self) -> SimTime {
        self.t0_reg
    }

    pub fn t1_reg(&self) -> SimTime {
        self.t1_reg
    }

    pub fn pending_trims(&self) -> u64 {
        self.pending_trims
    }

    /// Arms the registers. Transitions that expired before `now` are
    /// appended to `trace` first, followed by the entry into pessimistic mode.
    pub fn on_congestion_signal(&mut self, now: SimTime, cfg: &PolicyConfig, trace: &mut Vec<ModeTransition>) {
        self.settle_trace(now, trace);
        match cfg.variant {
            PolicyVariant::None => return,
            PolicyVariant::TrimN => {
                self.pending_trims += cfg.trim_n as u64;
            }
            PolicyVariant::PessiOnly | PolicyVariant::TrimAll => {
                self.t0_reg = now + cfg.t0;
                self.t1_reg = self.t0_reg;
            }
            PolicyVariant::Full => {
                self.t0_reg = now + cfg.t0;
                self.t1_reg = now + cfg.t1;
            }
        }
        self.trace_t0 = self.t0_reg;
        self.trace_t1 = self.t1_reg;
        if self.traced != Some(Mode::Pessimistic) {
            trace.push(ModeTransition { time: now, mode: Mode::Pessimistic });
            self.traced = Some(Mode::Pessimistic);
        }
    }

    /// Current mode; clears both registers once the total hold has expired.
    pub fn classify(&mut self, now: SimTime) -> Mode {
        if self.pending_trims > 0 {
            return Mode::Pessimistic;
        }
        if self.t0_reg == SimTime::ZERO && self.t1_reg == SimTime::ZERO {
            return Mode::Optimistic;
        }
        if now <= self.t0_reg {
            Mode::Pessimistic
        } else if now <= self.t1_reg {
            Mode::Halftimistic
        } else {
            self.t0_reg = SimTime::ZERO;
            self.t1_reg = SimTime::ZERO;
            Mode::Optimistic
        }
    }

    /// Accounts one packet trimmed while a trim budget is outstanding.
    /// Returns true if that exhausted the budget.
    pub fn consume_trim(&mut self, now: SimTime, trace: &mut Vec<ModeTransition>) -> bool {
        if self.pending_trims == 0 {
            return false;
        }
        self.pending_trims -= 1;
        if self.pending_trims == 0 {
            trace.push(ModeTransition { time: now, mode: Mode::Optimistic });
            self.traced = Some(Mode::Optimistic);
            return true;
        }
        false
    }

    /// Appends the timed expiries that happened strictly before `now`.
    pub fn settle_trace(&mut self, now: SimTime, trace: &mut Vec<ModeTransition>) {
        if self.pending_trims > 0 {
            return;
        }
        if self.traced == Some(Mode::Pessimistic) && now > self.trace_t0 {
            let next = if self.trace_t1 > self.trace_t0 { Mode::Halftimistic } else { Mode::Optimistic };
            trace.push(ModeTransition { time: self.trace_t0, mode: next });
            self.traced = Some(next);
        }
        if self.traced == Some(Mode::Halftimistic) && now > self.trace_t1 {
            trace.push(ModeTransition { time: self.trace_t1, mode: Mode::Optimistic });
            self.traced = Some(Mode::Optimistic);
        }
    }
}

/// ndp.p4 form: use the color of the meter that belongs to the mode.
pub fn decide_three_meter(mode: Mode, opti: Color, half: Color, pessi: Color) -> TrimVerdict {
    let color = match mode {
        Mode::Optimistic => opti,
        Mode::Halftimistic => half,
        Mode::Pessimistic => pessi,
    };
    if color == Color::Red {
        TrimVerdict::Trim
    } else {
        TrimVerdict::Forward
    }
}

/// switch.p4 form with two trTCMs per port.
pub fn decide_two_meter(mode: Mode, opti: Color, pessi: Color) -> TrimVerdict {
    let trim = match mode {
        Mode::Pessimistic => pessi != Color::Green,
        Mode::Halftimistic => opti != Color::Green,
        Mode::Optimistic => opti == Color::Red,
    };
    if trim {
        TrimVerdict::Trim
    } else {
        TrimVerdict::Forward
    }
}

/// Verdict for one packet under a full policy configuration.
pub fn decide(cfg: &PolicyConfig, mode: Mode, colors: MeterColors) -> TrimVerdict {
    match (cfg.variant, mode) {
        (PolicyVariant::TrimAll | PolicyVariant::TrimN, Mode::Pessimistic) => TrimVerdict::Trim,
        _ => match cfg.meter_form {
            MeterForm::ThreeMeter => decide_three_meter(mode, colors.opti, colors.half, colors.pessi),
            MeterForm::TwoMeter => decide_two_meter(mode, colors.opti, colors.pessi),
        },
    }
}

pub fn mode_target_rate(mode: Mode, line_rate: Rate) -> Rate {
    mode.target_rate(line_rate)
}

/// Pipelines that should receive `signal`.
pub fn fanout_targets(signal: &CongestionSignal, fanout: SignalFanout, n_pipes: u8) -> Vec<PipeId> {
    match fanout {
        SignalFanout::AllPipes => (0..n_pipes).collect(),
        SignalFanout::OriginPipe => vec![signal.origin_pipe],
    }
}
