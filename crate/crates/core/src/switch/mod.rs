//! Single-switch models sharing one ingress / traffic-manager / egress
//! contract:
//!
//! * `Ideal`: output-queued switch that trims at enqueue.
//! * `MirrorOnDrop`: overflow mirrors just the header into the pipeline's
//!   recirculation queue; the header reaches the priority queue a
//!   recirculation later.
//! * `TofinoDod`: fixed per-port ingress meters trim to line rate; overflow
//!   deflects the whole packet to the recirculation port where it is trimmed.
//! * `TofinoFull`: as `TofinoDod` plus congestion signals that switch the
//!   ingress meters between optimistic, halftimistic and pessimistic rates.
//! * `Tofino2`: ingress reads the real queue length, but packets already
//!   past the read stage still reach the queue untrimmed.

mod analysis;
mod dod;
mod egress;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use analysis::{pipe_ratio, worst_case_check, OversubscriptionAnalysis};
pub use dod::{DodDeparture, DodPort};
pub use egress::{EgressDiscipline, EgressPort};

use crate::error::{Error, Result};
use crate::event::Event;
use crate::meter::{TrTcmMeter, DEFAULT_BURST_BYTES};
use crate::packet::{CongestionSignal, Packet, PipeId, PortId, TrimOrigin, DEFAULT_HEADER_SIZE, DEFAULT_MTU};
use crate::policy::{self, MeterColors, Mode, ModeTransition, PolicyConfig, PolicyVariant, PortTrimState, TrimVerdict};
use crate::sim::{serde_ns, Link, Rate, Scheduler, SimTime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SwitchVariant {
    Ideal,
    MirrorOnDrop,
    TofinoDod,
    TofinoFull,
    Tofino2,
}

impl SwitchVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchVariant::Ideal => "IDEAL",
            SwitchVariant::MirrorOnDrop => "MIRROR_ON_DROP",
            SwitchVariant::TofinoDod => "TOFINO_DOD",
            SwitchVariant::TofinoFull => "TOFINO_FULL",
            SwitchVariant::Tofino2 => "TOFINO2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwitchConfig {
    pub n_ports: u16,
    pub n_pipes: u8,
    pub ports_per_pipe: u16,
    pub line_rate_gbps: u64,
    pub mtu: u32,
    pub header_size: u32,
    /// Data packets waiting per egress port, excluding the one on the wire.
    pub data_queue_cap: usize,
    pub header_queue_cap: usize,
    pub dod_queue_cap: usize,
    #[serde(rename = "recirc_latency_ns", with = "serde_ns")]
    pub recirc_latency: SimTime,
    /// Recirculations a congestion signal needs to reach the ingress
    /// pipelines (1: direct notify, 2: UPDATE then NOTIFY).
    pub signal_hops: u32,
    /// Only deflected packets that queued behind another deflection raise a
    /// congestion signal; otherwise every deflection does.
    pub signal_requires_backlog: bool,
    pub variant: SwitchVariant,
    /// `None` is strict priority for headers; `Some(w)` is byte-weighted
    /// w:1 service between the header and data queues.
    pub header_data_weight: Option<u32>,
    pub meter_burst: u32,
    /// Pipeline stages between the queue-length read and the traffic manager.
    pub tofino2_stages: u32,
    /// Issue interval of a queue-reading ingress pipeline; defaults to one
    /// MTU time divided among the pipeline's ports.
    #[serde(rename = "tofino2_stage_time_ns", with = "serde_ns")]
    pub tofino2_stage_time: SimTime,
    pub policy: PolicyConfig,
}

impl Default for SwitchConfig {
    fn default() -> Self {
        SwitchConfig {
            n_ports: 64,
            n_pipes: 4,
            ports_per_pipe: 16,
            line_rate_gbps: 100,
            mtu: DEFAULT_MTU,
            header_size: DEFAULT_HEADER_SIZE,
            data_queue_cap: 10,
            header_queue_cap: 100,
            dod_queue_cap: 16_384,
            recirc_latency: SimTime::from_us(1),
            signal_hops: 1,
            signal_requires_backlog: true,
            variant: SwitchVariant::TofinoFull,
            header_data_weight: None,
            meter_burst: DEFAULT_BURST_BYTES,
            tofino2_stages: 4,
            tofino2_stage_time: SimTime::from_ps(7_500),
            policy: PolicyConfig::default(),
        }
    }
}

impl SwitchConfig {
    pub fn with_variant(variant: SwitchVariant) -> Self {
        SwitchConfig { variant, ..Default::default() }
    }

    pub fn line_rate(&self) -> Rate {
        Rate::gbps(self.line_rate_gbps)
    }

    pub fn pipe_of(&self, port: PortId) -> PipeId {
        (port / self.ports_per_pipe) as PipeId
    }

    pub fn signal_latency(&self) -> SimTime {
        SimTime::from_ps(self.recirc_latency.as_ps() * self.signal_hops as u64)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.n_pipes == 0 || self.ports_per_pipe == 0 {
            return err("a switch needs at least one pipeline and one port per pipeline".into());
        }
        if self.n_pipes as u32 * self.ports_per_pipe as u32 != self.n_ports as u32 {
            return err(format!(
                "{} pipes x {} ports does not equal {} ports",
                self.n_pipes, self.ports_per_pipe, self.n_ports
            ));
        }
        if self.data_queue_cap == 0 {
            return err("data_queue_cap must be at least 1".into());
        }
        if self.line_rate_gbps == 0 {
            return err("line rate must be positive".into());
        }
        if self.header_size == 0 || self.header_size >= self.mtu {
            return err(format!("header size {} must be in (0, mtu={})", self.header_size, self.mtu));
        }
        if self.signal_hops == 0 {
            return err("signal_hops must be at least 1".into());
        }
        if self.header_data_weight == Some(0) {
            return err("header_data_weight must be positive".into());
        }
        self.policy.validate()
    }
}

/// Exact per-run switch counters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SwitchCounters {
    pub ingress_trims: u64,
    pub dod_trims: u64,
    pub ideal_trims: u64,
    pub mod_trims: u64,
    pub dod_dropped: u64,
    pub header_dropped: u64,
    pub deflections: u64,
    pub signals: u64,
    pub signals_per_port: Vec<u64>,
    pub max_dod_queue: Vec<usize>,
    pub max_data_queue: Vec<usize>,
    pub max_header_queue: Vec<usize>,
    /// Queue-reading variant: deflections of packets that cleared ingress
    /// before their port's queue first filled.
    pub onset_slips: u64,
}

impl SwitchCounters {
    pub fn total_trims(&self) -> u64 {
        self.ingress_trims + self.dod_trims + self.ideal_trims + self.mod_trims
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeTraceRow {
    pub time: SimTime,
    pub pipe: PipeId,
    pub port: PortId,
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueueKind {
    Data,
    Dod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueSample {
    pub time: SimTime,
    pub kind: QueueKind,
    pub index: u16,
    pub len: usize,
}

/// Result of handing a packet to the traffic manager for an egress port.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnqueueOutcome {
    Enqueued,
    Deflected,
    Trimmed,
    HeaderDropped,
}

struct PortMeters {
    opti: TrTcmMeter,
    half: TrTcmMeter,
    pessi: TrTcmMeter,
}

impl PortMeters {
    fn new(cfg: &SwitchConfig) -> Self {
        let line = cfg.line_rate();
        let burst = cfg.meter_burst;
        match cfg.policy.meter_form {
            policy::MeterForm::ThreeMeter => PortMeters {
                opti: TrTcmMeter::single_rate(line, burst),
                half: TrTcmMeter::single_rate(line.scaled(1, 2), burst),
                pessi: TrTcmMeter::single_rate(line.scaled(1, 4), burst),
            },
            policy::MeterForm::TwoMeter => PortMeters {
                opti: TrTcmMeter::new(line.scaled(1, 2), line, burst, burst),
                // unused by the two-meter decision table
                half: TrTcmMeter::single_rate(line.scaled(1, 2), burst),
                pessi: TrTcmMeter::single_rate(line.scaled(1, 4), burst),
            },
        }
    }

    fn execute(&mut self, now: SimTime, bytes: u32) -> MeterColors {
        MeterColors {
            opti: self.opti.execute(now, bytes),
            half: self.half.execute(now, bytes),
            pessi: self.pessi.execute(now, bytes),
        }
    }
}

struct Pipeline {
    meters: Vec<PortMeters>,
    trim_state: Vec<PortTrimState>,
    dod: DodPort,
    // queue-reading variant only
    issue_queue: VecDeque<Packet>,
    issuing: bool,
}

/// Simultaneous arrivals at one egress port, admitted as a batch.
#[derive(Default)]
struct Arbiter {
    pending: Vec<Packet>,
    armed: bool,
    last_pipe: Option<PipeId>,
    last_port_in_pipe: Vec<Option<u16>>,
}

pub struct Switch {
    cfg: SwitchConfig,
    pipes: Vec<Pipeline>,
    ports: Vec<EgressPort>,
    arbiters: Vec<Arbiter>,
    egress_latency: SimTime,
    first_full: Vec<Option<SimTime>>,
    counters: SwitchCounters,
    mode_trace: Vec<ModeTraceRow>,
    queue_series: Option<Vec<QueueSample>>,
    scratch: Vec<ModeTransition>,
}

impl Switch {
    /// `egress_latency` is the propagation delay from each egress port to
    /// the attached receiver.
    pub fn new(cfg: SwitchConfig, egress_latency: SimTime, record_queues: bool) -> Result<Self> {
        cfg.validate()?;
        let line = cfg.line_rate();
        let n_ports = cfg.n_ports as usize;
        let discipline = match cfg.header_data_weight {
            None => EgressDiscipline::StrictPriority,
            Some(w) => EgressDiscipline::Weighted { header_weight: w },
        };
        let pipes = (0..cfg.n_pipes)
            .map(|_| -> Result<Pipeline> {
                Ok(Pipeline {
                    meters: (0..n_ports).map(|_| PortMeters::new(&cfg)).collect(),
                    trim_state: vec![PortTrimState::default(); n_ports],
                    dod: DodPort::new(Link::new(line, SimTime::ZERO)?, cfg.dod_queue_cap),
                    issue_queue: VecDeque::new(),
                    issuing: false,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ports = (0..n_ports)
            .map(|_| -> Result<EgressPort> {
                Ok(EgressPort::new(
                    Link::new(line, egress_latency)?,
                    cfg.data_queue_cap,
                    cfg.header_queue_cap,
                    discipline,
                    cfg.mtu,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let arbiters = (0..n_ports)
            .map(|_| Arbiter { last_port_in_pipe: vec![None; cfg.n_pipes as usize], ..Default::default() })
            .collect();
        let counters = SwitchCounters {
            signals_per_port: vec![0; n_ports],
            max_dod_queue: vec![0; cfg.n_pipes as usize],
            max_data_queue: vec![0; n_ports],
            max_header_queue: vec![0; n_ports],
            ..Default::default()
        };
        Ok(Switch {
            pipes,
            ports,
            arbiters,
            egress_latency,
            first_full: vec![None; n_ports],
            counters,
            mode_trace: Vec::new(),
            queue_series: record_queues.then(Vec::new),
            scratch: Vec::new(),
            cfg,
        })
    }

    pub fn config(&self) -> &SwitchConfig {
        &self.cfg
    }

    pub fn port(&self, port: PortId) -> &EgressPort {
        &self.ports[port as usize]
    }

    pub fn dod(&self, pipe: PipeId) -> &DodPort {
        &self.pipes[pipe as usize].dod
    }

    pub fn trim_state(&self, pipe: PipeId, port: PortId) -> &PortTrimState {
        &self.pipes[pipe as usize].trim_state[port as usize]
    }

    pub fn counters(&self) -> &SwitchCounters {
        &self.counters
    }

    /// Flushes mode expiries up to `end` and returns the final counters and
    /// traces.
    pub fn finish(mut self, end: SimTime) -> (SwitchCounters, Vec<ModeTraceRow>, Vec<QueueSample>) {
        for (pipe_idx, pipe) in self.pipes.iter_mut().enumerate() {
            for (port_idx, st) in pipe.trim_state.iter_mut().enumerate() {
                self.scratch.clear();
                st.settle_trace(end, &mut self.scratch);
                for t in &self.scratch {
                    self.mode_trace.push(ModeTraceRow {
                        time: t.time,
                        pipe: pipe_idx as PipeId,
                        port: port_idx as PortId,
                        mode: t.mode,
                    });
                }
            }
        }
        self.mode_trace.sort_by_key(|r| (r.time, r.pipe, r.port));
        for (i, p) in self.ports.iter().enumerate() {
            self.counters.max_data_queue[i] = p.max_data();
            self.counters.max_header_queue[i] = p.max_headers();
        }
        for (i, p) in self.pipes.iter().enumerate() {
            self.counters.max_dod_queue[i] = p.dod.max_len();
        }
        debug_assert_eq!(self.pipes.iter().map(|p| p.dod.dropped()).sum::<u64>(), self.counters.dod_dropped);
        (self.counters, self.mode_trace, self.queue_series.unwrap_or_default())
    }

    /// Switch-side event dispatch. Returns the event back if it is not a
    /// switch event.
    pub fn handle(&mut self, ev: Event, sched: &mut Scheduler<Event>) -> Option<Event> {
        let now = sched.now();
        match ev {
            Event::IngressArrive(pkt) => self.ingress_receive(pkt, sched),
            Event::PipeIssue { pipe } => self.pipe_issue(pipe, sched),
            Event::TmArrive(pkt) => {
                if pkt.is_header() {
                    let port = pkt.egress_port;
                    self.enqueue_header(pkt);
                    self.start_egress(port, sched);
                } else {
                    self.forward_to_tm(pkt, sched);
                }
            }
            Event::TmAdmit { port } => self.admit(port, sched),
            Event::EgressTxDone { port } => {
                self.ports[port as usize].busy = false;
                self.sample(now, QueueKind::Data, port, self.ports[port as usize].data_len());
                self.start_egress(port, sched);
            }
            Event::DodTxDone { pipe } => self.dod_done(pipe, sched),
            Event::RecircArrive(hdr) => {
                let port = hdr.egress_port;
                self.enqueue_header(hdr);
                self.start_egress(port, sched);
            }
            Event::SignalArrive { pipe, port } => self.apply_signal(pipe, port, now),
            other => return Some(other),
        }
        None
    }

    /// Ingress pipeline processing for a packet that just arrived from a host.
    pub fn ingress_receive(&mut self, mut pkt: Packet, sched: &mut Scheduler<Event>) {
        let now = sched.now();
        debug_assert!(pkt.is_data());
        match self.cfg.variant {
            SwitchVariant::Ideal | SwitchVariant::MirrorOnDrop => {
                pkt.ingress_time = now;
                self.forward_to_tm(pkt, sched);
            }
            SwitchVariant::TofinoDod | SwitchVariant::TofinoFull => {
                pkt.ingress_time = now;
                let pipe = &mut self.pipes[pkt.ingress_pipe as usize];
                let port = pkt.egress_port as usize;
                let colors = pipe.meters[port].execute(now, pkt.size);
                let (mode, verdict) = if self.cfg.variant == SwitchVariant::TofinoFull {
                    let mode = pipe.trim_state[port].classify(now);
                    (mode, policy::decide(&self.cfg.policy, mode, colors))
                } else {
                    let verdict = match self.cfg.policy.meter_form {
                        policy::MeterForm::ThreeMeter => {
                            policy::decide_three_meter(Mode::Optimistic, colors.opti, colors.half, colors.pessi)
                        }
                        policy::MeterForm::TwoMeter => policy::decide_two_meter(Mode::Optimistic, colors.opti, colors.pessi),
                    };
                    (Mode::Optimistic, verdict)
                };
                match verdict {
                    TrimVerdict::Forward => self.forward_to_tm(pkt, sched),
                    TrimVerdict::Trim => {
                        if self.cfg.policy.variant == PolicyVariant::TrimN && mode == Mode::Pessimistic {
                            self.scratch.clear();
                            pipe.trim_state[port].consume_trim(now, &mut self.scratch);
                            for t in &self.scratch {
                                self.mode_trace.push(ModeTraceRow {
                                    time: t.time,
                                    pipe: pkt.ingress_pipe,
                                    port: port as PortId,
                                    mode: t.mode,
                                });
                            }
                        }
                        self.ingress_trim(pkt, sched);
                    }
                }
            }
            SwitchVariant::Tofino2 => {
                let pipe_id = pkt.ingress_pipe;
                let pipe = &mut self.pipes[pipe_id as usize];
                pipe.issue_queue.push_back(pkt);
                if !pipe.issuing {
                    pipe.issuing = true;
                    sched.schedule(now, Event::PipeIssue { pipe: pipe_id });
                }
            }
        }
    }

    fn ingress_trim(&mut self, pkt: Packet, sched: &mut Scheduler<Event>) {
        let hdr = pkt.trim(TrimOrigin::Ingress, self.cfg.header_size).expect("ingress only sees DATA");
        self.counters.ingress_trims += 1;
        let port = hdr.egress_port;
        self.enqueue_header(hdr);
        self.start_egress(port, sched);
    }

    fn pipe_issue(&mut self, pipe_id: PipeId, sched: &mut Scheduler<Event>) {
        let now = sched.now();
        let lag = SimTime::from_ps(self.cfg.tofino2_stage_time.as_ps() * self.cfg.tofino2_stages as u64);
        let pipe = &mut self.pipes[pipe_id as usize];
        let Some(mut pkt) = pipe.issue_queue.pop_front() else {
            pipe.issuing = false;
            return;
        };
        if pipe.issue_queue.is_empty() {
            pipe.issuing = false;
        } else {
            sched.schedule(now + self.cfg.tofino2_stage_time, Event::PipeIssue { pipe: pipe_id });
        }
        pkt.ingress_time = now;
        let out = if self.ports[pkt.egress_port as usize].data_full() {
            self.counters.ingress_trims += 1;
            pkt.trim(TrimOrigin::Ingress, self.cfg.header_size).expect("ingress only sees DATA")
        } else {
            pkt
        };
        sched.schedule(now + lag, Event::TmArrive(out));
    }

    fn forward_to_tm(&mut self, pkt: Packet, sched: &mut Scheduler<Event>) {
        let port = pkt.egress_port;
        let arb = &mut self.arbiters[port as usize];
        arb.pending.push(pkt);
        if !arb.armed {
            arb.armed = true;
            sched.schedule(sched.now(), Event::TmAdmit { port });
        }
    }

    /// Admits every packet that reached `port` at this instant. Ties are
    /// broken round-robin over ingress pipelines, then over ingress ports
    /// within a pipeline, so no pipeline systematically wins the last slot.
    fn admit(&mut self, port: PortId, sched: &mut Scheduler<Event>) {
        let n_pipes = self.cfg.n_pipes as u16;
        let ppp = self.cfg.ports_per_pipe;
        let arb = &mut self.arbiters[port as usize];
        arb.armed = false;
        let mut batch = std::mem::take(&mut arb.pending);
        if batch.len() > 1 {
            let after_pipe = arb.last_pipe.map_or(0, |p| p as u16 + 1);
            let last_ports = arb.last_port_in_pipe.clone();
            batch.sort_by_key(|p| {
                let pipe_rank = (p.ingress_pipe as u16 + n_pipes - after_pipe % n_pipes) % n_pipes;
                let in_pipe = p.ingress_port % ppp;
                let after_port = last_ports[p.ingress_pipe as usize].map_or(0, |x| x + 1);
                let port_rank = (in_pipe + ppp - after_port % ppp) % ppp;
                (pipe_rank, port_rank)
            });
        }
        if let Some(first) = batch.first() {
            arb.last_pipe = Some(first.ingress_pipe);
        }
        let mut seen = vec![false; n_pipes as usize];
        for p in &batch {
            if !seen[p.ingress_pipe as usize] {
                seen[p.ingress_pipe as usize] = true;
                arb.last_port_in_pipe[p.ingress_pipe as usize] = Some(p.ingress_port % ppp);
            }
        }
        for pkt in batch {
            self.enqueue_egress(pkt, sched);
        }
    }

    /// Traffic-manager enqueue of a DATA packet at its egress port.
    pub fn enqueue_egress(&mut self, pkt: Packet, sched: &mut Scheduler<Event>) -> EnqueueOutcome {
        let now = sched.now();
        let port = pkt.egress_port;
        let egress = &mut self.ports[port as usize];
        let outcome = match egress.offer_data(pkt) {
            Ok(()) => {
                if egress.data_full() && self.first_full[port as usize].is_none() {
                    self.first_full[port as usize] = Some(now);
                }
                let len = egress.data_len();
                self.sample(now, QueueKind::Data, port, len);
                EnqueueOutcome::Enqueued
            }
            Err(pkt) => match self.cfg.variant {
                SwitchVariant::Ideal => {
                    let hdr = pkt.trim(TrimOrigin::Ideal, self.cfg.header_size).expect("DATA");
                    self.counters.ideal_trims += 1;
                    if self.enqueue_header(hdr) {
                        EnqueueOutcome::Trimmed
                    } else {
                        EnqueueOutcome::HeaderDropped
                    }
                }
                SwitchVariant::MirrorOnDrop => {
                    let hdr = pkt.trim(TrimOrigin::Mod, self.cfg.header_size).expect("DATA");
                    self.counters.mod_trims += 1;
                    self.deflect(hdr, now, sched);
                    EnqueueOutcome::Trimmed
                }
                SwitchVariant::TofinoDod | SwitchVariant::TofinoFull | SwitchVariant::Tofino2 => {
                    self.counters.deflections += 1;
                    if self.cfg.variant == SwitchVariant::Tofino2
                        && self.first_full[port as usize].is_none_or(|t| pkt.ingress_time < t)
                    {
                        self.counters.onset_slips += 1;
                    }
                    self.deflect(pkt, now, sched);
                    EnqueueOutcome::Deflected
                }
            },
        };
        self.start_egress(port, sched);
        outcome
    }

    fn deflect(&mut self, pkt: Packet, now: SimTime, sched: &mut Scheduler<Event>) {
        let pipe = pkt.ingress_pipe;
        let dod = &mut self.pipes[pipe as usize].dod;
        if dod.offer(pkt, now) {
            let len = dod.len();
            self.sample(now, QueueKind::Dod, pipe as u16, len);
        } else {
            self.counters.dod_dropped += 1;
        }
        self.start_dod(pipe, sched);
    }

    fn start_dod(&mut self, pipe: PipeId, sched: &mut Scheduler<Event>) {
        let now = sched.now();
        let dod = &mut self.pipes[pipe as usize].dod;
        let Some(dep) = dod.start_next(now) else { return };
        let len = dod.len();
        sched.schedule(dep.completes_at, Event::DodTxDone { pipe });
        self.sample(now, QueueKind::Dod, pipe as u16, len);
        let signals_enabled = match self.cfg.variant {
            SwitchVariant::TofinoFull => self.cfg.policy.variant != PolicyVariant::None,
            _ => false,
        };
        if signals_enabled && dep.is_data && (dep.waited || !self.cfg.signal_requires_backlog) {
            let signal = CongestionSignal { egress_port: dep.egress_port, origin_pipe: pipe, emit_time: now };
            self.counters.signals += 1;
            self.counters.signals_per_port[dep.egress_port as usize] += 1;
            let at = now + self.cfg.signal_latency();
            for target in policy::fanout_targets(&signal, self.cfg.policy.signal_fanout, self.cfg.n_pipes) {
                sched.schedule(at, Event::SignalArrive { pipe: target, port: signal.egress_port });
            }
        }
    }

    /// Recirculation port finished sending a packet: trim deflected data and
    /// return the header to its egress port after the recirculation latency.
    fn dod_done(&mut self, pipe: PipeId, sched: &mut Scheduler<Event>) {
        let pkt = self.pipes[pipe as usize].dod.finish();
        let hdr = if pkt.is_data() {
            self.counters.dod_trims += 1;
            pkt.trim(TrimOrigin::Dod, self.cfg.header_size).expect("DATA")
        } else {
            pkt
        };
        sched.schedule(sched.now() + self.cfg.recirc_latency, Event::RecircArrive(hdr));
        self.start_dod(pipe, sched);
    }

    /// Returns false (and counts the drop) when the header queue is full.
    fn enqueue_header(&mut self, hdr: Packet) -> bool {
        match self.ports[hdr.egress_port as usize].offer_header(hdr) {
            Ok(()) => true,
            Err(_) => {
                self.counters.header_dropped += 1;
                false
            }
        }
    }

    fn start_egress(&mut self, port: PortId, sched: &mut Scheduler<Event>) {
        let now = sched.now();
        let egress = &mut self.ports[port as usize];
        if egress.busy {
            return;
        }
        let Some(pkt) = egress.dequeue() else { return };
        let was_data = pkt.is_data();
        let done = egress.link.serialize(pkt.size, now);
        egress.busy = true;
        let len = egress.data_len();
        sched.schedule(done, Event::EgressTxDone { port });
        sched.schedule(done + self.egress_latency, Event::ReceiverArrive(pkt));
        if was_data {
            self.sample(now, QueueKind::Data, port, len);
        }
    }

    fn apply_signal(&mut self, pipe: PipeId, port: PortId, now: SimTime) {
        self.scratch.clear();
        self.pipes[pipe as usize].trim_state[port as usize].on_congestion_signal(now, &self.cfg.policy, &mut self.scratch);
        for t in &self.scratch {
            self.mode_trace.push(ModeTraceRow { time: t.time, pipe, port, mode: t.mode });
        }
    }

    fn sample(&mut self, time: SimTime, kind: QueueKind, index: u16, len: usize) {
        if let Some(series) = self.queue_series.as_mut() {
            series.push(QueueSample { time, kind, index, len });
        }
    }
}
