//! Minimal receiver-driven transport: an unsolicited initial window, one
//! pull pacer per receiving port, and retransmission triggered only by
//! trimmed headers.

use std::collections::{HashMap, VecDeque};

use crate::packet::{Flow, FlowId, Packet, PipeId, PortId};
use crate::sim::{Link, SimTime};

/// Sending NIC of one flow.
#[derive(Debug)]
pub struct Sender {
    pub flow: Flow,
    pub ingress_port: PortId,
    pub ingress_pipe: PipeId,
    pub egress_port: PortId,
    link: Link,
    mtu: u32,
    next_seq: u64,
    rtx: VecDeque<u64>,
    credits: u64,
    busy: bool,
    sent: u64,
    rtx_count: u64,
}

impl Sender {
    pub fn new(flow: Flow, ingress_port: PortId, ingress_pipe: PipeId, egress_port: PortId, link: Link, mtu: u32) -> Self {
        let credits = flow.initial_window;
        Sender {
            flow,
            ingress_port,
            ingress_pipe,
            egress_port,
            link,
            mtu,
            next_seq: 0,
            rtx: VecDeque::new(),
            credits,
            busy: false,
            sent: 0,
            rtx_count: 0,
        }
    }

    pub fn link(&self) -> &Link {
        &self.link
    }

    /// Packets put on the wire, retransmissions included.
    pub fn sent(&self) -> u64 {
        self.sent
    }

    pub fn rtx_count(&self) -> u64 {
        self.rtx_count
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    pub fn credits(&self) -> u64 {
        self.credits
    }

    pub fn pending_rtx(&self) -> usize {
        self.rtx.len()
    }

    /// A pull grants one more packet; `rtx` names a trimmed packet to resend.
    pub fn on_pull(&mut self, rtx: Option<u64>) {
        if let Some(seq) = rtx {
            self.rtx.push_back(seq);
        }
        self.credits += 1;
    }

    fn has_work(&self) -> bool {
        !self.rtx.is_empty() || self.next_seq < self.flow.total_packets
    }

    /// Starts the next transmission if the NIC is idle and holds a credit.
    /// Returns the packet and the time it has fully left the NIC.
    pub fn try_send(&mut self, now: SimTime) -> Option<(Packet, SimTime)> {
        if self.busy || self.credits == 0 || !self.has_work() {
            return None;
        }
        let seq = match self.rtx.pop_front() {
            Some(s) => {
                self.rtx_count += 1;
                s
            }
            None => {
                self.next_seq += 1;
                self.next_seq - 1
            }
        };
        self.credits -= 1;
        self.busy = true;
        self.sent += 1;
        let done = self.link.serialize(self.mtu, now);
        let pkt = Packet::data(
            self.flow.flow_id,
            seq,
            self.mtu,
            self.flow.src_host,
            self.flow.dst_host,
            self.ingress_port,
            self.ingress_pipe,
            self.egress_port,
            now,
        );
        Some((pkt, done))
    }

    pub fn tx_done(&mut self) {
        self.busy = false;
    }
}

/// Receive-side bookkeeping of one flow.
#[derive(Debug)]
pub struct Receiver {
    received: Vec<u64>,
    unique: u64,
    unique_by_deadline: u64,
    duplicates: u64,
    headers: u64,
    last_unique: Option<SimTime>,
}

impl Receiver {
    pub fn new(total_packets: u64) -> Self {
        let words = total_packets.div_ceil(64) as usize;
        Receiver {
            received: vec![0; words],
            unique: 0,
            unique_by_deadline: 0,
            duplicates: 0,
            headers: 0,
            last_unique: None,
        }
    }

    /// Records a DATA arrival. Returns false for a duplicate.
    pub fn on_data(&mut self, seq: u64, now: SimTime, deadline: SimTime) -> bool {
        let (w, b) = ((seq / 64) as usize, seq % 64);
        if self.received[w] & (1 << b) != 0 {
            self.duplicates += 1;
            return false;
        }
        self.received[w] |= 1 << b;
        self.unique += 1;
        if now <= deadline {
            self.unique_by_deadline += 1;
        }
        self.last_unique = Some(now);
        true
    }

    pub fn on_header(&mut self) {
        self.headers += 1;
    }

    pub fn has(&self, seq: u64) -> bool {
        self.received[(seq / 64) as usize] & (1 << (seq % 64)) != 0
    }

    pub fn unique(&self) -> u64 {
        self.unique
    }

    pub fn unique_by_deadline(&self) -> u64 {
        self.unique_by_deadline
    }

    pub fn duplicates(&self) -> u64 {
        self.duplicates
    }

    pub fn headers(&self) -> u64 {
        self.headers
    }

    pub fn last_unique(&self) -> Option<SimTime> {
        self.last_unique
    }
}

/// Pull pacer shared by all flows arriving at one receiving port.
#[derive(Debug)]
pub struct PullPacer {
    interval: SimTime,
    active: VecDeque<FlowId>,
    credits: HashMap<FlowId, VecDeque<Option<u64>>>,
    armed: bool,
    last_pull: Option<SimTime>,
    pulls: u64,
}

impl PullPacer {
    pub fn new(interval: SimTime) -> Self {
        PullPacer { interval, active: VecDeque::new(), credits: HashMap::new(), armed: false, last_pull: None, pulls: 0 }
    }

    pub fn interval(&self) -> SimTime {
        self.interval
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn pending(&self) -> usize {
        self.credits.values().map(VecDeque::len).sum()
    }

    /// Queues one pull for `flow`. Returns when the pacer must next tick if
    /// it was idle.
    pub fn add_credit(&mut self, flow: FlowId, rtx: Option<u64>, now: SimTime) -> Option<SimTime> {
        let q = self.credits.entry(flow).or_default();
        if q.is_empty() {
            self.active.push_back(flow);
        }
        q.push_back(rtx);
        if self.armed {
            return None;
        }
        self.armed = true;
        let earliest = self.last_pull.map_or(now, |t| t + self.interval);
        Some(earliest.max(now))
    }

    /// Emits one pull, round robin over flows with credits. The pacer stays
    /// armed only while credits remain.
    pub fn tick(&mut self, now: SimTime) -> Option<(FlowId, Option<u64>)> {
        let Some(flow) = self.active.pop_front() else {
            self.armed = false;
            return None;
        };
        let q = self.credits.get_mut(&flow).expect("active flow has a credit queue");
        let rtx = q.pop_front().expect("active flow has a credit");
        if !q.is_empty() {
            self.active.push_back(flow);
        }
        self.armed = !self.active.is_empty();
        self.last_pull = Some(now);
        self.pulls += 1;
        Some((flow, rtx))
    }

    /// Drops every queued credit.
    pub fn stop(&mut self) {
        self.active.clear();
        self.credits.clear();
        self.armed = false;
    }

    pub fn is_armed(&self) -> bool {
        self.armed
    }
}
