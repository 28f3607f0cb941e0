//! Per-pipeline recirculation (deflect-on-drop) port.

use std::collections::VecDeque;

use crate::packet::Packet;
use crate::sim::{Link, SimTime};

#[derive(Debug)]
pub struct DodPort {
    queue: VecDeque<(Packet, SimTime)>,
    cap: usize,
    pub(crate) link: Link,
    in_service: Option<Packet>,
    dropped: u64,
    max_len: usize,
}

/// A packet that just started draining from the recirculation queue.
#[derive(Debug)]
pub struct DodDeparture {
    pub completes_at: SimTime,
    /// The packet waited behind earlier deflections.
    pub waited: bool,
    pub egress_port: crate::packet::PortId,
    pub is_data: bool,
}

impl DodPort {
    pub fn new(link: Link, cap: usize) -> Self {
        DodPort { queue: VecDeque::new(), cap, link, in_service: None, dropped: 0, max_len: 0 }
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn is_busy(&self) -> bool {
        self.in_service.is_some()
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    /// Largest backlog seen, counting the packet on the wire.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Returns false (and counts a drop) if the queue is full.
    pub fn offer(&mut self, pkt: Packet, now: SimTime) -> bool {
        if self.queue.len() >= self.cap {
            self.dropped += 1;
            return false;
        }
        self.queue.push_back((pkt, now));
        self.max_len = self.max_len.max(self.queue.len() + self.in_service.is_some() as usize);
        true
    }

    /// Starts serializing the head of the queue if the port is idle.
    pub fn start_next(&mut self, now: SimTime) -> Option<DodDeparture> {
        if self.in_service.is_some() {
            return None;
        }
        let (pkt, arrived) = self.queue.pop_front()?;
        let completes_at = self.link.serialize(pkt.size, now);
        let dep = DodDeparture { completes_at, waited: now > arrived, egress_port: pkt.egress_port, is_data: pkt.is_data() };
        self.in_service = Some(pkt);
        Some(dep)
    }

    pub fn finish(&mut self) -> Packet {
        self.in_service.take().expect("recirculation port finished without a packet in service")
    }
}
