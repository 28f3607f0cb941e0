//! Egress port: bounded data FIFO, bounded priority header FIFO, and the
//! scheduler that arbitrates between them.

use std::collections::VecDeque;

use crate::packet::Packet;
use crate::sim::Link;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgressDiscipline {
    /// Headers always go first.
    StrictPriority,
    /// Byte-based deficit round robin, `header_weight` : 1 in favour of headers.
    Weighted { header_weight: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Header,
    Data,
}

#[derive(Debug)]
pub struct EgressPort {
    data: VecDeque<Packet>,
    headers: VecDeque<Packet>,
    data_cap: usize,
    header_cap: usize,
    pub(crate) link: Link,
    pub(crate) busy: bool,
    discipline: EgressDiscipline,
    turn: Class,
    header_deficit: u64,
    data_deficit: u64,
    header_quantum: u64,
    data_quantum: u64,
    max_data: usize,
    max_headers: usize,
}

impl EgressPort {
    pub fn new(link: Link, data_cap: usize, header_cap: usize, discipline: EgressDiscipline, mtu: u32) -> Self {
        let header_quantum = match discipline {
            EgressDiscipline::StrictPriority => 0,
            EgressDiscipline::Weighted { header_weight } => header_weight as u64 * mtu as u64,
        };
        EgressPort {
            data: VecDeque::with_capacity(data_cap),
            headers: VecDeque::new(),
            data_cap,
            header_cap,
            link,
            busy: false,
            discipline,
            turn: Class::Header,
            header_deficit: header_quantum,
            data_deficit: 0,
            header_quantum,
            data_quantum: mtu as u64,
            max_data: 0,
            max_headers: 0,
        }
    }

    pub fn data_len(&self) -> usize {
        self.data.len()
    }

    pub fn header_len(&self) -> usize {
        self.headers.len()
    }

    pub fn data_full(&self) -> bool {
        self.data.len() >= self.data_cap
    }

    pub fn max_data(&self) -> usize {
        self.max_data
    }

    pub fn max_headers(&self) -> usize {
        self.max_headers
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty() && self.headers.is_empty()
    }

    /// Hands the packet back if the data queue is full.
    pub fn offer_data(&mut self, pkt: Packet) -> Result<(), Packet> {
        if self.data_full() {
            return Err(pkt);
        }
        self.data.push_back(pkt);
        self.max_data = self.max_data.max(self.data.len());
        Ok(())
    }

    /// Hands the header back if the header queue is full.
    pub fn offer_header(&mut self, pkt: Packet) -> Result<(), Packet> {
        if self.headers.len() >= self.header_cap {
            return Err(pkt);
        }
        self.headers.push_back(pkt);
        self.max_headers = self.max_headers.max(self.headers.len());
        Ok(())
    }

    /// Picks the next packet to transmit.
    pub fn dequeue(&mut self) -> Option<Packet> {
        match self.discipline {
            EgressDiscipline::StrictPriority => self.headers.pop_front().or_else(|| self.data.pop_front()),
            EgressDiscipline::Weighted { .. } => self.dequeue_weighted(),
        }
    }

    fn dequeue_weighted(&mut self) -> Option<Packet> {
        if self.is_empty() {
            return None;
        }
        loop {
            let (queue, deficit) = match self.turn {
                Class::Header => (&mut self.headers, &mut self.header_deficit),
                Class::Data => (&mut self.data, &mut self.data_deficit),
            };
            match queue.front().map(|p| p.size as u64) {
                Some(size) if *deficit >= size => {
                    *deficit -= size;
                    return queue.pop_front();
                }
                Some(_) => self.pass_turn(),
                None => {
                    // an idle class does not bank credit
                    *deficit = 0;
                    self.pass_turn();
                }
            }
        }
    }

    fn pass_turn(&mut self) {
        match self.turn {
            Class::Header => {
                self.turn = Class::Data;
                self.data_deficit += self.data_quantum;
            }
            Class::Data => {
                self.turn = Class::Header;
                self.header_deficit += self.header_quantum;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::TrimOrigin;
    use crate::sim::{Rate, SimTime};

    fn port(discipline: EgressDiscipline) -> EgressPort {
        EgressPort::new(Link::new(Rate::gbps(100), SimTime::ZERO).unwrap(), 10, 100, discipline, 1500)
    }

    fn data(seq: u64) -> Packet {
        Packet::data(0, seq, 1500, 0, 1, 0, 0, 1, SimTime::ZERO)
    }

    fn header(seq: u64) -> Packet {
        data(seq).trim(TrimOrigin::Ideal, 64).unwrap()
    }

    #[test]
    fn ninth_of_ten_is_accepted_and_eleventh_refused() {
        let mut p = port(EgressDiscipline::StrictPriority);
        for i in 0..9 {
            p.offer_data(data(i)).unwrap();
        }
        assert!(p.offer_data(data(9)).is_ok());
        assert!(p.offer_data(data(10)).is_err());
        assert_eq!(p.max_data(), 10);
    }

    #[test]
    fn strict_priority_serves_headers_first() {
        let mut p = port(EgressDiscipline::StrictPriority);
        p.offer_data(data(1)).unwrap();
        p.offer_header(header(2)).unwrap();
        assert!(p.dequeue().unwrap().is_header());
        assert!(p.dequeue().unwrap().is_data());
        assert!(p.dequeue().is_none());
    }

    #[test]
    fn only_data_is_served() {
        let mut p = port(EgressDiscipline::Weighted { header_weight: 10 });
        p.offer_data(data(1)).unwrap();
        assert_eq!(p.dequeue().unwrap().seqno, 1);
    }

    #[test]
    fn fifo_within_each_class() {
        let mut p = port(EgressDiscipline::StrictPriority);
        for i in 0..5 {
            p.offer_data(data(i)).unwrap();
            p.offer_header(header(100 + i)).unwrap();
        }
        let order: Vec<u64> = std::iter::from_fn(|| p.dequeue()).map(|p| p.seqno).collect();
        assert_eq!(order, vec![100, 101, 102, 103, 104, 0, 1, 2, 3, 4]);
    }

    #[test]
    fn weighted_byte_shares_follow_weight() {
        for w in [1u32, 4] {
            let mut p = port(EgressDiscipline::Weighted { header_weight: w });
            let (mut hb, mut db) = (0u64, 0u64);
            let mut next = 0;
            for _ in 0..2000 {
                while p.data_len() < 10 {
                    p.offer_data(data(next)).unwrap();
                    next += 1;
                }
                while p.header_len() < 100 {
                    p.offer_header(header(next)).unwrap();
                    next += 1;
                }
                let pkt = p.dequeue().unwrap();
                if pkt.is_header() { hb += pkt.size as u64 } else { db += pkt.size as u64 }
            }
            let share = hb as f64 / db as f64;
            assert!((share - w as f64).abs() < 0.05 * w as f64, "weight {w}: header/data bytes {share}");
        }
    }
}
