use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packet::{FlowId, PacketKind, PortId, TrimOrigin};
use crate::sim::SimTime;
use crate::switch::{ModeTraceRow, QueueSample, SwitchCounters, SwitchVariant};

/// Completion record of one flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub flow_id: FlowId,
    /// Unique payload bytes delivered within the run window.
    pub bytes: u64,
    pub start_ns: f64,
    /// Last unique delivery (start time if nothing arrived).
    pub end_ns: f64,
    pub goodput_gbps: f64,
    pub rtx_count: u64,
}

/// One delivered packet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub time: SimTime,
    pub flow_id: FlowId,
    pub seqno: u64,
    pub kind: PacketKind,
    pub trim_origin: TrimOrigin,
    pub egress_port: PortId,
}

/// Everything measured in one run.
#[derive(Clone, Debug)]
pub struct MetricStore {
    pub scenario: String,
    pub variant: SwitchVariant,
    pub n_senders: u16,
    pub duration: SimTime,
    pub counters: SwitchCounters,
    pub sent: u64,
    pub delivered_full: u64,
    pub delivered_header: u64,
    pub duplicates: u64,
    pub header_arrivals: Vec<SimTime>,
    pub flows: Vec<FlowRecord>,
    pub modes: Vec<ModeTraceRow>,
    pub queues: Vec<QueueSample>,
    pub trace: Vec<TraceRow>,
    /// Time the last event executed (the network drained).
    pub end_time: SimTime,
    pub events: u64,
}

impl MetricStore {
    /// Every sent packet arrived whole, arrived as a header, or was counted
    /// as dropped.
    pub fn check_conservation(&self) -> Result<()> {
        let accounted =
            self.delivered_full + self.delivered_header + self.counters.dod_dropped + self.counters.header_dropped;
        if accounted != self.sent {
            return Err(Error::Config(format!(
                "conservation violated in {}: sent {} but full {} + headers {} + dod drops {} + header drops {} = {}",
                self.scenario,
                self.sent,
                self.delivered_full,
                self.delivered_header,
                self.counters.dod_dropped,
                self.counters.header_dropped,
                accounted
            )));
        }
        Ok(())
    }

    pub fn total_trims(&self) -> u64 {
        self.counters.total_trims()
    }

    pub fn goodputs(&self) -> Vec<f64> {
        self.flows.iter().map(|f| f.goodput_gbps).collect()
    }

    pub fn mean_goodput(&self) -> f64 {
        mean(&self.goodputs())
    }

    pub fn max_dod_queue(&self) -> usize {
        self.counters.max_dod_queue.iter().copied().max().unwrap_or(0)
    }

    pub fn header_cdf(&self) -> Vec<(SimTime, f64)> {
        cdf(&self.header_arrivals)
    }

    /// Ports that raised at least one congestion signal.
    pub fn signalled_ports(&self) -> Vec<PortId> {
        (0..self.counters.signals_per_port.len())
            .filter(|&p| self.counters.signals_per_port[p] > 0)
            .map(|p| p as PortId)
            .collect()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Step CDF: each distinct value with the fraction of samples at or below it.
pub fn cdf(values: &[SimTime]) -> Vec<(SimTime, f64)> {
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len() as f64;
    let mut out: Vec<(SimTime, f64)> = Vec::new();
    for (i, t) in v.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *t => last.1 = frac,
            _ => out.push((*t, frac)),
        }
    }
    out
}

/// Value at cumulative fraction `q` of a step CDF.
pub fn quantile(cdf: &[(SimTime, f64)], q: f64) -> Option<SimTime> {
    cdf.iter().find(|(_, f)| *f >= q - 1e-12).map(|(t, _)| *t)
}

/// Extra trims relative to a baseline run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TrimExcess {
    Ratio(f64),
    /// The baseline trimmed nothing; the other run's trim count.
    Absolute(u64),
}

impl TrimExcess {
    pub fn ratio(self) -> Option<f64> {
        match self {
            TrimExcess::Ratio(r) => Some(r),
            TrimExcess::Absolute(_) => None,
        }
    }
}

pub fn trim_excess(run: &MetricStore, ideal: &MetricStore) -> TrimExcess {
    excess_of(run.total_trims(), ideal.total_trims())
}

pub fn excess_of(trims: u64, baseline: u64) -> TrimExcess {
    match (trims, baseline) {
        (0, 0) => TrimExcess::Ratio(0.0),
        (t, 0) => TrimExcess::Absolute(t),
        (t, b) => TrimExcess::Ratio((t as f64 - b as f64) / b as f64),
    }
}

/// Spearman rank correlation, ties given their mean rank.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean(&rx), mean(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
