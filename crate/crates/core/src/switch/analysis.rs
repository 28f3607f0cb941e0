//! Fluid estimate of how hard a traffic pattern loads the recirculation
//! ports when the ingress meters run at line rate.

use serde::Serialize;

use crate::packet::PortId;
use crate::sim::Rate;

use super::SwitchConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OversubscriptionAnalysis {
    /// Traffic offered by all senders.
    pub offered_bps: f64,
    /// What survives ingress metering and reaches the traffic manager.
    pub past_ingress_bps: f64,
    /// What the egress ports can carry.
    pub forwarded_bps: f64,
    /// Overflow headed for the recirculation ports.
    pub deflected_bps: f64,
    pub deflected_per_pipe_bps: Vec<f64>,
    /// Deflected load over total recirculation capacity; above 1 the
    /// recirculation queues grow without bound.
    pub ratio: f64,
}

/// `flows` holds one `(ingress_port, egress_port)` pair per sender, each
/// sending at line rate.
pub fn worst_case_check(cfg: &SwitchConfig, flows: &[(PortId, PortId)]) -> OversubscriptionAnalysis {
    let line = cfg.line_rate().as_bps() as f64;
    let n_pipes = cfg.n_pipes as usize;
    let n_ports = cfg.n_ports as usize;
    // offered[port][pipe]
    let mut offered = vec![vec![0.0f64; n_pipes]; n_ports];
    for &(ingress, egress) in flows {
        offered[egress as usize][cfg.pipe_of(ingress) as usize] += line;
    }
    let mut out = OversubscriptionAnalysis {
        offered_bps: 0.0,
        past_ingress_bps: 0.0,
        forwarded_bps: 0.0,
        deflected_bps: 0.0,
        deflected_per_pipe_bps: vec![0.0; n_pipes],
        ratio: 0.0,
    };
    for per_pipe in &offered {
        let admitted: Vec<f64> = per_pipe.iter().map(|&o| o.min(line)).collect();
        let total: f64 = admitted.iter().sum();
        out.offered_bps += per_pipe.iter().sum::<f64>();
        out.past_ingress_bps += total;
        out.forwarded_bps += total.min(line);
        let excess = (total - line).max(0.0);
        out.deflected_bps += excess;
        if excess > 0.0 {
            for (pipe, a) in admitted.iter().enumerate() {
                out.deflected_per_pipe_bps[pipe] += excess * a / total;
            }
        }
    }
    out.ratio = out.deflected_bps / (line * n_pipes as f64);
    out
}

/// Deflected load the recirculation port of one pipeline must absorb, as a
/// multiple of its capacity.
pub fn pipe_ratio(analysis: &OversubscriptionAnalysis, pipe: usize, line: Rate) -> f64 {
    analysis.deflected_per_pipe_bps[pipe] / line.as_bps() as f64
}
