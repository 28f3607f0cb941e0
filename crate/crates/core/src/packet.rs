//! Packets, flows and congestion signals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::SimTime;

pub const DEFAULT_MTU: u32 = 1500;
/// Size of a trimmed header and of every control packet.
pub const DEFAULT_HEADER_SIZE: u32 = 64;

pub type FlowId = u32;
pub type HostId = u16;
pub type PortId = u16;
pub type PipeId = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PacketKind {
    Data,
    TrimmedHeader,
    Pull,
    Update,
    Notify,
}

impl PacketKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PacketKind::Data => "DATA",
            PacketKind::TrimmedHeader => "TRIMMED_HEADER",
            PacketKind::Pull => "PULL",
            PacketKind::Update => "UPDATE",
            PacketKind::Notify => "NOTIFY",
        }
    }
}

/// Which mechanism cut the payload off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrimOrigin {
    None,
    /// Meter (or queue-read) decision in an ingress pipeline.
    Ingress,
    /// Deflected whole to a recirculation port, trimmed on the way back.
    Dod,
    /// Output-queued switch trimming at enqueue.
    Ideal,
    /// Header mirrored to the recirculation port on overflow.
    Mod,
}

impl TrimOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            TrimOrigin::None => "NONE",
            TrimOrigin::Ingress => "INGRESS",
            TrimOrigin::Dod => "DOD",
            TrimOrigin::Ideal => "IDEAL",
            TrimOrigin::Mod => "MOD",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packet {
    pub flow_id: FlowId,
    pub seqno: u64,
    pub size: u32,
    pub kind: PacketKind,
    pub src_host: HostId,
    pub dst_host: HostId,
    pub ingress_port: PortId,
    pub ingress_pipe: PipeId,
    pub egress_port: PortId,
    pub trim_origin: TrimOrigin,
    pub send_time: SimTime,
    /// When the packet left its ingress pipeline towards the traffic manager.
    pub ingress_time: SimTime,
}

impl Packet {
    /// Fresh DATA packet as emitted by a sender NIC.
    #[allow(clippy::too_many_arguments)]
    pub fn data(
        flow_id: FlowId,
        seqno: u64,
        mtu: u32,
        src_host: HostId,
        dst_host: HostId,
        ingress_port: PortId,
        ingress_pipe: PipeId,
        egress_port: PortId,
        send_time: SimTime,
    ) -> Self {
        Packet {
            flow_id,
            seqno,
            size: mtu,
            kind: PacketKind::Data,
            src_host,
            dst_host,
            ingress_port,
            ingress_pipe,
            egress_port,
            trim_origin: TrimOrigin::None,
            send_time,
            ingress_time: send_time,
        }
    }

    pub fn is_data(&self) -> bool {
        self.kind == PacketKind::Data
    }

    pub fn is_header(&self) -> bool {
        self.kind == PacketKind::TrimmedHeader
    }

    /// Cuts the payload, keeping every identity field.
    pub fn trim(&self, origin: TrimOrigin, header_size: u32) -> Result<Packet> {
        if self.kind != PacketKind::Data {
            return Err(Error::NotTrimmable(self.kind));
        }
        debug_assert_ne!(origin, TrimOrigin::None);
        Ok(Packet { kind: PacketKind::TrimmedHeader, size: header_size, trim_origin: origin, ..self.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    pub flow_id: FlowId,
    pub src_host: HostId,
    pub dst_host: HostId,
    pub total_packets: u64,
    pub initial_window: u64,
}

impl Flow {
    pub fn new(flow_id: FlowId, src_host: HostId, dst_host: HostId, total_packets: u64, initial_window: u64) -> Result<Self> {
        if initial_window == 0 {
            return Err(Error::Config(format!("flow {flow_id}: initial window must be at least 1")));
        }
        if total_packets < initial_window {
            return Err(Error::Config(format!(
                "flow {flow_id}: {total_packets} packets is less than the initial window {initial_window}"
            )));
        }
        Ok(Flow { flow_id, src_host, dst_host, total_packets, initial_window })
    }
}

/// Congestion notification raised when a deflected packet leaves a
/// recirculation queue. The two-hop UPDATE/NOTIFY encoding used by hardware
/// is folded into the delivery delay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CongestionSignal {
    pub egress_port: PortId,
    pub origin_pipe: PipeId,
    pub emit_time: SimTime,
}
