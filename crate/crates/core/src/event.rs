use crate::packet::{FlowId, HostId, Packet, PipeId, PortId};

/// Every event in a trimming simulation.
#[derive(Clone, Debug)]
pub enum Event {
    /// Sender NIC finished putting a packet on the wire.
    SenderTxDone { host: HostId },
    /// Packet fully received on a switch ingress port.
    IngressArrive(Packet),
    /// Queue-reading ingress pipeline processes its next packet.
    PipeIssue { pipe: PipeId },
    /// Packet leaves a lagged ingress pipeline.
    TmArrive(Packet),
    /// Traffic manager admits the packets that reached one egress port at this instant.
    TmAdmit { port: PortId },
    EgressTxDone { port: PortId },
    DodTxDone { pipe: PipeId },
    /// Recirculated header reaches its original egress port.
    RecircArrive(Packet),
    SignalArrive { pipe: PipeId, port: PortId },
    ReceiverArrive(Packet),
    PacerTick { port: PortId },
    PullArrive { flow: FlowId, rtx: Option<u64> },
}
