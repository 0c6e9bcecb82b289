use crate::sim::SimTime;

pub type NodeId = usize;

pub const DATA_BYTES: u32 = 1000;
pub const ACK_BYTES: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PacketKind {
    Data,
    Ack,
    Udp,
}

/// A datagram moving through the topology.
///
/// For data packets `seq` is the packet sequence number. For ACKs it is the
/// cumulative acknowledgment (next sequence the receiver expects) and
/// `echo_seq` names the data packet that triggered it.
#[derive(Clone, Debug, PartialEq)]
pub struct Packet {
    pub id: u64,
    pub flow_id: usize,
    pub kind: PacketKind,
    pub size_bytes: u32,
    pub seq: u64,
    pub sent_at: SimTime,
    pub is_retransmit: bool,
    pub src: NodeId,
    pub dst: NodeId,
    pub echo_seq: u64,
    /// Bottleneck queue occupancy when this data packet began service;
    /// echoed back on its ACK.
    pub backlog_sample: Option<u32>,
}

impl Packet {
    #[allow(clippy::too_many_arguments)]
    pub fn data(
        id: u64,
        flow_id: usize,
        seq: u64,
        size_bytes: u32,
        sent_at: SimTime,
        is_retransmit: bool,
        src: NodeId,
        dst: NodeId,
    ) -> Self {
        assert!(size_bytes > 0, "packet size must be positive");
        Self {
            id,
            flow_id,
            kind: PacketKind::Data,
            size_bytes,
            seq,
            sent_at,
            is_retransmit,
            src,
            dst,
            echo_seq: seq,
            backlog_sample: None,
        }
    }

    /// ACK for `data`, carrying `cumack`. Source and destination swap.
    pub fn ack_for(id: u64, data: &Packet, cumack: u64, size_bytes: u32, now: SimTime) -> Self {
        assert!(size_bytes > 0, "packet size must be positive");
        Self {
            id,
            flow_id: data.flow_id,
            kind: PacketKind::Ack,
            size_bytes,
            seq: cumack,
            sent_at: now,
            is_retransmit: false,
            src: data.dst,
            dst: data.src,
            echo_seq: data.seq,
            backlog_sample: data.backlog_sample,
        }
    }

    pub fn udp(
        id: u64,
        flow_id: usize,
        seq: u64,
        size_bytes: u32,
        sent_at: SimTime,
        src: NodeId,
        dst: NodeId,
    ) -> Self {
        assert!(size_bytes > 0, "packet size must be positive");
        Self {
            id,
            flow_id,
            kind: PacketKind::Udp,
            size_bytes,
            seq,
            sent_at,
            is_retransmit: false,
            src,
            dst,
            echo_seq: seq,
            backlog_sample: None,
        }
    }

    pub fn cumack(&self) -> u64 {
        debug_assert_eq!(self.kind, PacketKind::Ack);
        self.seq
    }
}
