//! Packets, links, droptail queues and the dumbbell topology.

mod link;
mod packet;
mod queue;
mod topology;

pub use link::{Link, Offer, Port};
pub use packet::{NodeId, Packet, PacketKind, ACK_BYTES, DATA_BYTES};
pub use queue::{DropTailQueue, Enqueue};
pub use topology::{build_dumbbell, DumbbellParams, NodeKind, PortId, Topology};
