use serde::{Deserialize, Serialize};

use super::{Link, NodeId, Port};
use crate::error::ConfigError;

pub type PortId = usize;

/// Parameters of the dumbbell: one bottleneck between two routers, every
/// host attached to its router by a side link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumbbellParams {
    pub bottleneck_bw_bps: f64,
    /// One-way propagation delay of the bottleneck.
    #[serde(rename = "bottleneck_oneway_delay_s")]
    pub bottleneck_delay_s: f64,
    #[serde(default = "default_side_bw")]
    pub side_bw_bps: f64,
    #[serde(default = "default_side_delay")]
    pub side_delay_s: f64,
    /// Router buffer, in packets, on every router output port.
    pub buffer_pkts: usize,
    #[serde(default = "default_pkt_bytes")]
    pub pkt_bytes: u32,
    #[serde(default = "default_ack_bytes")]
    pub ack_bytes: u32,
    /// Buffer of the hosts' own interfaces.
    #[serde(default = "default_host_queue")]
    pub host_queue_pkts: usize,
}

fn default_side_bw() -> f64 {
    500e6
}
fn default_side_delay() -> f64 {
    0.1e-3
}
fn default_pkt_bytes() -> u32 {
    super::DATA_BYTES
}
fn default_ack_bytes() -> u32 {
    super::ACK_BYTES
}
fn default_host_queue() -> usize {
    100_000
}

impl Default for DumbbellParams {
    /// 40 Mbps / 50 ms bottleneck with a BDP/2 buffer.
    fn default() -> Self {
        Self {
            bottleneck_bw_bps: 40e6,
            bottleneck_delay_s: 0.05,
            side_bw_bps: default_side_bw(),
            side_delay_s: default_side_delay(),
            buffer_pkts: 250,
            pkt_bytes: default_pkt_bytes(),
            ack_bytes: default_ack_bytes(),
            host_queue_pkts: default_host_queue(),
        }
    }
}

impl DumbbellParams {
    /// Bandwidth-delay product of the bottleneck in data packets, using
    /// the bottleneck's round-trip propagation delay.
    pub fn bdp_pkts(&self) -> f64 {
        self.bottleneck_bw_bps * 2.0 * self.bottleneck_delay_s / (f64::from(self.pkt_bytes) * 8.0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("topology.bottleneck_bw_bps", self.bottleneck_bw_bps),
            (
                "topology.bottleneck_oneway_delay_s",
                self.bottleneck_delay_s,
            ),
            ("topology.side_bw_bps", self.side_bw_bps),
            ("topology.side_delay_s", self.side_delay_s),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(
                    field,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if self.buffer_pkts == 0 {
            return Err(ConfigError::new(
                "topology.buffer_pkts",
                "must be at least 1",
            ));
        }
        if self.host_queue_pkts == 0 {
            return Err(ConfigError::new(
                "topology.host_queue_pkts",
                "must be at least 1",
            ));
        }
        if self.pkt_bytes == 0 {
            return Err(ConfigError::new("topology.pkt_bytes", "must be positive"));
        }
        if self.ack_bytes == 0 {
            return Err(ConfigError::new("topology.ack_bytes", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    RouterA,
    RouterB,
    Source(usize),
    Sink(usize),
    UdpSource,
    UdpSink,
}

#[derive(Debug)]
pub struct Topology {
    pub nodes: Vec<NodeKind>,
    pub ports: Vec<Port>,
    pub bottleneck: PortId,
    pub reverse_bottleneck: PortId,
    routes: Vec<Vec<Option<PortId>>>,
}

pub const ROUTER_A: NodeId = 0;
pub const ROUTER_B: NodeId = 1;

impl Topology {
    pub fn next_hop(&self, at: NodeId, dst: NodeId) -> PortId {
        self.routes[at][dst].unwrap_or_else(|| panic!("no route from node {at} to node {dst}"))
    }

    pub fn source(&self, flow: usize) -> NodeId {
        self.find(NodeKind::Source(flow))
    }

    pub fn sink(&self, flow: usize) -> NodeId {
        self.find(NodeKind::Sink(flow))
    }

    pub fn udp_endpoints(&self) -> Option<(NodeId, NodeId)> {
        let s = self.nodes.iter().position(|k| *k == NodeKind::UdpSource)?;
        let d = self.nodes.iter().position(|k| *k == NodeKind::UdpSink)?;
        Some((s, d))
    }

    fn find(&self, kind: NodeKind) -> NodeId {
        self.nodes
            .iter()
            .position(|k| *k == kind)
            .unwrap_or_else(|| panic!("node {kind:?} not in topology"))
    }

    pub fn side_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().enumerate().filter_map(move |(i, p)| {
            (i != self.bottleneck && i != self.reverse_bottleneck).then_some(p)
        })
    }

    pub fn bottleneck_port(&self) -> &Port {
        &self.ports[self.bottleneck]
    }
}

fn is_left(kind: NodeKind) -> bool {
    matches!(kind, NodeKind::Source(_) | NodeKind::UdpSource)
}

/// Builds the dumbbell for `flows` TCP connections, plus a UDP host pair
/// when `with_udp` is set.
pub fn build_dumbbell(
    p: &DumbbellParams,
    flows: usize,
    with_udp: bool,
) -> Result<Topology, ConfigError> {
    p.validate()?;
    if flows == 0 {
        return Err(ConfigError::new("flows", "at least one flow is required"));
    }

    let mut nodes = vec![NodeKind::RouterA, NodeKind::RouterB];
    for f in 0..flows {
        nodes.push(NodeKind::Source(f));
        nodes.push(NodeKind::Sink(f));
    }
    if with_udp {
        nodes.push(NodeKind::UdpSource);
        nodes.push(NodeKind::UdpSink);
    }

    let side = || Link::new(p.side_bw_bps, p.side_delay_s);
    let mut ports = Vec::new();
    let mut routes = vec![vec![None; nodes.len()]; nodes.len()];

    let mut fwd = Port::new(
        ROUTER_A,
        ROUTER_B,
        Link::new(p.bottleneck_bw_bps, p.bottleneck_delay_s),
        p.buffer_pkts,
    );
    fwd.is_bottleneck = true;
    ports.push(fwd);
    let bottleneck = 0;
    ports.push(Port::new(
        ROUTER_B,
        ROUTER_A,
        Link::new(p.bottleneck_bw_bps, p.bottleneck_delay_s),
        p.buffer_pkts,
    ));
    let reverse_bottleneck = 1;

    for (host, &kind) in nodes.iter().enumerate().skip(2) {
        let router = if is_left(kind) { ROUTER_A } else { ROUTER_B };
        let up = ports.len();
        ports.push(Port::new(host, router, side(), p.host_queue_pkts));
        let down = ports.len();
        ports.push(Port::new(router, host, side(), p.buffer_pkts));
        for (dst, r) in routes[host].iter_mut().enumerate() {
            if dst != host {
                *r = Some(up);
            }
        }
        routes[router][host] = Some(down);
        let far = if router == ROUTER_A {
            ROUTER_B
        } else {
            ROUTER_A
        };
        routes[far][host] = Some(if far == ROUTER_A {
            bottleneck
        } else {
            reverse_bottleneck
        });
    }

    Ok(Topology {
        nodes,
        ports,
        bottleneck,
        reverse_bottleneck,
        routes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bdp_is_500() {
        let p = DumbbellParams::default();
        assert!((p.bdp_pkts() - 500.0).abs() < 1e-9);
        let t = build_dumbbell(&p, 1, false).unwrap();
        let b = t.bottleneck_port();
        assert_eq!(b.link.bandwidth_bps, 40e6);
        assert_eq!(b.link.prop_delay_s, 0.05);
        assert_eq!(b.queue.capacity(), 250);
    }

    #[test]
    fn one_flow_structure() {
        let t = build_dumbbell(&DumbbellParams::default(), 1, false).unwrap();
        // forward: src->A, B->sink; reverse: sink->B, A->src
        assert_eq!(t.side_ports().count(), 4);
        let side_fwd = t
            .side_ports()
            .filter(|p| p.from == t.source(0) || p.to == t.sink(0))
            .count();
        assert_eq!(side_fwd, 2);
        for p in t.side_ports() {
            assert_eq!(p.link.bandwidth_bps, 500e6);
            assert_eq!(p.link.prop_delay_s, 0.1e-3);
        }
        assert_eq!(t.ports[t.reverse_bottleneck].queue.capacity(), 250);
    }

    #[test]
    fn routes_cross_the_bottleneck() {
        let t = build_dumbbell(&DumbbellParams::default(), 2, true).unwrap();
        let (src, dst) = (t.source(1), t.sink(1));
        let first = t.next_hop(src, dst);
        assert_eq!(t.ports[first].to, ROUTER_A);
        assert_eq!(t.next_hop(ROUTER_A, dst), t.bottleneck);
        assert_eq!(t.ports[t.next_hop(ROUTER_B, dst)].to, dst);
        assert_eq!(t.next_hop(ROUTER_B, src), t.reverse_bottleneck);
        let (us, ud) = t.udp_endpoints().unwrap();
        assert_eq!(t.next_hop(ROUTER_A, ud), t.bottleneck);
        assert_eq!(t.ports[t.next_hop(us, ud)].to, ROUTER_A);
    }

    #[test]
    fn zero_buffer_rejected() {
        let p = DumbbellParams {
            buffer_pkts: 0,
            ..Default::default()
        };
        let err = build_dumbbell(&p, 1, false).unwrap_err();
        assert_eq!(err.field, "topology.buffer_pkts");
    }

    #[test]
    fn nonpositive_rate_rejected() {
        let p = DumbbellParams {
            bottleneck_bw_bps: 0.0,
            ..Default::default()
        };
        assert!(build_dumbbell(&p, 1, false).is_err());
        assert!(build_dumbbell(&DumbbellParams::default(), 0, false).is_err());
    }
}
