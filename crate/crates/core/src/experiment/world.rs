use crate::error::Result;
use crate::net::{build_dumbbell, NodeId, NodeKind, Offer, Packet, PacketKind, PortId, Topology};
use crate::scalar::Scalar;
use crate::sim::{EventQueue, Popped, RngStream, RunStats, SimTime};
use crate::tcp::{AckRecord, LossEvent, Receiver, Sender, SenderStats};
use crate::traffic::udp_next_emission;

use super::config::ScenarioConfig;
use super::metrics::{compute_link_utilization, jain_index, FlowMetrics, MetricsReport};
use super::trace::TraceRecord;

#[derive(Clone, Debug)]
enum Ev {
    Arrive { node: NodeId, packet: Packet },
    PortDone { port: PortId },
    Timer { flow: usize },
    FlowStart { flow: usize },
    UdpEmit,
    Sample,
    Snapshot { idx: usize },
}

/// A packet discarded by a full queue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropRecord {
    pub time_s: f64,
    pub port: PortId,
    pub kind: PacketKind,
    pub flow_id: usize,
    pub seq: u64,
}

/// Network-wide packet accounting. Every injected packet is either
/// delivered, dropped, waiting in a queue, or on a link.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Conservation {
    pub injected: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub queued: u64,
    pub on_links: u64,
}

impl Conservation {
    pub fn is_balanced(&self) -> bool {
        self.injected == self.delivered + self.dropped + self.queued + self.on_links
    }
}

#[derive(Clone, Debug, Default)]
struct Snapshot {
    max_sent: Vec<u64>,
    drops: Vec<u64>,
}

/// Per-flow results kept after the run.
#[derive(Clone, Debug)]
pub struct FlowSummary<T> {
    pub flow_id: usize,
    pub controller: String,
    pub started_at_s: Option<f64>,
    pub stats: SenderStats,
    pub losses: Vec<LossEvent<T>>,
    pub ack_log: Option<Vec<AckRecord<T>>>,
    pub delivered_pkts: u64,
    pub drops: u64,
    pub final_cwnd: T,
    pub final_ssthresh: T,
    /// In-order delivery progress: (time, packets delivered so far).
    pub delivery: Vec<(f64, u64)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UdpSummary {
    pub sent: u64,
    pub received: u64,
    pub dropped: u64,
}

/// Everything a finished run produces.
#[derive(Clone, Debug)]
pub struct ScenarioOutcome<T> {
    pub scenario_id: String,
    pub traces: Vec<TraceRecord>,
    pub reports: Vec<MetricsReport>,
    pub flows: Vec<FlowSummary<T>>,
    pub drops: Vec<DropRecord>,
    pub udp: Option<UdpSummary>,
    pub conservation: Conservation,
    pub run: RunStats,
}

/// Discrete-event simulation of one scenario.
pub struct Simulation<T: Scalar> {
    cfg: ScenarioConfig,
    events: EventQueue<Ev>,
    topo: Topology,
    senders: Vec<Sender<T>>,
    receivers: Vec<Receiver>,
    started: Vec<Option<f64>>,
    timer_at: Vec<Option<SimTime>>,
    udp_nodes: Option<(NodeId, NodeId)>,
    udp: UdpSummary,
    udp_seq: u64,
    next_packet_id: u64,
    traces: Vec<TraceRecord>,
    drops: Vec<DropRecord>,
    flow_drops: Vec<u64>,
    counters: Conservation,
    boundaries: Vec<f64>,
    snapshots: Vec<Snapshot>,
}

impl<T: Scalar> Simulation<T> {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.flows.len();
        let topo = build_dumbbell(&cfg.topology, n, cfg.cross_traffic.is_some())?;
        let mut senders = Vec::with_capacity(n);
        for (i, f) in cfg.flows.iter().enumerate() {
            let ctrl = f.controller.build::<T>(cfg.topology.pkt_bytes);
            let mut s = Sender::new(
                i,
                topo.source(i),
                topo.sink(i),
                cfg.topology.pkt_bytes,
                &cfg.tcp,
                ctrl,
            )
            .with_limit(f.max_packets);
            if cfg.measurement.record_acks {
                s = s.with_ack_log();
            }
            senders.push(s);
        }

        let mut boundaries: Vec<f64> = cfg.windows().iter().flat_map(|&(a, b)| [a, b]).collect();
        boundaries.sort_by(f64::total_cmp);
        boundaries.dedup();

        let mut sim = Self {
            events: EventQueue::new(),
            udp_nodes: topo.udp_endpoints(),
            topo,
            senders,
            receivers: vec![Receiver::new(); n],
            started: vec![None; n],
            timer_at: vec![None; n],
            udp: UdpSummary::default(),
            udp_seq: 0,
            next_packet_id: 0,
            traces: Vec::new(),
            drops: Vec::new(),
            flow_drops: vec![0; n],
            counters: Conservation::default(),
            snapshots: Vec::with_capacity(boundaries.len()),
            boundaries,
            cfg: cfg.clone(),
        };

        let mut rng = RngStream::new(cfg.seed);
        for (i, f) in cfg.flows.iter().enumerate() {
            let jitter = if f.start_jitter_s > 0.0 {
                rng.next_f64() * f.start_jitter_s
            } else {
                0.0
            };
            sim.events.schedule(
                SimTime::from_secs(f.start_s + jitter),
                Ev::FlowStart { flow: i },
            );
        }
        if let Some(udp) = &cfg.cross_traffic {
            sim.events
                .schedule(SimTime::from_secs(udp.start_s), Ev::UdpEmit);
        }
        if cfg.measurement.trace_interval_s > 0.0 {
            sim.events.schedule(
                SimTime::from_secs(cfg.measurement.trace_interval_s),
                Ev::Sample,
            );
        }
        for (idx, &t) in sim.boundaries.iter().enumerate() {
            sim.events
                .schedule(SimTime::from_secs(t), Ev::Snapshot { idx });
        }
        Ok(sim)
    }

    /// Runs to the horizon and collects results.
    pub fn run(mut self) -> ScenarioOutcome<T> {
        self.events
            .set_horizon(SimTime::from_secs(self.cfg.horizon_s));
        let mut processed = 0;
        while let Popped::Event(ev) = self.events.pop_next() {
            processed += 1;
            self.handle(ev.payload);
        }
        let run = RunStats {
            events_processed: processed,
            final_clock: self.events.now(),
        };
        self.finish(run)
    }

    fn now(&self) -> SimTime {
        self.events.now()
    }

    fn handle(&mut self, ev: Ev) {
        match ev {
            Ev::Arrive { node, packet } => {
                self.counters.on_links -= 1;
                self.arrive(node, packet);
            }
            Ev::PortDone { port } => {
                let now = self.now();
                let p = &mut self.topo.ports[port];
                p.finish_service();
                if let Some((done_at, arrive_at, packet)) = p.start_next(now) {
                    let to = p.to;
                    self.counters.queued -= 1;
                    self.on_wire(port, to, done_at, arrive_at, packet);
                }
            }
            Ev::Timer { flow } => {
                let now = self.now();
                if self.timer_at[flow] != Some(now) {
                    return;
                }
                self.timer_at[flow] = None;
                self.senders[flow].on_timer(now);
                self.after_sender(flow);
            }
            Ev::FlowStart { flow } => {
                let now = self.now();
                self.started[flow] = Some(now.secs());
                self.senders[flow].start(now);
                self.after_sender(flow);
                self.record(flow);
            }
            Ev::UdpEmit => self.emit_udp(),
            Ev::Sample => {
                for flow in 0..self.senders.len() {
                    if self.started[flow].is_some() {
                        self.record(flow);
                    }
                }
                self.events
                    .schedule_in(self.cfg.measurement.trace_interval_s, Ev::Sample);
            }
            Ev::Snapshot { idx } => {
                debug_assert_eq!(idx, self.snapshots.len());
                self.snapshots.push(self.snapshot());
            }
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            max_sent: self.senders.iter().map(|s| s.max_sent()).collect(),
            drops: self.flow_drops.clone(),
        }
    }

    fn arrive(&mut self, node: NodeId, packet: Packet) {
        if node != packet.dst {
            self.forward(node, packet);
            return;
        }
        self.counters.delivered += 1;
        let now = self.now();
        match (self.topo.nodes[node], packet.kind) {
            (NodeKind::Sink(flow), PacketKind::Data) => {
                let cumack = self.receivers[flow].on_data(packet.seq, now);
                let id = self.packet_id();
                let ack = Packet::ack_for(id, &packet, cumack, self.cfg.topology.ack_bytes, now);
                self.inject(node, ack);
            }
            (NodeKind::Source(flow), PacketKind::Ack) => {
                self.senders[flow].on_ack(&packet, now);
                self.after_sender(flow);
            }
            (NodeKind::UdpSink, PacketKind::Udp) => self.udp.received += 1,
            (kind, pk) => panic!("{pk:?} packet delivered to {kind:?}"),
        }
    }

    fn packet_id(&mut self) -> u64 {
        let id = self.next_packet_id;
        self.next_packet_id += 1;
        id
    }

    fn inject(&mut self, node: NodeId, packet: Packet) {
        self.counters.injected += 1;
        self.forward(node, packet);
    }

    fn forward(&mut self, node: NodeId, packet: Packet) {
        let now = self.now();
        let port_id = self.topo.next_hop(node, packet.dst);
        let port = &mut self.topo.ports[port_id];
        let to = port.to;
        match port.offer(packet, now) {
            Offer::Started {
                done_at,
                arrive_at,
                packet,
            } => self.on_wire(port_id, to, done_at, arrive_at, packet),
            Offer::Queued => self.counters.queued += 1,
            Offer::Dropped(p) => {
                self.counters.dropped += 1;
                match p.kind {
                    PacketKind::Udp => self.udp.dropped += 1,
                    _ => self.flow_drops[p.flow_id] += 1,
                }
                self.drops.push(DropRecord {
                    time_s: now.secs(),
                    port: port_id,
                    kind: p.kind,
                    flow_id: p.flow_id,
                    seq: p.seq,
                });
            }
        }
    }

    fn on_wire(
        &mut self,
        port: PortId,
        to: NodeId,
        done_at: SimTime,
        arrive_at: SimTime,
        packet: Packet,
    ) {
        self.counters.on_links += 1;
        self.events.schedule(done_at, Ev::PortDone { port });
        self.events
            .schedule(arrive_at, Ev::Arrive { node: to, packet });
    }

    /// Moves a sender's outbox into the network and keeps its timer event
    /// in step with its deadline.
    fn after_sender(&mut self, flow: usize) {
        let src = self.topo.source(flow);
        let out: Vec<Packet> = self.senders[flow].drain_outbox().collect();
        for mut p in out {
            p.id = self.packet_id();
            self.inject(src, p);
        }
        // A pending timer event earlier than the deadline stays; when it
        // fires it finds the deadline ahead and re-arms through here.
        if let Some(deadline) = self.senders[flow].timer_deadline() {
            if self.timer_at[flow].is_none_or(|at| at > deadline) {
                let deadline = deadline.max(self.now());
                self.timer_at[flow] = Some(deadline);
                self.events.schedule(deadline, Ev::Timer { flow });
            }
        }
        if self.senders[flow].take_trace_flag() {
            self.record(flow);
        }
    }

    fn emit_udp(&mut self) {
        let Some(src_cfg) = self.cfg.cross_traffic.clone() else {
            return;
        };
        let (src, dst) = self.udp_nodes.expect("topology built with UDP hosts");
        let now = self.now();
        let id = self.packet_id();
        let p = Packet::udp(
            id,
            usize::MAX,
            self.udp_seq,
            src_cfg.pkt_bytes,
            now,
            src,
            dst,
        );
        self.udp_seq += 1;
        self.udp.sent += 1;
        self.inject(src, p);
        // Emission times come from the index so rounding never accumulates.
        if let Some(t) = src_cfg.emission_time(self.udp_seq) {
            debug_assert!(udp_next_emission(&src_cfg, now).is_some());
            self.events.schedule(SimTime::from_secs(t), Ev::UdpEmit);
        }
    }

    fn record(&mut self, flow: usize) {
        let s = &self.senders[flow];
        self.traces.push(TraceRecord {
            time_s: self.now().secs(),
            flow_id: flow,
            cwnd: s.cwnd().as_f64(),
            ssthresh: s.ssthresh().as_f64(),
            phase: s.phase(),
            highest_seq_sent: s.max_sent(),
            highest_acked: s.highest_acked(),
            queue_pkts: self.topo.bottleneck_port().queue.occupancy() as u64,
            n_est: s.controller().probe().map(|p| p.n_est.as_f64()),
        });
    }

    fn finish(mut self, run: RunStats) -> ScenarioOutcome<T> {
        // Window boundaries beyond the last processed event still need a
        // snapshot (for instance a zero-length run).
        while self.snapshots.len() < self.boundaries.len() {
            self.snapshots.push(self.snapshot());
        }
        self.counters.queued = self
            .topo
            .ports
            .iter()
            .map(|p| p.queue.occupancy() as u64)
            .sum();
        let reports = self.reports();
        let flows = self
            .senders
            .iter()
            .zip(&self.receivers)
            .enumerate()
            .map(|(i, (s, r))| FlowSummary {
                flow_id: i,
                controller: self.cfg.flows[i].controller.name().to_string(),
                started_at_s: self.started[i],
                stats: s.stats(),
                losses: s.losses().to_vec(),
                ack_log: s.ack_log().map(<[_]>::to_vec),
                delivered_pkts: r.delivered(),
                drops: self.flow_drops[i],
                final_cwnd: s.cwnd(),
                final_ssthresh: s.ssthresh(),
                delivery: r.delivery_log().to_vec(),
            })
            .collect();
        ScenarioOutcome {
            scenario_id: self.cfg.id.clone(),
            traces: self.traces,
            reports,
            flows,
            drops: self.drops,
            udp: self.cfg.cross_traffic.as_ref().map(|_| self.udp),
            conservation: self.counters,
            run,
        }
    }

    fn snapshot_at(&self, t: f64) -> &Snapshot {
        let idx = self
            .boundaries
            .iter()
            .position(|&b| b == t)
            .expect("window boundary registered");
        &self.snapshots[idx]
    }

    fn reports(&self) -> Vec<MetricsReport> {
        let bw = self.cfg.topology.bottleneck_bw_bps;
        let bits_per_pkt = u64::from(self.cfg.topology.pkt_bytes) * 8;
        self.cfg
            .windows()
            .into_iter()
            .map(|(start, end)| {
                let len = end - start;
                let (s0, s1) = (self.snapshot_at(start), self.snapshot_at(end));
                let flows: Vec<FlowMetrics> = self
                    .receivers
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let bits = r.delivered_between(start, end) * bits_per_pkt;
                        FlowMetrics {
                            flow_id: i,
                            controller: self.cfg.flows[i].controller.name().to_string(),
                            utilization: compute_link_utilization(bits, bw, len),
                            highest_seq_sent: s1.max_sent[i],
                            throughput_bps: if len > 0.0 { bits as f64 / len } else { 0.0 },
                            drops: s1.drops[i] - s0.drops[i],
                        }
                    })
                    .collect();
                let total_bits: u64 = self
                    .receivers
                    .iter()
                    .map(|r| r.delivered_between(start, end) * bits_per_pkt)
                    .sum();
                let tputs: Vec<f64> = flows.iter().map(|f| f.throughput_bps).collect();
                MetricsReport {
                    scenario_id: self.cfg.id.clone(),
                    window_start_s: start,
                    window_end_s: end,
                    link_utilization: compute_link_utilization(total_bits, bw, len),
                    jain_fairness: jain_index(&tputs),
                    drops_total: flows.iter().map(|f| f.drops).sum(),
                    flows,
                }
            })
            .collect()
    }
}
