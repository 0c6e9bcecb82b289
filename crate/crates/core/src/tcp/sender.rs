use crate::cc::{CongestionControl, ControllerView, IncreaseMode, WindowUpdate};
use crate::net::{NodeId, Packet};
use crate::scalar::Scalar;
use crate::sim::SimTime;

use super::{PartialAckTimer, PartialAckWindow, Phase, RttEstimator, TcpParams};

#[derive(Clone, Copy, Debug)]
struct SendRecord {
    sent_at: SimTime,
    retransmitted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    FastRetransmit,
    Timeout,
}

/// A loss reaction taken by the sender.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossEvent<T> {
    pub time_s: f64,
    pub kind: LossKind,
    pub cwnd_before: T,
    pub cwnd_after: T,
    pub ssthresh_after: T,
}

/// One per-packet window update outside fast recovery.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AckRecord<T> {
    pub time_s: f64,
    pub acked_seq: u64,
    pub cwnd_before: T,
    pub cwnd_after: T,
    pub phase: Phase,
    pub n_est: Option<T>,
    pub mode: Option<IncreaseMode>,
    pub congestion_event_no: Option<u32>,
    /// Bottleneck occupancy echoed by the ACK.
    pub backlog_sample: Option<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SenderStats {
    pub data_sent: u64,
    pub retransmits: u64,
    pub acks_received: u64,
    pub dup_acks: u64,
    pub fast_retransmits: u64,
    pub timeouts: u64,
}

/// Packet-counted TCP sender with NewReno loss recovery.
///
/// The sender never touches the event queue. Packets to transmit collect
/// in an outbox and the retransmission deadline is exposed through
/// [`Sender::timer_deadline`]; the caller moves both into the simulation.
pub struct Sender<T: Scalar> {
    pub flow_id: usize,
    src: NodeId,
    dst: NodeId,
    pkt_bytes: u32,
    params: TcpParams,
    controller: Box<dyn CongestionControl<T>>,
    /// Stop after this many distinct packets; `None` means unlimited.
    limit: Option<u64>,

    cwnd: T,
    ssthresh: T,
    phase: Phase,
    in_recovery: bool,
    next_seq: u64,
    max_sent: u64,
    highest_acked: u64,
    dup_acks: u32,
    recover_point: Option<u64>,
    partial_acks_seen: u32,
    rtt: RttEstimator,
    /// Tick-rounded samples seen by the controller.
    ctrl_base_rtt_s: Option<f64>,
    ctrl_last_rtt_s: Option<f64>,
    send_log: Vec<SendRecord>,
    timer_deadline: Option<SimTime>,

    outbox: Vec<Packet>,
    stats: SenderStats,
    losses: Vec<LossEvent<T>>,
    ack_log: Option<Vec<AckRecord<T>>>,
    trace_pending: bool,
}

impl<T: Scalar> Sender<T> {
    pub fn new(
        flow_id: usize,
        src: NodeId,
        dst: NodeId,
        pkt_bytes: u32,
        params: &TcpParams,
        controller: Box<dyn CongestionControl<T>>,
    ) -> Self {
        let ssthresh = controller.initial_ssthresh();
        Self {
            flow_id,
            src,
            dst,
            pkt_bytes,
            params: params.clone(),
            controller,
            limit: None,
            cwnd: T::lit(params.initial_cwnd),
            ssthresh,
            phase: Phase::Startup,
            in_recovery: false,
            next_seq: 0,
            max_sent: 0,
            highest_acked: 0,
            dup_acks: 0,
            recover_point: None,
            partial_acks_seen: 0,
            rtt: RttEstimator::new(params.initial_rto_s, params.min_rto_s, params.max_rto_s),
            ctrl_base_rtt_s: None,
            ctrl_last_rtt_s: None,
            send_log: Vec::new(),
            timer_deadline: None,
            outbox: Vec::new(),
            stats: SenderStats::default(),
            losses: Vec::new(),
            ack_log: None,
            trace_pending: false,
        }
    }

    pub fn with_limit(mut self, packets: Option<u64>) -> Self {
        self.limit = packets;
        self
    }

    /// Keep an [`AckRecord`] for every per-packet window update.
    pub fn with_ack_log(mut self) -> Self {
        self.ack_log = Some(Vec::new());
        self
    }

    pub fn cwnd(&self) -> T {
        self.cwnd
    }

    pub fn ssthresh(&self) -> T {
        self.ssthresh
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    /// One past the highest sequence number ever transmitted.
    pub fn max_sent(&self) -> u64 {
        self.max_sent
    }

    /// Cumulative ACK point: every packet below it is acknowledged.
    pub fn highest_acked(&self) -> u64 {
        self.highest_acked
    }

    pub fn dup_acks(&self) -> u32 {
        self.dup_acks
    }

    pub fn recover_point(&self) -> Option<u64> {
        self.recover_point
    }

    pub fn in_flight(&self) -> u64 {
        self.next_seq - self.highest_acked
    }

    pub fn rtt(&self) -> &RttEstimator {
        &self.rtt
    }

    pub fn controller(&self) -> &dyn CongestionControl<T> {
        self.controller.as_ref()
    }

    pub fn stats(&self) -> SenderStats {
        self.stats
    }

    pub fn losses(&self) -> &[LossEvent<T>] {
        &self.losses
    }

    pub fn ack_log(&self) -> Option<&[AckRecord<T>]> {
        self.ack_log.as_deref()
    }

    pub fn timer_deadline(&self) -> Option<SimTime> {
        self.timer_deadline
    }

    pub fn finished(&self) -> bool {
        self.limit.is_some_and(|l| self.highest_acked >= l)
    }

    pub fn drain_outbox(&mut self) -> std::vec::Drain<'_, Packet> {
        self.outbox.drain(..)
    }

    /// True once after a loss reaction or phase change.
    pub fn take_trace_flag(&mut self) -> bool {
        std::mem::take(&mut self.trace_pending)
    }

    fn view(&self, now: SimTime) -> ControllerView<T> {
        ControllerView {
            now,
            cwnd: self.cwnd,
            ssthresh: self.ssthresh,
            base_rtt_s: self.ctrl_base_rtt_s.map(T::lit),
            last_rtt_s: self.ctrl_last_rtt_s.map(T::lit),
            rtt_sample_s: None,
            phase: self.phase,
            acked_pkts: 0,
            acked_seq: self.highest_acked,
            snd_nxt: self.next_seq,
            echo_sent_at: None,
        }
    }

    fn quantize(&self, rtt_s: f64) -> f64 {
        let tick = self.params.rtt_sample_tick_s;
        if tick > 0.0 {
            // whole ticks elapsed; the epsilon absorbs division round-off
            (rtt_s / tick + 1e-9).floor().max(1.0) * tick
        } else {
            rtt_s
        }
    }

    fn apply(&mut self, up: WindowUpdate<T>) {
        if let Some(c) = up.set_cwnd {
            self.cwnd = c;
        }
        self.cwnd = (self.cwnd + up.increment).max(T::one());
        if let Some(s) = up.set_ssthresh {
            self.ssthresh = s;
        }
    }

    fn restart_timer(&mut self, now: SimTime) {
        self.timer_deadline = Some(now + self.rtt.rto_s());
    }

    fn refresh_phase(&mut self, now: SimTime) {
        let phase = if self.in_recovery {
            Phase::FastRecovery
        } else if self.controller.in_startup(&self.view(now)) {
            Phase::Startup
        } else {
            Phase::CongestionAvoidance
        };
        if phase != self.phase {
            self.phase = phase;
            self.trace_pending = true;
        }
    }

    fn transmit(&mut self, seq: u64, now: SimTime) {
        let retransmit = seq < self.max_sent;
        let idx = seq as usize;
        if idx == self.send_log.len() {
            self.send_log.push(SendRecord {
                sent_at: now,
                retransmitted: false,
            });
        } else {
            let rec = &mut self.send_log[idx];
            rec.sent_at = now;
            rec.retransmitted |= retransmit;
        }
        self.max_sent = self.max_sent.max(seq + 1);
        self.stats.data_sent += 1;
        if retransmit {
            self.stats.retransmits += 1;
        }
        self.outbox.push(Packet::data(
            0,
            self.flow_id,
            seq,
            self.pkt_bytes,
            now,
            retransmit,
            self.src,
            self.dst,
        ));
    }

    /// Releases packets while the usable window allows. Returns how many
    /// were queued for transmission.
    pub fn try_send(&mut self, now: SimTime) -> u64 {
        let window = self.cwnd.whole_packets();
        let mut sent = 0;
        while self.next_seq - self.highest_acked < window {
            if self.limit.is_some_and(|l| self.next_seq >= l) {
                break;
            }
            self.transmit(self.next_seq, now);
            self.next_seq += 1;
            sent += 1;
        }
        if sent > 0 && self.timer_deadline.is_none() {
            self.restart_timer(now);
        }
        sent
    }

    /// Starts the flow: transmits the initial window.
    pub fn start(&mut self, now: SimTime) {
        self.refresh_phase(now);
        self.try_send(now);
    }

    pub fn on_ack(&mut self, ack: &Packet, now: SimTime) {
        let cumack = ack.cumack();
        assert!(
            cumack <= self.max_sent,
            "flow {}: ACK {cumack} covers data never sent (sent up to {})",
            self.flow_id,
            self.max_sent
        );
        self.stats.acks_received += 1;
        if cumack > self.highest_acked {
            self.on_new_ack(ack, cumack, now);
        } else if cumack == self.highest_acked && self.max_sent > self.highest_acked {
            self.on_dup_ack(now);
        }
        self.refresh_phase(now);
        self.try_send(now);
    }

    fn on_new_ack(&mut self, ack: &Packet, cumack: u64, now: SimTime) {
        let prev = self.highest_acked;
        let newly = cumack - prev;
        let echo = ack.echo_seq;
        let mut sample = None;
        let mut echo_sent_at = None;
        if (prev..cumack).contains(&echo) {
            let rec = self.send_log[echo as usize];
            if !rec.retransmitted {
                let r = now - rec.sent_at;
                self.rtt.on_sample(r);
                let q = self.quantize(r);
                self.ctrl_last_rtt_s = Some(q);
                self.ctrl_base_rtt_s = Some(self.ctrl_base_rtt_s.map_or(q, |b| b.min(q)));
                sample = Some(T::lit(q));
                echo_sent_at = Some(rec.sent_at);
            }
        }
        self.highest_acked = cumack;
        self.next_seq = self.next_seq.max(cumack);
        self.dup_acks = 0;

        if self.in_recovery {
            let recover = self.recover_point.expect("recovery without recover point");
            if cumack > recover {
                self.cwnd = self.ssthresh.max(T::one());
                self.in_recovery = false;
                self.restart_timer(now);
            } else {
                self.transmit(cumack, now);
                self.cwnd = match self.params.partial_ack_window {
                    PartialAckWindow::Deflate => {
                        (self.cwnd - T::lit(newly as f64) + T::one()).max(T::one())
                    }
                    PartialAckWindow::Reset => self.ssthresh.max(T::one()),
                };
                let reset = match self.params.partial_ack_timer {
                    PartialAckTimer::Impatient => self.partial_acks_seen == 0,
                    PartialAckTimer::SlowButSteady => true,
                };
                if reset {
                    self.restart_timer(now);
                }
                self.partial_acks_seen += 1;
            }
        } else {
            let mut view = self.view(now);
            view.rtt_sample_s = sample;
            view.acked_pkts = newly;
            view.echo_sent_at = echo_sent_at;
            let up = self.controller.on_ack_arrival(&view);
            self.apply(up);
            for seq in prev..cumack {
                let mut view = self.view(now);
                view.rtt_sample_s = sample;
                view.acked_pkts = newly;
                view.acked_seq = seq;
                view.echo_sent_at = echo_sent_at;
                let before = self.cwnd;
                let up = self.controller.on_ack(&view);
                self.apply(up);
                if self.ack_log.is_some() {
                    let probe = self.controller.probe();
                    let rec = AckRecord {
                        time_s: now.secs(),
                        acked_seq: seq,
                        cwnd_before: before,
                        cwnd_after: self.cwnd,
                        phase: self.phase,
                        n_est: probe.map(|p| p.n_est),
                        mode: probe.map(|p| p.mode),
                        congestion_event_no: probe.map(|p| p.congestion_event_no),
                        backlog_sample: ack.backlog_sample,
                    };
                    if let Some(log) = self.ack_log.as_mut() {
                        log.push(rec);
                    }
                }
            }
            self.restart_timer(now);
        }
        if self.highest_acked == self.max_sent {
            self.timer_deadline = None;
        }
    }

    fn on_dup_ack(&mut self, now: SimTime) {
        self.dup_acks += 1;
        self.stats.dup_acks += 1;
        if self.in_recovery {
            self.cwnd = self.cwnd + T::one();
        } else if self.dup_acks == 3 && self.recover_point.is_none_or(|r| self.highest_acked > r) {
            self.enter_fast_recovery(now);
        }
    }

    /// Fast retransmit and entry into fast recovery.
    pub fn enter_fast_recovery(&mut self, now: SimTime) {
        if self.in_recovery {
            return;
        }
        let before = self.cwnd;
        let two = T::lit(2.0);
        self.ssthresh = T::lit((self.cwnd / two).floor().as_f64()).max(two);
        self.cwnd = self.ssthresh + T::lit(3.0);
        self.recover_point = Some(self.max_sent - 1);
        self.in_recovery = true;
        self.partial_acks_seen = 0;
        self.stats.fast_retransmits += 1;
        self.transmit(self.highest_acked, now);
        let view = self.view(now);
        self.controller.on_fast_retransmit(&view);
        self.losses.push(LossEvent {
            time_s: now.secs(),
            kind: LossKind::FastRetransmit,
            cwnd_before: before,
            cwnd_after: self.cwnd,
            ssthresh_after: self.ssthresh,
        });
        self.trace_pending = true;
        self.refresh_phase(now);
    }

    /// Called when the retransmission timer fires at `now`. A timer that
    /// fires early or with nothing outstanding is ignored.
    pub fn on_timer(&mut self, now: SimTime) -> bool {
        match self.timer_deadline {
            Some(d) if d <= now && self.max_sent > self.highest_acked => {
                self.on_timeout(now);
                true
            }
            _ => false,
        }
    }

    /// Retransmission timeout: collapse to one packet and go back to the
    /// first unacknowledged sequence number.
    pub fn on_timeout(&mut self, now: SimTime) {
        if self.max_sent == self.highest_acked {
            self.timer_deadline = None;
            return;
        }
        let before = self.cwnd;
        // During recovery the window is inflated by dupACKs; halve the
        // underlying window instead.
        let window = if self.in_recovery {
            self.ssthresh
        } else {
            self.cwnd
        };
        let flight = (self.max_sent - self.highest_acked) as f64;
        let base = window.as_f64().min(flight);
        self.ssthresh = T::lit((base / 2.0).floor().max(2.0));
        self.cwnd = T::one();
        self.recover_point = Some(self.max_sent - 1);
        self.in_recovery = false;
        self.dup_acks = 0;
        self.next_seq = self.highest_acked;
        self.stats.timeouts += 1;
        self.rtt.back_off();
        let view = self.view(now);
        self.controller.on_timeout(&view);
        self.losses.push(LossEvent {
            time_s: now.secs(),
            kind: LossKind::Timeout,
            cwnd_before: before,
            cwnd_after: self.cwnd,
            ssthresh_after: self.ssthresh,
        });
        self.trace_pending = true;
        self.restart_timer(now);
        self.refresh_phase(now);
        self.try_send(now);
    }
}
