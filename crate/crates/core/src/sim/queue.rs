use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SimTime;

/// A scheduled unit of work. `payload` identifies both the target entity
/// and what happens to it.
#[derive(Clone, Debug)]
pub struct Event<P> {
    pub fire_at: SimTime,
    pub insertion_index: u64,
    pub payload: P,
}

impl<P> Event<P> {
    fn key(&self) -> (SimTime, u64) {
        (self.fire_at, self.insertion_index)
    }
}

impl<P> PartialEq for Event<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<P> Eq for Event<P> {}

impl<P> PartialOrd for Event<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Event<P> {
    // Reversed so that BinaryHeap (a max-heap) pops the earliest event.
    fn cmp(&self, other: &Self) -> Ordering {
        let (ta, ia) = self.key();
        let (tb, ib) = other.key();
        tb.total_cmp(&ta).then(ib.cmp(&ia))
    }
}

#[derive(Debug)]
pub enum Popped<P> {
    Event(Event<P>),
    EndOfSimulation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunStats {
    pub events_processed: u64,
    pub final_clock: SimTime,
}

/// Ordered event queue plus the simulation clock.
///
/// Events pop in `(fire_at, insertion_index)` order, so simultaneous
/// events run in the order they were scheduled.
#[derive(Debug)]
pub struct EventQueue<P> {
    clock: SimTime,
    horizon: Option<SimTime>,
    next_index: u64,
    heap: BinaryHeap<Event<P>>,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        Self {
            clock: SimTime::ZERO,
            horizon: None,
            next_index: 0,
            heap: BinaryHeap::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn set_horizon(&mut self, horizon: SimTime) {
        self.horizon = Some(horizon);
    }

    /// Schedules `payload` at `fire_at`.
    ///
    /// # Panics
    ///
    /// Scheduling before the current clock is a programming error and
    /// aborts the run.
    pub fn schedule(&mut self, fire_at: SimTime, payload: P) {
        assert!(
            fire_at >= self.clock,
            "event scheduled in the past: fire_at={fire_at} clock={}",
            self.clock
        );
        let insertion_index = self.next_index;
        self.next_index += 1;
        self.heap.push(Event {
            fire_at,
            insertion_index,
            payload,
        });
    }

    pub fn schedule_in(&mut self, delay_s: f64, payload: P) {
        let at = self.clock + delay_s;
        self.schedule(at, payload);
    }

    /// Pops the earliest event and advances the clock to it. Everything
    /// beyond the horizon is discarded.
    pub fn pop_next(&mut self) -> Popped<P> {
        let Some(head) = self.heap.peek() else {
            return Popped::EndOfSimulation;
        };
        if let Some(h) = self.horizon {
            if head.fire_at > h {
                self.heap.clear();
                return Popped::EndOfSimulation;
            }
        }
        let ev = self.heap.pop().expect("peeked");
        self.clock = ev.fire_at;
        Popped::Event(ev)
    }

    /// Processes events up to and including `horizon` with `handler`.
    pub fn run_until<F>(&mut self, horizon: SimTime, mut handler: F) -> RunStats
    where
        F: FnMut(&mut Self, Event<P>),
    {
        self.set_horizon(horizon);
        let mut events_processed = 0;
        while let Popped::Event(ev) = self.pop_next() {
            events_processed += 1;
            handler(self, ev);
        }
        RunStats {
            events_processed,
            final_clock: self.clock,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: f64) -> SimTime {
        SimTime::from_secs(s)
    }

    #[test]
    fn single_schedule() {
        let mut q = EventQueue::new();
        q.schedule(t(1.0), ());
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn fifo_tie_break() {
        let mut q = EventQueue::new();
        q.schedule(t(1.0), "A");
        q.schedule(t(1.0), "B");
        match q.pop_next() {
            Popped::Event(e) => assert_eq!(e.payload, "A"),
            Popped::EndOfSimulation => panic!(),
        }
        match q.pop_next() {
            Popped::Event(e) => assert_eq!(e.payload, "B"),
            Popped::EndOfSimulation => panic!(),
        }
    }

    #[test]
    #[should_panic(expected = "scheduled in the past")]
    fn past_is_fatal() {
        let mut q = EventQueue::new();
        q.schedule(t(1.0), ());
        let _ = q.pop_next();
        q.schedule(t(0.5), ());
    }

    #[test]
    fn min_order() {
        let mut q = EventQueue::new();
        q.schedule(t(2.0), 2);
        q.schedule(t(1.0), 1);
        let Popped::Event(e) = q.pop_next() else {
            panic!()
        };
        assert_eq!(e.payload, 1);
        assert_eq!(q.now(), t(1.0));
    }

    #[test]
    fn empty_is_end() {
        let mut q: EventQueue<()> = EventQueue::new();
        assert!(matches!(q.pop_next(), Popped::EndOfSimulation));
    }

    #[test]
    fn horizon_cut() {
        let mut q = EventQueue::new();
        q.set_horizon(t(10.0));
        q.schedule(t(10.5), ());
        assert!(matches!(q.pop_next(), Popped::EndOfSimulation));
        assert!(q.is_empty());
        assert_eq!(q.now(), SimTime::ZERO);
    }

    #[test]
    fn run_until_empty() {
        let mut q: EventQueue<()> = EventQueue::new();
        let stats = q.run_until(t(10.0), |_, _| {});
        assert_eq!(stats.events_processed, 0);
        assert_eq!(stats.final_clock, SimTime::ZERO);
    }

    #[test]
    fn run_until_self_scheduling() {
        let mut q = EventQueue::new();
        q.schedule(t(0.0), ());
        let stats = q.run_until(t(10.0), |q, _| q.schedule_in(0.3, ()));
        assert!(stats.final_clock <= t(10.0));
        assert_eq!(stats.events_processed, 34);
    }
}
