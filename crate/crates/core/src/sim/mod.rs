//! Deterministic discrete-event engine.

mod queue;
mod rng;
mod time;

pub use queue::{Event, EventQueue, Popped, RunStats};
pub use rng::RngStream;
pub use time::SimTime;
