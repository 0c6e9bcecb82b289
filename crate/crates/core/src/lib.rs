//! Packet-level simulator for TCP startup algorithms on a dumbbell.
//!
//! Window arithmetic is generic over the [`Scalar`] type (`f32` or `f64`);
//! simulated time is always `f64` seconds.

pub mod cc;
pub mod error;
pub mod experiment;
pub mod net;
pub mod scalar;
pub mod sim;
pub mod tcp;
pub mod traffic;

pub use error::{ConfigError, Error, Result};
pub use experiment::{run_scenario, ScenarioConfig, ScenarioOutcome};
pub use scalar::Scalar;

pub type Sender64 = tcp::Sender<f64>;
pub type Sender32 = tcp::Sender<f32>;
pub type SsthreshlessStart64 = cc::SsthreshlessStart<f64>;
pub type SsthreshlessStart32 = cc::SsthreshlessStart<f32>;
pub type Simulation64 = experiment::Simulation<f64>;
pub type Simulation32 = experiment::Simulation<f32>;
