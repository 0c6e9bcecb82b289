//! Scalar abstraction for window arithmetic.
//!
//! Congestion windows, thresholds and backlog estimates are real-valued
//! packet counts. Everything that manipulates them is generic over
//! [`Scalar`] so the same controllers can be exercised in `f32` and `f64`.
//! Simulated time is always `f64` (see [`crate::sim::SimTime`]).

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point window arithmetic: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant. Panics only if the value is not
    /// representable at all, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar literal out of range")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest whole number of packets not exceeding `self`, saturating at 0.
    #[inline]
    fn whole_packets(self) -> u64 {
        if self <= Self::zero() {
            0
        } else {
            self.floor().to_u64().unwrap_or(u64::MAX)
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
