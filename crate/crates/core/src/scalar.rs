use num_traits::{Float, FromPrimitive};
use std::fmt::Debug;

/// Real scalar used for log-likelihood ratios and path metrics.
///
/// Implemented for `f32` and `f64`. The decoder never quantizes, so any IEEE
/// float works; `f64` is the reference type.
pub trait Llr: Float + FromPrimitive + Debug + Default + Send + Sync + 'static {
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl Llr for f32 {}
impl Llr for f64 {}
