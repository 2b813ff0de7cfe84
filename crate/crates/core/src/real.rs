//! Scalar abstraction over the floating-point types the library works with.

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};

/// Floating-point scalar used throughout the crate.
///
/// Implemented for `f32` and `f64`. All tabulated constants are stored as
/// `f64` and narrowed with [`Real::of`], so `f32` instances run the same
/// algorithms at reduced precision; the accuracy contracts quoted in the
/// documentation (12 significant digits for the gamma function, the 1e-10
/// weight identities) hold for `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumCast
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Map 64 random bits to a uniform value in the *open* interval (0, 1).
    ///
    /// The mapping is `(top_bits + 0.5) * 2^-mantissa`, which can produce
    /// neither 0 nor 1.
    fn unit_from_bits(bits: u64) -> Self;

    /// Narrowing cast from `f64`, for tabulated constants and counters.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite constant")
    }

    /// Widening cast to `f64`, for diagnostics and log-space tail solves.
    #[inline]
    fn as_f64(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn unit_from_bits(bits: u64) -> Self {
        // 52 bits: (n + 0.5) stays exactly representable, so the product
        // can reach neither 0 nor 1.
        ((bits >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0) // 2^-52
    }
}

impl Real for f32 {
    #[inline]
    fn unit_from_bits(bits: u64) -> Self {
        ((bits >> 41) as f32 + 0.5) * (1.0 / 8_388_608.0) // 2^-23
    }
}
