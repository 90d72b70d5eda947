//! The real scalar field underlying all matrix entries.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, NumAssign};

/// Real floating-point scalar over which the whole engine is generic.
///
/// Matrix entries are `num_complex::Complex<T>` for a `T: Scalar`. The crate
/// root exports `f64`-concrete aliases (`Morphism64`, `CircleSpace64`, ...)
/// for the common case; `f32` is available for memory-bound experimentation
/// at correspondingly looser tolerances.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + Sum<Self>
    + FromStr<Err = std::num::ParseFloatError>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Default tolerance, in operator norm, below which an algebraic law is
    /// considered to hold exactly.
    ///
    /// For `f64` this is `1e-12`: well-conditioned constructions at the
    /// dimensions this crate targets (up to a few hundred) sit orders of
    /// magnitude below it, while genuine law violations sit far above.
    /// Constructors that validate (custom bases, orthonormal families) use
    /// this value unless given an explicit tolerance.
    fn default_tolerance() -> Self;

    /// Conversion from `f64`, for constants and configuration values.
    #[inline]
    fn from_f64(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("finite f64 converts to any Scalar")
    }

    /// Conversion from an index or dimension.
    #[inline]
    fn from_usize(x: usize) -> Self {
        Self::from_f64(x as f64)
    }

    /// Widening conversion to `f64`, for reports and error payloads.
    #[inline]
    fn to_f64(self) -> f64 {
        <f64 as num_traits::NumCast>::from(self).expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    #[inline]
    fn default_tolerance() -> f64 {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn default_tolerance() -> f32 {
        1e-5
    }
}
