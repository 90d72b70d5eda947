//! Finite-truncation model of separable Hilbert spaces.
//!
//! Everything infinite-dimensional is approached through its finite
//! truncations: an object is a truncation rank with a labeled basis choice,
//! a morphism is a dense complex matrix, and statements "in the limit" are
//! studied by measuring residuals along ascending ranks. The crate provides:
//!
//! - [`category`]: truncated spaces and their maps as a strict symmetric
//!   monoidal dagger category (composition, tensor, dagger, braiding, and
//!   the index-flattening bijection that makes it all strict).
//! - [`analysis`]: operator norms, truncation of infinite matrices, residual
//!   sweeps with decay verdicts, and standard-part estimation.
//! - [`frobenius`]: classical (copying) structures from orthonormal
//!   families, their algebraic axiom residuals, and the compact (cup/cap)
//!   structure with traces and partial traces.
//! - [`circle`]: a fully worked model — wavefunctions on a circle truncated
//!   to finitely many modes, with momentum/position bases, projectors,
//!   translations, a Weyl commutation check, and Dirac-delta pairings.
//! - [`harness`]: named, seeded, parallel check suites over all of the
//!   above, reporting machine-readable pass/fail records.
//! - [`io`]: a plain-text matrix format with bit-exact round trips.
//! - [`random`]: seeded Gaussian morphisms, states, and unitaries.
//!
//! The engine is generic over the real scalar ([`Scalar`]: `f64` or `f32`);
//! the `*64`/`*32` aliases below pin the common concrete choices.

pub mod analysis;
pub mod category;
pub mod circle;
pub mod error;
pub mod frobenius;
pub mod harness;
pub mod io;
mod linalg;
pub mod random;
pub mod scalar;

pub use category::{
    braiding, compose, dagger, tensor, tensor_obj, varsigma, varsigma_inv, BasisFactor,
    IndexPair, Morphism, TruncObject, UnitaryBasis,
};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision truncated space.
pub type TruncObject64 = TruncObject<f64>;
/// Double-precision morphism.
pub type Morphism64 = Morphism<f64>;
/// Double-precision standard-map generator.
pub type StandardMapGenerator64<'a> = analysis::StandardMapGenerator<'a, f64>;
/// Double-precision sweep report.
pub type SweepReport64 = analysis::SweepReport<f64>;
/// Double-precision classical structure.
pub type ClassicalStructure64 = frobenius::ClassicalStructure<f64>;
/// Double-precision compact structure.
pub type CompactStructure64 = frobenius::CompactStructure<f64>;
/// Double-precision circle truncation.
pub type CircleSpace64 = circle::CircleSpace<f64>;

/// Single-precision truncated space.
pub type TruncObject32 = TruncObject<f32>;
/// Single-precision morphism.
pub type Morphism32 = Morphism<f32>;
/// Single-precision standard-map generator.
pub type StandardMapGenerator32<'a> = analysis::StandardMapGenerator<'a, f32>;
/// Single-precision sweep report.
pub type SweepReport32 = analysis::SweepReport<f32>;
/// Single-precision classical structure.
pub type ClassicalStructure32 = frobenius::ClassicalStructure<f32>;
/// Single-precision compact structure.
pub type CompactStructure32 = frobenius::CompactStructure<f32>;
/// Single-precision circle truncation.
pub type CircleSpace32 = circle::CircleSpace<f32>;
