//! Deterministic thinning of Poisson point processes on finite-volume spaces.
//!
//! Given intensities `lambda > mu > 0` on a space of finite volume, a
//! deterministic thinning is a measurable map `f` with `f(P) ⊆ P` pointwise
//! such that `f(P)` is again a Poisson process, of intensity `mu`, with no
//! auxiliary randomness. Existence depends on the pair of effective means in
//! a non-obvious way; this crate decides it, constructs the thinning, and
//! statistically certifies the construction.
//!
//! The main entry points:
//!
//! - [`poisson::feasible_ii`] / [`poisson::feasible_iii`] decide whether a
//!   thinning exists and return the witnessing integer `k`.
//! - [`poisson::lambda_c`] solves the critical curve `lambda_c(mu)`.
//! - [`thin::thin_unit`], [`thin::thin_box`], [`thin::tile_thin`] and
//!   [`thin::thin_circle`] construct the thinning on `[0,1]`, on boxes, on
//!   large boxes by tiling, and (rotation-equivariantly) on the circle.
//! - [`verify::run_suite`] runs the Monte Carlo certification suite.
//!
//! See the crate examples for one runnable program per capability.

pub mod circle;
pub mod coupling;
pub mod deletion;
pub mod error;
pub mod point;
pub mod pointfile;
pub mod poisson;
pub mod quad;
pub mod region;
pub mod thin;
pub mod verify;

pub use error::{Result, ThinError};
pub use poisson::{FeasibilityWitness, IntensityPair};
