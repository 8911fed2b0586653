//! Multiscale Weil-Petersson diagnostics for circle homeomorphisms.
//!
//! The crate measures how far an orientation-preserving homeomorphism of
//! `RP^1` is from the Weil-Petersson class through three independent
//! finite-depth diagnostics:
//!
//! * dyadic beta sums built from `L^inf` best linear estimators ([`beta`]),
//! * dyadic epsilon sums built from pinching pairs of Mobius maps
//!   ([`epsilon`]),
//! * a Fourier `H^{1/2}` seminorm of `log(phi')` ([`homeo::h_half_seminorm`]).
//!
//! Around these sit the supporting geometry: the `PSL(2,R)` algebra
//! ([`mobius`]), the coordinate models of `RP^1`, `AdS^{2,1}` and `Ein^{1,1}`
//! ([`charts`]), diamond/normalization machinery in the Kleinian chart
//! ([`adsgeom`]), and the Gauss-map algebra of spacelike frames ([`gauss`]).
//!
//! Start with the `examples/` directory: each example is a runnable tour of
//! one capability. The `wpdiag` binary batches the full diagnostic run over a
//! homeomorphism described by a small spec string (see [`homeo::parse_spec`]).

pub mod adsgeom;
pub mod beta;
pub mod charts;
pub mod diag;
pub mod dyadic;
pub mod epsilon;
pub mod gauss;
pub mod homeo;
pub mod mobius;

mod hhalf;

pub use charts::{CausalType, ExtReal, KleinPoint, RP1Point};
pub use dyadic::{DyadicInterval, Interval};
pub use homeo::CircleHomeo;
pub use mobius::{Mat2, MatVector22, MobiusMap};
