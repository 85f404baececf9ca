//! Exact computation with n-pointed stable classes over local models.
//!
//! The crate provides, over exact rational arithmetic:
//!
//! * screens and stable classes with canonical representatives,
//!   equivalence testing and compatibility validation ([`screen`],
//!   [`stable`]);
//! * limits of degenerating marked-point families given as truncated
//!   arcs, with an independent numeric clustering oracle ([`limits`]);
//! * the analysis of marked points colliding at a smoothed node
//!   `xy = t^r`: exceptional traces, the tangent-vector map `theta`, its
//!   fibers, and sampling of the reachable locus ([`nodefam`]);
//! * boundary-stratum combinatorics (laminar families) and dual trees of
//!   stable degenerations with DOT export ([`strata`], [`dual`]);
//! * symbolic verification of the three standard resolutions of the
//!   threefold ordinary double point `ab = cd` ([`flop`]).
//!
//! Everything is immutable and pure; results are deterministic and
//! serialization is bit-exact (rationals as `"p/q"` strings).

pub mod dual;
pub mod flop;
pub mod limits;
pub mod nodefam;
pub mod poly;
pub mod rat;
pub mod rng;
pub mod screen;
pub mod series;
pub mod stable;
pub mod strata;

pub use rat::Rat;
pub use screen::{Mark, Screen};
pub use series::TruncatedSeries;
pub use stable::StableClass;
