//! Numerical laboratory for bilinear Kakeya problems in the first Heisenberg
//! group and for thickened parabolas in the plane.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; Monte Carlo and grid estimators split their work
//! into fixed shards and hand them to a [`sampling::ShardExecutor`], so the
//! caller decides how (and on how many threads) shards run without changing
//! a single output bit.
//!
//! Layout:
//!
//! * [`heis`]: group law, Korányi gauge and metric, dilations.
//! * [`tube`]: Heisenberg δ-tubes, membership, intersection volumes,
//!   transversality and direction broadness of line families.
//! * [`projection`]: the projection onto the vertical plane `W` and the
//!   parabola attached to a tube.
//! * [`curves`]: planar quadratics, the τ and Δ gauges, curvilinear
//!   rectangles, tangency and comparability.
//! * [`incidence`]: richness, incomparable rich families, the Wolff-type
//!   incidence bound, quantitative broadness and the broad/narrow split.
//! * [`constructions`]: the explicit families (bush, opposed pair, bipartite
//!   balls, clamshell, parabolic net).
//! * [`estimator`]: both sides of the bilinear estimates and log-log fits.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constructions;
pub mod curves;
pub mod estimator;
pub mod heis;
pub mod incidence;
pub(crate) mod math;
pub mod projection;
pub mod sampling;
pub mod tube;

pub use curves::{CurviRect, Interval, Quadratic};
pub use estimator::ExponentFit;
pub use heis::{HDirection, HPoint};
pub use tube::HTube;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("direction ({a}, {b}) is not a unit vector")]
    NotUnit { a: f64, b: f64 },
    #[error("tube thickness must lie in (0, 1), got {0}")]
    BadThickness(f64),
    #[error("direction ({a}, {b}) is too close to the line L: |a + b| = {dist} < 1/2")]
    DirectionNearL { a: f64, b: f64, dist: f64 },
    #[error("base length {len} does not correspond to any t in [{delta}, 1]")]
    InconsistentBase { len: f64, delta: f64 },
    #[error("rectangles have mismatched scales: ({d1}, {t1}) vs ({d2}, {t2})")]
    ScaleMismatch { d1: f64, t1: f64, d2: f64, t2: f64 },
    #[error("nonpositive value {value} at delta = {delta}")]
    NonPositiveValue { delta: f64, value: f64 },
    #[error("need at least 3 points for a fit, got {0}")]
    TooFewPoints(usize),
    #[error("empty probe set")]
    EmptyProbes,
    #[error("empty family")]
    EmptyFamily,
    #[error("not a bipartite pair: {0}")]
    NotBipartite(&'static str),
    #[error("infeasible parameters: {0}")]
    Infeasible(alloc::string::String),
}

pub type Result<T> = core::result::Result<T, Error>;
