//! Periodic billiard trajectories inside ellipsoids.
//!
//! Three independent routes decide periodicity for a confocal family and
//! a set of caustics: rank conditions on the Taylor coefficients of
//! `sqrt(Pol)` ([`series`], [`cayley`]), Pell equations on the associated
//! system of intervals ([`extremal`]), and direct simulation
//! ([`billiard`]). [`freqmap`] computes equilibrium measures, the frequency
//! map and the planar rotation number; [`catalog`] reproduces the
//! low-period trajectories in dimension three.
//!
//! All algorithms are generic over [`scalar::Scalar`]: `f64`, the
//! multiprecision [`Mp`] and exact [`Q`] rationals.

pub mod error;
pub mod linalg;
pub mod literal;
pub mod poly;
pub mod scalar;
pub mod confocal;
pub mod series;
pub mod extremal;
pub mod cayley;
pub mod billiard;
pub mod freqmap;
pub mod catalog;

pub use error::{Error, Result};
pub use scalar::{precision, set_precision, Mp, PrecisionGuard};

/// Exact rationals.
pub type Q = num_rational::BigRational;

pub type FamilyF64 = confocal::ConfocalFamily<f64>;
pub type FamilyMp = confocal::ConfocalFamily<Mp>;
pub type FamilyQ = confocal::ConfocalFamily<Q>;

pub type CausticSetF64 = confocal::CausticSet<f64>;
pub type CausticSetMp = confocal::CausticSet<Mp>;
pub type CausticSetQ = confocal::CausticSet<Q>;

pub type IntervalSystemF64 = confocal::IntervalSystem<f64>;
pub type IntervalSystemMp = confocal::IntervalSystem<Mp>;
pub type IntervalSystemQ = confocal::IntervalSystem<Q>;

pub type PellSolutionF64 = extremal::PellSolution<f64>;
pub type PellSolutionMp = extremal::PellSolution<Mp>;
pub type PellSolutionQ = extremal::PellSolution<Q>;

pub type TrajectoryF64 = billiard::Trajectory<f64>;
pub type TrajectoryMp = billiard::Trajectory<Mp>;
