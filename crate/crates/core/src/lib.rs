//! Particle Monte Carlo schemes for hyperbolic transport equations in the
//! diffusive scaling.
//!
//! Two kinetic models are covered: the two-speed Goldstein–Taylor system and
//! the linear radiative transport equation (slab and planar-circle velocity
//! spaces). For each model the crate provides the standard operator-splitting
//! Monte Carlo scheme, an asymptotic-preserving variant whose particle speeds
//! stay bounded as `eps -> 0`, and the limiting random walk for the diffusion
//! equation. Deterministic solvers used as oracles live in [`reference`].
//!
//! The crate is `no_std` and only needs `alloc`. IO, scenario files and the
//! command line front end live in the `apmc-sim` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod coefficients;
pub mod ensemble;
mod error;
pub mod executor;
pub mod goldstein_taylor;
pub mod radiative_transport;
pub mod reference;
pub mod simulation;
pub mod stochastics;

pub use coefficients::{CoefficientField, Coefficients, Region};
pub use ensemble::{
    BoundaryCondition, Boundaries, CellStats, Particle, ParticleEnsemble, SpatialGrid, TimeAverage,
    VelocitySpace,
};
pub use error::{Error, Result};
pub use executor::{Executor, Sequential};
pub use simulation::{Scheme, Simulation};
pub use stochastics::{Geometry, RngStream, StepKey};
