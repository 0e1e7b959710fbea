//! Numerical toolkit for the Heisenberg groups ℍⁿ.
//!
//! * [`heis`]: group law, Korányi gauge and metric, dilations.
//! * [`subgroups`]: horizontal subgroups, the semidirect split, cosets, slabs.
//! * [`bounds`]: closed-form dimension-distortion bounds and curve sampling.
//! * [`dimension`]: covering-number dimension estimates and Riesz energies.
//! * [`construction`]: the four-corner set and the random bump mapping built on it.

pub mod bounds;
pub mod construction;
pub mod dimension;
pub mod error;
pub mod heis;
pub mod rng;
pub mod subgroups;

pub use error::{Error, Result};
pub use heis::{GroupDim, HPoint};
