//! Pseudo-spectral toolkit for the stochastic inviscid primitive equations on
//! the three-dimensional unit torus.
//!
//! Algorithm families (product backends, time-stepping schemes, noise models,
//! initial data, verification suites) are trait objects held in name-keyed
//! [`registry::Registry`] instances and selected at runtime.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod gevrey;
pub mod initial;
pub mod lattice;
pub mod picard;
pub mod registry;
pub mod spectral;
pub mod stochastic;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FourierField, Parity, SpectralScalar, SpectralVelocity};
pub use lattice::{Lattice, WaveIndex};
