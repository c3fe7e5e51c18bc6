//! Symmetry-adjusted classical shadows for fermionic and qubit systems.
//!
//! The crate bundles the pieces needed to generate randomized-measurement data at
//! desk scale and post-process it:
//!
//! * [`majorana`] and [`pauli`]: operator index algebra under Jordan–Wigner.
//! * [`gaussian`] and [`qubit`]: state simulators (free fermions, dense statevectors).
//! * [`noise`]: readout channels as classical flip laws and as quantum maps.
//! * [`shadows`]: ensembles with their estimator kernels and exact channel oracles.
//! * [`symmetry`]: symmetry operators with their ideal values and the ratio correction.
//! * [`oracle`]: exhaustive enumeration of estimator expectations at two modes.
//! * [`fgu`]: compilation of Gaussian unitaries into rotation gates.
//! * [`experiments`]: end-to-end runs producing CSV tables.

pub mod bootstrap;
pub mod combinatorics;
pub mod dense;
pub mod error;
pub mod experiments;
pub mod fgu;
pub mod gaussian;
pub mod linalg;
pub mod majorana;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod qubit;
pub mod rng;
pub mod shadows;
pub mod symmetry;

pub use error::{Error, Result};
