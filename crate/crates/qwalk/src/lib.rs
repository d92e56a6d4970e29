//! Simulator and analytic toolkit for one-dimensional discrete-time quantum
//! walks with position (tunneling) and coin-measurement decoherence.
//!
//! The crate is organized in four layers:
//!
//! * [`walker`] — state representations, the Hadamard walk step, and the two
//!   decoherence channels applied as exact Kraus maps;
//! * [`observables`] — probability distributions, moments, purity, partial
//!   transpose, negativity, and total variation;
//! * [`analytic`] — closed forms: moment and variance formulas, extremal
//!   initial states, and the decoherent-probability convolution;
//! * [`kspace`] — an independent momentum-space verification layer built on
//!   4x4 affine superoperators.
//!
//! Everything is deterministic: channels are exact density-matrix maps, not
//! sampled trajectories.

pub mod analytic;
pub mod error;
pub mod kspace;
pub mod observables;
pub mod walker;

pub use error::{Error, Result};
pub use walker::{
    BlochVector, Coin, NoiseModel, PositionWindow, PureCoinState, PureWalkerState,
    WalkerDensityMatrix,
};
