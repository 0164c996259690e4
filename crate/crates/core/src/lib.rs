//! Asymptotic secret key rates for continuous-variable QKD over cryogenic
//! mm-wave and THz free-space links, for single antennas and for MIMO
//! uniform linear arrays.
//!
//! - [`physics`]: thermal photon occupation and the variance budget.
//! - [`gaussian`]: covariance matrices and an entangling-cloner Holevo oracle.
//! - [`channel`]: LOS array channel, path loss and SVD into parallel channels.
//! - [`keyrate`]: exact and asymptotic reverse-reconciliation key rates.
//! - [`sweep`]: scenarios, sweeps, and distance/temperature limits.
//! - [`linalg`]: eigen and singular value decompositions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod constants;
pub mod error;
pub mod gaussian;
pub mod keyrate;
pub mod linalg;
pub mod physics;
pub mod roots;
pub mod sweep;

pub use error::{Error, Result};
