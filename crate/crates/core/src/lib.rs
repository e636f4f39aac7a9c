//! Link-level simulator and analytical toolkit for vector-perturbation
//! precoding in a K-user, M-antenna MISO downlink that delivers information
//! and RF energy over the same signal.
//!
//! The crate is organized around the simulation pipeline:
//!
//! - [`numerics`]: small dense complex linear algebra, channel sampling,
//!   gamma-family special functions, and tail-expectation quadrature.
//! - [`lattice`]: closest Gaussian-integer lattice point search
//!   (Schnorr-Euchner sphere enumeration plus an exhaustive oracle).
//! - [`precoding`]: the transmit-side schemes (ZF, VP, VP-EH, VP-SWIPT, and
//!   the ideal energy-beamforming benchmark).
//! - [`transceiver`]: channel application, modulo receiver, detection, and
//!   harvested-power measurement.
//! - [`theory`]: closed-form and semi-analytical performance expressions.
//! - [`harness`]: Monte Carlo orchestration, reproducible randomness,
//!   aggregation, and machine-readable output.

pub mod error;
pub mod harness;
pub mod precoding;
pub mod theory;
pub mod transceiver;
pub mod lattice;
pub mod numerics;

pub use error::{Error, Result};
