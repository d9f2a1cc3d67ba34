//! Core models for two van der Pol relaxation oscillators coupled through a
//! memristive RC network, together with the analysis machinery needed to
//! quantify frequency and phase locking.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core stays free of
//! platform dependencies; file formats and the CLI live in the companion
//! `memvdp` crate.
//!
//! Modules:
//! - [`dynamics`]: the dimensionless coupled oscillator pair and its RK4
//!   integrator.
//! - [`memristor`]: binary HRS/LRS behavioral device model with
//!   compliance-controlled LRS and threshold switching.
//! - [`circuit`]: event-driven simulation of the two PUT relaxation
//!   oscillators coupled through the RC-memristor network.
//! - [`analysis`]: spike detection, frequency estimation, phase differences
//!   and lock verdicts.
//! - [`sweep`]: detuning sweeps measuring locking ranges at fixed couplings.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod circuit;
pub mod dynamics;
pub mod error;
pub mod memristor;
pub mod sweep;

pub use error::SimError;
