//! Stoquastic clock-construction Hamiltonians from reversible circuits, with
//! exact desk-scale analysis tools: spectra and gap scans, adiabatic sweeps,
//! clock-conditioned Pauli sampling, non-adaptive iterative phase estimation
//! for order finding, energy-based verification, and CSS-protected readout.

pub mod adiabatic;
pub mod circuit;
pub mod corpus;
pub mod csscode;
pub mod error;
pub mod exec;
pub mod hamiltonian;
pub mod measurement;
pub mod shor;
pub mod sparse;
pub mod spectral;
pub mod state;
pub mod unionjack;
pub mod verification;

pub use error::{Error, Result};
