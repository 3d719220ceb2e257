//! vbsim: a linear-optics quantum-simulation toolkit for small Heisenberg
//! spin systems.
//!
//! Two halves cross-validate each other:
//!
//! - [`fock`] simulates multimode photonic states through a tunable
//!   directional coupler with coincidence post-selection, the mechanism
//!   that turns passive interference into an effective spin-spin
//!   interaction between photonic qubits.
//! - [`spin`] and [`valence`] solve small generalized Heisenberg lattices
//!   exactly and express their ground states in the valence-bond (dimer
//!   covering) basis.
//!
//! [`entanglement`] supplies partial traces, Wootters concurrence and
//! monogamy checks used to characterize both sides; [`tomography`]
//! simulates the measurement pipeline (Pauli settings, Poissonian counts,
//! reconstruction, Monte Carlo error bars). The `vbsim` binary maps each
//! computation to a seeded, reproducible CSV/JSON emitter.

pub mod config;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod output;
pub mod runner;
pub mod spin;
pub mod states;
pub mod tomography;
pub mod valence;

pub use error::{Error, Result};
