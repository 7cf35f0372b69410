//! Exact linear optics for one-dimensional fermionic anyons.
//!
//! Anyons here obey the deformed anticommutation relations
//! `a_i a_j† + e^{-iφε_ij} a_j† a_i = δ_ij`, `a_i a_j + e^{iφε_ij} a_j a_i = 0`,
//! which interpolate between free fermions (`φ = 0`) and hard-core bosons
//! (`φ = π`). The crate provides
//!
//! - [`fock`]: the occupation basis and the ladder operators,
//! - [`optics`]: phase-shifters and beam-splitters, with an analytic engine and
//!   an exponential oracle,
//! - [`encoded`]: dual-rail qubits, single-qubit compilation and the two-qubit
//!   gate `C(φ)`,
//! - [`search`]: beam-splitter sequence search for sector unitaries,
//! - [`entangle`]: local invariants and entangling power of two-qubit gates,
//! - [`oracles`]: independent simulators at the free-fermion and hard-core
//!   boson endpoints,
//! - [`verify`]: the reproduction and invariant checks run by `anyon verify`.

pub mod encoded;
pub mod entangle;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod optics;
pub mod oracles;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{enumerate_basis, AlgebraConfig, FockVector, OccupationState};
pub use optics::{run_circuit, Circuit, Engine, OpticalElement};
