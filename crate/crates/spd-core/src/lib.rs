// SPDX-License-Identifier: Apache-2.0

//! Sparse Pauli dynamics for Heisenberg-picture real-time evolution.
//!
//! An observable is stored as a sorted, bit-packed sum of Pauli strings
//! `O = Σ_P a_P P`. Conjugating by a Pauli rotation `exp(-i θ σ / 2)` maps
//! every string that anticommutes with `σ` onto a cosine-scaled copy of
//! itself plus a sine-scaled product string; strings below a coefficient
//! threshold `δ` are discarded after every rotation. Trotterizing a
//! Hamiltonian `H = Σ_j c_j H_j` into such rotations gives real-time
//! operator evolution whose accuracy is controlled by `δ` (exact at
//! `δ = 0`).
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature is
//! on by default and the optional `parallel` feature parallelizes the
//! rotation kernel without changing any produced bit pattern.
//!
//! # Modules
//!
//! - [`pauli`]: single Pauli strings over `(z, x)` bitstrings with phase
//!   tracking, products, commutation checks, weights, ordering.
//! - [`pauli_sum`]: the sorted sparse container with batched merge,
//!   threshold and X-weight truncation, overlaps, and zero-state
//!   expectation values.
//! - [`evolution`]: the rotation kernel, Trotter steps, and the time loop
//!   with periodic X-weight truncation.
//! - [`models`]: spin-lattice Hamiltonians and conserved-density
//!   observables (tilted-field Ising chain, XX ladder, transverse-field
//!   Ising in 1D/2D/3D).
//! - [`observables`]: correlation profiles, mean-square displacement,
//!   diffusion-constant fits, Pauli-weight spectra, quench magnetization.
//! - [`oracle`]: brute-force references (dense matrices, state vectors,
//!   typicality traces) used to validate every convention above.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod bits;
pub mod error;
pub mod evolution;
mod math;
pub mod models;
pub mod observables;
pub mod oracle;
pub mod pauli;
pub mod pauli_sum;

pub use error::{Error, Result};
pub use evolution::{evolve, EvolutionConfig, PauliRotation, Schedule, Trajectory};
pub use pauli::{Pauli, PauliTerm, TermKey};
pub use pauli_sum::PauliSum;

/// Complex scalar used for coefficients and oracle matrices.
pub type Complex64 = num_complex::Complex<f64>;
