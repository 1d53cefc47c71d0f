//! Classical structure of the Pais-Uhlenbeck oscillator
//! `q'''' + alpha q'' + beta q = 0`.
//!
//! * [`model`]: parameters, jet and Ostrogradsky charts, the two Hamiltonians
//!   and Poisson tensors, free and interacting vector fields.
//! * [`symmetry`]: linear Lie symmetries (commutant of the flow matrix),
//!   generated charges, bi-Hamiltonian solves and the invariant-tensor scan.
//! * [`embedding`]: linear maps from two-dimensional first-order models,
//!   pushforward of their Poisson structure, pullback of their Hamiltonian
//!   and positivity analysis.
//! * [`dynamics`]: adaptive integration, normal modes, runaway detection and
//!   the coupling threshold search.
//! * [`verify`]: the aggregated identity suite behind `pu verify`.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod embedding;
pub mod error;
pub mod linalg;
pub mod model;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
