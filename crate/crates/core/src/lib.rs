//! Measurement-based compilation of Pauli-rotation circuits.

pub mod anneal;
pub mod bits;
pub mod circuit;
pub mod compile;
pub mod dense;
pub mod error;
pub mod expand;
pub mod fixtures;
pub mod graph;
pub mod hamiltonian;
pub mod hybrid;
pub mod io;
pub mod local_clifford;
pub mod pattern;
pub mod pauli;
pub mod verify;

pub use error::{Error, Result};
