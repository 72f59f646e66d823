//! Shadow-tomography estimators for dynamical correlation functions of small
//! fermionic systems, with a dense statevector simulator and an exact
//! diagonalization oracle to check them against.

pub mod error;
pub mod fast;
pub mod harness;
pub mod mapping;
pub mod pauli;
pub mod shadows;
pub mod sim;

pub use error::{FastError, Result};
