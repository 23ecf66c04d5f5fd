//! Band structures of tight-binding models from equation-of-motion
//! excitation energies, measured on a simulated three-qubit register.

pub mod backends;
pub mod eom;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod parallel;
pub mod pauli;
pub mod pipeline;
pub mod solver;

pub use error::{Error, Result};
