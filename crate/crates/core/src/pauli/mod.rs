//! Operators on the 3-qubit register as weighted sums of Pauli strings.
//!
//! Bit convention: basis index `b` in `0..8` has bits `(b₂ b₁ b₀)` and qubit
//! `q` is bit `q`, so qubit 0 is the least-significant bit. Labels are written
//! with qubit 2 on the left: `IIZ` is Z on qubit 0 and
//! `diag(1,-1,1,-1,1,-1,1,-1)` decomposes to exactly `IIZ`.

mod string;
mod sum;

pub use string::{Pauli, PauliString, NUM_QUBITS, NUM_STRINGS};
pub use sum::{commutator, decompose, decompose_dyn, double_commutator, double_commutator_from, multiply, reconstruct, PauliSum, PRUNE_THRESHOLD};
