//! sp³ nearest-neighbour tight-binding Hamiltonians of diamond and
//! zincblende crystals, and Brillouin-zone paths to sample them along.

mod hamiltonian;
mod kpath;
mod material;

pub use hamiltonian::{build_hamiltonian, exact_spectrum, structure_factors, HermitianMatrix, KPoint};
pub use kpath::{high_symmetry_point, standard_kpath, KPath, KSample, Tick, DEFAULT_PATH, VALID_LABELS};
pub use material::{MaterialParams, GAMMA_SELF_CHECK_TOL};

/// Orbital basis ordering shared by the Hamiltonian, the Pauli decomposition
/// and the excitation pool: anion/cation interleaved per orbital type.
pub const BASIS_LABELS: [&str; 8] = ["s_a", "s_c", "px_a", "px_c", "py_a", "py_c", "pz_a", "pz_c"];

/// Index of the anion s orbital.
pub const S_ANION: usize = 0;
/// Index of the cation s orbital.
pub const S_CATION: usize = 1;
