//! Excitation operators in the compact 8-orbital encoding and the
//! commutator observables of the reduced (A/B) and full (M/Q/V/W) EOM
//! eigenproblems.

mod basis;
mod observables;

pub use basis::{build_excitation_pool, excitation_operator, orbital_operator, Excitation, ExcitationBasis, PoolKind, SourceSelection};
pub use observables::{build_observables, build_qeom_observables, build_rqeom_observables, count_observables, Method, ObservableMatrix, ObservableSet};
