//! Runs the whole chain over a set of k-points and trials.
//!
//! Work fans out first over k-points (Hamiltonian, ground state, observables)
//! and then over `(k, trial)` pairs. Every stochastic draw is addressed by
//! `(seed, k index, trial, matrix, entry, term)`, so results do not depend on
//! scheduling and come back in `(k, trial)` order.

use serde::{Deserialize, Serialize};

use crate::backends::{prepare_ground_state, stream_seed, Backend, PreparedState};
use crate::eom::{build_observables, ExcitationBasis, Method, ObservableSet};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, exact_spectrum, KPoint, MaterialParams};
use crate::parallel::{try_map_indexed, Parallelism};
use crate::pauli::decompose;
use crate::solver::{measure_system, solve_spectrum, MeasureContext, SpectrumMetadata, SpectrumResult, N_GAPS};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub material: MaterialParams,
    pub method: Method,
    pub basis: ExcitationBasis,
    pub backend: Backend,
    pub trials: usize,
    pub seed: u64,
    /// Metric rank threshold; the backend default when unset.
    pub rank_tol: Option<f64>,
    pub parallelism: Parallelism,
}

impl RunConfig {
    pub fn new(material: MaterialParams, method: Method, basis: ExcitationBasis, backend: Backend) -> Self {
        RunConfig { material, method, basis, backend, trials: 1, seed: 0, rank_tol: None, parallelism: Parallelism::default() }
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol.unwrap_or_else(|| self.backend.default_rank_tol())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPointResult {
    pub index: usize,
    pub k: KPoint,
    /// Gaps from direct diagonalisation.
    pub exact_gaps: Vec<f64>,
    pub exact_levels: Vec<f64>,
    pub trials: Vec<SpectrumResult>,
}

struct Prepared {
    e0: f64,
    observables: ObservableSet,
    state: PreparedState,
}

fn prepare_k(cfg: &RunConfig, k: KPoint) -> Result<(Vec<f64>, Prepared)> {
    let h = build_hamiltonian(&cfg.material, k)?;
    let levels = exact_spectrum(&h);
    let (e0, psi) = prepare_ground_state(&h);
    let h_pauli = decompose(h.matrix());
    if !levels.iter().all(|e| e.is_finite()) || !h_pauli.max_abs_coefficient().is_finite() {
        return Err(Error::Numerical(format!("Hamiltonian at {k:?} overflows")));
    }
    let observables = build_observables(cfg.method, &h_pauli, &cfg.basis, cfg.parallelism)?;
    if !observables.matrices.iter().flat_map(|m| &m.entries).all(|e| e.max_abs_coefficient().is_finite()) {
        return Err(Error::Numerical(format!("observables at {k:?} overflow")));
    }
    let state = cfg.backend.prepare(&psi)?;
    Ok((levels, Prepared { e0, observables, state }))
}

/// Seed of trial `trial` at k-point `k_index`.
pub fn trial_seed(root: u64, k_index: usize, trial: usize) -> u64 {
    stream_seed(root, &[k_index as u64, trial as u64])
}

pub fn run(cfg: &RunConfig, kpoints: &[KPoint]) -> Result<Vec<KPointResult>> {
    if cfg.trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let rank_tol = cfg.rank_tol();
    if !(0.0..1.0).contains(&rank_tol) {
        return Err(Error::config(format!("rank threshold must lie in [0, 1), got {rank_tol}")));
    }
    let trials = cfg.trials;
    let prepared = try_map_indexed(kpoints.len(), cfg.parallelism, |i| prepare_k(cfg, kpoints[i]))?;
    let mut spectra = try_map_indexed(kpoints.len() * trials, cfg.parallelism, |job| {
        let (ki, trial) = (job / trials, job % trials);
        let p = &prepared[ki].1;
        let seed = trial_seed(cfg.seed, ki, trial);
        let sys = measure_system(&p.observables, &p.state, MeasureContext { backend: cfg.backend.name(), seed })?;
        let k = kpoints[ki];
        let metadata = SpectrumMetadata {
            k: k.as_array(),
            material: cfg.material.name.clone(),
            m: cfg.basis.m(),
            method: cfg.method,
            backend: cfg.backend.name().to_string(),
            seed,
            trial,
        };
        solve_spectrum(&sys, cfg.method, p.e0, rank_tol, metadata)
    })?
    .into_iter();
    Ok(prepared
        .into_iter()
        .enumerate()
        .map(|(index, (levels, _))| KPointResult {
            index,
            k: kpoints[index],
            exact_gaps: levels[1..=N_GAPS].iter().map(|e| e - levels[0]).collect(),
            exact_levels: levels,
            trials: spectra.by_ref().take(trials).collect(),
        })
        .collect())
}
