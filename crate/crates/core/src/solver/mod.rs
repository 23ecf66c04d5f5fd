//! From measured EOM matrices to sorted excitation gaps and their statistics.

mod gaps;
mod gep;
mod measure;
mod stats;

use serde::{Deserialize, Serialize};

pub use gaps::{extract_gaps, GapExtraction, IMAG_TOL, N_GAPS};
pub use gep::{solve_gep, solve_generalized, GepSolution};
pub use measure::{measure_system, MeasureContext, MeasuredSystem};
pub use stats::{
    aggregate_trials, detect_outliers, group_degenerate, GapStatistics, GroupedGaps, Grouping, TrialStatistics, DEGENERACY_TOL,
    GAMMA_MULTIPLICITIES, OUTLIER_IQR_MULTIPLIER,
};

use crate::eom::Method;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    /// Units of 2π/a.
    pub k: [f64; 3],
    pub material: String,
    pub m: usize,
    pub method: Method,
    pub backend: String,
    pub seed: u64,
    pub trial: usize,
}

impl SpectrumMetadata {
    /// Same experiment, possibly a different trial.
    pub fn same_run(&self, other: &SpectrumMetadata) -> bool {
        self.k == other.k && self.material == other.material && self.m == other.m && self.method == other.method && self.backend == other.backend
    }
}

/// Gaps `E_0n` (eV, ascending) and absolute levels `E_n = E_0 + E_0n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub gaps: Vec<f64>,
    pub e0: f64,
    pub energies: Vec<f64>,
    /// Metric dimensions removed by the rank filter.
    pub discarded: usize,
    pub shortfall: bool,
    pub imag_flag: bool,
    pub max_imag: f64,
    pub metadata: SpectrumMetadata,
}

impl SpectrumResult {
    pub fn new(extraction: GapExtraction, e0: f64, discarded: usize, metadata: SpectrumMetadata) -> Self {
        let energies = extraction.gaps.iter().map(|g| e0 + g).collect();
        SpectrumResult {
            gaps: extraction.gaps,
            e0,
            energies,
            discarded,
            shortfall: extraction.shortfall,
            imag_flag: extraction.imag_flag,
            max_imag: extraction.max_imag,
            metadata,
        }
    }
}

/// Solves `sys` and packages its gaps.
pub fn solve_spectrum(sys: &MeasuredSystem, method: Method, e0: f64, rank_tol: f64, metadata: SpectrumMetadata) -> Result<SpectrumResult> {
    let sol = solve_gep(sys, rank_tol)?;
    let extraction = extract_gaps(&sol.eigenvalues, method, N_GAPS);
    Ok(SpectrumResult::new(extraction, e0, sol.discarded, metadata))
}
