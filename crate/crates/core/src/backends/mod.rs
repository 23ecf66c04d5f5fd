//! Expectation values of Pauli observables on the prepared ground state.
//!
//! Every backend reduces to a table over the 64 Pauli strings: exact or
//! noisy expectations for the deterministic ones, even-parity probabilities
//! for the sampled ones. Observables are then contracted term by term.

mod calibration;
mod noise;
mod shots;
mod state;

use serde::{Deserialize, Serialize};

pub use calibration::{
    bias_from_coherence, hardware_noise_model, load_calibration, parse_calibration, reference_calibration, CalibrationProfile, CxEdge,
    HardwareModel, QubitCalibration, HARDWARE_MODEL_NOTE, MEASUREMENT_TIME_US,
};
pub use noise::{
    apply_biased_depolarizing, apply_global_depolarizing, apply_qubit_channels, expectation_noisy, NoiseModel, NoiseScope, NoiseSpec,
    QubitChannel,
};
pub use shots::{
    draw_estimate, even_parity_probability, outcome_distribution, sample_expectation, stream_seed, ReadoutError, ShotConfig, DEFAULT_SHOTS,
};
pub use state::{expectation_dense, expectation_exact, prepare_ground_state, DensityMatrix, PureState, GROUND_DEGENERACY_TOL};

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::pauli::{PauliString, PauliSum, NUM_QUBITS, NUM_STRINGS};

/// Metric rank threshold for deterministic noiseless evaluation.
pub const EXACT_RANK_TOL: f64 = 1e-8;
/// Metric rank threshold once noise or sampling is involved.
pub const NOISY_RANK_TOL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Backend {
    Exact,
    /// Deterministic density-matrix evaluation after a noise channel.
    Noisy { noise: NoiseModel },
    /// Sampled estimates, optionally after a channel and with readout confusion.
    Shots {
        noise: Option<NoiseModel>,
        shots: usize,
        readout: Option<[ReadoutError; NUM_QUBITS]>,
    },
    /// Sampling through a calibration-derived [`HardwareModel`].
    Hardware { model: HardwareModel, shots: usize },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Noisy { .. } => "noisy",
            Backend::Shots { .. } => "shots",
            Backend::Hardware { .. } => "hardware",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Backend::Shots { .. } | Backend::Hardware { .. })
    }

    pub fn default_rank_tol(&self) -> f64 {
        match self {
            Backend::Exact => EXACT_RANK_TOL,
            _ => NOISY_RANK_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Backend::Exact => Ok(()),
            Backend::Noisy { noise } => noise.validate(),
            Backend::Shots { noise, shots, readout } => {
                ShotConfig::new(*shots, 0)?;
                if let Some(n) = noise {
                    n.validate()?;
                }
                readout.iter().flatten().try_for_each(ReadoutError::validate)
            }
            Backend::Hardware { model, shots } => {
                ShotConfig::new(*shots, 0)?;
                model.channels.iter().try_for_each(QubitChannel::validate)?;
                model.readout.iter().try_for_each(ReadoutError::validate)
            }
        }
    }

    /// Evaluates everything about `state` that does not depend on the seed.
    pub fn prepare(&self, state: &PureState) -> Result<PreparedState> {
        self.validate()?;
        let rho = || state.density();
        let (table, shots) = match self {
            Backend::Exact => {
                let mut t = [0.0; NUM_STRINGS];
                for p in PauliString::all() {
                    t[p.index()] = state.pauli_expectation(p).re;
                }
                (t, None)
            }
            Backend::Noisy { noise } => (noise.apply(&rho()).pauli_table(), None),
            Backend::Shots { noise, shots, readout } => {
                let rho = noise.as_ref().map_or_else(rho, |n| n.apply(&rho()));
                (parity_table(&rho, readout.as_ref()), Some(*shots))
            }
            Backend::Hardware { model, shots } => {
                let rho = apply_qubit_channels(&rho(), &model.channels);
                (parity_table(&rho, Some(&model.readout)), Some(*shots))
            }
        };
        Ok(PreparedState { table, shots })
    }
}

fn parity_table(rho: &DensityMatrix, readout: Option<&[ReadoutError; NUM_QUBITS]>) -> [f64; NUM_STRINGS] {
    let mut t = [0.0; NUM_STRINGS];
    for p in PauliString::all() {
        t[p.index()] = even_parity_probability(rho, p, readout);
    }
    t
}

/// A state ready for repeated observable evaluation on one backend.
#[derive(Debug, Clone)]
pub struct PreparedState {
    table: [f64; NUM_STRINGS],
    shots: Option<usize>,
}

impl PreparedState {
    pub fn is_stochastic(&self) -> bool {
        self.shots.is_some()
    }

    /// Estimate of `⟨P⟩`; `seed` only matters for sampled backends.
    pub fn estimate(&self, p: PauliString, seed: u64) -> Result<f64> {
        if p.is_identity() {
            return Ok(1.0);
        }
        match self.shots {
            None => Ok(self.table[p.index()]),
            Some(shots) => draw_estimate(self.table[p.index()], shots, seed),
        }
    }

    /// Term-by-term estimate of `⟨O⟩`. Term `t` draws from
    /// `stream_seed(stream, [t])`. Failures report the offending term.
    pub fn evaluate(&self, obs: &PauliSum, stream: u64) -> std::result::Result<C64, (String, Error)> {
        let mut acc = ZERO;
        for (t, (p, c)) in obs.terms().iter().enumerate() {
            let v = self.estimate(*p, stream_seed(stream, &[t as u64])).map_err(|e| (p.label(), e))?;
            acc += c * v;
        }
        Ok(acc)
    }
}
