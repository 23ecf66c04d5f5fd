use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::linalg::{Matrix8, DIM};
use crate::pauli::{Pauli, PauliString, PauliSum, NUM_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseScope {
    #[default]
    PerQubit,
    Global,
}

impl FromStr for NoiseScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-qubit" => Ok(NoiseScope::PerQubit),
            "global" => Ok(NoiseScope::Global),
            _ => Err(Error::input(format!("unknown noise scope {s:?} (expected per-qubit or global)"))),
        }
    }
}

impl fmt::Display for NoiseScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseScope::PerQubit => "per-qubit",
            NoiseScope::Global => "global",
        })
    }
}

/// Biased depolarizing channel on one qubit:
/// `ρ → (1−p)ρ + p Σ_σ r_σ σρσ` with `r_I = r_X = r_Y = (1−η)/3`, `r_Z = η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitChannel {
    pub p: f64,
    pub eta: f64,
}

impl QubitChannel {
    pub const IDENTITY: QubitChannel = QubitChannel { p: 0.0, eta: 0.25 };

    pub fn new(p: f64, eta: f64) -> Result<Self> {
        let c = QubitChannel { p, eta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("eta", self.eta)
    }

    /// `[r_I, r_X, r_Y, r_Z]`.
    pub fn weights(&self) -> [f64; 4] {
        let r = (1.0 - self.eta) / 3.0;
        [r, r, r, self.eta]
    }

    /// Multiplier picked up by the expectation of a single-qubit Pauli.
    pub fn pauli_factor(&self, sigma: Pauli) -> f64 {
        let r = self.weights();
        let sign = |tau: usize| if tau == 0 || tau == sigma as usize || sigma == Pauli::I { 1.0 } else { -1.0 };
        (1.0 - self.p) + self.p * (0..4).map(|tau| sign(tau) * r[tau]).sum::<f64>()
    }
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::config(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// Channel parameters for a noisy run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p: f64,
    pub eta: f64,
    pub scope: NoiseScope,
}

impl NoiseSpec {
    pub fn new(p: f64, eta: f64, scope: NoiseScope) -> Result<Self> {
        let spec = NoiseSpec { p, eta, scope };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("eta", self.eta)
    }

    pub fn channel(&self) -> QubitChannel {
        QubitChannel { p: self.p, eta: self.eta }
    }
}

/// Noise acting on the prepared state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    /// `(1−p)ρ + p·I/8`.
    Global { p: f64 },
    /// Independent channels on qubits 0, 1, 2.
    PerQubit { channels: [QubitChannel; NUM_QUBITS] },
}

impl NoiseModel {
    pub fn from_spec(spec: &NoiseSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec.scope {
            NoiseScope::Global => NoiseModel::Global { p: spec.p },
            NoiseScope::PerQubit => NoiseModel::PerQubit { channels: [spec.channel(); NUM_QUBITS] },
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::Global { p } => check_probability("p", *p),
            NoiseModel::PerQubit { channels } => channels.iter().try_for_each(QubitChannel::validate),
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        match self {
            NoiseModel::Global { p } => apply_global_depolarizing(rho, *p),
            NoiseModel::PerQubit { channels } => apply_qubit_channels(rho, channels),
        }
    }
}

fn single_qubit_string(qubit: usize, sigma: Pauli) -> PauliString {
    let mut f = [Pauli::I; NUM_QUBITS];
    f[qubit] = sigma;
    PauliString::new(f)
}

/// Applies `channels[q]` to qubit `q`, in order 0, 1, 2.
pub fn apply_qubit_channels(rho: &DensityMatrix, channels: &[QubitChannel; NUM_QUBITS]) -> DensityMatrix {
    let mut current = rho.clone();
    for (q, ch) in channels.iter().enumerate() {
        if ch.p == 0.0 {
            continue;
        }
        let r = ch.weights();
        let mut next: Matrix8 = current.matrix().scale(1.0 - ch.p + ch.p * r[0]);
        for sigma in [Pauli::X, Pauli::Y, Pauli::Z] {
            next += current.conjugated(single_qubit_string(q, sigma)).scale(ch.p * r[sigma as usize]);
        }
        current = DensityMatrix::from_raw(next);
    }
    current
}

/// The same biased depolarizing channel on every qubit.
pub fn apply_biased_depolarizing(rho: &DensityMatrix, spec: &NoiseSpec) -> DensityMatrix {
    apply_qubit_channels(rho, &[spec.channel(); NUM_QUBITS])
}

pub fn apply_global_depolarizing(rho: &DensityMatrix, p: f64) -> DensityMatrix {
    let mixed = Matrix8::identity().scale(p / DIM as f64);
    DensityMatrix::from_raw(rho.matrix().scale(1.0 - p) + mixed)
}

/// `Re tr(E(|ψ⟩⟨ψ|) O)` with the channel selected by `spec.scope`.
pub fn expectation_noisy(state: &PureState, obs: &PauliSum, spec: &NoiseSpec) -> Result<f64> {
    let model = NoiseModel::from_spec(spec)?;
    Ok(model.apply(&state.density()).expectation(obs).re)
}
