use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{Matrix8, C64, DIM, ONE, ZERO};
use crate::pauli::{Pauli, PauliString, NUM_QUBITS};

pub const DEFAULT_SHOTS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: usize,
    pub seed: u64,
}

impl ShotConfig {
    pub fn new(shots: usize, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::config("shots must be at least 1"));
        }
        Ok(ShotConfig { shots, seed })
    }
}

impl Default for ShotConfig {
    fn default() -> Self {
        ShotConfig { shots: DEFAULT_SHOTS, seed: 0 }
    }
}

/// Classical readout confusion of one qubit.
///
/// `p01` is the probability of reading 1 after preparing 0, `p10` of reading
/// 0 after preparing 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReadoutError {
    pub p01: f64,
    pub p10: f64,
}

impl ReadoutError {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        let r = ReadoutError { p01, p10 };
        r.validate()?;
        Ok(r)
    }

    pub fn symmetric(q: f64) -> Result<Self> {
        Self::new(q, q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("p01", self.p01), ("p10", self.p10)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::config(format!("readout {name} = {x} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of an independent stream addressed by `path` under `root`.
///
/// Each component is folded in with a splitmix64 round, so the result depends
/// only on the address and never on evaluation order.
pub fn stream_seed(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(root), |acc, &x| mix(acc ^ mix(x)))
}

fn rotation(sigma: Pauli) -> [[C64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match sigma {
        Pauli::I | Pauli::Z => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]],
        // H·S†
        Pauli::Y => [[C64::new(h, 0.0), C64::new(0.0, -h)], [C64::new(h, 0.0), C64::new(0.0, h)]],
    }
}

/// Unitary that maps the eigenbasis of `pauli` onto the computational basis.
fn measurement_basis(pauli: PauliString) -> Matrix8 {
    let gates: Vec<[[C64; 2]; 2]> = (0..NUM_QUBITS).map(|q| rotation(pauli.factor(q))).collect();
    Matrix8::from_fn(|r, c| (0..NUM_QUBITS).map(|q| gates[q][(r >> q) & 1][(c >> q) & 1]).product())
}

/// Probability of each readout bitstring after rotating into the eigenbasis
/// of `pauli` and passing the qubits it acts on through their confusion.
pub fn outcome_distribution(rho: &DensityMatrix, pauli: PauliString, readout: Option<&[ReadoutError; NUM_QUBITS]>) -> [f64; DIM] {
    let u = measurement_basis(pauli);
    let rotated = u * rho.matrix() * u.adjoint();
    let mut probs = [0.0; DIM];
    for (b, p) in probs.iter_mut().enumerate() {
        *p = rotated[(b, b)].re.max(0.0);
    }
    if let Some(readout) = readout {
        for q in (0..NUM_QUBITS).filter(|q| pauli.support_mask() & (1 << q) != 0) {
            let ReadoutError { p01, p10 } = readout[q];
            let mut next = [0.0; DIM];
            for (b, &p) in probs.iter().enumerate() {
                let flipped = b ^ (1 << q);
                let flip = if b & (1 << q) == 0 { p01 } else { p10 };
                next[b] += p * (1.0 - flip);
                next[flipped] += p * flip;
            }
            probs = next;
        }
    }
    probs
}

/// Probability that the parity of the measured qubits is even.
pub fn even_parity_probability(rho: &DensityMatrix, pauli: PauliString, readout: Option<&[ReadoutError; NUM_QUBITS]>) -> f64 {
    let mask = pauli.support_mask();
    let probs = outcome_distribution(rho, pauli, readout);
    let even: f64 = probs.iter().enumerate().filter(|(b, _)| (b & mask).count_ones().is_multiple_of(2)).map(|(_, p)| p).sum();
    let total: f64 = probs.iter().sum();
    (even / total).clamp(0.0, 1.0)
}

/// Mean of `shots` ±1 outcomes whose `+1` probability is `p_even`.
pub fn draw_estimate(p_even: f64, shots: usize, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::config("shots must be at least 1"));
    }
    let dist = Binomial::new(shots as u64, p_even).map_err(|e| Error::Numerical(format!("binomial with p = {p_even}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plus = dist.sample(&mut rng) as f64;
    Ok((2.0 * plus - shots as f64) / shots as f64)
}

/// Shot estimate of `tr(ρP)`. The identity string returns exactly 1.
pub fn sample_expectation(
    rho: &DensityMatrix,
    pauli: PauliString,
    cfg: &ShotConfig,
    readout: Option<&[ReadoutError; NUM_QUBITS]>,
) -> Result<f64> {
    if let Some(r) = readout {
        r.iter().try_for_each(ReadoutError::validate)?;
    }
    if pauli.is_identity() {
        return Ok(1.0);
    }
    draw_estimate(even_parity_probability(rho, pauli, readout), cfg.shots, cfg.seed)
}
