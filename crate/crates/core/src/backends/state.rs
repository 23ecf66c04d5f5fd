use crate::error::{Error, Result};
use crate::lattice::HermitianMatrix;
use crate::linalg::{eigh_sorted, hermiticity_residual, Matrix8, C64, DIM, ONE, ZERO};
use crate::pauli::{reconstruct, PauliString, PauliSum, NUM_STRINGS};

const NORM_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
/// Two lowest levels closer than this count as a degenerate ground state.
pub const GROUND_DEGENERACY_TOL: f64 = 1e-9;

/// Normalised state of the 3-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState([C64; DIM]);

impl PureState {
    pub fn new(amplitudes: [C64; DIM]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::input(format!("state norm is {norm}, expected 1")));
        }
        Ok(PureState(amplitudes))
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: [C64; DIM]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::input("cannot normalise a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(PureState(amplitudes))
    }

    pub fn basis(index: usize) -> Self {
        let mut a = [ZERO; DIM];
        a[index] = ONE;
        PureState(a)
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.0
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(Matrix8::from_fn(|r, c| self.0[r] * self.0[c].conj()))
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn pauli_expectation(&self, p: PauliString) -> C64 {
        (0..DIM)
            .map(|col| {
                let (row, value) = p.apply(col);
                self.0[row].conj() * value * self.0[col]
            })
            .sum()
    }
}

/// Mixed state of the register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix8);

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix8) -> Result<Self> {
        let rho = DensityMatrix(m);
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(m: Matrix8) -> Self {
        DensityMatrix(m)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix8::identity().scale(1.0 / DIM as f64))
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_residual(&self.0);
        if herm > DENSITY_TOL {
            return Err(Error::Numerical(format!("density matrix not Hermitian (residual {herm:e})")));
        }
        let trace = self.0.trace();
        if (trace - ONE).norm() > DENSITY_TOL {
            return Err(Error::Numerical(format!("density matrix trace is {trace}")));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::Numerical(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (values, _) = eigh_sorted(&crate::linalg::to_dynamic(&self.0));
        values[0]
    }

    /// `tr(ρP)`.
    pub fn pauli_expectation(&self, p: PauliString) -> C64 {
        (0..DIM)
            .map(|col| {
                let (row, value) = p.apply(col);
                value * self.0[(col, row)]
            })
            .sum()
    }

    /// `tr(ρO)`.
    pub fn expectation(&self, obs: &PauliSum) -> C64 {
        obs.terms().iter().map(|(p, c)| c * self.pauli_expectation(*p)).sum()
    }

    /// `tr(ρP)` for all 64 strings, indexed by [`PauliString::index`].
    pub fn pauli_table(&self) -> [f64; NUM_STRINGS] {
        let mut out = [0.0; NUM_STRINGS];
        for p in PauliString::all() {
            out[p.index()] = self.pauli_expectation(p).re;
        }
        out
    }

    /// `PρP†`.
    pub(crate) fn conjugated(&self, p: PauliString) -> Matrix8 {
        let mut out = Matrix8::zeros();
        let images: Vec<(usize, C64)> = (0..DIM).map(|c| p.apply(c)).collect();
        for (a, &(ra, va)) in images.iter().enumerate() {
            for (b, &(rb, vb)) in images.iter().enumerate() {
                out[(ra, rb)] = va * self.0[(a, b)] * vb.conj();
            }
        }
        out
    }
}

/// Lowest eigenpair of `h`.
///
/// The phase is fixed so the first amplitude above 1e-12 in magnitude is real
/// and positive. A degenerate ground level keeps the lowest-index eigenvector
/// and logs a warning.
pub fn prepare_ground_state(h: &HermitianMatrix) -> (f64, PureState) {
    let (values, vectors) = eigh_sorted(&h.to_dynamic());
    if values[1] - values[0] < GROUND_DEGENERACY_TOL {
        log::warn!("ground level is degenerate (splitting {:e} eV); using the first eigenvector", values[1] - values[0]);
    }
    let mut amps = [ZERO; DIM];
    for (i, a) in amps.iter_mut().enumerate() {
        *a = vectors[(i, 0)];
    }
    if let Some(lead) = amps.iter().find(|a| a.norm() > 1e-12).copied() {
        let phase = lead.conj() / lead.norm();
        amps.iter_mut().for_each(|a| *a *= phase);
    }
    let state = PureState::normalized(amps).expect("eigenvector of a Hermitian matrix has unit norm");
    (values[0], state)
}

/// `⟨ψ|O|ψ⟩`, contracted term by term.
pub fn expectation_exact(state: &PureState, obs: &PauliSum) -> C64 {
    obs.terms().iter().map(|(p, c)| c * state.pauli_expectation(*p)).sum()
}

/// `⟨ψ|O|ψ⟩` through the dense 8×8 matrix of `O`.
pub fn expectation_dense(state: &PureState, obs: &PauliSum) -> C64 {
    let m = reconstruct(obs);
    let psi = state.amplitudes();
    let mut acc = ZERO;
    for r in 0..DIM {
        for c in 0..DIM {
            acc += psi[r].conj() * m[(r, c)] * psi[c];
        }
    }
    acc
}
