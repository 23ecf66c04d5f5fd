use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::material::MaterialParams;
use crate::error::{Error, Result};
use crate::linalg::{self, hermiticity_residual, Matrix8, C64, DIM};

/// Wavevector in units of 2π/a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KPoint {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

impl KPoint {
    pub const GAMMA: KPoint = KPoint { kx: 0.0, ky: 0.0, kz: 0.0 };

    pub const fn new(kx: f64, ky: f64, kz: f64) -> Self {
        Self { kx, ky, kz }
    }

    pub fn is_finite(&self) -> bool {
        self.kx.is_finite() && self.ky.is_finite() && self.kz.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.kx, self.ky, self.kz]
    }

    pub fn distance(&self, other: &KPoint) -> f64 {
        let d = [self.kx - other.kx, self.ky - other.ky, self.kz - other.kz];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub fn lerp(&self, other: &KPoint, t: f64) -> KPoint {
        KPoint {
            kx: self.kx + t * (other.kx - self.kx),
            ky: self.ky + t * (other.ky - self.ky),
            kz: self.kz + t * (other.kz - self.kz),
        }
    }
}

/// An 8×8 complex matrix known to equal its own adjoint to 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(Matrix8);

impl HermitianMatrix {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: Matrix8) -> Result<Self> {
        let residual = hermiticity_residual(&m);
        if residual > Self::TOLERANCE {
            return Err(Error::input(format!("matrix is not Hermitian (residual {residual:e})")));
        }
        Ok(Self(m))
    }

    pub fn from_diagonal(values: &[f64; DIM]) -> Self {
        let mut m = Matrix8::zeros();
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    pub fn into_inner(self) -> Matrix8 {
        self.0
    }

    pub fn to_dynamic(&self) -> DMatrix<C64> {
        linalg::to_dynamic(&self.0)
    }

    /// `H + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.0;
        for i in 0..DIM {
            m[(i, i)] += C64::new(c, 0.0);
        }
        Self(m)
    }
}

/// Neighbour sign vectors: the four bonds of the anion at the origin point to
/// (a/4)·s for s in this list.
const NEIGHBOURS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

/// Bloch sums over the four nearest neighbours.
///
/// With phases `e_j = exp(i·k·d_j)` and `k·d_j = (π/2)(k·s_j)` for k in 2π/a:
///
/// ```text
/// g0 = (e1 + e2 + e3 + e4) / 4
/// g1 = (e1 + e2 - e3 - e4) / 4      // sign of the x component of s_j
/// g2 = (e1 - e2 + e3 - e4) / 4      // y
/// g3 = (e1 - e2 - e3 + e4) / 4      // z
/// ```
///
/// which expands to the familiar cos/sin products, e.g.
/// `g0 = cos(πkx/2)cos(πky/2)cos(πkz/2) - i sin(πkx/2)sin(πky/2)sin(πkz/2)`.
pub fn structure_factors(k: KPoint) -> [C64; 4] {
    let k = k.as_array();
    let mut g = [C64::new(0.0, 0.0); 4];
    for s in NEIGHBOURS {
        let phase = C64::from_polar(0.25, FRAC_PI_2 * (k[0] * s[0] + k[1] * s[1] + k[2] * s[2]));
        g[0] += phase;
        g[1] += phase * s[0];
        g[2] += phase * s[1];
        g[3] += phase * s[2];
    }
    g
}

/// Tight-binding Hamiltonian at `k` in the basis
/// `(s_a, s_c, px_a, px_c, py_a, py_c, pz_a, pz_c)`.
///
/// The anion→cation coupling block, with rows (s, x, y, z) on the anion and
/// columns (s, x, y, z) on the cation, is
///
/// ```text
/// | V_ss g0      V_sa_pc g1  V_sa_pc g2  V_sa_pc g3 |
/// | -V_sc_pa g1  V_xx g0     V_xy g3     V_xy g2    |
/// | -V_sc_pa g2  V_xy g3     V_xx g0     V_xy g1    |
/// | -V_sc_pa g3  V_xy g2     V_xy g1     V_xx g0    |
/// ```
///
/// and the cation→anion block is its adjoint.
pub fn build_hamiltonian(material: &MaterialParams, k: KPoint) -> Result<HermitianMatrix> {
    if !k.is_finite() {
        return Err(Error::input(format!("k-point {k:?} is not finite")));
    }
    let [g0, g1, g2, g3] = structure_factors(k);
    let m = material;
    let coupling = [
        [g0 * m.v_ss, g1 * m.v_sa_pc, g2 * m.v_sa_pc, g3 * m.v_sa_pc],
        [-g1 * m.v_sc_pa, g0 * m.v_xx, g3 * m.v_xy, g2 * m.v_xy],
        [-g2 * m.v_sc_pa, g3 * m.v_xy, g0 * m.v_xx, g1 * m.v_xy],
        [-g3 * m.v_sc_pa, g2 * m.v_xy, g1 * m.v_xy, g0 * m.v_xx],
    ];
    let onsite_a = [m.e_s_a, m.e_p_a, m.e_p_a, m.e_p_a];
    let onsite_c = [m.e_s_c, m.e_p_c, m.e_p_c, m.e_p_c];

    let mut h = Matrix8::zeros();
    for r in 0..4 {
        let (ar, cr) = (2 * r, 2 * r + 1);
        h[(ar, ar)] = C64::new(onsite_a[r], 0.0);
        h[(cr, cr)] = C64::new(onsite_c[r], 0.0);
        for (c, value) in coupling[r].iter().enumerate() {
            let cc = 2 * c + 1;
            h[(ar, cc)] = *value;
            h[(cc, ar)] = value.conj();
        }
    }
    Ok(HermitianMatrix(h))
}

/// All eight eigenvalues of `h`, ascending.
pub fn exact_spectrum(h: &HermitianMatrix) -> Vec<f64> {
    linalg::eigvalsh(&h.to_dynamic())
}
