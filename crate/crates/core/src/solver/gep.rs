use nalgebra::DMatrix;

use super::measure::MeasuredSystem;
use crate::error::{Error, Result};
use crate::linalg::{eigh_sorted, hermitize, C64};

/// Below this the metric is treated as identically zero.
const METRIC_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GepSolution {
    pub eigenvalues: Vec<C64>,
    /// Dimension of the metric subspace dropped by the rank filter.
    pub discarded: usize,
}

/// Solves `A z = E B z` for Hermitian `A`, `B`.
///
/// `B` is diagonalised and restricted to eigenvalues with
/// `|λ| > rank_tol · max|λ|`. With `W = U|Λ|^{-1/2}` on that subspace the
/// problem becomes `S W†AW y = E y`, `S` the signs of the kept `λ`. A
/// positive-definite restriction leaves a Hermitian problem; an indefinite one
/// (the full problem's metric) is solved as a general complex matrix.
pub fn solve_generalized(a: &DMatrix<C64>, b: &DMatrix<C64>, rank_tol: f64) -> Result<GepSolution> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Numerical(format!("mismatched matrices {:?} and {:?}", a.shape(), b.shape())));
    }
    if a.iter().chain(b.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let (lambda, u) = eigh_sorted(b);
    let scale = lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if scale <= METRIC_FLOOR {
        return Err(Error::MetricCollapsed(scale));
    }
    let kept: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i].abs() > rank_tol * scale).collect();
    let k = kept.len();
    if k == 0 {
        return Err(Error::Numerical(format!("rank threshold {rank_tol:e} discards the whole metric")));
    }
    let w = DMatrix::from_fn(a.nrows(), k, |r, c| u[(r, kept[c])] / lambda[kept[c]].abs().sqrt());
    let reduced = hermitize(&(w.adjoint() * a * &w));
    let signs: Vec<f64> = kept.iter().map(|&i| lambda[i].signum()).collect();
    let eigenvalues = if signs.iter().all(|&s| s > 0.0) {
        eigh_sorted(&reduced).0.into_iter().map(|e| C64::new(e, 0.0)).collect()
    } else {
        let s_k = DMatrix::from_fn(k, k, |r, c| reduced[(r, c)] * signs[r]);
        general_eigenvalues(s_k)?
    };
    Ok(GepSolution { eigenvalues, discarded: lambda.len() - k })
}

fn general_eigenvalues(m: DMatrix<C64>) -> Result<Vec<C64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let schur = m.try_schur(f64::EPSILON, 10_000).ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let values = schur.eigenvalues().ok_or_else(|| Error::Numerical("Schur form has no eigenvalues".into()))?;
    Ok(values.iter().copied().collect())
}

pub fn solve_gep(sys: &MeasuredSystem, rank_tol: f64) -> Result<GepSolution> {
    solve_generalized(&sys.a, &sys.b, rank_tol)
}
