use nalgebra::DMatrix;

use crate::backends::{stream_seed, PreparedState};
use crate::eom::{Method, ObservableMatrix, ObservableSet};
use crate::error::{Error, Result};
use crate::linalg::{hermitize, C64};

/// Expectation-valued EOM matrices, ready for the generalized eigensolver.
///
/// For the full problem `a` and `b` are the `2n×2n` block matrices
/// `[[M, Q], [Q*, M*]]` and `[[V, W], [−W*, −V*]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSystem {
    pub method: Method,
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
    pub backend: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureContext<'a> {
    pub backend: &'a str,
    /// Root of the sampling streams for this system.
    pub seed: u64,
}

fn measure_matrix(m: &ObservableMatrix, slot: u64, state: &PreparedState, seed: u64) -> Result<DMatrix<C64>> {
    let n = m.n;
    let mut out = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for row in 0..n {
        for col in 0..n {
            let stream = stream_seed(seed, &[slot, (row * n + col) as u64]);
            out[(row, col)] = state.evaluate(m.get(row, col), stream).map_err(|(term, source)| Error::Measurement {
                row,
                col,
                term: format!("{}:{term}", m.name),
                source: Box::new(source),
            })?;
        }
    }
    Ok(out)
}

/// Evaluates every entry of `obs` on `state`, entry `(r, c)` of matrix `j`
/// drawing from `stream_seed(seed, [j, r·n + c])`, then Hermitizes.
pub fn measure_system(obs: &ObservableSet, state: &PreparedState, ctx: MeasureContext<'_>) -> Result<MeasuredSystem> {
    let measured: Vec<DMatrix<C64>> =
        obs.matrices.iter().enumerate().map(|(j, m)| measure_matrix(m, j as u64, state, ctx.seed)).collect::<Result<_>>()?;
    let (a, b) = match obs.method {
        Method::Rqeom => (measured[0].clone(), measured[1].clone()),
        Method::Qeom => {
            let (m, q, v, w) = (&measured[0], &measured[1], &measured[2], &measured[3]);
            (blocks(m, q, &q.conjugate(), &m.conjugate()), blocks(v, w, &(-w.conjugate()), &(-v.conjugate())))
        }
    };
    Ok(MeasuredSystem { method: obs.method, a: hermitize(&a), b: hermitize(&b), backend: ctx.backend.to_string(), seed: ctx.seed })
}

fn blocks(tl: &DMatrix<C64>, tr: &DMatrix<C64>, bl: &DMatrix<C64>, br: &DMatrix<C64>) -> DMatrix<C64> {
    let n = tl.nrows();
    let mut out = DMatrix::from_element(2 * n, 2 * n, C64::new(0.0, 0.0));
    out.view_mut((0, 0), (n, n)).copy_from(tl);
    out.view_mut((0, n), (n, n)).copy_from(tr);
    out.view_mut((n, 0), (n, n)).copy_from(bl);
    out.view_mut((n, n), (n, n)).copy_from(br);
    out
}
