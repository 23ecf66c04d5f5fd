//! Small dense helpers over nalgebra shared by every module.

use nalgebra::{DMatrix, SMatrix};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;

/// Dimension of the one-particle orbital space (and of the 3-qubit register).
pub const DIM: usize = 8;

pub type Matrix8 = SMatrix<C64, DIM, DIM>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest entrywise deviation of `m` from its own adjoint.
pub fn hermiticity_residual<R, C, S>(m: &nalgebra::Matrix<C64, R, C, S>) -> f64
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, C>,
{
    let (rows, cols) = m.shape();
    if rows != cols {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..rows {
        for j in i..cols {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &DMatrix<C64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigen-decomposition of a Hermitian matrix with eigenpairs sorted by
/// ascending eigenvalue. Columns of the returned matrix are the eigenvectors.
pub fn eigh_sorted(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn to_dynamic(m: &Matrix8) -> DMatrix<C64> {
    DMatrix::from_fn(DIM, DIM, |r, c| m[(r, c)])
}
