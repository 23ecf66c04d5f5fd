use serde::{Deserialize, Serialize};

use crate::eom::Method;
use crate::linalg::C64;

/// Imaginary parts above this (eV) are reported rather than silently dropped.
pub const IMAG_TOL: f64 = 1e-6;
/// Gaps of the eight-band problem.
pub const N_GAPS: usize = 7;
/// Slightly negative values within this of zero are read as zero.
const ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapExtraction {
    pub gaps: Vec<f64>,
    /// Largest dropped imaginary part.
    pub max_imag: f64,
    pub imag_flag: bool,
    /// Fewer than the expected number of usable values were found.
    pub shortfall: bool,
    /// The reduced spectrum was negated to make it predominantly positive.
    pub negated: bool,
}

/// Turns solver eigenvalues into ascending non-negative gaps.
///
/// The reduced problem is sign-normalised and keeps its non-negative values;
/// the full problem keeps the positive half of its ± pairs.
pub fn extract_gaps(eigs: &[C64], method: Method, n_expected: usize) -> GapExtraction {
    let max_imag = eigs.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let mut values: Vec<f64> = eigs.iter().map(|z| z.re).collect();
    let mut negated = false;
    let mut gaps: Vec<f64> = match method {
        Method::Rqeom => {
            let negative = values.iter().filter(|&&v| v < -ZERO_TOL).count();
            let positive = values.iter().filter(|&&v| v > ZERO_TOL).count();
            if negative > positive {
                values.iter_mut().for_each(|v| *v = -*v);
                negated = true;
            }
            values.into_iter().filter(|&v| v >= -ZERO_TOL).map(|v| v.max(0.0)).collect()
        }
        Method::Qeom => values.into_iter().filter(|&v| v > ZERO_TOL).collect(),
    };
    gaps.sort_by(f64::total_cmp);
    let shortfall = gaps.len() < n_expected;
    gaps.truncate(n_expected);
    GapExtraction { gaps, max_imag, imag_flag: max_imag > IMAG_TOL, shortfall, negated }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn symmetric_full_spectrum() {
        let out = extract_gaps(&c(&[-3.0, -1.0, 1.0, 3.0]), Method::Qeom, 2);
        assert_eq!(out.gaps, vec![1.0, 3.0]);
        assert!(!out.shortfall);
    }

    #[test]
    fn negative_reduced_spectrum_is_flipped() {
        let out = extract_gaps(&c(&[-5.0, -2.0, -4.0]), Method::Rqeom, 3);
        assert_eq!(out.gaps, vec![2.0, 4.0, 5.0]);
        assert!(out.negated);
    }

    #[test]
    fn shortfall_and_truncation() {
        let out = extract_gaps(&c(&[1.0, 2.0]), Method::Rqeom, 7);
        assert!(out.shortfall);
        assert_eq!(out.gaps.len(), 2);
        let out = extract_gaps(&c(&[9.0, 1.0, 2.0, 3.0]), Method::Rqeom, 3);
        assert_eq!(out.gaps, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn imaginary_residual_is_flagged() {
        let out = extract_gaps(&[C64::new(1.0, 1e-3), C64::new(2.0, 0.0)], Method::Rqeom, 2);
        assert!(out.imag_flag);
        assert_eq!(out.gaps, vec![1.0, 2.0]);
        assert!(!extract_gaps(&[C64::new(1.0, 1e-8)], Method::Rqeom, 1).imag_flag);
    }
}
