use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;

use super::string::{PauliString, I_POWERS, NUM_STRINGS};
use crate::error::{Error, Result};
use crate::linalg::{Matrix8, C64, DIM, ZERO};

/// Coefficients smaller than this in modulus are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Weighted sum of Pauli strings, stored sparse and sorted by string code.
///
/// Arithmetic goes through a dense 64-slot accumulator, so products cost at
/// most `|a|·|b|` table lookups regardless of cancellation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: Vec<(PauliString, C64)>,
}

#[derive(Clone)]
struct Dense([C64; NUM_STRINGS]);

impl Dense {
    fn zero() -> Self {
        Dense([ZERO; NUM_STRINGS])
    }

    fn add_sum(&mut self, s: &PauliSum, scale: C64) {
        for (p, c) in &s.terms {
            self.0[p.index()] += c * scale;
        }
    }

    fn add_product(&mut self, a: &PauliSum, b: &PauliSum, scale: C64) {
        for (pa, ca) in &a.terms {
            let ca = ca * scale;
            for (pb, cb) in &b.terms {
                let (code, power) = PauliString::product_raw(pa.index(), pb.index());
                self.0[code] += ca * cb * I_POWERS[power];
            }
        }
    }

    fn into_sum(self) -> PauliSum {
        let terms = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() >= PRUNE_THRESHOLD)
            .map(|(i, c)| (PauliString::from_index(i), *c))
            .collect();
        PauliSum { terms }
    }
}

impl PauliSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_terms([(PauliString::IDENTITY, C64::new(1.0, 0.0))])
    }

    pub fn from_string(p: PauliString, coeff: C64) -> Self {
        Self::from_terms([(p, coeff)])
    }

    /// Sums duplicate strings and prunes near-zero coefficients.
    pub fn from_terms(terms: impl IntoIterator<Item = (PauliString, C64)>) -> Self {
        let mut acc = Dense::zero();
        for (p, c) in terms {
            acc.0[p.index()] += c;
        }
        acc.into_sum()
    }

    pub fn terms(&self) -> &[(PauliString, C64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: PauliString) -> C64 {
        self.terms.iter().find(|(q, _)| *q == p).map_or(ZERO, |(_, c)| *c)
    }

    /// Coefficient of `III`; `trace / 8`.
    pub fn identity_coefficient(&self) -> C64 {
        self.coefficient(PauliString::IDENTITY)
    }

    pub fn trace(&self) -> C64 {
        self.identity_coefficient() * DIM as f64
    }

    /// Pauli strings are Hermitian, so the adjoint conjugates coefficients.
    pub fn adjoint(&self) -> Self {
        PauliSum { terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect() }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(_, c)| c.im.abs() <= tol)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut acc = Dense::zero();
        acc.add_sum(self, s);
        acc.into_sum()
    }

    /// Largest coefficient modulus; zero for the empty sum.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// Renders terms as `+0.5 XYI -0.25 ZZI`, complex coefficients as
    /// `+(0.5-0.25i) XYI`. `None` prints shortest round-trip decimals.
    pub fn render(&self, precision: Option<usize>) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let num = |x: f64| match precision {
            Some(p) => format!("{x:.p$}"),
            None => format!("{x}"),
        };
        let signed = |x: f64| {
            let body = num(x.abs());
            if x.is_sign_negative() {
                format!("-{body}")
            } else {
                format!("+{body}")
            }
        };
        self.terms
            .iter()
            .map(|(p, c)| {
                if c.im == 0.0 {
                    format!("{} {p}", signed(c.re))
                } else {
                    format!("+({}{}i) {p}", num(c.re), signed(c.im))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.precision()))
    }
}

fn parse_real(s: &str) -> Result<f64> {
    s.replace('−', "-").parse::<f64>().map_err(|_| Error::input(format!("bad coefficient {s:?}")))
}

fn parse_coefficient(token: &str) -> Result<C64> {
    let token = token.replace('−', "-");
    let (sign, body) = match token.chars().next() {
        Some('+') => (1.0, &token[1..]),
        Some('-') => (-1.0, &token[1..]),
        _ => (1.0, token.as_str()),
    };
    if let Some(inner) = body.strip_prefix('(').and_then(|b| b.strip_suffix("i)")) {
        // split "re±im" at the sign that is not an exponent sign or leading
        let bytes = inner.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
            .ok_or_else(|| Error::input(format!("bad complex coefficient {token:?}")))?;
        let re = parse_real(&inner[..split])?;
        let im = parse_real(&inner[split..])?;
        return Ok(C64::new(re, im) * sign);
    }
    Ok(C64::new(sign * parse_real(body)?, 0.0))
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(PauliSum::zero());
        }
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if !tokens.len().is_multiple_of(2) {
            return Err(Error::input(format!("Pauli sum {s:?} has a dangling token")));
        }
        let mut terms = Vec::with_capacity(tokens.len() / 2);
        for pair in tokens.chunks(2) {
            terms.push((pair[1].parse::<PauliString>()?, parse_coefficient(pair[0])?));
        }
        Ok(PauliSum::from_terms(terms))
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;

    fn add(self, rhs: &PauliSum) -> PauliSum {
        let mut acc = Dense::zero();
        acc.add_sum(self, C64::new(1.0, 0.0));
        acc.add_sum(rhs, C64::new(1.0, 0.0));
        acc.into_sum()
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;

    fn sub(self, rhs: &PauliSum) -> PauliSum {
        let mut acc = Dense::zero();
        acc.add_sum(self, C64::new(1.0, 0.0));
        acc.add_sum(rhs, C64::new(-1.0, 0.0));
        acc.into_sum()
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;

    fn neg(self) -> PauliSum {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: &PauliSum) -> PauliSum {
        multiply(self, rhs)
    }
}

/// Operator product with exact phase tracking.
pub fn multiply(a: &PauliSum, b: &PauliSum) -> PauliSum {
    let mut acc = Dense::zero();
    acc.add_product(a, b, C64::new(1.0, 0.0));
    acc.into_sum()
}

/// `ab - ba`.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> PauliSum {
    let mut acc = Dense::zero();
    acc.add_product(a, b, C64::new(1.0, 0.0));
    acc.add_product(b, a, C64::new(-1.0, 0.0));
    acc.into_sum()
}

/// Symmetrized double commutator `½([a,[h,b]] + [[a,h],b])`.
pub fn double_commutator(a: &PauliSum, h: &PauliSum, b: &PauliSum) -> PauliSum {
    double_commutator_from(a, &commutator(a, h), &commutator(h, b), b)
}

/// [`double_commutator`] given the inner commutators `ah = [a,h]` and
/// `hb = [h,b]`, for reuse across many `(a, b)` pairs.
pub fn double_commutator_from(a: &PauliSum, ah: &PauliSum, hb: &PauliSum, b: &PauliSum) -> PauliSum {
    let half = C64::new(0.5, 0.0);
    let mut acc = Dense::zero();
    acc.add_product(a, hb, half);
    acc.add_product(hb, a, -half);
    acc.add_product(ah, b, half);
    acc.add_product(b, ah, -half);
    acc.into_sum()
}

/// Pauli coefficients `tr(P·M) / 8` of an arbitrary 8×8 matrix.
pub fn decompose(m: &Matrix8) -> PauliSum {
    let mut acc = Dense::zero();
    for p in PauliString::all() {
        let mut trace = ZERO;
        for col in 0..DIM {
            // P[row, col] = value, so tr(P M) = Σ_col value · M[col, row]
            let (row, value) = p.apply(col);
            trace += value * m[(col, row)];
        }
        acc.0[p.index()] = trace / DIM as f64;
    }
    acc.into_sum()
}

/// [`decompose`] for a dynamically sized matrix; only 8×8 is accepted.
pub fn decompose_dyn(m: &DMatrix<C64>) -> Result<PauliSum> {
    if m.shape() != (DIM, DIM) {
        return Err(Error::input(format!("expected an {DIM}×{DIM} matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(decompose(&Matrix8::from_fn(|r, c| m[(r, c)])))
}

/// Dense matrix `Σ c_P · P`.
pub fn reconstruct(s: &PauliSum) -> Matrix8 {
    let mut m = Matrix8::zeros();
    for (p, c) in s.terms() {
        for col in 0..DIM {
            let (row, value) = p.apply(col);
            m[(row, col)] += c * value;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_residual;
    use proptest::prelude::*;

    fn max_diff(a: &Matrix8, b: &Matrix8) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn identity_decomposes_to_iii() {
        let s = decompose(&Matrix8::identity());
        assert_eq!(s.terms(), &[(PauliString::IDENTITY, c(1.0, 0.0))]);
    }

    #[test]
    fn alternating_diagonal_is_z_on_qubit_zero() {
        let m = Matrix8::from_fn(|r, col| if r == col { c(if r % 2 == 0 { 1.0 } else { -1.0 }, 0.0) } else { ZERO });
        let s = decompose(&m);
        assert_eq!(s.terms(), &[(ps("IIZ"), c(1.0, 0.0))]);
    }

    #[test]
    fn reconstruct_scaled_identity() {
        let s = PauliSum::from_string(PauliString::IDENTITY, c(2.0, 0.0));
        assert_eq!(reconstruct(&s), Matrix8::identity() * c(2.0, 0.0));
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        assert!(decompose_dyn(&DMatrix::<C64>::identity(4, 4)).is_err());
        assert!(decompose_dyn(&DMatrix::<C64>::identity(8, 8)).is_ok());
    }

    #[test]
    fn self_commutator_is_empty() {
        let s: PauliSum = "+0.5 XYI -0.25 ZZI +(1-2i) IYX".parse().unwrap();
        assert!(commutator(&s, &s).is_empty());
    }

    #[test]
    fn identity_in_the_middle_kills_double_commutator() {
        let a: PauliSum = "+0.5 XYI -0.25 ZZI".parse().unwrap();
        let b: PauliSum = "+(0.3+0.1i) XXZ +1 YII".parse().unwrap();
        assert!(double_commutator(&a, &PauliSum::identity(), &b).is_empty());
    }

    #[test]
    fn rendering_round_trips() {
        let s: PauliSum = "+0.5 XYI −0.25 ZZI +(0.125-3e-5i) IIX".parse().unwrap();
        assert_eq!(s.coefficient(ps("ZZI")), c(-0.25, 0.0));
        assert_eq!(s.coefficient(ps("IIX")), c(0.125, -3e-5));
        let back: PauliSum = s.to_string().parse().unwrap();
        assert_eq!(back, s);
        assert_eq!(format!("{:.3}", PauliSum::from_string(ps("XYI"), c(0.5, 0.0))), "+0.500 XYI");
        assert_eq!(PauliSum::zero().to_string(), "0");
    }

    #[test]
    fn pruning_drops_tiny_terms() {
        let s = PauliSum::from_terms([(ps("XII"), c(1e-15, 0.0)), (ps("ZII"), c(1.0, 0.0))]);
        assert_eq!(s.len(), 1);
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix8> {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)
            .prop_map(|v| Matrix8::from_fn(|r, col| c(v[r * 8 + col].0, v[r * 8 + col].1)))
    }

    fn arb_hermitian() -> impl Strategy<Value = Matrix8> {
        arb_matrix().prop_map(|m| (m + m.adjoint()) * c(0.5, 0.0))
    }

    fn arb_sum() -> impl Strategy<Value = PauliSum> {
        prop::collection::vec((0..64usize, -1.0..1.0f64, -1.0..1.0f64), 0..12)
            .prop_map(|v| PauliSum::from_terms(v.into_iter().map(|(i, re, im)| (PauliString::from_index(i), c(re, im)))))
    }

    fn dense_commutator(a: &Matrix8, b: &Matrix8) -> Matrix8 {
        a * b - b * a
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn hermitian_round_trip(m in arb_hermitian()) {
            let s = decompose(&m);
            prop_assert!(s.len() <= 64);
            prop_assert!(s.is_hermitian(1e-12));
            prop_assert!(max_diff(&reconstruct(&s), &m) < 1e-12);
        }

        #[test]
        fn general_round_trip(m in arb_matrix()) {
            prop_assert!(max_diff(&reconstruct(&decompose(&m)), &m) < 1e-12);
        }

        #[test]
        fn decompose_inverts_reconstruct(s in arb_sum()) {
            let back = decompose(&reconstruct(&s));
            prop_assert_eq!(back.len(), s.len());
            for ((p, x), (q, y)) in back.terms().iter().zip(s.terms()) {
                prop_assert_eq!(p, q);
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn product_matches_matrix_product(a in arb_sum(), b in arb_sum()) {
            let expected = reconstruct(&a) * reconstruct(&b);
            prop_assert!(max_diff(&reconstruct(&multiply(&a, &b)), &expected) < 1e-12);
        }

        #[test]
        fn double_commutator_matches_matrix_oracle(a in arb_sum(), h in arb_sum(), b in arb_sum()) {
            let (ma, mh, mb) = (reconstruct(&a), reconstruct(&h), reconstruct(&b));
            let expected = (dense_commutator(&ma, &dense_commutator(&mh, &mb)) + dense_commutator(&dense_commutator(&ma, &mh), &mb)) * c(0.5, 0.0);
            prop_assert!(max_diff(&reconstruct(&double_commutator(&a, &h, &b)), &expected) < 1e-12);
        }

        #[test]
        fn commutators_are_traceless(a in arb_sum(), h in arb_sum(), b in arb_sum()) {
            prop_assert!(commutator(&a, &b).identity_coefficient().norm() < 1e-12);
            prop_assert!(double_commutator(&a, &h, &b).identity_coefficient().norm() < 1e-12);
        }

        #[test]
        fn commutator_is_bilinear(a in arb_sum(), b in arb_sum(), d in arb_sum(), x in -2.0..2.0f64, y in -2.0..2.0f64) {
            let combo = &a.scale(c(x, 0.0)) + &d.scale(c(0.0, y));
            let lhs = commutator(&combo, &b);
            let rhs = &commutator(&a, &b).scale(c(x, 0.0)) + &commutator(&d, &b).scale(c(0.0, y));
            prop_assert!(max_diff(&reconstruct(&lhs), &reconstruct(&rhs)) < 1e-12);
        }

        #[test]
        fn adjoint_sandwich_is_hermitian(e in arb_sum(), m in arb_hermitian()) {
            let h = decompose(&m);
            let dc = double_commutator(&e.adjoint(), &h, &e);
            prop_assert!(hermiticity_residual(&reconstruct(&dc)) < 1e-12);
            prop_assert!(dc.is_hermitian(1e-12));
        }

        #[test]
        fn render_parse_round_trip(s in arb_sum()) {
            let back: PauliSum = s.to_string().parse().unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
