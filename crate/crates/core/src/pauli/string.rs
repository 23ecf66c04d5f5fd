use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{C64, DIM};

pub const NUM_QUBITS: usize = 3;
/// 4³ distinct strings on three qubits.
pub const NUM_STRINGS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    const fn from_code(code: u8) -> Pauli {
        match code & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn symbol(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }

    pub fn from_symbol(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Flips the computational basis bit.
    pub const fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// `σ|bit⟩ = i^k |bit'⟩`; returns k.
    const fn phase_power(self, bit: usize) -> u8 {
        match (self, bit) {
            (Pauli::Y, 0) => 1,
            (Pauli::Y, _) => 3,
            (Pauli::Z, 1) => 2,
            _ => 0,
        }
    }
}

/// Single-qubit product `a·b = i^k c`, as `(c, k)`.
const fn single_product(a: Pauli, b: Pauli) -> (Pauli, u8) {
    use Pauli::*;
    match (a, b) {
        (I, p) | (p, I) => (p, 0),
        (X, X) | (Y, Y) | (Z, Z) => (I, 0),
        (X, Y) => (Z, 1),
        (Y, X) => (Z, 3),
        (Y, Z) => (X, 1),
        (Z, Y) => (X, 3),
        (Z, X) => (Y, 1),
        (X, Z) => (Y, 3),
    }
}

const fn build_product_table() -> [[(u8, u8); NUM_STRINGS]; NUM_STRINGS] {
    let mut table = [[(0u8, 0u8); NUM_STRINGS]; NUM_STRINGS];
    let mut a = 0;
    while a < NUM_STRINGS {
        let mut b = 0;
        while b < NUM_STRINGS {
            let mut code = 0u8;
            let mut power = 0u8;
            let mut q = 0;
            while q < NUM_QUBITS {
                let pa = Pauli::from_code((a >> (2 * q)) as u8);
                let pb = Pauli::from_code((b >> (2 * q)) as u8);
                let (pc, k) = single_product(pa, pb);
                code |= (pc as u8) << (2 * q);
                power = (power + k) & 3;
                q += 1;
            }
            table[a][b] = (code, power);
            b += 1;
        }
        a += 1;
    }
    table
}

static PRODUCT_TABLE: [[(u8, u8); NUM_STRINGS]; NUM_STRINGS] = build_product_table();

pub(crate) const I_POWERS: [C64; 4] = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];

/// Tensor product of one Pauli per qubit.
///
/// Stored as a 6-bit code, two bits per qubit with qubit 0 lowest, so strings
/// index a dense 64-slot table directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(u8);

impl PauliString {
    pub const IDENTITY: PauliString = PauliString(0);

    /// `factors[q]` acts on qubit `q`.
    pub fn new(factors: [Pauli; NUM_QUBITS]) -> Self {
        let mut code = 0u8;
        for (q, p) in factors.iter().enumerate() {
            code |= (*p as u8) << (2 * q);
        }
        PauliString(code)
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < NUM_STRINGS, "Pauli string index {index} out of range");
        PauliString(index as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = PauliString> {
        (0..NUM_STRINGS).map(PauliString::from_index)
    }

    pub fn factor(self, qubit: usize) -> Pauli {
        Pauli::from_code(self.0 >> (2 * qubit))
    }

    pub fn factors(self) -> [Pauli; NUM_QUBITS] {
        [self.factor(0), self.factor(1), self.factor(2)]
    }

    /// Number of non-identity factors.
    pub fn weight(self) -> usize {
        self.factors().iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// Qubits acted on non-trivially, as a bit mask.
    pub fn support_mask(self) -> usize {
        (0..NUM_QUBITS).filter(|&q| self.factor(q) != Pauli::I).fold(0, |m, q| m | (1 << q))
    }

    /// Bits flipped by the string.
    pub fn flip_mask(self) -> usize {
        (0..NUM_QUBITS).filter(|&q| self.factor(q).flips()).fold(0, |m, q| m | (1 << q))
    }

    /// `P|col⟩ = value·|row⟩`; returns `(row, value)`.
    pub fn apply(self, col: usize) -> (usize, C64) {
        debug_assert!(col < DIM);
        let mut power = 0u8;
        for q in 0..NUM_QUBITS {
            power += self.factor(q).phase_power((col >> q) & 1);
        }
        (col ^ self.flip_mask(), I_POWERS[(power & 3) as usize])
    }

    /// `self · other = phase · result`.
    pub fn multiply(self, other: PauliString) -> (C64, PauliString) {
        let (code, power) = PRODUCT_TABLE[self.index()][other.index()];
        (I_POWERS[power as usize], PauliString(code))
    }

    pub(crate) fn product_raw(a: usize, b: usize) -> (usize, usize) {
        let (code, power) = PRODUCT_TABLE[a][b];
        (code as usize, power as usize)
    }

    pub fn commutes_with(self, other: PauliString) -> bool {
        let (p1, _) = self.multiply(other);
        let (p2, _) = other.multiply(self);
        p1 == p2
    }

    pub fn label(self) -> String {
        (0..NUM_QUBITS).rev().map(|q| self.factor(q).symbol()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != NUM_QUBITS {
            return Err(Error::input(format!("Pauli label {s:?} must have {NUM_QUBITS} factors")));
        }
        let mut factors = [Pauli::I; NUM_QUBITS];
        for (pos, c) in chars.iter().enumerate() {
            let p = Pauli::from_symbol(*c).ok_or_else(|| Error::input(format!("bad Pauli symbol {c:?} in {s:?}")))?;
            factors[NUM_QUBITS - 1 - pos] = p;
        }
        Ok(PauliString::new(factors))
    }
}
