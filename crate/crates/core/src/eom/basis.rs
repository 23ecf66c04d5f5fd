use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BASIS_LABELS, S_ANION, S_CATION};
use crate::linalg::{Matrix8, DIM, ONE};
use crate::pauli::{decompose, PauliSum};

/// Which transitions out of each source orbital are included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolKind {
    /// Every target `i` in `0..8`, including `i = j` (the number operator
    /// `a_j†a_j`). `8·m` operators.
    #[default]
    Full,
    /// Targets `i ≠ j` only. `7·m` operators. Misses states whose metric
    /// cancels between `|i⟩⟨j|` and `|j⟩⟨i|` (e.g. the antibonding s level at Γ).
    OffDiagonal,
}

impl PoolKind {
    pub fn targets_per_source(self) -> usize {
        match self {
            PoolKind::Full => DIM,
            PoolKind::OffDiagonal => DIM - 1,
        }
    }
}

impl FromStr for PoolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(PoolKind::Full),
            "off-diagonal" | "offdiagonal" => Ok(PoolKind::OffDiagonal),
            _ => Err(Error::input(format!("unknown pool kind {s:?} (expected full or off-diagonal)"))),
        }
    }
}

impl fmt::Display for PoolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolKind::Full => "full",
            PoolKind::OffDiagonal => "off-diagonal",
        })
    }
}

/// Source orbitals to excite out of.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceSelection {
    /// m = 1: anion s; m = 2: both s orbitals; m = 8: all orbitals.
    Preset,
    Explicit(Vec<usize>),
}

/// Exciter `|target⟩⟨source|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Excitation {
    pub target: usize,
    pub source: usize,
}

impl Excitation {
    pub fn label(&self) -> String {
        format!("{}<-{}", BASIS_LABELS[self.target], BASIS_LABELS[self.source])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationBasis {
    sources: Vec<usize>,
    kind: PoolKind,
    pool: Vec<Excitation>,
}

impl ExcitationBasis {
    pub fn num_orbitals(&self) -> usize {
        DIM
    }

    pub fn m(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn kind(&self) -> PoolKind {
        self.kind
    }

    pub fn pool(&self) -> &[Excitation] {
        &self.pool
    }

    pub fn len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }
}

fn preset_sources(m: usize) -> Result<Vec<usize>> {
    match m {
        1 => Ok(vec![S_ANION]),
        2 => Ok(vec![S_ANION, S_CATION]),
        8 => Ok((0..DIM).collect()),
        _ => Err(Error::input(format!("no preset source selection for m = {m}; pass explicit orbitals"))),
    }
}

/// Builds the ordered pool, sorted by `(source, target)`.
pub fn build_excitation_pool(m: usize, selection: &SourceSelection, kind: PoolKind) -> Result<ExcitationBasis> {
    if !(1..=DIM).contains(&m) {
        return Err(Error::input(format!("m = {m} is outside 1..={DIM}")));
    }
    let mut sources = match selection {
        SourceSelection::Preset => preset_sources(m)?,
        SourceSelection::Explicit(list) => list.clone(),
    };
    if let Some(bad) = sources.iter().find(|&&j| j >= DIM) {
        return Err(Error::input(format!("source orbital {bad} out of range 0..{DIM}")));
    }
    sources.sort_unstable();
    sources.dedup();
    if sources.len() != m {
        return Err(Error::input(format!("m = {m} but {} distinct source orbitals were given", sources.len())));
    }
    let pool = sources
        .iter()
        .flat_map(|&source| {
            (0..DIM).filter(move |&target| kind == PoolKind::Full || target != source).map(move |target| Excitation { target, source })
        })
        .collect();
    Ok(ExcitationBasis { sources, kind, pool })
}

/// Pauli form of the matrix unit `|i⟩⟨j|`, for any pair including `i = j`.
pub fn orbital_operator(i: usize, j: usize) -> Result<PauliSum> {
    if i >= DIM || j >= DIM {
        return Err(Error::input(format!("orbital pair ({i}, {j}) out of range 0..{DIM}")));
    }
    let mut unit = Matrix8::zeros();
    unit[(i, j)] = ONE;
    Ok(decompose(&unit))
}

/// Pauli form of `a_i†a_j = |i⟩⟨j|` for a genuine transition `i ≠ j`.
pub fn excitation_operator(i: usize, j: usize) -> Result<PauliSum> {
    if i == j {
        return Err(Error::input(format!("excitation operator needs distinct orbitals, got ({i}, {i})")));
    }
    orbital_operator(i, j)
}
