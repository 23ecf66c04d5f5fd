use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::basis::{orbital_operator, ExcitationBasis};
use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Parallelism};
use crate::pauli::{commutator, double_commutator_from, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rqeom,
    Qeom,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rqeom" => Ok(Method::Rqeom),
            "qeom" => Ok(Method::Qeom),
            _ => Err(Error::input(format!("unknown method {s:?} (expected rqeom or qeom)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rqeom => "rqeom",
            Method::Qeom => "qeom",
        })
    }
}

/// Number of fermionic-operator products to measure for a pool of size `n`:
/// four per entry of each of the two reduced matrices, or of each of the four
/// blocks of the full problem.
pub fn count_observables(method: Method, n: usize) -> usize {
    match method {
        Method::Rqeom => 8 * n * n,
        Method::Qeom => 16 * n * n,
    }
}

/// An `n×n` grid of operators, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableMatrix {
    pub name: String,
    pub n: usize,
    pub entries: Vec<PauliSum>,
}

impl ObservableMatrix {
    pub fn get(&self, row: usize, col: usize) -> &PauliSum {
        &self.entries[row * self.n + col]
    }
}

/// Operator-valued matrices of one EOM eigenproblem.
///
/// RQEOM holds `[A, B]`, QEOM holds `[M, Q, V, W]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub method: Method,
    pub n: usize,
    pub matrices: Vec<ObservableMatrix>,
}

impl ObservableSet {
    pub fn observable_count(&self) -> usize {
        count_observables(self.method, self.n)
    }

    pub fn matrix(&self, name: &str) -> Option<&ObservableMatrix> {
        self.matrices.iter().find(|m| m.name == name)
    }

    /// Number of distinct Pauli terms summed over all entries.
    pub fn pauli_term_count(&self) -> usize {
        self.matrices.iter().flat_map(|m| &m.entries).map(PauliSum::len).sum()
    }

    /// Line-oriented dump: a `method` line, an `n` line, then one
    /// `<matrix> <row> <col> <pauli sum>` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = format!("method {}\nn {}\n", self.method, self.n);
        for m in &self.matrices {
            for r in 0..m.n {
                for c in 0..m.n {
                    out.push_str(&format!("{} {r} {c} {}\n", m.name, m.get(r, c)));
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = |line: Option<&str>, key: &str| -> Result<String> {
            let line = line.ok_or_else(|| Error::input(format!("missing {key} line")))?;
            line.strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| Error::input(format!("expected {key:?} line, got {line:?}")))
        };
        let method: Method = header(lines.next(), "method ")?.parse()?;
        let n: usize = header(lines.next(), "n ")?.parse().map_err(|_| Error::input("bad n"))?;
        let names: &[&str] = match method {
            Method::Rqeom => &["A", "B"],
            Method::Qeom => &["M", "Q", "V", "W"],
        };
        let mut matrices: Vec<ObservableMatrix> =
            names.iter().map(|name| ObservableMatrix { name: name.to_string(), n, entries: vec![PauliSum::zero(); n * n] }).collect();
        let mut seen = 0;
        for line in lines {
            let mut parts = line.splitn(4, ' ');
            let (name, r, c, body) = (parts.next(), parts.next(), parts.next(), parts.next());
            let (Some(name), Some(r), Some(c), Some(body)) = (name, r, c, body) else {
                return Err(Error::input(format!("malformed entry line {line:?}")));
            };
            let parse_idx = |s: &str| s.parse::<usize>().ok().filter(|&i| i < n).ok_or_else(|| Error::input(format!("bad index in {line:?}")));
            let (r, c) = (parse_idx(r)?, parse_idx(c)?);
            let matrix = matrices.iter_mut().find(|m| m.name == name).ok_or_else(|| Error::input(format!("unknown matrix {name:?}")))?;
            matrix.entries[r * n + c] = body.parse()?;
            seen += 1;
        }
        if seen != names.len() * n * n {
            return Err(Error::input(format!("expected {} entries, found {seen}", names.len() * n * n)));
        }
        Ok(ObservableSet { method, n, matrices })
    }
}

/// Pool operators with their commutators against `H` cached:
/// `[E_p, H]` for de-exciters and `[H, E_q]`, `[H, E_q†]` for both kinds.
struct PoolOperators {
    exciters: Vec<PauliSum>,
    deexciters: Vec<PauliSum>,
    deexciter_h: Vec<PauliSum>,
    h_exciter: Vec<PauliSum>,
    h_deexciter: Vec<PauliSum>,
}

fn pool_operators(h: &PauliSum, basis: &ExcitationBasis, with_deexciter_right: bool, par: Parallelism) -> Result<PoolOperators> {
    let exciters = basis.pool().iter().map(|e| orbital_operator(e.target, e.source)).collect::<Result<Vec<_>>>()?;
    let deexciters: Vec<PauliSum> = exciters.iter().map(PauliSum::adjoint).collect();
    let n = exciters.len();
    let deexciter_h = map_indexed(n, par, |p| commutator(&deexciters[p], h));
    let h_exciter = map_indexed(n, par, |q| commutator(h, &exciters[q]));
    let h_deexciter = if with_deexciter_right { map_indexed(n, par, |q| commutator(h, &deexciters[q])) } else { Vec::new() };
    Ok(PoolOperators { exciters, deexciters, deexciter_h, h_exciter, h_deexciter })
}

impl PoolOperators {
    /// `[E_p, H, E_q†]`
    fn a(&self, p: usize, q: usize) -> PauliSum {
        double_commutator_from(&self.deexciters[p], &self.deexciter_h[p], &self.h_exciter[q], &self.exciters[q])
    }

    /// `[E_p, H, E_q]`
    fn a_bar(&self, p: usize, q: usize) -> PauliSum {
        double_commutator_from(&self.deexciters[p], &self.deexciter_h[p], &self.h_deexciter[q], &self.deexciters[q])
    }
}

fn check_hamiltonian(h: &PauliSum) -> Result<()> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::input("Hamiltonian Pauli sum is not Hermitian"));
    }
    Ok(())
}

fn grid(name: &str, n: usize, par: Parallelism, f: impl Fn(usize, usize) -> PauliSum + Sync + Send) -> ObservableMatrix {
    let entries = map_indexed(n * n, par, |idx| f(idx / n, idx % n));
    ObservableMatrix { name: name.to_string(), n, entries }
}

/// `A_pq = [E_p, H, E_q†]` and `B_pq = [E_p, E_q†]`, where `E_q† = |i⟩⟨j|`
/// is the q-th exciter of the pool and `E_p` the adjoint of the p-th.
pub fn build_rqeom_observables(h: &PauliSum, basis: &ExcitationBasis, par: Parallelism) -> Result<ObservableSet> {
    check_hamiltonian(h)?;
    let ops = pool_operators(h, basis, false, par)?;
    let n = basis.len();
    let a = grid("A", n, par, |p, q| ops.a(p, q));
    let b = grid("B", n, par, |p, q| commutator(&ops.deexciters[p], &ops.exciters[q]));
    Ok(ObservableSet { method: Method::Rqeom, n, matrices: vec![a, b] })
}

/// The four blocks of the full problem with the same operator convention:
/// `M = [E_p, H, E_q†]`, `Q = -[E_p, H, E_q]`, `V = [E_p, E_q†]`,
/// `W = -[E_p, E_q]`.
pub fn build_qeom_observables(h: &PauliSum, basis: &ExcitationBasis, par: Parallelism) -> Result<ObservableSet> {
    check_hamiltonian(h)?;
    let ops = pool_operators(h, basis, true, par)?;
    let n = basis.len();
    let minus = |s: PauliSum| -&s;
    let m = grid("M", n, par, |p, q| ops.a(p, q));
    let qm = grid("Q", n, par, |p, q| minus(ops.a_bar(p, q)));
    let v = grid("V", n, par, |p, q| commutator(&ops.deexciters[p], &ops.exciters[q]));
    let w = grid("W", n, par, |p, q| minus(commutator(&ops.deexciters[p], &ops.deexciters[q])));
    Ok(ObservableSet { method: Method::Qeom, n, matrices: vec![m, qm, v, w] })
}

pub fn build_observables(method: Method, h: &PauliSum, basis: &ExcitationBasis, par: Parallelism) -> Result<ObservableSet> {
    match method {
        Method::Rqeom => build_rqeom_observables(h, basis, par),
        Method::Qeom => build_qeom_observables(h, basis, par),
    }
}
