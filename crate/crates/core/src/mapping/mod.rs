//! Fermion-to-qubit mappings.
//!
//! Every mapping here places mode `j` data on qubit `j` (or on the tree node
//! `j` for the ternary tree) and returns `2n` Hermitian, pairwise
//! anticommuting Majorana strings. Under Jordan-Wigner the empty mode is
//! qubit state `|0⟩`, so `c_j†c_j = (I − Z_j)/2`.

mod fermion;

pub use fermion::FermionOperator;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FastError, Result};
use crate::pauli::{Pauli, PauliString, MAX_QUBITS};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MappingKind {
    Jw,
    Bk,
    Tt,
}

impl MappingKind {
    pub const ALL: [MappingKind; 3] = [MappingKind::Jw, MappingKind::Bk, MappingKind::Tt];
}

impl fmt::Display for MappingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MappingKind::Jw => "jw",
            MappingKind::Bk => "bk",
            MappingKind::Tt => "tt",
        })
    }
}

impl FromStr for MappingKind {
    type Err = FastError;

    fn from_str(s: &str) -> Result<MappingKind> {
        match s.to_ascii_lowercase().as_str() {
            "jw" => Ok(MappingKind::Jw),
            "bk" => Ok(MappingKind::Bk),
            "tt" => Ok(MappingKind::Tt),
            other => Err(FastError::Parse(format!("unknown mapping {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaBasis {
    mapping: MappingKind,
    modes: usize,
    gammas: Vec<PauliString>,
}

/// Largest weight the ternary-tree strings may reach at `modes` modes.
pub fn ternary_weight_bound(modes: usize) -> usize {
    // ceil(log3(2n)) + 1, computed in integers
    let target = 2 * modes;
    let mut power = 1usize;
    let mut exponent = 0;
    while power < target {
        power *= 3;
        exponent += 1;
    }
    exponent + 1
}

pub fn majorana_basis(modes: usize, kind: MappingKind) -> Result<MajoranaBasis> {
    if modes == 0 {
        return Err(FastError::Domain("a mapping needs at least one mode".into()));
    }
    if modes > MAX_QUBITS {
        return Err(FastError::Capacity(format!(
            "{modes} modes exceeds the {MAX_QUBITS}-qubit limit"
        )));
    }
    let gammas = match kind {
        MappingKind::Jw => jordan_wigner(modes),
        MappingKind::Bk => bravyi_kitaev(modes),
        MappingKind::Tt => ternary_tree(modes),
    };
    Ok(MajoranaBasis {
        mapping: kind,
        modes,
        gammas,
    })
}

fn jordan_wigner(n: usize) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        for p in [Pauli::X, Pauli::Y] {
            let mut s = PauliString::identity(n);
            for k in 0..j {
                s.set(k, Pauli::Z);
            }
            s.set(j, p);
            out.push(s);
        }
    }
    out
}

fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}

/// Fenwick-tree Bravyi-Kitaev: qubit `f-1` stores the parity of modes
/// `(f - lowbit(f), f]` in 1-based Fenwick indexing.
fn bravyi_kitaev(n: usize) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        let f = j + 1;
        let mut update = Vec::new();
        let mut i = f + lowbit(f);
        while i <= n {
            update.push(i - 1);
            i += lowbit(i);
        }
        let mut parity = Vec::new();
        let mut i = f - 1;
        while i > 0 {
            parity.push(i - 1);
            i -= lowbit(i);
        }
        let mut flip = Vec::new();
        let mut i = f - 1;
        while i > f - lowbit(f) {
            flip.push(i - 1);
            i -= lowbit(i);
        }
        let remainder: Vec<usize> = parity.iter().copied().filter(|q| !flip.contains(q)).collect();

        let mut gx = PauliString::identity(n);
        let mut gy = PauliString::identity(n);
        for &q in &update {
            gx.set(q, Pauli::X);
            gy.set(q, Pauli::X);
        }
        gx.set(j, Pauli::X);
        gy.set(j, Pauli::Y);
        for &q in &parity {
            gx.set(q, Pauli::Z);
        }
        for &q in &remainder {
            gy.set(q, Pauli::Z);
        }
        out.push(gx);
        out.push(gy);
    }
    out
}

/// Balanced ternary tree: node `k` has children `3k+1..=3k+3` and lives on
/// qubit `k`. Each missing child is a leg; legs are read left to right and the
/// rightmost (all-Z) leg is dropped.
fn ternary_tree(n: usize) -> Vec<PauliString> {
    fn walk(node: usize, n: usize, path: &mut Vec<(usize, Pauli)>, legs: &mut Vec<PauliString>) {
        for (slot, p) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
            path.push((node, p));
            let child = 3 * node + 1 + slot;
            if child < n {
                walk(child, n, path, legs);
            } else {
                legs.push(PauliString::from_sites(n, path));
            }
            path.pop();
        }
    }
    let mut legs = Vec::with_capacity(2 * n + 1);
    walk(0, n, &mut Vec::new(), &mut legs);
    legs.pop();
    legs
}

impl MajoranaBasis {
    pub fn mapping(&self) -> MappingKind {
        self.mapping
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn qubits(&self) -> usize {
        self.modes
    }

    pub fn gammas(&self) -> &[PauliString] {
        &self.gammas
    }

    pub fn gamma(&self, index: usize) -> &PauliString {
        &self.gammas[index]
    }

    pub fn max_weight(&self) -> usize {
        self.gammas.iter().map(PauliString::weight).max().unwrap_or(0)
    }

    /// Majorana pairs `(a, b)`, `a < b`, in the order used by
    /// [`MajoranaBasis::one_body_observables`].
    pub fn one_body_pairs(&self) -> Vec<(usize, usize)> {
        let m = 2 * self.modes;
        (0..m).flat_map(|a| ((a + 1)..m).map(move |b| (a, b))).collect()
    }

    /// The Hermitian strings `i·γ_a·γ_b` for every `a < b`; `n(2n−1)` of them.
    pub fn one_body_observables(&self) -> Vec<PauliString> {
        self.one_body_pairs()
            .into_iter()
            .map(|(a, b)| {
                let prod = self.gammas[a].mul_unchecked(&self.gammas[b]);
                prod.with_phase(prod.phase().mul(crate::pauli::Phase::I))
            })
            .collect()
    }

    /// Substitutes each Majorana with its string and merges equal strings.
    /// Returned strings carry phase `+1`; phases are folded into coefficients.
    pub fn encode(&self, op: &FermionOperator) -> Result<Vec<(Complex64, PauliString)>> {
        if op.modes() != self.modes {
            return Err(FastError::Dimension {
                expected: self.modes,
                found: op.modes(),
            });
        }
        let mut merged: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for (word, coef) in op.terms() {
            let mut prod = PauliString::identity(self.qubits());
            for &idx in word {
                let gamma = self.gammas.get(idx).ok_or_else(|| {
                    FastError::Domain(format!("Majorana index {idx} out of range"))
                })?;
                prod = prod.mul_unchecked(gamma);
            }
            let (phase, _) = prod.split_phase();
            *merged.entry(prod.key()).or_insert(Complex64::new(0.0, 0.0)) += coef * phase.to_complex();
        }
        Ok(merged
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-14)
            .map(|((x, z), c)| {
                let s = PauliString::from_bits(self.qubits(), x, z, crate::pauli::Phase::One)
                    .expect("bits come from valid strings");
                (c, s)
            })
            .collect())
    }
}

pub fn encode(op: &FermionOperator, basis: &MajoranaBasis) -> Result<Vec<(Complex64, PauliString)>> {
    basis.encode(op)
}

pub fn one_body_observables(basis: &MajoranaBasis) -> Vec<PauliString> {
    basis.one_body_observables()
}
