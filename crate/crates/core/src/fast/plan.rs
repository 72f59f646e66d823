use num_complex::Complex64;
use serde::Serialize;

use super::Branch;
use crate::error::{FastError, Result};
use crate::pauli::PauliString;
use crate::sim::{apply_pauli_rotation, AncillaCircuit, EvolutionCache, StateVector};

/// Which state a plan term is measured on. All are evolved by `e^{−iHt}`
/// after the listed preparation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanState {
    /// `exp(iπ/4·B)ψ`
    Rotated,
    /// `ψ`
    Evolved,
    /// `Bψ`
    Conjugated,
    /// `(I+B)ψ`, normalized
    Plus,
    /// `(I−B)ψ`, normalized
    Minus,
}

impl PlanState {
    pub fn prepare(self, psi: &StateVector, b: &PauliString, cache: &EvolutionCache, t: f64) -> Result<StateVector> {
        match self {
            PlanState::Rotated => cache.evolve(&apply_pauli_rotation(psi, b)?, t),
            PlanState::Evolved => cache.evolve(psi, t),
            PlanState::Conjugated => cache.evolve(&psi.apply_pauli(b)?, t),
            PlanState::Plus => Ok(AncillaCircuit::new(psi, b, cache, t)?.post_state(0)?.clone()),
            PlanState::Minus => Ok(AncillaCircuit::new(psi, b, cache, t)?.post_state(1)?.clone()),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct PlanTerm {
    pub weight: Complex64,
    pub state: PlanState,
}

/// `value = Σ weight_k · ⟨A⟩_{state_k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeTermPlan {
    pub a: PauliString,
    pub b: PauliString,
    pub t: f64,
    pub terms: [PlanTerm; 3],
}

impl ThreeTermPlan {
    pub fn combine(&self, expectations: [f64; 3]) -> Complex64 {
        self.terms
            .iter()
            .zip(expectations)
            .map(|(term, e)| term.weight * e)
            .sum()
    }

    /// Evaluates the plan with exact expectations.
    pub fn evaluate_exact(&self, psi: &StateVector, cache: &EvolutionCache) -> Result<Complex64> {
        let mut expectations = [0.0; 3];
        for (slot, term) in expectations.iter_mut().zip(&self.terms) {
            let state = term.state.prepare(psi, &self.b, cache, self.t)?;
            *slot = state.expectation(&self.a)?;
        }
        Ok(self.combine(expectations))
    }
}

fn check_pair(a: &PauliString, b: &PauliString) -> Result<()> {
    crate::error::check_qubits(a.qubits(), b.qubits())?;
    if !b.is_hermitian() {
        return Err(FastError::Domain(format!("B = {b} does not square to the identity")));
    }
    if !a.is_hermitian() {
        return Err(FastError::NotHermitian(format!("A = {a}")));
    }
    Ok(())
}

/// `tr(ρ[A(t),B]) = −i(2⟨A⟩_{ρ₁} − ⟨A⟩_{ρ₂} − ⟨A⟩_{ρ₃})`.
pub fn reformulate_commutator(a: &PauliString, b: &PauliString, t: f64) -> Result<ThreeTermPlan> {
    check_pair(a, b)?;
    let w = |x: f64| Complex64::new(0.0, -x);
    Ok(ThreeTermPlan {
        a: a.clone(),
        b: b.clone(),
        t,
        terms: [
            PlanTerm {
                weight: w(2.0),
                state: PlanState::Rotated,
            },
            PlanTerm {
                weight: w(-1.0),
                state: PlanState::Evolved,
            },
            PlanTerm {
                weight: w(-1.0),
                state: PlanState::Conjugated,
            },
        ],
    })
}

/// Plus: `4C₊²⟨A⟩_{ρ₊} − ⟨A⟩_{ρ₂} − ⟨A⟩_{ρ₃}`.
/// Minus: `−4C₋²⟨A⟩_{ρ₋} + ⟨A⟩_{ρ₂} + ⟨A⟩_{ρ₃}`.
/// `c_sq` is the weight of the chosen branch.
pub fn reformulate_anticommutator(
    a: &PauliString,
    b: &PauliString,
    t: f64,
    branch: Branch,
    c_sq: f64,
) -> Result<ThreeTermPlan> {
    check_pair(a, b)?;
    let (lead, rest, state) = match branch {
        Branch::Plus => (4.0 * c_sq, -1.0, PlanState::Plus),
        Branch::Minus => (-4.0 * c_sq, 1.0, PlanState::Minus),
    };
    let w = |x: f64| Complex64::new(x, 0.0);
    Ok(ThreeTermPlan {
        a: a.clone(),
        b: b.clone(),
        t,
        terms: [
            PlanTerm {
                weight: w(lead),
                state,
            },
            PlanTerm {
                weight: w(rest),
                state: PlanState::Evolved,
            },
            PlanTerm {
                weight: w(rest),
                state: PlanState::Conjugated,
            },
        ],
    })
}
