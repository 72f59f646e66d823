use num_complex::Complex64;
use rand::Rng;

use super::hamiltonian::EvolutionCache;
use super::state::{apply_pauli, norm_sqr, StateVector};
use crate::error::{check_qubits, FastError, Result};
use crate::pauli::PauliString;

/// Branches lighter than this cannot be post-selected.
pub const DEGENERATE_BRANCH: f64 = 1e-14;

/// `(I + iB)/√2 |ψ⟩`, the `exp(iπ/4·B)` gate for Hermitian `B`.
pub fn apply_pauli_rotation(state: &StateVector, b: &PauliString) -> Result<StateVector> {
    check_qubits(state.qubits(), b.qubits())?;
    if !b.is_hermitian() {
        return Err(FastError::Domain(format!("rotation generator {b} is not Hermitian")));
    }
    let bpsi = apply_pauli(b, state.amplitudes());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = state
        .amplitudes()
        .iter()
        .zip(&bpsi)
        .map(|(a, x)| (a + Complex64::new(0.0, 1.0) * x) * s)
        .collect();
    StateVector::normalized(state.qubits(), amps)
}

/// Result of one ancilla-conditioned preparation.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaOutcome {
    pub bit: u8,
    pub post_state: StateVector,
    pub probability: f64,
}

/// Both branches of the ancilla circuit for a fixed `(ψ, B, H, t)`: bit 0
/// prepares `e^{−iHt}(I+B)ψ` and bit 1 prepares `e^{−iHt}(I−B)ψ`, normalized.
#[derive(Clone, Debug)]
pub struct AncillaCircuit {
    c_plus_sq: f64,
    plus: Option<StateVector>,
    minus: Option<StateVector>,
}

impl AncillaCircuit {
    pub fn new(state: &StateVector, b: &PauliString, cache: &EvolutionCache, t: f64) -> Result<AncillaCircuit> {
        check_qubits(state.qubits(), b.qubits())?;
        check_qubits(cache.qubits(), state.qubits())?;
        if !b.is_hermitian() {
            return Err(FastError::Domain(format!("{b} does not square to the identity")));
        }
        let bpsi = apply_pauli(b, state.amplitudes());
        let project = |sign: f64| -> Vec<Complex64> {
            state
                .amplitudes()
                .iter()
                .zip(&bpsi)
                .map(|(a, x)| (a + x * sign) * 0.5)
                .collect()
        };
        let plus_amps = project(1.0);
        let minus_amps = project(-1.0);
        let c_plus_sq = norm_sqr(&plus_amps).clamp(0.0, 1.0);
        let c_minus_sq = 1.0 - c_plus_sq;
        let finish = |amps: Vec<Complex64>, weight: f64| -> Result<Option<StateVector>> {
            if weight < DEGENERATE_BRANCH {
                return Ok(None);
            }
            let evolved = cache.evolve_amplitudes(&amps, t);
            StateVector::normalized(state.qubits(), evolved).map(Some)
        };
        Ok(AncillaCircuit {
            c_plus_sq,
            plus: finish(plus_amps, c_plus_sq)?,
            minus: finish(minus_amps, c_minus_sq)?,
        })
    }

    /// `(C₊², C₋²)`; the pair sums to exactly 1.
    pub fn branch_probabilities(&self) -> (f64, f64) {
        (self.c_plus_sq, 1.0 - self.c_plus_sq)
    }

    pub fn sample_bit<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        let u: f64 = rng.random();
        if u < self.c_plus_sq {
            0
        } else {
            1
        }
    }

    pub fn post_state(&self, bit: u8) -> Result<&StateVector> {
        let (state, probability) = if bit == 0 {
            (&self.plus, self.c_plus_sq)
        } else {
            (&self.minus, 1.0 - self.c_plus_sq)
        };
        state.as_ref().ok_or(FastError::DegenerateBranch { probability })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<AncillaOutcome> {
        let bit = self.sample_bit(rng);
        let probability = if bit == 0 { self.c_plus_sq } else { 1.0 - self.c_plus_sq };
        Ok(AncillaOutcome {
            bit,
            post_state: self.post_state(bit)?.clone(),
            probability,
        })
    }
}

/// One shot of the ancilla circuit: controlled-`B` between Hadamards on the
/// ancilla, then evolution of the system register.
pub fn prepare_rho_pm<R: Rng + ?Sized>(
    state: &StateVector,
    b: &PauliString,
    cache: &EvolutionCache,
    t: f64,
    rng: &mut R,
) -> Result<AncillaOutcome> {
    AncillaCircuit::new(state, b, cache, t)?.sample(rng)
}
