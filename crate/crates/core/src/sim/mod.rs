//! Dense statevector simulation of the measurement circuits.
//!
//! States are pure and stored as `2^q` complex amplitudes. Time evolution is
//! exact, through a cached eigendecomposition of the Hamiltonian. Commuting
//! families are measured by drawing from their exact joint distribution, which
//! also covers two-copy measurements on `ψ ⊗ ψ`.

mod ancilla;
mod hamiltonian;
mod measure;
mod state;

pub use ancilla::{apply_pauli_rotation, prepare_rho_pm, AncillaCircuit, AncillaOutcome, DEGENERATE_BRANCH};
pub use hamiltonian::{evolve, EvolutionCache, Hamiltonian};
pub use measure::{
    measure_commuting_set, random_pauli_shot, JointDistribution, MeasurementRecord, PauliShot, ShadowSampler,
};
pub use state::{StateVector, MAX_SIM_QUBITS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FastError, Result};
use crate::pauli::{Phase, PauliString};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with task tags so every task gets an independent stream
/// regardless of which worker runs it.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix(base), |acc, &t| splitmix(acc ^ splitmix(t)))
}

pub fn task_rng(base: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tags))
}

/// Projects `seed` onto the +1 eigenspace of `O = Σ c_a γ_a + c_0 Γ`, where
/// `Γ` anticommutes with every `γ_a` and `c_0 = √(1 − Σ c_a²)`. The result has
/// `⟨γ_a⟩ = c_a` exactly, which needs `Σ c_a² ≤ 1`.
pub fn majorana_eigenstate(gammas: &[PauliString], targets: &[f64], seed: &StateVector) -> Result<StateVector> {
    if gammas.len() != targets.len() {
        return Err(FastError::Domain(format!(
            "{} target values for {} strings",
            targets.len(),
            gammas.len()
        )));
    }
    let total: f64 = targets.iter().map(|c| c * c).sum();
    if total > 1.0 + 1e-12 {
        return Err(FastError::Domain(format!(
            "target expectations have Σ⟨γ⟩² = {total:.4} > 1; no state of mutually anticommuting observables reaches them"
        )));
    }
    for i in 0..gammas.len() {
        if !gammas[i].is_hermitian() {
            return Err(FastError::NotHermitian(gammas[i].to_string()));
        }
        for j in (i + 1)..gammas.len() {
            if gammas[i].commutes(&gammas[j])? {
                return Err(FastError::Domain(format!("{} and {} commute", gammas[i], gammas[j])));
            }
        }
    }
    let mut terms: Vec<(f64, &PauliString)> = targets.iter().copied().zip(gammas).collect();
    let rest = (1.0 - total).max(0.0).sqrt();
    let padding;
    if rest > 1e-12 {
        padding = anticommuting_partner(gammas, seed.qubits())?;
        terms.push((rest, &padding));
    }
    let mut amps = seed.amplitudes().to_vec();
    for (c, g) in &terms {
        for (a, v) in amps.iter_mut().zip(seed.apply_pauli(g)?.into_amplitudes()) {
            *a += v * *c;
        }
    }
    StateVector::normalized(seed.qubits(), amps)
}

// A Hermitian string anticommuting with every member of the family.
fn anticommuting_partner(gammas: &[PauliString], qubits: usize) -> Result<PauliString> {
    let candidates = gammas
        .iter()
        .try_fold(PauliString::identity(qubits), |acc, g| acc.multiply(g))?
        .with_phase(Phase::One);
    if gammas.iter().all(|g| !g.commutes_unchecked(&candidates)) {
        return Ok(candidates);
    }
    // odd-sized families: try the product with one member left out
    for skip in 0..gammas.len() {
        let cand = gammas
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != skip)
            .try_fold(PauliString::identity(qubits), |acc, (_, g)| acc.multiply(g))?
            .with_phase(Phase::One);
        if gammas.iter().all(|g| !g.commutes_unchecked(&cand)) {
            return Ok(cand);
        }
    }
    Err(FastError::Domain(
        "no string anticommutes with the whole family; targets must satisfy Σ⟨γ⟩² = 1".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{majorana_basis, MappingKind};

    #[test]
    fn derived_seeds_depend_on_every_tag() {
        let a = derive_seed(42, &[1, 2]);
        assert_ne!(a, derive_seed(42, &[2, 1]));
        assert_ne!(a, derive_seed(43, &[1, 2]));
        assert_eq!(a, derive_seed(42, &[1, 2]));
    }

    #[test]
    fn engineered_majorana_expectations() {
        let basis = majorana_basis(3, MappingKind::Jw).unwrap();
        let targets = [0.3, -0.25, 0.2, 0.1, -0.4, 0.35];
        let mut rng = task_rng(7, &[]);
        let seed = StateVector::random(3, &mut rng).unwrap();
        let s = majorana_eigenstate(basis.gammas(), &targets, &seed).unwrap();
        for (g, c) in basis.gammas().iter().zip(targets) {
            assert!((s.expectation(g).unwrap() - c).abs() < 1e-10);
        }
    }

    #[test]
    fn infeasible_targets_are_rejected() {
        let basis = majorana_basis(2, MappingKind::Jw).unwrap();
        let seed = StateVector::zero(2).unwrap();
        assert!(majorana_eigenstate(basis.gammas(), &[0.6; 4], &seed).is_err());
    }
}
