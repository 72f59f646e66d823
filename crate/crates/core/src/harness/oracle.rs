use num_complex::Complex64;
use serde::Serialize;

use super::model::{build_hamiltonian, ModelSpec};
use crate::error::{FastError, Result};
use crate::fast::{theta, CorrelationKind, TargetSet};
use crate::mapping::{majorana_basis, FermionOperator, MajoranaBasis, MappingKind};
use crate::pauli::PauliString;
use crate::sim::{EvolutionCache, StateVector};

/// Largest mode count the dense oracle accepts.
pub const MAX_ORACLE_MODES: usize = 12;

/// Exact correlations for one `(A_i, B_j, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleEntry {
    pub a_index: usize,
    pub b_index: usize,
    pub a_label: String,
    pub b_label: String,
    pub t: f64,
    /// `tr(ρ[A(t),B])`
    pub commutator: Complex64,
    /// `tr(ρ{A(t),B})`
    pub anticommutator: Complex64,
    /// `tr(ρA(t)B)`
    pub general: Complex64,
    /// `−iθ(t)·commutator`
    pub susceptibility: Complex64,
    /// `−iθ(t)·anticommutator`
    pub retarded_green: Complex64,
}

impl OracleEntry {
    pub fn value(&self, kind: CorrelationKind) -> Complex64 {
        match kind {
            CorrelationKind::Commutator => self.commutator,
            CorrelationKind::Anticommutator => self.anticommutator,
            CorrelationKind::General => self.general,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub modes: usize,
    pub mapping: MappingKind,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    /// `‖Hψ − E₀ψ‖`
    pub residual: f64,
    #[serde(skip)]
    pub ground_state: StateVector,
    pub times: Vec<f64>,
    pub entries: Vec<OracleEntry>,
}

impl OracleResult {
    pub fn find(&self, a: usize, b: usize, t: f64) -> Option<&OracleEntry> {
        self.entries
            .iter()
            .find(|e| e.a_index == a && e.b_index == b && e.t == t)
    }
}

fn apply_terms(terms: &[(Complex64, PauliString)], amps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (coef, p) in terms {
        for (j, &a) in amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (k, c) = p.apply_to_basis(j);
            out[k] += coef * c * a;
        }
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn encode_all(basis: &MajoranaBasis, ops: impl Iterator<Item = FermionOperator>) -> Result<Vec<Vec<(Complex64, PauliString)>>> {
    ops.map(|op| basis.encode(&op)).collect()
}

/// Exact correlations of `state` under the dynamics in `cache`, by
/// `⟨A(t)B⟩ = ⟨Uψ|A|UBψ⟩` and `⟨BA(t)⟩ = ⟨UB†ψ|A|Uψ⟩` with `U = e^{−iHt}`.
pub fn exact_correlations(
    basis: &MajoranaBasis,
    cache: &EvolutionCache,
    state: &StateVector,
    targets: &TargetSet,
    times: &[f64],
) -> Result<Vec<OracleEntry>> {
    crate::error::check_qubits(basis.qubits(), state.qubits())?;
    crate::error::check_qubits(basis.qubits(), cache.qubits())?;
    let a_ops = encode_all(basis, targets.a.iter().map(|t| t.op.clone()))?;
    let b_ops = encode_all(basis, targets.b.iter().map(|t| t.op.clone()))?;
    let b_adj = encode_all(basis, targets.b.iter().map(|t| t.op.adjoint()))?;
    let psi = state.amplitudes();
    let b_psi: Vec<Vec<Complex64>> = b_ops.iter().map(|b| apply_terms(b, psi)).collect();
    let b_adj_psi: Vec<Vec<Complex64>> = b_adj.iter().map(|b| apply_terms(b, psi)).collect();

    let mut entries = Vec::with_capacity(times.len() * a_ops.len() * b_ops.len());
    for &t in times {
        let u_psi = cache.evolve_amplitudes(psi, t);
        let u_b_psi: Vec<Vec<Complex64>> = b_psi.iter().map(|v| cache.evolve_amplitudes(v, t)).collect();
        let u_b_adj_psi: Vec<Vec<Complex64>> = b_adj_psi.iter().map(|v| cache.evolve_amplitudes(v, t)).collect();
        for (i, a) in a_ops.iter().enumerate() {
            let a_u_psi = apply_terms(a, &u_psi);
            for j in 0..b_ops.len() {
                let a_b = inner(&u_psi, &apply_terms(a, &u_b_psi[j]));
                let b_a = inner(&u_b_adj_psi[j], &a_u_psi);
                let commutator = a_b - b_a;
                let anticommutator = a_b + b_a;
                let step = Complex64::new(0.0, -theta(t));
                entries.push(OracleEntry {
                    a_index: i,
                    b_index: j,
                    a_label: targets.a[i].label.clone(),
                    b_label: targets.b[j].label.clone(),
                    t,
                    commutator,
                    anticommutator,
                    general: a_b,
                    susceptibility: step * commutator,
                    retarded_green: step * anticommutator,
                });
            }
        }
    }
    Ok(entries)
}

/// Ground-state correlations of a model by dense diagonalization. A
/// degenerate ground space is reported and its lowest-index eigenvector used.
pub fn oracle_correlations(
    spec: &ModelSpec,
    mapping: MappingKind,
    targets: &TargetSet,
    times: &[f64],
) -> Result<OracleResult> {
    if spec.n > MAX_ORACLE_MODES {
        return Err(FastError::Capacity(format!(
            "dense oracle is limited to {MAX_ORACLE_MODES} modes, got {}",
            spec.n
        )));
    }
    if times.is_empty() {
        return Err(FastError::Config("oracle needs at least one time".into()));
    }
    let basis = majorana_basis(spec.n, mapping)?;
    let h = build_hamiltonian(spec, mapping)?;
    let cache = EvolutionCache::new(&h)?;
    let ground_degeneracy = cache.ground_degeneracy(1e-9);
    if ground_degeneracy > 1 {
        log::warn!("ground space is {ground_degeneracy}-fold degenerate; using the lowest-index eigenvector");
    }
    let ground_state = cache.eigenvector(0);
    let ground_energy = cache.eigenvalues()[0];
    let h_psi = h.apply(&ground_state)?;
    let residual = h_psi
        .iter()
        .zip(ground_state.amplitudes())
        .map(|(hp, p)| (hp - p * ground_energy).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let entries = exact_correlations(&basis, &cache, &ground_state, targets, times)?;
    Ok(OracleResult {
        modes: spec.n,
        mapping,
        ground_energy,
        ground_degeneracy,
        residual,
        ground_state,
        times: times.to_vec(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::model::Boundary;

    #[test]
    fn car_identity_and_equal_time_densities() {
        let spec = ModelSpec::spinless_hubbard_chain(3, 1.0, 1.5, 0.2).with_boundary(Boundary::Periodic);
        for mapping in MappingKind::ALL {
            let green = oracle_correlations(&spec, mapping, &TargetSet::green(3).unwrap(), &[0.0]).unwrap();
            assert!(green.residual < 1e-8);
            for e in &green.entries {
                let want = if e.a_index == e.b_index { -1.0 } else { 0.0 };
                assert!((e.retarded_green - Complex64::new(0.0, want)).norm() < 1e-12);
            }
            let dens = oracle_correlations(&spec, mapping, &TargetSet::density(3).unwrap(), &[0.0]).unwrap();
            assert!(dens.entries.iter().all(|e| e.susceptibility.norm() < 1e-12));
        }
    }

    #[test]
    fn general_is_half_the_sum() {
        let spec = ModelSpec::spinless_hubbard_chain(3, 1.0, 2.0, 0.0);
        let o = oracle_correlations(&spec, MappingKind::Tt, &TargetSet::hopping(3).unwrap(), &[0.4]).unwrap();
        for e in &o.entries {
            assert!((e.commutator + e.anticommutator - e.general * 2.0).norm() < 1e-10);
        }
    }

    #[test]
    fn too_many_modes() {
        let spec = ModelSpec::tight_binding_chain(13, 1.0);
        let targets = TargetSet::density(13).unwrap();
        assert!(matches!(
            oracle_correlations(&spec, MappingKind::Jw, &targets, &[0.0]),
            Err(FastError::Capacity(_))
        ));
    }
}
