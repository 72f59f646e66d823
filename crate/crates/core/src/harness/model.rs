use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FastError, Result};
use crate::mapping::{majorana_basis, FermionOperator, MappingKind};
use crate::pauli::PauliString;
use crate::sim::{Hamiltonian, MAX_SIM_QUBITS};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    TightBindingChain,
    SpinlessHubbardChain,
    Custom,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// One qubit-level term of a custom Hamiltonian, `(re + i·im)·pauli`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomTerm {
    pub coef: f64,
    #[serde(default)]
    pub imag: f64,
    pub pauli: String,
}

/// `H = −t Σ (c_i†c_{i+1} + h.c.) + U Σ n_i n_{i+1} − μ Σ n_i`, or explicit
/// Pauli terms for `custom`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: ModelName,
    pub n: usize,
    #[serde(default = "one")]
    pub t_hop: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<CustomTerm>,
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn tight_binding_chain(n: usize, t_hop: f64) -> ModelSpec {
        ModelSpec {
            name: ModelName::TightBindingChain,
            n,
            t_hop,
            u: 0.0,
            mu: 0.0,
            boundary: Boundary::Open,
            terms: Vec::new(),
        }
    }

    pub fn spinless_hubbard_chain(n: usize, t_hop: f64, u: f64, mu: f64) -> ModelSpec {
        ModelSpec {
            name: ModelName::SpinlessHubbardChain,
            u,
            mu,
            ..ModelSpec::tight_binding_chain(n, t_hop)
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> ModelSpec {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(FastError::Config("models need at least one mode".into()));
        }
        if self.n > MAX_SIM_QUBITS {
            return Err(FastError::Capacity(format!(
                "{} modes exceed the {MAX_SIM_QUBITS}-qubit simulator",
                self.n
            )));
        }
        if ![self.t_hop, self.u, self.mu].iter().all(|x| x.is_finite()) {
            return Err(FastError::Config("model parameters must be finite".into()));
        }
        match self.name {
            ModelName::TightBindingChain if self.u != 0.0 => Err(FastError::Config(
                "tight_binding_chain has no interaction; use spinless_hubbard_chain for U != 0".into(),
            )),
            ModelName::Custom if self.terms.is_empty() => {
                Err(FastError::Config("custom models need explicit Pauli terms".into()))
            }
            ModelName::TightBindingChain | ModelName::SpinlessHubbardChain if !self.terms.is_empty() => Err(
                FastError::Config("explicit terms are only read for custom models".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Nearest-neighbour bonds; the closing bond needs at least three sites.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<(usize, usize)> = (0..self.n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && self.n >= 3 {
            bonds.push((self.n - 1, 0));
        }
        bonds
    }

    /// The chain Hamiltonian as a fermionic operator; `None` for custom models.
    pub fn fermionic(&self) -> Result<Option<FermionOperator>> {
        if self.name == ModelName::Custom {
            return Ok(None);
        }
        let n = self.n;
        let mut h = FermionOperator::zero(n);
        for (i, j) in self.bonds() {
            let hop = &FermionOperator::hopping(n, i, j)? + &FermionOperator::hopping(n, j, i)?;
            h = &h + &hop.scale(Complex64::new(-self.t_hop, 0.0));
            if self.u != 0.0 {
                let nn = &FermionOperator::number(n, i)? * &FermionOperator::number(n, j)?;
                h = &h + &nn.scale(Complex64::new(self.u, 0.0));
            }
        }
        if self.mu != 0.0 {
            for i in 0..n {
                h = &h + &FermionOperator::number(n, i)?.scale(Complex64::new(-self.mu, 0.0));
            }
        }
        Ok(Some(h))
    }
}

pub fn build_hamiltonian(spec: &ModelSpec, mapping: MappingKind) -> Result<Hamiltonian> {
    spec.validate()?;
    let basis = majorana_basis(spec.n, mapping)?;
    match spec.fermionic()? {
        Some(op) => Hamiltonian::from_complex_terms(basis.qubits(), &basis.encode(&op)?, 1e-12),
        None => {
            let terms = spec
                .terms
                .iter()
                .map(|term| Ok((Complex64::new(term.coef, term.imag), term.pauli.parse::<PauliString>()?)))
                .collect::<Result<Vec<_>>>()?;
            if let Some((_, p)) = terms.iter().find(|(_, p)| p.qubits() != basis.qubits()) {
                return Err(FastError::Dimension {
                    expected: basis.qubits(),
                    found: p.qubits(),
                });
            }
            Hamiltonian::from_complex_terms(basis.qubits(), &terms, 1e-12)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::EvolutionCache;

    fn spectrum(spec: &ModelSpec, mapping: MappingKind) -> Vec<f64> {
        let h = build_hamiltonian(spec, mapping).unwrap();
        EvolutionCache::new(&h).unwrap().eigenvalues().to_vec()
    }

    #[test]
    fn two_site_hopping_spectrum() {
        let e = spectrum(&ModelSpec::tight_binding_chain(2, 1.0), MappingKind::Jw);
        for (got, want) in e.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn zero_parameters_give_zero_hamiltonian() {
        let spec = ModelSpec::spinless_hubbard_chain(3, 0.0, 0.0, 0.0);
        let h = build_hamiltonian(&spec, MappingKind::Bk).unwrap();
        assert!(h.dense().iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn encodings_share_a_spectrum() {
        let spec = ModelSpec::spinless_hubbard_chain(4, 1.0, 2.0, 0.3).with_boundary(Boundary::Periodic);
        let jw = spectrum(&spec, MappingKind::Jw);
        for mapping in [MappingKind::Bk, MappingKind::Tt] {
            let other = spectrum(&spec, mapping);
            for (a, b) in jw.iter().zip(&other) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn periodic_bond_needs_three_sites() {
        let two = ModelSpec::tight_binding_chain(2, 1.0).with_boundary(Boundary::Periodic);
        assert_eq!(two.bonds(), vec![(0, 1)]);
        let three = ModelSpec::tight_binding_chain(3, 1.0).with_boundary(Boundary::Periodic);
        assert_eq!(three.bonds(), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn custom_terms() {
        let mut spec = ModelSpec::tight_binding_chain(2, 0.0);
        spec.name = ModelName::Custom;
        spec.terms = vec![CustomTerm {
            coef: 0.5,
            imag: 0.0,
            pauli: "XX".into(),
        }];
        assert_eq!(build_hamiltonian(&spec, MappingKind::Jw).unwrap().terms().len(), 1);
        spec.terms[0].pauli = "iXZ".into();
        assert!(matches!(
            build_hamiltonian(&spec, MappingKind::Jw),
            Err(FastError::NotHermitian(_))
        ));
        spec.terms.clear();
        assert!(matches!(build_hamiltonian(&spec, MappingKind::Jw), Err(FastError::Config(_))));
    }
}
