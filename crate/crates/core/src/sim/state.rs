use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_qubits, FastError, Result};
use crate::pauli::PauliString;

/// Total qubit budget for dense simulation, two-copy registers included.
pub const MAX_SIM_QUBITS: usize = 14;

const NORM_TOL: f64 = 1e-10;

/// Pure state on `qubits` qubits; amplitude `j` belongs to the basis state whose
/// bit `k` is the value of qubit `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(qubits: usize) -> Result<StateVector> {
        StateVector::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<StateVector> {
        check_capacity(qubits)?;
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(FastError::Domain(format!("basis index {index} outside dimension {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubits, amps })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(qubits: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        check_capacity(qubits)?;
        if amps.len() != 1usize << qubits {
            return Err(FastError::Domain(format!(
                "{} amplitudes for {qubits} qubits",
                amps.len()
            )));
        }
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(FastError::Domain(format!("state norm² is {norm}, expected 1")));
        }
        Ok(StateVector { qubits, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(qubits: usize, mut amps: Vec<Complex64>) -> Result<StateVector> {
        let norm = norm_sqr(&amps).sqrt();
        if norm < 1e-300 {
            return Err(FastError::Domain("cannot normalize the zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::from_amplitudes(qubits, amps)
    }

    /// Haar-random state from normalized complex Gaussians.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<StateVector> {
        check_capacity(qubits)?;
        let amps = (0..1usize << qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        StateVector::normalized(qubits, amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_qubits(self.qubits, other.qubits)?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        check_qubits(self.qubits, p.qubits())?;
        Ok(StateVector {
            qubits: self.qubits,
            amps: apply_pauli(p, &self.amps),
        })
    }

    /// `⟨ψ|P|ψ⟩`, real for Hermitian `P`.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        check_qubits(self.qubits, p.qubits())?;
        if !p.is_hermitian() {
            return Err(FastError::NotHermitian(p.to_string()));
        }
        Ok(pauli_expectation(p, &self.amps).re)
    }

    /// `self ⊗ other` with `self` on the low qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let qubits = self.qubits + other.qubits;
        check_capacity(qubits)?;
        let mut amps = Vec::with_capacity(1 << qubits);
        for hi in &other.amps {
            for lo in &self.amps {
                amps.push(lo * hi);
            }
        }
        Ok(StateVector { qubits, amps })
    }

    /// Two copies `ψ ⊗ ψ`.
    pub fn doubled(&self) -> Result<StateVector> {
        self.tensor(self)
    }
}

pub(crate) fn check_capacity(qubits: usize) -> Result<()> {
    if qubits > MAX_SIM_QUBITS {
        return Err(FastError::Capacity(format!(
            "{qubits} qubits exceeds the {MAX_SIM_QUBITS}-qubit simulation limit"
        )));
    }
    Ok(())
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn apply_pauli(p: &PauliString, amps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (j, &a) in amps.iter().enumerate() {
        let (k, c) = p.apply_to_basis(j);
        out[k] = c * a;
    }
    out
}

pub(crate) fn pauli_expectation(p: &PauliString, amps: &[Complex64]) -> Complex64 {
    amps.iter()
        .enumerate()
        .map(|(j, &a)| {
            let (k, c) = p.apply_to_basis(j);
            amps[k].conj() * c * a
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_state_expectations() {
        // |01>: qubit 0 is 0, qubit 1 is 1
        let s = StateVector::basis(2, 0b10).unwrap();
        assert_eq!(s.expectation(&"ZI".parse().unwrap()).unwrap(), 1.0);
        assert_eq!(s.expectation(&"IZ".parse().unwrap()).unwrap(), -1.0);
        assert_eq!(s.expectation(&"-ZZ".parse().unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn rejects_unnormalized_and_oversized() {
        let amps = vec![Complex64::new(1.0, 0.0); 2];
        assert!(StateVector::from_amplitudes(1, amps).is_err());
        assert!(matches!(StateVector::zero(15), Err(FastError::Capacity(_))));
    }

    #[test]
    fn random_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = StateVector::random(5, &mut rng).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn doubled_state_factorizes_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = StateVector::random(2, &mut rng).unwrap();
        let p: PauliString = "XY".parse().unwrap();
        let pp = p.tensor(&p).unwrap();
        let single = s.expectation(&p).unwrap();
        let double = s.doubled().unwrap().expectation(&pp).unwrap();
        assert!((double - single * single).abs() < 1e-12);
    }
}
