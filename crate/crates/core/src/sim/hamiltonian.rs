use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::{apply_pauli, check_capacity, StateVector};
use crate::error::{check_qubits, FastError, Result};
use crate::pauli::{Phase, PauliString};

/// Real combination of Hermitian Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    /// Sign phases are folded into the coefficients; imaginary phases are rejected.
    pub fn new(qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Hamiltonian> {
        check_capacity(qubits)?;
        let mut folded = Vec::with_capacity(terms.len());
        for (coef, p) in terms {
            check_qubits(qubits, p.qubits())?;
            let (phase, bare) = p.split_phase();
            let sign = match phase {
                Phase::One => 1.0,
                Phase::MinusOne => -1.0,
                _ => return Err(FastError::NotHermitian(format!("Hamiltonian term {p}"))),
            };
            if !coef.is_finite() {
                return Err(FastError::Domain(format!("non-finite coefficient on {p}")));
            }
            folded.push((coef * sign, bare));
        }
        Ok(Hamiltonian {
            qubits,
            terms: folded,
        })
    }

    /// Builds from complex coefficients, which must be real within `tol`.
    pub fn from_complex_terms(qubits: usize, terms: &[(Complex64, PauliString)], tol: f64) -> Result<Hamiltonian> {
        let mut real = Vec::with_capacity(terms.len());
        for (c, p) in terms {
            if c.im.abs() > tol {
                return Err(FastError::NotHermitian(format!("coefficient {c} on {p}")));
            }
            real.push((c.re, p.clone()));
        }
        Hamiltonian::new(qubits, real)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.qubits;
        let mut h = DMatrix::zeros(dim, dim);
        for (coef, p) in &self.terms {
            for j in 0..dim {
                let (k, c) = p.apply_to_basis(j);
                h[(k, j)] += c * *coef;
            }
        }
        h
    }

    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        check_qubits(self.qubits, state.qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
        for (coef, p) in &self.terms {
            for (o, v) in out.iter_mut().zip(apply_pauli(p, state.amplitudes())) {
                *o += v * *coef;
            }
        }
        Ok(out)
    }
}

/// Eigendecomposition of a Hamiltonian, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EvolutionCache {
    qubits: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl EvolutionCache {
    pub fn new(h: &Hamiltonian) -> Result<EvolutionCache> {
        let dense = h.dense();
        let eig = dense.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        // stable sort keeps the solver's order among exact ties
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(dense.nrows(), dense.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);

        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            eigenvalues.len(),
            eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        let rebuilt = &eigenvectors * diag * eigenvectors.adjoint();
        let err = (rebuilt - &dense).norm();
        let scale = dense.norm();
        if err > 1e-8 * scale.max(1e-4) {
            return Err(FastError::Domain(format!(
                "eigendecomposition reconstruction error {err:e} (norm {scale:e})"
            )));
        }
        Ok(EvolutionCache {
            qubits: h.qubits(),
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, index: usize) -> StateVector {
        let col: Vec<Complex64> = self.eigenvectors.column(index).iter().copied().collect();
        StateVector::normalized(self.qubits, col).expect("eigenvectors are unit columns")
    }

    /// Number of eigenvalues within `tol` of the lowest one.
    pub fn ground_degeneracy(&self, tol: f64) -> usize {
        let e0 = self.eigenvalues[0];
        self.eigenvalues.iter().take_while(|&&e| e - e0 <= tol).count()
    }

    /// `e^{−iHt}` applied to raw amplitudes.
    pub(crate) fn evolve_amplitudes(&self, amps: &[Complex64], t: f64) -> Vec<Complex64> {
        if t == 0.0 {
            return amps.to_vec();
        }
        let psi = DVector::from_column_slice(amps);
        let mut coeffs = self.eigenvectors.ad_mul(&psi);
        for (c, &e) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        (&self.eigenvectors * coeffs).iter().copied().collect()
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        check_qubits(self.qubits, state.qubits())?;
        let amps = self.evolve_amplitudes(state.amplitudes(), t);
        // renormalize to absorb rounding from the two dense products
        StateVector::normalized(self.qubits, amps)
    }
}

pub fn evolve(state: &StateVector, cache: &EvolutionCache, t: f64) -> Result<StateVector> {
    cache.evolve(state, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> PauliString {
        text.parse().unwrap()
    }

    #[test]
    fn non_hermitian_terms_are_rejected() {
        assert!(matches!(
            Hamiltonian::new(1, vec![(1.0, p("iZ"))]),
            Err(FastError::NotHermitian(_))
        ));
    }

    #[test]
    fn negative_phase_folds_into_coefficient() {
        let h = Hamiltonian::new(1, vec![(2.0, p("-Z"))]).unwrap();
        assert_eq!(h.terms()[0], (-2.0, p("Z")));
    }

    #[test]
    fn zero_time_is_identity() {
        let h = Hamiltonian::new(2, vec![(0.7, p("XX")), (0.3, p("ZI"))]).unwrap();
        let cache = EvolutionCache::new(&h).unwrap();
        let s = StateVector::basis(2, 1).unwrap();
        assert_eq!(cache.evolve(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn z_precession_of_plus_state() {
        // H = Z rotates ⟨X⟩ as cos(2t)
        let h = Hamiltonian::new(1, vec![(1.0, p("Z"))]).unwrap();
        let cache = EvolutionCache::new(&h).unwrap();
        let plus = StateVector::normalized(1, vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        for &t in &[0.3, std::f64::consts::FRAC_PI_2, 1.1] {
            let out = cache.evolve(&plus, t).unwrap();
            let x = out.expectation(&p("X")).unwrap();
            let y = out.expectation(&p("Y")).unwrap();
            assert!((x - (2.0 * t).cos()).abs() < 1e-12);
            assert!((y - (2.0 * t).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_hamiltonian_diagonalizes() {
        let h = Hamiltonian::new(2, vec![]).unwrap();
        let cache = EvolutionCache::new(&h).unwrap();
        assert!(cache.eigenvalues().iter().all(|&e| e == 0.0));
        assert_eq!(cache.ground_degeneracy(1e-9), 4);
    }
}
