//! Fermionic operators as linear combinations of Majorana monomials.
//!
//! Mode `j` (0-based) owns the Majoranas `γ_{2j}` and `γ_{2j+1}` with
//! `c_j = (γ_{2j} + iγ_{2j+1}) / 2`. Monomials are kept with strictly
//! increasing indices; reordering picks up a sign per transposition and
//! repeated indices cancel because `γ² = 1`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{FastError, Result};

const DROP_TOL: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    modes: usize,
    terms: BTreeMap<Vec<usize>, Complex64>,
}

/// Sorts a Majorana word, returning the sign of the permutation and the
/// reduced word with `γ_a γ_a` pairs removed.
pub(crate) fn canonicalize(word: &[usize]) -> (f64, Vec<usize>) {
    let mut w = word.to_vec();
    let mut sign = 1.0;
    // insertion sort; each adjacent swap of distinct indices flips the sign
    for i in 1..w.len() {
        let mut k = i;
        while k > 0 && w[k - 1] > w[k] {
            w.swap(k - 1, k);
            sign = -sign;
            k -= 1;
        }
    }
    let mut reduced = Vec::with_capacity(w.len());
    for idx in w {
        if reduced.last() == Some(&idx) {
            reduced.pop();
        } else {
            reduced.push(idx);
        }
    }
    (sign, reduced)
}

impl FermionOperator {
    pub fn zero(modes: usize) -> FermionOperator {
        FermionOperator {
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(modes: usize) -> FermionOperator {
        let mut op = FermionOperator::zero(modes);
        op.terms.insert(Vec::new(), Complex64::new(1.0, 0.0));
        op
    }

    /// Builds an operator from `(coefficient, Majorana word)` pairs. Words may
    /// be in any order and contain repeats.
    pub fn from_terms(modes: usize, terms: &[(Complex64, Vec<usize>)]) -> Result<FermionOperator> {
        let mut op = FermionOperator::zero(modes);
        for (coef, word) in terms {
            if let Some(&bad) = word.iter().find(|&&idx| idx >= 2 * modes) {
                return Err(FastError::Domain(format!(
                    "Majorana index {bad} outside 0..{} for {modes} modes",
                    2 * modes
                )));
            }
            let (sign, reduced) = canonicalize(word);
            op.accumulate(reduced, coef * sign);
        }
        op.prune();
        Ok(op)
    }

    pub fn majorana(modes: usize, index: usize) -> Result<FermionOperator> {
        FermionOperator::from_terms(modes, &[(Complex64::new(1.0, 0.0), vec![index])])
    }

    /// `c_j = (γ_{2j} + iγ_{2j+1}) / 2`
    pub fn annihilation(modes: usize, mode: usize) -> Result<FermionOperator> {
        FermionOperator::from_terms(
            modes,
            &[
                (Complex64::new(0.5, 0.0), vec![2 * mode]),
                (Complex64::new(0.0, 0.5), vec![2 * mode + 1]),
            ],
        )
    }

    pub fn creation(modes: usize, mode: usize) -> Result<FermionOperator> {
        Ok(FermionOperator::annihilation(modes, mode)?.adjoint())
    }

    pub fn number(modes: usize, mode: usize) -> Result<FermionOperator> {
        FermionOperator::hopping(modes, mode, mode)
    }

    /// `c_i† c_j`
    pub fn hopping(modes: usize, i: usize, j: usize) -> Result<FermionOperator> {
        Ok(&FermionOperator::creation(modes, i)? * &FermionOperator::annihilation(modes, j)?)
    }

    /// `J = i·t·(c_i† c_j − c_j† c_i)`
    pub fn current(modes: usize, i: usize, j: usize, amplitude: f64) -> Result<FermionOperator> {
        let diff = &FermionOperator::hopping(modes, i, j)? - &FermionOperator::hopping(modes, j, i)?;
        Ok(diff.scale(Complex64::new(0.0, amplitude)))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], Complex64)> {
        self.terms.iter().map(|(w, &c)| (w.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: Complex64) -> FermionOperator {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> FermionOperator {
        let mut out = FermionOperator::zero(self.modes);
        for (word, c) in &self.terms {
            let k = word.len();
            // reversing k anticommuting factors takes k(k-1)/2 swaps
            let sign = if (k * k.saturating_sub(1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            out.terms.insert(word.clone(), c.conj() * sign);
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = self - &self.adjoint();
        diff.terms.values().all(|c| c.norm() <= tol)
    }

    fn accumulate(&mut self, word: Vec<usize>, coef: Complex64) {
        *self.terms.entry(word).or_insert(Complex64::new(0.0, 0.0)) += coef;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > DROP_TOL);
    }

    fn assert_same_modes(&self, other: &FermionOperator) {
        assert_eq!(self.modes, other.modes, "fermion operators on different mode counts");
    }
}

impl Add for &FermionOperator {
    type Output = FermionOperator;

    fn add(self, rhs: &FermionOperator) -> FermionOperator {
        self.assert_same_modes(rhs);
        let mut out = self.clone();
        for (w, &c) in &rhs.terms {
            out.accumulate(w.clone(), c);
        }
        out.prune();
        out
    }
}

impl Sub for &FermionOperator {
    type Output = FermionOperator;

    fn sub(self, rhs: &FermionOperator) -> FermionOperator {
        self + &(-rhs)
    }
}

impl Neg for &FermionOperator {
    type Output = FermionOperator;

    fn neg(self) -> FermionOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;

    fn mul(self, rhs: &FermionOperator) -> FermionOperator {
        self.assert_same_modes(rhs);
        let mut out = FermionOperator::zero(self.modes);
        for (wa, &ca) in &self.terms {
            for (wb, &cb) in &rhs.terms {
                let word: Vec<usize> = wa.iter().chain(wb).copied().collect();
                let (sign, reduced) = canonicalize(&word);
                out.accumulate(reduced, ca * cb * sign);
            }
        }
        out.prune();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_order_tracks_signs() {
        assert_eq!(canonicalize(&[1, 0]), (-1.0, vec![0, 1]));
        assert_eq!(canonicalize(&[2, 0, 1]), (1.0, vec![0, 1, 2]));
        assert_eq!(canonicalize(&[0, 1, 0]), (-1.0, vec![1]));
        assert_eq!(canonicalize(&[3, 3]), (1.0, vec![]));
    }

    #[test]
    fn number_operator_in_majoranas() {
        // c†c = (1 + iγ0γ1)/2
        let n = FermionOperator::number(1, 0).unwrap();
        let expected =
            FermionOperator::from_terms(1, &[(c(0.5, 0.0), vec![]), (c(0.0, 0.5), vec![0, 1])]).unwrap();
        assert_eq!(n, expected);
        assert!(n.is_hermitian(1e-14));
    }

    #[test]
    fn canonical_anticommutation() {
        for i in 0..3 {
            for j in 0..3 {
                let ci = FermionOperator::annihilation(3, i).unwrap();
                let cj_dag = FermionOperator::creation(3, j).unwrap();
                let anti = &(&ci * &cj_dag) + &(&cj_dag * &ci);
                let expected = if i == j {
                    FermionOperator::identity(3)
                } else {
                    FermionOperator::zero(3)
                };
                assert_eq!(anti, expected, "{{c_{i}, c_{j}†}}");
            }
        }
    }

    #[test]
    fn current_operator_is_hermitian() {
        let j = FermionOperator::current(2, 0, 1, 1.0).unwrap();
        assert!(j.is_hermitian(1e-14));
        assert_eq!(j.len(), 2);
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        assert!(matches!(
            FermionOperator::from_terms(2, &[(c(1.0, 0.0), vec![4])]),
            Err(FastError::Domain(_))
        ));
    }
}
