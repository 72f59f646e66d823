//! Pauli strings in symplectic form.
//!
//! A string on `q` qubits is stored as two bit masks plus an exact phase from
//! the group {+1, +i, -1, -i}. Bit `k` of `xbits`/`zbits` refers to qubit `k`
//! (the leftmost letter of the text form). A site with both bits set is the
//! Hermitian `Y`, so `+Y` is Hermitian and `+iY` is not.

mod graph;

pub use graph::{build_commutation_graph, greedy_color, CommutationGraph, Coloring};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_qubits, FastError, Result};

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

/// Element of the cyclic group generated by `i`, stored as the exponent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    One = 0,
    I = 1,
    MinusOne = 2,
    MinusI = 3,
}

impl Phase {
    pub fn from_exponent(k: i64) -> Phase {
        match k.rem_euclid(4) {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> i64 {
        self as i64
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + other.exponent())
    }

    pub fn conj(self) -> Phase {
        Phase::from_exponent(-self.exponent())
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::One | Phase::MinusOne)
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::One => Complex64::new(1.0, 0.0),
            Phase::I => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// Single-site Pauli letter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    qubits: usize,
    xbits: u64,
    zbits: u64,
    phase: Phase,
}

fn mask(qubits: usize) -> u64 {
    if qubits == 64 {
        u64::MAX
    } else {
        (1u64 << qubits) - 1
    }
}

impl PauliString {
    pub fn identity(qubits: usize) -> PauliString {
        assert!(qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliString {
            qubits,
            xbits: 0,
            zbits: 0,
            phase: Phase::One,
        }
    }

    pub fn from_bits(qubits: usize, xbits: u64, zbits: u64, phase: Phase) -> Result<PauliString> {
        if qubits > MAX_QUBITS {
            return Err(FastError::Capacity(format!(
                "{qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        if (xbits | zbits) & !mask(qubits) != 0 {
            return Err(FastError::Domain(format!(
                "bit masks reach beyond {qubits} qubits"
            )));
        }
        Ok(PauliString {
            qubits,
            xbits,
            zbits,
            phase,
        })
    }

    /// Builds `P` acting on `site` and identity elsewhere.
    pub fn single(qubits: usize, site: usize, p: Pauli) -> PauliString {
        let mut s = PauliString::identity(qubits);
        s.set(site, p);
        s
    }

    pub fn from_sites(qubits: usize, sites: &[(usize, Pauli)]) -> PauliString {
        let mut s = PauliString::identity(qubits);
        for &(site, p) in sites {
            s.set(site, p);
        }
        s
    }

    /// Overwrites the letter on `site`. The phase is left alone.
    pub fn set(&mut self, site: usize, p: Pauli) {
        assert!(site < self.qubits, "site {site} out of range");
        let bit = 1u64 << site;
        let (x, z) = p.bits();
        self.xbits = (self.xbits & !bit) | if x { bit } else { 0 };
        self.zbits = (self.zbits & !bit) | if z { bit } else { 0 };
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn xbits(&self) -> u64 {
        self.xbits
    }

    pub fn zbits(&self) -> u64 {
        self.zbits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Symplectic part only; two strings with the same key differ by a phase.
    pub fn key(&self) -> (u64, u64) {
        (self.xbits, self.zbits)
    }

    pub fn get(&self, site: usize) -> Pauli {
        let bit = 1u64 << site;
        Pauli::from_bits(self.xbits & bit != 0, self.zbits & bit != 0)
    }

    pub fn weight(&self) -> usize {
        (self.xbits | self.zbits).count_ones() as usize
    }

    pub fn support(&self) -> u64 {
        self.xbits | self.zbits
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// True for `±I`, `±iI`.
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.xbits == 0 && self.zbits == 0
    }

    pub fn with_phase(&self, phase: Phase) -> PauliString {
        PauliString {
            phase,
            ..self.clone()
        }
    }

    /// Splits into the phase and the `+1`-phase string.
    pub fn split_phase(&self) -> (Phase, PauliString) {
        (self.phase, self.with_phase(Phase::One))
    }

    pub fn negate(&self) -> PauliString {
        self.with_phase(self.phase.mul(Phase::MinusOne))
    }

    pub fn adjoint(&self) -> PauliString {
        self.with_phase(self.phase.conj())
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        check_qubits(self.qubits, other.qubits)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        // Sum of per-site exponents g(x1, z1, x2, z2) with sigma_a sigma_b = i^g sigma_c.
        let mut exponent = self.phase.exponent() + other.phase.exponent();
        let mut overlap = self.support() & other.support();
        while overlap != 0 {
            let site = overlap.trailing_zeros();
            overlap &= overlap - 1;
            let bit = 1u64 << site;
            let (x1, z1) = (self.xbits & bit != 0, self.zbits & bit != 0);
            let (x2, z2) = (other.xbits & bit != 0, other.zbits & bit != 0);
            exponent += match (x1, z1) {
                (true, true) => z2 as i64 - x2 as i64,
                (true, false) => z2 as i64 * (2 * x2 as i64 - 1),
                (false, true) => x2 as i64 * (1 - 2 * z2 as i64),
                (false, false) => 0,
            };
        }
        PauliString {
            qubits: self.qubits,
            xbits: self.xbits ^ other.xbits,
            zbits: self.zbits ^ other.zbits,
            phase: Phase::from_exponent(exponent),
        }
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        check_qubits(self.qubits, other.qubits)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let parity = (self.xbits & other.zbits).count_ones() + (self.zbits & other.xbits).count_ones();
        parity % 2 == 0
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &PauliString) -> Result<PauliString> {
        let qubits = self.qubits + other.qubits;
        PauliString::from_bits(
            qubits,
            self.xbits | (other.xbits << self.qubits),
            self.zbits | (other.zbits << self.qubits),
            self.phase.mul(other.phase),
        )
    }

    /// Image of the basis state `|j>`: returns `(k, c)` with `P|j> = c|k>`.
    #[inline]
    pub fn apply_to_basis(&self, j: usize) -> (usize, Complex64) {
        let j64 = j as u64;
        let mut exponent = self.phase.exponent() + (self.xbits & self.zbits).count_ones() as i64;
        if (self.zbits & j64).count_ones() % 2 == 1 {
            exponent += 2;
        }
        (
            (j64 ^ self.xbits) as usize,
            Phase::from_exponent(exponent).to_complex(),
        )
    }

    pub fn letters(&self) -> String {
        (0..self.qubits).map(|k| self.get(k).letter()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            Phase::One => "+",
            Phase::I => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        write!(f, "{prefix}{}", self.letters())
    }
}

impl FromStr for PauliString {
    type Err = FastError;

    /// Parses `±[i]s1s2...sq`. A missing sign means `+`.
    fn from_str(text: &str) -> Result<PauliString> {
        let text = text.trim();
        let (negative, rest) = match text.chars().next() {
            Some('+') => (false, &text[1..]),
            Some('-') => (true, &text[1..]),
            _ => (false, text),
        };
        let (imaginary, letters) = match rest.strip_prefix('i') {
            Some(tail) => (true, tail),
            None => (false, rest),
        };
        if letters.is_empty() {
            return Err(FastError::Parse(format!("no Pauli letters in {text:?}")));
        }
        let qubits = letters.chars().count();
        if qubits > MAX_QUBITS {
            return Err(FastError::Capacity(format!(
                "{qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        let mut s = PauliString::identity(qubits);
        for (site, ch) in letters.chars().enumerate() {
            let p = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(FastError::Parse(format!(
                        "unexpected character {other:?} in {text:?}"
                    )))
                }
            };
            s.set(site, p);
        }
        let exponent = 2 * negative as i64 + imaginary as i64;
        s.phase = Phase::from_exponent(exponent);
        Ok(s)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> PauliString {
        text.parse().unwrap()
    }

    #[test]
    fn x_times_y_is_iz() {
        assert_eq!(p("X").multiply(&p("Y")).unwrap(), p("iZ"));
        assert_eq!(p("Y").multiply(&p("X")).unwrap(), p("-iZ"));
        assert_eq!(p("Z").multiply(&p("X")).unwrap(), p("iY"));
    }

    #[test]
    fn hermitian_strings_square_to_identity() {
        for text in ["X", "-Y", "ZXY", "-IZYX"] {
            let s = p(text);
            let sq = s.multiply(&s).unwrap();
            assert!(sq.is_identity_up_to_phase());
            assert_eq!(sq.phase(), Phase::One);
        }
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("XI").commutes(&p("ZI")).unwrap());
        assert!(p("XI").commutes(&p("IZ")).unwrap());
        assert!(!p("ZX").commutes(&p("ZY")).unwrap());
    }

    #[test]
    fn mismatched_qubits_are_rejected() {
        assert!(matches!(
            p("XX").multiply(&p("X")),
            Err(FastError::Dimension { expected: 2, found: 1 })
        ));
        assert!(p("XX").commutes(&p("XXX")).is_err());
    }

    #[test]
    fn identity_invariants() {
        let id = PauliString::identity(3);
        assert_eq!(id.weight(), 0);
        assert_eq!(id.phase(), Phase::One);
        assert_eq!(id.to_string(), "+III");
    }

    #[test]
    fn text_round_trip() {
        for text in ["+XYZ", "-iIZ", "+iY", "-ZZZZ"] {
            assert_eq!(p(text).to_string(), text);
        }
        assert_eq!(p("XZ").to_string(), "+XZ");
        assert!("+iQ".parse::<PauliString>().is_err());
        assert!("-i".parse::<PauliString>().is_err());
    }

    #[test]
    fn tensor_places_left_factor_low() {
        let t = p("XZ").tensor(&p("-Y")).unwrap();
        assert_eq!(t.to_string(), "-XZY");
    }

    #[test]
    fn basis_action_of_y() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let y = p("Y");
        assert_eq!(y.apply_to_basis(0), (1, Complex64::new(0.0, 1.0)));
        assert_eq!(y.apply_to_basis(1), (0, Complex64::new(0.0, -1.0)));
    }
}
