use std::collections::HashMap;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::state::{apply_pauli, norm_sqr, StateVector};
use crate::error::{check_qubits, FastError, Result};
use crate::pauli::{Pauli, PauliString};

/// Branches below this probability are dropped from joint distributions.
const PRUNE: f64 = 1e-14;

/// Shot-major table of ±1 outcomes for a jointly measured family.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    observables: Vec<PauliString>,
    shots: usize,
    outcomes: Vec<i8>,
}

impl MeasurementRecord {
    pub fn observables(&self) -> &[PauliString] {
        &self.observables
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn outcome(&self, shot: usize, obs: usize) -> i8 {
        self.outcomes[shot * self.observables.len() + obs]
    }

    pub fn shot(&self, shot: usize) -> &[i8] {
        let m = self.observables.len();
        &self.outcomes[shot * m..(shot + 1) * m]
    }

    pub fn mean(&self, obs: usize) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        let sum: i64 = (0..self.shots).map(|s| self.outcome(s, obs) as i64).sum();
        sum as f64 / self.shots as f64
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.observables.len()).map(|k| self.mean(k)).collect()
    }

    /// Standard error of the mean for ±1 outcomes.
    pub fn stderr(&self, obs: usize) -> f64 {
        if self.shots < 2 {
            return 1.0;
        }
        let mean = self.mean(obs);
        let n = self.shots as f64;
        ((1.0 - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt()
    }
}

/// Exact distribution of joint outcomes for a commuting family on one state.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    observables: Vec<PauliString>,
    outcomes: Vec<Vec<i8>>,
    probabilities: Vec<f64>,
}

impl JointDistribution {
    pub fn new(state: &StateVector, obs: &[PauliString]) -> Result<JointDistribution> {
        validate_commuting(state.qubits(), obs)?;
        let mut outcomes = Vec::new();
        let mut probabilities = Vec::new();
        let mut partial = Vec::with_capacity(obs.len());
        branch(
            state.amplitudes().to_vec(),
            obs,
            &mut partial,
            &mut outcomes,
            &mut probabilities,
        );
        let total: f64 = probabilities.iter().sum();
        for p in &mut probabilities {
            *p /= total;
        }
        Ok(JointDistribution {
            observables: obs.to_vec(),
            outcomes,
            probabilities,
        })
    }

    pub fn outcomes(&self) -> &[Vec<i8>] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Exact expectation of observable `k`.
    pub fn expectation(&self, k: usize) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(o, p)| o[k] as f64 * p)
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> MeasurementRecord {
        let m = self.observables.len();
        let mut outcomes = Vec::with_capacity(shots * m);
        if m > 0 {
            let dist = WeightedIndex::new(&self.probabilities).expect("joint distribution has mass");
            for _ in 0..shots {
                outcomes.extend_from_slice(&self.outcomes[dist.sample(rng)]);
            }
        }
        MeasurementRecord {
            observables: self.observables.clone(),
            shots,
            outcomes,
        }
    }
}

fn validate_commuting(qubits: usize, obs: &[PauliString]) -> Result<()> {
    for (k, p) in obs.iter().enumerate() {
        check_qubits(qubits, p.qubits())?;
        if !p.is_hermitian() {
            return Err(FastError::NotHermitian(format!("observable {k} is {p}")));
        }
    }
    for i in 0..obs.len() {
        for j in (i + 1)..obs.len() {
            if !obs[i].commutes_unchecked(&obs[j]) {
                return Err(FastError::NonCommuting {
                    first: format!("#{i} {}", obs[i]),
                    second: format!("#{j} {}", obs[j]),
                });
            }
        }
    }
    Ok(())
}

// Projects onto (I ± P)/2 one observable at a time.
fn branch(
    phi: Vec<Complex64>,
    obs: &[PauliString],
    partial: &mut Vec<i8>,
    outcomes: &mut Vec<Vec<i8>>,
    probabilities: &mut Vec<f64>,
) {
    let level = partial.len();
    if level == obs.len() {
        outcomes.push(partial.clone());
        probabilities.push(norm_sqr(&phi));
        return;
    }
    let p_phi = apply_pauli(&obs[level], &phi);
    for sign in [1i8, -1] {
        let s = sign as f64;
        let projected: Vec<Complex64> = phi.iter().zip(&p_phi).map(|(a, b)| (a + b * s) * 0.5).collect();
        if norm_sqr(&projected) < PRUNE {
            continue;
        }
        partial.push(sign);
        branch(projected, obs, partial, outcomes, probabilities);
        partial.pop();
    }
}

/// Samples `shots` joint outcomes of a pairwise-commuting Hermitian family.
pub fn measure_commuting_set<R: Rng + ?Sized>(
    state: &StateVector,
    obs: &[PauliString],
    shots: usize,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    Ok(JointDistribution::new(state, obs)?.sample(shots, rng))
}

/// One random-Pauli shot in compact form: the measured basis as X/Z masks
/// (both set means Y) and the outcome bits.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PauliShot {
    pub xbasis: u64,
    pub zbasis: u64,
    pub bits: u64,
}

impl PauliShot {
    pub fn bases(&self, qubits: usize) -> Vec<Pauli> {
        (0..qubits)
            .map(|k| match ((self.xbasis >> k) & 1, (self.zbasis >> k) & 1) {
                (1, 0) => Pauli::X,
                (1, 1) => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect()
    }

    pub fn bit_list(&self, qubits: usize) -> Vec<u8> {
        (0..qubits).map(|k| ((self.bits >> k) & 1) as u8).collect()
    }

    /// Classical-shadow estimate of `p` from this shot.
    pub fn estimate(&self, p: &PauliString) -> f64 {
        let support = p.support();
        if p.xbits() != self.xbasis & support || p.zbits() != self.zbasis & support {
            return 0.0;
        }
        let sign = if p.phase() == crate::pauli::Phase::MinusOne { -1.0 } else { 1.0 };
        let parity = if (self.bits & support).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        sign * parity * 3f64.powi(support.count_ones() as i32)
    }
}

// Cache budget in stored probabilities (3^q bases times 2^q outcomes).
const CACHE_LIMIT: usize = 1 << 21;

/// Draws random-Pauli shots from a fixed state, caching per-basis outcome
/// distributions when they fit.
pub struct ShadowSampler<'a> {
    state: &'a StateVector,
    cache: Option<HashMap<(u64, u64), Vec<f64>>>,
}

impl<'a> ShadowSampler<'a> {
    pub fn new(state: &'a StateVector) -> ShadowSampler<'a> {
        let q = state.qubits() as u32;
        let cacheable = 3usize.checked_pow(q).and_then(|b| b.checked_mul(1 << q)).is_some_and(|n| n <= CACHE_LIMIT);
        ShadowSampler {
            state,
            cache: cacheable.then(HashMap::new),
        }
    }

    pub fn shot<R: Rng + ?Sized>(&mut self, rng: &mut R) -> PauliShot {
        let q = self.state.qubits();
        let (mut xbasis, mut zbasis) = (0u64, 0u64);
        for k in 0..q {
            match rng.random_range(0..3u8) {
                0 => xbasis |= 1 << k,
                1 => {
                    xbasis |= 1 << k;
                    zbasis |= 1 << k;
                }
                _ => zbasis |= 1 << k,
            }
        }
        let u: f64 = rng.random();
        let bits = match &mut self.cache {
            Some(cache) => {
                let cdf = cache
                    .entry((xbasis, zbasis))
                    .or_insert_with(|| cumulative(&rotated_probabilities(self.state, xbasis, zbasis)));
                pick(cdf, u)
            }
            None => pick(&cumulative(&rotated_probabilities(self.state, xbasis, zbasis)), u),
        };
        PauliShot {
            xbasis,
            zbasis,
            bits: bits as u64,
        }
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf.last().copied().unwrap_or(1.0);
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

/// Outcome distribution after rotating each qubit's basis onto Z.
pub(crate) fn rotated_probabilities(state: &StateVector, xbasis: u64, zbasis: u64) -> Vec<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = state.amplitudes().to_vec();
    for k in 0..state.qubits() {
        let is_x = (xbasis >> k) & 1 == 1;
        if !is_x {
            continue;
        }
        let is_y = (zbasis >> k) & 1 == 1;
        let bit = 1usize << k;
        for j in 0..amps.len() {
            if j & bit != 0 {
                continue;
            }
            let a0 = amps[j];
            // S† before H maps the Y eigenbasis onto Z
            let a1 = if is_y { amps[j | bit] * Complex64::new(0.0, -1.0) } else { amps[j | bit] };
            amps[j] = (a0 + a1) * h;
            amps[j | bit] = (a0 - a1) * h;
        }
    }
    amps.iter().map(|a| a.norm_sqr()).collect()
}

/// Measures every qubit in an independently uniform Pauli basis.
pub fn random_pauli_shot<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> (Vec<Pauli>, Vec<u8>) {
    let shot = ShadowSampler::new(state).shot(rng);
    (shot.bases(state.qubits()), shot.bit_list(state.qubits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn strings(texts: &[&str]) -> Vec<PauliString> {
        texts.iter().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn computational_basis_outcomes_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = StateVector::basis(2, 0b10).unwrap();
        let rec = measure_commuting_set(&s, &strings(&["ZI", "IZ", "ZZ"]), 50, &mut rng).unwrap();
        for shot in 0..50 {
            assert_eq!(rec.shot(shot), &[1, -1, -1]);
        }
    }

    #[test]
    fn non_commuting_pair_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = StateVector::zero(1).unwrap();
        match measure_commuting_set(&s, &strings(&["X", "Z"]), 1, &mut rng) {
            Err(FastError::NonCommuting { first, second }) => {
                assert_eq!((first.as_str(), second.as_str()), ("#0 +X", "#1 +Z"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_sign_flips_outcome() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = StateVector::zero(1).unwrap();
        let rec = measure_commuting_set(&s, &strings(&["-Z", "I"]), 10, &mut rng).unwrap();
        assert_eq!(rec.means(), vec![-1.0, 1.0]);
    }

    #[test]
    fn basis_conditioned_shots() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let zero = StateVector::zero(1).unwrap();
        let plus = StateVector::normalized(1, vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let plus_i = StateVector::normalized(1, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        for _ in 0..200 {
            let (b, bits) = random_pauli_shot(&zero, &mut rng);
            if b[0] == Pauli::Z {
                assert_eq!(bits[0], 0);
            }
            let (b, bits) = random_pauli_shot(&plus, &mut rng);
            if b[0] == Pauli::X {
                assert_eq!(bits[0], 0);
            }
            let (b, bits) = random_pauli_shot(&plus_i, &mut rng);
            if b[0] == Pauli::Y {
                assert_eq!(bits[0], 0);
            }
        }
    }

    #[test]
    fn joint_distribution_matches_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = StateVector::random(3, &mut rng).unwrap();
        let obs = strings(&["XXI", "ZZI", "IIY", "-YYY"]);
        let dist = JointDistribution::new(&s, &obs).unwrap();
        assert!((dist.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (k, p) in obs.iter().enumerate() {
            assert!((dist.expectation(k) - s.expectation(p).unwrap()).abs() < 1e-10);
        }
    }
}
