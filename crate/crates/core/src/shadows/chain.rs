use rand::Rng;
use serde::Serialize;

use crate::error::{FastError, Result};
use crate::pauli::PauliString;
use crate::sim::{JointDistribution, StateVector};

/// Signs of an ordered anticommuting family, recovered from one anchor and
/// the products of neighbouring expectations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignChain {
    pub anchor_sign: i8,
    pub anchor_estimate: f64,
    pub pair_products: Vec<f64>,
    pub recovered_signs: Vec<i8>,
    pub circuits: usize,
}

fn sign_of(value: f64, position: usize) -> i8 {
    if value == 0.0 {
        log::warn!("unreliable link: exact zero at chain position {position}, taking +1");
        1
    } else if value > 0.0 {
        1
    } else {
        -1
    }
}

impl SignChain {
    pub fn empty() -> SignChain {
        SignChain {
            anchor_sign: 1,
            anchor_estimate: 0.0,
            pair_products: Vec::new(),
            recovered_signs: Vec::new(),
            circuits: 0,
        }
    }

    /// `recovered[k] = anchor · Π_{i<k} sign(pair_products[i])`.
    pub fn propagate(anchor_estimate: f64, pair_products: Vec<f64>) -> SignChain {
        let anchor_sign = sign_of(anchor_estimate, 0);
        let mut recovered_signs = Vec::with_capacity(pair_products.len() + 1);
        recovered_signs.push(anchor_sign);
        let mut current = anchor_sign;
        for (i, &pp) in pair_products.iter().enumerate() {
            current *= sign_of(pp, i + 1);
            recovered_signs.push(current);
        }
        SignChain {
            anchor_sign,
            anchor_estimate,
            pair_products,
            recovered_signs,
            circuits: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.recovered_signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recovered_signs.is_empty()
    }
}

/// `{P_i ⊗ P_{i+1}}` for an ordered list; pairwise commuting whenever the
/// list is pairwise anticommuting.
pub fn b_x_family(ordered: &[PauliString]) -> Result<Vec<PauliString>> {
    ordered.windows(2).map(|w| w[0].tensor(&w[1])).collect()
}

/// Shot counts for the anchor and the two-copy chain circuit.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainShots {
    pub anchor: usize,
    pub chain: usize,
}

pub(crate) fn run_chain<R: Rng + ?Sized>(
    label: &'static str,
    state: &StateVector,
    doubled: &StateVector,
    survivors: &[PauliString],
    eps: f64,
    shots: ChainShots,
    rng: &mut R,
) -> Result<SignChain> {
    let Some(first) = survivors.first() else {
        return Ok(SignChain::empty());
    };
    let anchor = JointDistribution::new(state, std::slice::from_ref(first))?
        .sample(shots.anchor, rng)
        .mean(0);
    let mut circuits = 1;
    let mut pair_products = Vec::new();
    if survivors.len() > 1 {
        let family = b_x_family(survivors)?;
        let record = JointDistribution::new(doubled, &family)?.sample(shots.chain, rng);
        circuits += 1;
        pair_products = record.means();
        let floor = eps * eps / 8.0;
        if let Some((position, &value)) = pair_products.iter().enumerate().find(|(_, v)| v.abs() < floor) {
            return Err(FastError::UnreliableLink {
                chain: label,
                position,
                value,
            });
        }
    }
    let mut chain = SignChain::propagate(anchor, pair_products);
    chain.circuits = circuits;
    Ok(chain)
}

/// Recovers the signs of two ordered survivor lists with one anchor circuit
/// and one two-copy chain circuit each.
pub fn chained_signs<R: Rng + ?Sized>(
    state: &StateVector,
    survivors_x: &[PauliString],
    survivors_y: &[PauliString],
    eps: f64,
    shots: ChainShots,
    rng: &mut R,
) -> Result<(SignChain, SignChain)> {
    if eps <= 0.0 {
        return Err(FastError::Domain(format!("eps must be positive, got {eps}")));
    }
    let doubled = state.doubled()?;
    let x = run_chain("X", state, &doubled, survivors_x, eps, shots, rng)?;
    let y = run_chain("Y", state, &doubled, survivors_y, eps, shots, rng)?;
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn propagation_arithmetic() {
        let chain = SignChain::propagate(0.8, vec![0.5, -0.3]);
        assert_eq!(chain.recovered_signs, vec![1, 1, -1]);
        let chain = SignChain::propagate(-0.2, vec![-0.1]);
        assert_eq!(chain.recovered_signs, vec![-1, 1]);
    }

    #[test]
    fn single_survivor_uses_anchor_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = StateVector::zero(1).unwrap();
        let z: PauliString = "-Z".parse().unwrap();
        let shots = ChainShots { anchor: 50, chain: 50 };
        let (x, y) = chained_signs(&s, &[z], &[], 0.2, shots, &mut rng).unwrap();
        assert_eq!(x.recovered_signs, vec![-1]);
        assert_eq!(x.circuits, 1);
        assert!(y.is_empty());
        assert_eq!(y.circuits, 0);
    }

    #[test]
    fn weak_link_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = StateVector::zero(1).unwrap();
        let family: Vec<PauliString> = ["Z", "X"].iter().map(|t| t.parse().unwrap()).collect();
        let shots = ChainShots { anchor: 10, chain: 100_000 };
        let err = chained_signs(&s, &family, &[], 0.5, shots, &mut rng).unwrap_err();
        assert!(matches!(err, FastError::UnreliableLink { chain: "X", position: 0, .. }));
    }
}
