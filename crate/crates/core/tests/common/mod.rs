//! Dense-matrix reference built directly from 2x2 blocks, independent of the
//! crate's Pauli and mapping code.
#![allow(dead_code)]

use fast_shadow::fast::ShotPlan;
use fast_shadow::mapping::{majorana_basis, MappingKind};
use fast_shadow::pauli::PauliString;
use fast_shadow::shadows::{chained_signs, ChainShots};
use fast_shadow::sim::{majorana_eigenstate, task_rng, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_2x2(letter: char) -> M {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let data = match letter {
        'I' => [l, o, o, l],
        'X' => [o, l, l, o],
        'Y' => [o, i, -i, o],
        'Z' => [l, o, o, -l],
        _ => panic!("bad letter {letter}"),
    };
    // column-major: [m00, m10, m01, m11]
    M::from_column_slice(2, 2, &data)
}

/// Matrix of a letter string whose leftmost letter acts on the least
/// significant bit of the basis index.
pub fn pauli_matrix(letters: &str) -> M {
    let mut m = M::identity(1, 1);
    for ch in letters.chars() {
        m = pauli_2x2(ch).kronecker(&m);
    }
    m
}

/// Jordan-Wigner annihilation operator on `n` modes, empty mode = `|0⟩`.
pub fn annihilation(n: usize, j: usize) -> M {
    let lower = M::from_column_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let mut m = M::identity(1, 1);
    for k in 0..n {
        let block = if k < j {
            pauli_2x2('Z')
        } else if k == j {
            lower.clone()
        } else {
            pauli_2x2('I')
        };
        m = block.kronecker(&m);
    }
    m
}

pub fn creation(n: usize, j: usize) -> M {
    annihilation(n, j).adjoint()
}

pub fn number(n: usize, j: usize) -> M {
    creation(n, j) * annihilation(n, j)
}

/// Open (or periodic for `n ≥ 3`) spinless chain.
pub fn chain_hamiltonian(n: usize, t_hop: f64, u: f64, mu: f64, periodic: bool) -> M {
    let dim = 1 << n;
    let mut h = M::zeros(dim, dim);
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if periodic && n >= 3 {
        bonds.push((n - 1, 0));
    }
    for (i, j) in bonds {
        let hop = creation(n, i) * annihilation(n, j);
        h -= (&hop + hop.adjoint()) * c(t_hop, 0.0);
        h += number(n, i) * number(n, j) * c(u, 0.0);
    }
    for i in 0..n {
        h -= number(n, i) * c(mu, 0.0);
    }
    h
}

pub struct Dense {
    pub energies: Vec<f64>,
    pub vectors: M,
}

impl Dense {
    pub fn new(h: &M) -> Dense {
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = M::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect::<Vec<_>>());
        Dense { energies, vectors }
    }

    pub fn gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    pub fn ground(&self) -> M {
        M::from_column_slice(self.energies.len(), 1, self.vectors.column(0).as_slice())
    }

    /// `e^{−iHt}`
    pub fn propagator(&self, t: f64) -> M {
        let phases = M::from_diagonal(&nalgebra::DVector::from_iterator(
            self.energies.len(),
            self.energies.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        ));
        &self.vectors * phases * self.vectors.adjoint()
    }

    /// `(tr ρ A(t)B, tr ρ B A(t))` for `ρ = |ψ⟩⟨ψ|`.
    pub fn ordered(&self, psi: &M, a: &M, b: &M, t: f64) -> (Complex64, Complex64) {
        let u = self.propagator(t);
        let at = u.adjoint() * a * &u;
        let ab = (psi.adjoint() * &at * b * psi)[(0, 0)];
        let ba = (psi.adjoint() * b * &at * psi)[(0, 0)];
        (ab, ba)
    }

    pub fn commutator(&self, psi: &M, a: &M, b: &M, t: f64) -> Complex64 {
        let (ab, ba) = self.ordered(psi, a, b, t);
        ab - ba
    }

    pub fn anticommutator(&self, psi: &M, a: &M, b: &M, t: f64) -> Complex64 {
        let (ab, ba) = self.ordered(psi, a, b, t);
        ab + ba
    }
}

/// Engineered states with `|⟨γ_a⟩| = magnitude` and random signs, recovered
/// by one anchor and one two-copy chain circuit per letter list.
pub fn chain_trials(magnitude: f64, eps: f64, runs: u64) -> Result<(usize, usize), String> {
    let n = 6;
    let basis = majorana_basis(n, MappingKind::Jw).unwrap();
    let gammas = basis.gammas();
    let plan = ShotPlan::auto(eps, 0.05, gammas.len(), basis.max_weight());
    let shots = ChainShots {
        anchor: plan.anchor,
        chain: plan.chain,
    };
    let xs: Vec<PauliString> = gammas.iter().step_by(2).cloned().collect();
    let ys: Vec<PauliString> = gammas.iter().skip(1).step_by(2).cloned().collect();
    let mut correct = 0;
    let mut four_circuits = 0;
    for seed in 0..runs {
        let mut rng = task_rng(5, &[seed]);
        let signs: Vec<f64> = (0..2 * n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let targets: Vec<f64> = signs.iter().map(|s| s * magnitude).collect();
        let seed_state = StateVector::random(basis.qubits(), &mut rng).unwrap();
        let state = majorana_eigenstate(gammas, &targets, &seed_state).map_err(|e| e.to_string())?;
        let (x, y) = chained_signs(&state, &xs, &ys, eps, shots, &mut rng).map_err(|e| e.to_string())?;
        let recovered: Vec<f64> = x
            .recovered_signs
            .iter()
            .zip(&y.recovered_signs)
            .flat_map(|(&a, &b)| [a as f64, b as f64])
            .collect();
        if recovered == signs {
            correct += 1;
        }
        if x.circuits + y.circuits == 4 {
            four_circuits += 1;
        }
    }
    Ok((correct, four_circuits))
}

