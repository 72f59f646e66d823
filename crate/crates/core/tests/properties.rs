mod common;

use fast_shadow::fast::{
    majority_select, reformulate_anticommutator, reformulate_commutator, Branch, Regime, ShotPlan,
};
use fast_shadow::mapping::{majorana_basis, FermionOperator, MappingKind};
use fast_shadow::pauli::{greedy_color, CommutationGraph, PauliString};
use fast_shadow::shadows::b_x_family;
use fast_shadow::sim::{EvolutionCache, Hamiltonian, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pauli(max_q: usize) -> impl Strategy<Value = PauliString> {
    (1..=max_q).prop_flat_map(|q| {
        (proptest::collection::vec(0..4usize, q), 0..4i64).prop_map(|(letters, k)| {
            let text: String = letters.iter().map(|&l| ['I', 'X', 'Y', 'Z'][l]).collect();
            let p: PauliString = text.parse().unwrap();
            p.with_phase(fast_shadow::pauli::Phase::from_exponent(k))
        })
    })
}

fn pauli_pair(max_q: usize) -> impl Strategy<Value = (PauliString, PauliString)> {
    (1..=max_q).prop_flat_map(|q| {
        let one = proptest::collection::vec(0..4usize, q);
        (one.clone(), one).prop_map(|(a, b)| {
            let s = |v: Vec<usize>| v.iter().map(|&l| ['I', 'X', 'Y', 'Z'][l]).collect::<String>().parse().unwrap();
            (s(a), s(b))
        })
    })
}

fn dense(p: &PauliString) -> common::M {
    common::pauli_matrix(&p.letters()) * p.phase().to_complex()
}

fn mapping() -> impl Strategy<Value = MappingKind> {
    prop_oneof![Just(MappingKind::Jw), Just(MappingKind::Bk), Just(MappingKind::Tt)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trip(p in pauli(8)) {
        prop_assert_eq!(p.to_string().parse::<PauliString>().unwrap(), p);
    }

    #[test]
    fn product_matches_dense((a, b) in pauli_pair(4)) {
        let prod = a.multiply(&b).unwrap();
        let diff = dense(&prod) - dense(&a) * dense(&b);
        prop_assert!(diff.iter().all(|x| x.norm() < 1e-12));
        prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
    }

    #[test]
    fn adjoint_inverts(p in pauli(6)) {
        let id = p.multiply(&p.adjoint()).unwrap();
        prop_assert!(id.is_identity_up_to_phase());
        prop_assert_eq!(id.phase().to_complex(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn majoranas_satisfy_car(n in 1usize..7, kind in mapping()) {
        let basis = majorana_basis(n, kind).unwrap();
        let g = basis.gammas();
        prop_assert_eq!(g.len(), 2 * n);
        for (i, a) in g.iter().enumerate() {
            prop_assert!(a.is_hermitian());
            for b in &g[i + 1..] {
                prop_assert!(!a.commutes(b).unwrap());
            }
        }
    }

    #[test]
    fn encoding_is_linear(n in 1usize..5, kind in mapping(), i in 0usize..4, j in 0usize..4, s in -2.0f64..2.0) {
        let (i, j) = (i % n, j % n);
        let basis = majorana_basis(n, kind).unwrap();
        let a = FermionOperator::hopping(n, i, j).unwrap();
        let b = FermionOperator::number(n, j).unwrap();
        let sum = &a + &b.scale(Complex64::new(s, 0.0));
        let psi = StateVector::random(n, &mut ChaCha8Rng::seed_from_u64(n as u64)).unwrap();
        let apply = |op: &FermionOperator| -> Vec<Complex64> {
            let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
            for (c, p) in basis.encode(op).unwrap() {
                let v = psi.apply_pauli(&p).unwrap();
                for (o, x) in out.iter_mut().zip(v.amplitudes()) {
                    *o += c * x;
                }
            }
            out
        };
        let (va, vb, vs) = (apply(&a), apply(&b), apply(&sum));
        for k in 0..psi.dim() {
            prop_assert!((vs[k] - va[k] - vb[k] * s).norm() < 1e-12);
        }
    }

    #[test]
    fn b_x_family_commutes(seed in any::<u64>(), q in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut list: Vec<PauliString> = Vec::new();
        for _ in 0..300 {
            let text: String = (0..q).map(|_| ['I', 'X', 'Y', 'Z'][rand::Rng::random_range(&mut rng, 0..4)]).collect();
            let cand: PauliString = text.parse().unwrap();
            if cand.weight() > 0 && list.iter().all(|p| !p.commutes(&cand).unwrap()) {
                list.push(cand);
            }
        }
        let family = b_x_family(&list).unwrap();
        for (i, a) in family.iter().enumerate() {
            for b in &family[i + 1..] {
                prop_assert!(a.commutes(b).unwrap());
            }
        }
    }

    #[test]
    fn greedy_coloring_is_proper(nodes in 1usize..30, edges in proptest::collection::vec((0usize..30, 0usize..30), 0..200)) {
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a % nodes, b % nodes))
            .filter(|(a, b)| a != b)
            .collect();
        let graph = CommutationGraph::from_edges(nodes, &edges).unwrap();
        let coloring = greedy_color(&graph);
        prop_assert!(coloring.is_proper(&graph));
        prop_assert!(coloring.num_colors <= graph.max_degree() + 1);
    }

    #[test]
    fn majority_invariants(bits in proptest::collection::vec(0u8..2, 1..500)) {
        let sel = majority_select(&bits).unwrap();
        prop_assert_eq!(sel.n_plus + sel.n_minus, bits.len());
        prop_assert_eq!(sel.c_plus_sq_hat + sel.c_minus_sq_hat, 1.0);
        prop_assert_eq!(sel.chosen == Branch::Plus, sel.n_plus >= sel.n_minus);
        prop_assert!(2 * sel.chosen_count() >= bits.len());
    }

    #[test]
    fn regime_rule(n in 1usize..500, eps in 0.01f64..1.0) {
        let small = Regime::for_size(n, eps) == Regime::SmallN;
        prop_assert_eq!(small, n as f64 <= 1.0 / (eps * eps) * (1.0 + 1e-12));
    }

    #[test]
    fn auto_shots_grow_as_eps_shrinks(eps in 0.05f64..0.5, m in 1usize..100, w in 1usize..5) {
        let loose = ShotPlan::auto(eps, 0.05, m, w);
        let tight = ShotPlan::auto(eps / 2.0, 0.05, m, w);
        prop_assert!(tight.direct >= 4 * loose.direct - 4);
        prop_assert!(tight.bell >= 16 * loose.bell - 16);
        prop_assert!(loose.shadow >= loose.direct);
    }

    #[test]
    fn plus_and_minus_plans_agree(seed in any::<u64>(), t in 0.0f64..2.0, ai in 0usize..6, bi in 0usize..6) {
        let basis = majorana_basis(3, MappingKind::Jw).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Hamiltonian::new(3, vec![
            (0.7, "XXI".parse().unwrap()),
            (0.4, "IYY".parse().unwrap()),
            (-0.3, "ZIZ".parse().unwrap()),
        ]).unwrap();
        let cache = EvolutionCache::new(&h).unwrap();
        let psi = StateVector::random(3, &mut rng).unwrap();
        let (a, b) = (basis.gamma(ai), basis.gamma(bi));
        let c_plus = {
            let v = psi.apply_pauli(b).unwrap();
            (1.0 + psi.inner(&v).unwrap().re) / 2.0
        };
        prop_assume!(c_plus > 1e-6 && c_plus < 1.0 - 1e-6);
        let plus = reformulate_anticommutator(a, b, t, Branch::Plus, c_plus).unwrap().evaluate_exact(&psi, &cache).unwrap();
        let minus = reformulate_anticommutator(a, b, t, Branch::Minus, 1.0 - c_plus).unwrap().evaluate_exact(&psi, &cache).unwrap();
        prop_assert!((plus - minus).norm() < 1e-10);
        let comm = reformulate_commutator(a, b, t).unwrap().evaluate_exact(&psi, &cache).unwrap();
        // anticommutator is real and commutator imaginary for Hermitian A, B
        prop_assert!(plus.im.abs() < 1e-12 && comm.re.abs() < 1e-12);
    }

    #[test]
    fn evolution_is_unitary(seed in any::<u64>(), t in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Hamiltonian::new(2, vec![(1.1, "XY".parse().unwrap()), (0.2, "ZI".parse().unwrap())]).unwrap();
        let cache = EvolutionCache::new(&h).unwrap();
        let psi = StateVector::random(2, &mut rng).unwrap();
        let fwd = cache.evolve(&psi, t).unwrap();
        prop_assert!((fwd.norm_sqr() - 1.0).abs() < 1e-12);
        let back = cache.evolve(&fwd, -t).unwrap();
        prop_assert!((psi.inner(&back).unwrap().norm() - 1.0).abs() < 1e-10);
    }
}
