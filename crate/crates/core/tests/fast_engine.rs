mod common;

use common::{annihilation, chain_hamiltonian, creation, number, Dense, M};
use fast_shadow::fast::{
    fast1, fast2, general, CorrelationKind, EstimationMode, FastOptions, FastRun, ShotPolicy, Strategy, System,
    TargetSet,
};
use fast_shadow::harness::{build_hamiltonian, ModelSpec};
use fast_shadow::mapping::{majorana_basis, MappingKind};
use fast_shadow::FastError;
use num_complex::Complex64;

fn system(n: usize, mapping: MappingKind, u: f64) -> System {
    let spec = ModelSpec::spinless_hubbard_chain(n, 1.0, u, 0.2);
    let h = build_hamiltonian(&spec, mapping).unwrap();
    System::ground(majorana_basis(n, mapping).unwrap(), &h).unwrap()
}

fn reference(n: usize, u: f64) -> (Dense, M) {
    let dense = Dense::new(&chain_hamiltonian(n, 1.0, u, 0.2, false));
    assert!(dense.gap() > 1e-6);
    let psi = dense.ground();
    (dense, psi)
}

fn density_ref(n: usize, u: f64, t: f64) -> Vec<Complex64> {
    let (dense, psi) = reference(n, u);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push(dense.commutator(&psi, &number(n, i), &number(n, j), t));
        }
    }
    out
}

fn green_ref(n: usize, u: f64, t: f64) -> Vec<Complex64> {
    let (dense, psi) = reference(n, u);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            out.push(dense.anticommutator(&psi, &annihilation(n, a), &creation(n, b), t));
        }
    }
    out
}

fn forced(strategy: Strategy, mode: EstimationMode, shots: ShotPolicy, seed: u64) -> FastOptions {
    FastOptions {
        mode,
        shots,
        strategy: Some(strategy),
        regime: None,
        seed,
    }
}

fn max_error(run: &FastRun, want: &[Complex64]) -> f64 {
    run.entries
        .iter()
        .zip(want)
        .map(|(e, w)| (e.value - w).norm())
        .fold(0.0, f64::max)
}

#[test]
fn analytic_mode_is_exact_for_every_direct_strategy() {
    for n in [2, 3] {
        for mapping in MappingKind::ALL {
            let sys = system(n, mapping, 1.5);
            for strategy in [Strategy::Mmc, Strategy::Dc, Strategy::Nm] {
                let opts = forced(strategy, EstimationMode::Analytic, ShotPolicy::Auto, 0);
                for t in [0.0, 0.45] {
                    let comm = fast1(&sys, &TargetSet::density(n).unwrap(), t, 0.1, 0.05, &opts).unwrap();
                    assert!(max_error(&comm, &density_ref(n, 1.5, t)) < 1e-9, "{mapping} {strategy}");
                    let anti = fast2(&sys, &TargetSet::green(n).unwrap(), t, 0.1, 0.05, &opts).unwrap();
                    assert!(max_error(&anti, &green_ref(n, 1.5, t)) < 1e-9, "{mapping} {strategy}");
                }
            }
        }
    }
}

#[test]
fn sampled_direct_strategies_agree_with_reference() {
    let n = 2;
    for mapping in MappingKind::ALL {
        let sys = system(n, mapping, 1.0);
        for strategy in [Strategy::Mmc, Strategy::Dc, Strategy::Nm] {
            let opts = forced(strategy, EstimationMode::Sampled, ShotPolicy::Fixed(20_000), 11);
            let comm = fast1(&sys, &TargetSet::density(n).unwrap(), 0.7, 0.1, 0.05, &opts).unwrap();
            for (e, w) in comm.entries.iter().zip(density_ref(n, 1.0, 0.7)) {
                assert!((e.value - w).norm() <= 5.0 * e.stderr + 1e-12, "{mapping} {strategy} {e:?} vs {w}");
            }
            let anti = fast2(&sys, &TargetSet::green(n).unwrap(), 0.7, 0.1, 0.05, &opts).unwrap();
            for (e, w) in anti.entries.iter().zip(green_ref(n, 1.0, 0.7)) {
                assert!((e.value - w).norm() <= 5.0 * e.stderr + 1e-12, "{mapping} {strategy} {e:?} vs {w}");
                let sel = &e.branch.as_ref().unwrap()[0];
                assert_eq!(sel.c_plus_sq_hat + sel.c_minus_sq_hat, 1.0);
            }
        }
    }
}

#[test]
fn sampled_bell_strategies_are_within_eps() {
    let n = 3;
    let eps = 0.25;
    for (mapping, strategy) in [
        (MappingKind::Jw, Strategy::BellMmc),
        (MappingKind::Bk, Strategy::BellNm),
        (MappingKind::Jw, Strategy::BellChained),
        (MappingKind::Tt, Strategy::BellNm),
    ] {
        let sys = system(n, mapping, 2.0);
        let opts = forced(strategy, EstimationMode::Sampled, ShotPolicy::Auto, 5);
        let anti = fast2(&sys, &TargetSet::green(n).unwrap(), 0.3, eps, 0.05, &opts);
        let anti = match anti {
            Ok(run) => run,
            // a weak chain link is a reported failure, not a wrong answer
            Err(FastError::UnreliableLink { .. }) => continue,
            Err(e) => panic!("{mapping} {strategy}: {e}"),
        };
        let err = max_error(&anti, &green_ref(n, 2.0, 0.3));
        assert!(err <= eps, "{mapping} {strategy}: {err}");
        if strategy != Strategy::BellChained {
            let opts = forced(strategy, EstimationMode::Sampled, ShotPolicy::Auto, 6);
            let comm = fast1(&sys, &TargetSet::density(n).unwrap(), 0.3, eps, 0.05, &opts).unwrap();
            let err = max_error(&comm, &density_ref(n, 2.0, 0.3));
            assert!(err <= eps, "{mapping} {strategy}: {err}");
        }
    }
}

#[test]
fn general_correlation_of_particle_hole_pair() {
    let n = 2;
    let sys = system(n, MappingKind::Jw, 0.0);
    let (dense, psi) = reference(n, 0.0);
    let targets = TargetSet::green(n).unwrap();
    let (_, _, combined) = general(&sys, &targets, 0.0, 0.1, 0.05, &FastOptions::analytic()).unwrap();
    for e in &combined {
        assert_eq!(e.kind, CorrelationKind::General);
        let (ab, _) = dense.ordered(&psi, &annihilation(n, e.a_index), &creation(n, e.b_index), 0.0);
        assert!((e.value - ab).norm() < 1e-10);
    }
}

#[test]
fn commutator_circuit_count_matches_colors() {
    let n = 4;
    let sys = system(n, MappingKind::Jw, 2.0);
    let run = fast1(&sys, &TargetSet::hopping(n).unwrap(), 0.5, 0.1, 0.05, &FastOptions::analytic()).unwrap();
    assert_eq!(run.choice.strategy, Strategy::Mmc);
    let colors = fast_shadow::fast::standard_family_colors(&sys.basis, CorrelationKind::Commutator);
    assert_eq!(run.b_components, n * (2 * n - 1));
    assert_eq!(run.b_pairs, n * n);
    assert_eq!(run.circuits_total, 3 * run.b_components * colors);
}

#[test]
fn runs_are_reproducible_and_seed_sensitive() {
    let sys = system(3, MappingKind::Bk, 1.0);
    let targets = TargetSet::green(3).unwrap();
    let opts = FastOptions::sampled(99, ShotPolicy::Fixed(500));
    let a = fast2(&sys, &targets, 0.4, 0.2, 0.05, &opts).unwrap();
    let b = fast2(&sys, &targets, 0.4, 0.2, 0.05, &opts).unwrap();
    assert_eq!(a.entries, b.entries);
    let c = fast2(&sys, &targets, 0.4, 0.2, 0.05, &FastOptions::sampled(100, ShotPolicy::Fixed(500))).unwrap();
    assert_ne!(a.entries, c.entries);
}

#[test]
fn shot_floor_is_a_config_error() {
    let sys = system(2, MappingKind::Jw, 0.0);
    let opts = FastOptions::sampled(1, ShotPolicy::Fixed(5));
    assert!(matches!(
        fast1(&sys, &TargetSet::density(2).unwrap(), 0.1, 0.1, 0.05, &opts),
        Err(FastError::Config(_))
    ));
}
