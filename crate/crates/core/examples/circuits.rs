//! The simulated device: evolution, the ancilla-assisted branch circuit and
//! grouped measurement of commuting observables.

use fast_shadow::fast::majority_select;
use fast_shadow::harness::{build_hamiltonian, ModelSpec};
use fast_shadow::mapping::{majorana_basis, MappingKind};
use fast_shadow::shadows::estimate_by_groups;
use fast_shadow::sim::{task_rng, AncillaCircuit, EvolutionCache};

fn main() -> fast_shadow::Result<()> {
    let n = 3;
    let spec = ModelSpec::spinless_hubbard_chain(n, 1.0, 2.0, 0.5);
    let h = build_hamiltonian(&spec, MappingKind::Jw)?;
    let cache = EvolutionCache::new(&h)?;
    let ground = cache.eigenvector(0);
    println!("ground energy {:.6}", cache.eigenvalues()[0]);

    let basis = majorana_basis(n, MappingKind::Jw)?;
    let mut rng = task_rng(7, &[0]);
    let b = basis.gamma(1);
    let circuit = AncillaCircuit::new(&ground, b, &cache, 0.5)?;
    let (plus, minus) = circuit.branch_probabilities();
    let bits: Vec<u8> = (0..4000).map(|_| circuit.sample_bit(&mut rng)).collect();
    let sel = majority_select(&bits)?;
    println!("branch weights {plus:.4}/{minus:.4}; sampled {:.4}/{:.4}, keep {:?}", sel.c_plus_sq_hat, sel.c_minus_sq_hat, sel.chosen);

    let evolved = cache.evolve(&ground, 0.5)?;
    let obs = basis.one_body_observables();
    let (est, circuits) = estimate_by_groups(&evolved, &obs, 2000, &mut rng)?;
    println!("{} one-body observables measured with {circuits} circuits", obs.len());
    for e in est.iter().take(6) {
        println!("  <{}> = {:+.4} +- {:.4} (exact {:+.4})", e.observable, e.mean, e.stderr, evolved.expectation(&e.observable)?);
    }
    Ok(())
}
