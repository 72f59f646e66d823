//! Density response of an interacting chain with the commutator estimator,
//! next to the exact value.

use fast_shadow::fast::{fast1, FastOptions, ShotPolicy, System, TargetSet};
use fast_shadow::harness::{build_hamiltonian, oracle_correlations, ModelSpec};
use fast_shadow::mapping::{majorana_basis, MappingKind};

fn main() -> fast_shadow::Result<()> {
    let n = 3;
    let t = 0.5;
    let spec = ModelSpec::spinless_hubbard_chain(n, 1.0, 2.0, 0.3);
    let mapping = MappingKind::Bk;
    let h = build_hamiltonian(&spec, mapping)?;
    let system = System::ground(majorana_basis(n, mapping)?, &h)?;
    let targets = TargetSet::density(n)?;

    let run = fast1(&system, &targets, t, 0.1, 0.05, &FastOptions::sampled(2024, ShotPolicy::Auto))?;
    let oracle = oracle_correlations(&spec, mapping, &targets, &[t])?;
    println!("strategy {}, {} circuits, {} shots", run.choice.strategy, run.circuits_total, run.shots_total);
    for e in &run.entries {
        let exact = oracle.find(e.a_index, e.b_index, t).expect("oracle entry").susceptibility;
        let chi = e.response();
        println!("chi[{}, {}] = {:+.4}{:+.4}i +- {:.4}   exact {:+.4}{:+.4}i", e.a_label, e.b_label, chi.re, chi.im, e.stderr, exact.re, exact.im);
    }
    Ok(())
}
