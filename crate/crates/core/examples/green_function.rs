//! Retarded Green's function of a free chain over a few times, from the
//! anticommutator estimator with majority-selected branches.

use fast_shadow::fast::{fast2, FastOptions, ShotPolicy, System, TargetSet};
use fast_shadow::harness::{build_hamiltonian, oracle_correlations, ModelSpec};
use fast_shadow::mapping::{majorana_basis, MappingKind};

fn main() -> fast_shadow::Result<()> {
    let n = 2;
    let spec = ModelSpec::tight_binding_chain(n, 1.0);
    let mapping = MappingKind::Jw;
    let h = build_hamiltonian(&spec, mapping)?;
    let system = System::ground(majorana_basis(n, mapping)?, &h)?;
    let targets = TargetSet::green(n)?;
    let times = [0.0, 0.5, 1.0, 1.5];
    let oracle = oracle_correlations(&spec, mapping, &targets, &times)?;

    println!("{:>5} {:>22} {:>22}", "t", "G^R_00 estimate", "exact");
    for (k, &t) in times.iter().enumerate() {
        let run = fast2(&system, &targets, t, 0.1, 0.05, &FastOptions::sampled(k as u64, ShotPolicy::Auto))?;
        let g = run.entry(0, 0).response();
        let exact = oracle.find(0, 0, t).expect("oracle entry").retarded_green;
        println!("{t:>5.2} {:>+10.4}{:>+10.4}i {:>+10.4}{:>+10.4}i", g.re, g.im, exact.re, exact.im);
        if let Some(sel) = run.entry(0, 0).branch.as_ref().and_then(|b| b.first()) {
            println!("      branch {:?} kept {} of {} shots", sel.chosen, sel.chosen_count(), sel.total());
        }
    }
    Ok(())
}
