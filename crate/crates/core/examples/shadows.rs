//! Classical shadows, Bell-sampled magnitudes and chained sign recovery.

use fast_shadow::mapping::{majorana_basis, MappingKind};
use fast_shadow::shadows::{bell_magnitudes, chained_signs, estimate_by_shadows, ChainShots};
use fast_shadow::sim::{majorana_eigenstate, task_rng, StateVector};

fn main() -> fast_shadow::Result<()> {
    let n = 3;
    let mut rng = task_rng(11, &[0]);
    let state = StateVector::random(n, &mut rng)?;

    let tt = majorana_basis(n, MappingKind::Tt)?;
    let obs = tt.one_body_observables();
    println!("shadows on {} ternary-tree observables:", obs.len());
    for e in estimate_by_shadows(&state, &obs, 20_000, &mut rng)?.iter().take(5) {
        println!("  <{}> = {:+.4} +- {:.4} (exact {:+.4})", e.observable, e.mean, e.stderr, state.expectation(&e.observable)?);
    }

    let jw = majorana_basis(n, MappingKind::Jw)?;
    let gammas = jw.gammas();
    let table = bell_magnitudes(&state, gammas, 20_000, &mut rng)?.with_eps(0.2);
    println!("Bell magnitudes (threshold {:.2}):", table.threshold);
    for (k, g) in gammas.iter().enumerate() {
        println!("  |<{g}>| ~ {:.4} (exact {:.4}) kept: {}", table.entries[k], state.expectation(g)?.abs(), table.survives(k));
    }

    // split so each list is pairwise anticommuting with sizable values
    let target = 0.3;
    let signs: Vec<f64> = (0..2 * n).map(|k| if k % 3 == 0 { -target } else { target }).collect();
    let engineered = majorana_eigenstate(gammas, &signs, &state)?;
    let xs: Vec<_> = gammas.iter().step_by(2).cloned().collect();
    let ys: Vec<_> = gammas.iter().skip(1).step_by(2).cloned().collect();
    let shots = ChainShots { anchor: 4000, chain: 40_000 };
    let (x, y) = chained_signs(&engineered, &xs, &ys, 0.3, shots, &mut rng)?;
    println!("recovered X signs {:?}", x.recovered_signs);
    println!("recovered Y signs {:?}", y.recovered_signs);
    println!("engineered values {signs:?}");
    Ok(())
}
