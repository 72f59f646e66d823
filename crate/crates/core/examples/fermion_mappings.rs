//! Majorana operators under Jordan-Wigner, Bravyi-Kitaev and ternary-tree
//! encodings, and the qubit form of a hopping term.

use fast_shadow::mapping::{majorana_basis, FermionOperator, MappingKind};

fn main() -> fast_shadow::Result<()> {
    let n = 4;
    for kind in MappingKind::ALL {
        let basis = majorana_basis(n, kind)?;
        println!("{kind}: {} qubits, max weight {}", basis.qubits(), basis.max_weight());
        for (k, g) in basis.gammas().iter().enumerate() {
            println!("  gamma_{k} = {g}");
        }
        let hop = FermionOperator::hopping(n, 0, 2)?;
        let terms: Vec<String> = basis
            .encode(&hop)?
            .iter()
            .map(|(c, p)| format!("({:+.2}{:+.2}i) {p}", c.re, c.im))
            .collect();
        println!("  c0+ c2 + h.c. = {}", terms.join(" + "));
    }
    Ok(())
}
