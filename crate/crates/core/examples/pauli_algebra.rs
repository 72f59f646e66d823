//! Products, commutation and measurement grouping of Pauli strings.

use fast_shadow::pauli::{build_commutation_graph, greedy_color, PauliString};

fn main() -> fast_shadow::Result<()> {
    let x: PauliString = "XI".parse()?;
    let y: PauliString = "YI".parse()?;
    println!("XI * YI = {}", x.multiply(&y)?);
    println!("XI commutes with YI: {}", x.commutes(&y)?);

    let zz: PauliString = "ZZ".parse()?;
    let xx: PauliString = "XX".parse()?;
    println!("ZZ commutes with XX: {}", zz.commutes(&xx)?);
    println!("XI (x) ZZ = {}", x.tensor(&zz)?);

    let obs: Vec<PauliString> = ["XXI", "YYI", "ZZI", "IXX", "IZZ", "ZIZ", "XIY"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let graph = build_commutation_graph(&obs)?;
    let coloring = greedy_color(&graph);
    println!("{} observables, {} anticommuting pairs, {} circuits", obs.len(), graph.edge_count(), coloring.num_colors);
    for (c, class) in coloring.classes().iter().enumerate() {
        let names: Vec<String> = class.iter().map(|&k| obs[k].to_string()).collect();
        println!("  circuit {c}: {}", names.join(" "));
    }
    Ok(())
}
