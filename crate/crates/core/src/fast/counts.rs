use std::collections::HashMap;

use super::{CorrelationKind, Strategy};
use crate::mapping::MajoranaBasis;
use crate::pauli::{greedy_color, CommutationGraph};

/// Groups the one-body family into the `n²` Hermitian fermionic observables
/// `n_i`, `{(2i,2j), (2i+1,2j+1)}` and `{(2i,2j+1), (2i+1,2j)}` for `i < j`.
/// Indices follow [`MajoranaBasis::one_body_pairs`]; members of a group commute.
pub fn one_body_partition(basis: &MajoranaBasis) -> Vec<Vec<usize>> {
    let mut slot: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (idx, (a, b)) in basis.one_body_pairs().into_iter().enumerate() {
        let (i, j) = (a / 2, b / 2);
        let key = if i == j {
            (i, j, 0)
        } else if a % 2 == b % 2 {
            (i, j, 1)
        } else {
            (i, j, 2)
        };
        let g = *slot.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(idx);
    }
    groups
}

/// Greedy color count of the family measured for `kind`: the one-body strings
/// for commutators, the Majorana strings otherwise.
pub fn standard_family_colors(basis: &MajoranaBasis, kind: CorrelationKind) -> usize {
    let family = match kind {
        CorrelationKind::Commutator => basis.one_body_observables(),
        _ => basis.gammas().to_vec(),
    };
    let graph = CommutationGraph::build(&family).expect("mapping strings are Hermitian");
    greedy_color(&graph).num_colors
}

/// Circuits per prepared state for the non-adaptive strategies; `None` for
/// Bell-based ones, whose count depends on which observables survive.
pub fn circuits_per_state(strategy: Strategy, colors: usize, groups: usize) -> Option<usize> {
    match strategy {
        Strategy::Mmc => Some(colors),
        Strategy::Dc => Some(1),
        Strategy::Nm => Some(groups),
        _ => None,
    }
}

/// Closed-form circuit total for the standard target sets: every `c_k†c_l`
/// for commutators (`n(2n−1)` Pauli components of `B`) and every `c_b†` for
/// anticommutators (`2n` components). Three prepared states per component.
pub fn closed_form_circuits(kind: CorrelationKind, strategy: Strategy, basis: &MajoranaBasis) -> Option<usize> {
    let n = basis.modes();
    let (components, groups) = match kind {
        CorrelationKind::Commutator => (n * (2 * n - 1), n * n),
        CorrelationKind::Anticommutator => (2 * n, 2 * n),
        CorrelationKind::General => return None,
    };
    let colors = standard_family_colors(basis, kind);
    circuits_per_state(strategy, colors, groups).map(|per| 3 * components * per)
}

/// Brute-force commutator count: one circuit per fermionic one-body
/// observable, `n²` of them, on each of `3·n(2n−1)` prepared states.
pub fn brute_force_commutator_circuits(modes: usize) -> usize {
    3 * modes * (2 * modes - 1) * modes * modes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{majorana_basis, MappingKind};

    #[test]
    fn partition_has_n_squared_commuting_groups() {
        for kind in MappingKind::ALL {
            for n in 1..=5 {
                let basis = majorana_basis(n, kind).unwrap();
                let obs = basis.one_body_observables();
                let groups = one_body_partition(&basis);
                assert_eq!(groups.len(), n * n);
                assert_eq!(groups.iter().map(Vec::len).sum::<usize>(), obs.len());
                for g in &groups {
                    for &a in g {
                        for &b in g {
                            assert!(obs[a].commutes(&obs[b]).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        let basis = majorana_basis(3, MappingKind::Tt).unwrap();
        assert_eq!(closed_form_circuits(CorrelationKind::Commutator, Strategy::Dc, &basis), Some(45));
        assert_eq!(closed_form_circuits(CorrelationKind::Anticommutator, Strategy::Nm, &basis), Some(108));
        assert_eq!(closed_form_circuits(CorrelationKind::Commutator, Strategy::BellMmc, &basis), None);
        assert_eq!(brute_force_commutator_circuits(2), 72);
    }
}
