use super::PauliString;
use crate::error::{check_qubits, FastError, Result};

/// Undirected graph whose edges join anticommuting observables, so every
/// independent set is a family of mutually commuting strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommutationGraph {
    neighbors: Vec<Vec<usize>>,
}

impl CommutationGraph {
    pub fn build(obs: &[PauliString]) -> Result<CommutationGraph> {
        let Some(first) = obs.first() else {
            return Ok(CommutationGraph::default());
        };
        for (idx, p) in obs.iter().enumerate() {
            check_qubits(first.qubits(), p.qubits())?;
            if !p.is_hermitian() {
                return Err(FastError::NotHermitian(format!("observable {idx} is {p}")));
            }
        }
        let mut neighbors = vec![Vec::new(); obs.len()];
        for i in 0..obs.len() {
            for j in (i + 1)..obs.len() {
                if !obs[i].commutes_unchecked(&obs[j]) {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(CommutationGraph { neighbors })
    }

    /// Arbitrary graph from an edge list; duplicate edges are merged.
    pub fn from_edges(nodes: usize, edges: &[(usize, usize)]) -> Result<CommutationGraph> {
        let mut neighbors = vec![Vec::new(); nodes];
        for &(a, b) in edges {
            if a >= nodes || b >= nodes {
                return Err(FastError::Domain(format!("edge ({a}, {b}) outside {nodes} nodes")));
            }
            if a == b {
                return Err(FastError::Domain(format!("self loop on node {a}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(CommutationGraph { neighbors })
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors[node].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Induced subgraph on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn subgraph(&self, nodes: &[usize]) -> CommutationGraph {
        let mut position = vec![usize::MAX; self.len()];
        for (new, &old) in nodes.iter().enumerate() {
            position[old] = new;
        }
        let neighbors = nodes
            .iter()
            .map(|&old| {
                let mut list: Vec<usize> = self.neighbors[old]
                    .iter()
                    .filter_map(|&nb| (position[nb] != usize::MAX).then_some(position[nb]))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        CommutationGraph { neighbors }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub color_of: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    pub fn is_proper(&self, graph: &CommutationGraph) -> bool {
        (0..graph.len()).all(|a| {
            graph
                .neighbors(a)
                .iter()
                .all(|&b| self.color_of[a] != self.color_of[b])
        })
    }

    /// Node lists per color, each in ascending order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (node, &color) in self.color_of.iter().enumerate() {
            classes[color].push(node);
        }
        classes
    }
}

/// Edge `(i, j)` whenever `obs[i]` and `obs[j]` anticommute.
pub fn build_commutation_graph(obs: &[PauliString]) -> Result<CommutationGraph> {
    CommutationGraph::build(obs)
}

/// First-fit coloring in ascending node order.
pub fn greedy_color(graph: &CommutationGraph) -> Coloring {
    let mut color_of = vec![usize::MAX; graph.len()];
    let mut num_colors = 0;
    let mut taken = Vec::new();
    for node in 0..graph.len() {
        taken.clear();
        taken.resize(graph.degree(node) + 1, false);
        for &nb in graph.neighbors(node) {
            let c = color_of[nb];
            if c < taken.len() {
                taken[c] = true;
            }
        }
        let color = taken.iter().position(|&t| !t).expect("degree + 1 slots");
        color_of[node] = color;
        num_colors = num_colors.max(color + 1);
    }
    Coloring {
        color_of,
        num_colors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(texts: &[&str]) -> Vec<PauliString> {
        texts.iter().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn majorana_strings_form_a_complete_graph() {
        let g = CommutationGraph::build(&strings(&["XII", "ZXI", "ZZX"])).unwrap();
        assert_eq!(g.edge_count(), 3);
        let coloring = greedy_color(&g);
        assert_eq!(coloring.num_colors, 3);
    }

    #[test]
    fn diagonal_strings_form_an_edgeless_graph() {
        let g = CommutationGraph::build(&strings(&["ZI", "IZ", "ZZ"])).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(greedy_color(&g).num_colors, 1);
    }

    #[test]
    fn empty_list_gives_empty_graph() {
        let g = CommutationGraph::build(&[]).unwrap();
        assert!(g.is_empty());
        assert_eq!(greedy_color(&g).num_colors, 0);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        assert!(matches!(
            CommutationGraph::build(&strings(&["X", "iZ"])),
            Err(FastError::NotHermitian(_))
        ));
    }

    #[test]
    fn complete_graph_needs_one_color_per_node() {
        let edges: Vec<_> = (0..5).flat_map(|a| ((a + 1)..5).map(move |b| (a, b))).collect();
        let g = CommutationGraph::from_edges(5, &edges).unwrap();
        let c = greedy_color(&g);
        assert_eq!(c.num_colors, 5);
        assert!(c.is_proper(&g));
    }

    #[test]
    fn subgraph_keeps_induced_edges() {
        let g = CommutationGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let sub = g.subgraph(&[1, 2, 3]);
        assert!(sub.has_edge(0, 1));
        assert!(sub.has_edge(1, 2));
        assert!(!sub.has_edge(0, 2));
    }
}
