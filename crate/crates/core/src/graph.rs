//! Small helpers over adjacency lists.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

fn to_petgraph(adj: &[Vec<usize>]) -> DiGraph<(), ()> {
    let mut g = DiGraph::with_capacity(adj.len(), adj.iter().map(Vec::len).sum());
    for _ in 0..adj.len() {
        g.add_node(());
    }
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            g.add_edge(NodeIndex::new(v), NodeIndex::new(w), ());
        }
    }
    g
}

/// Strongly connected components in reverse topological order.
pub fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    tarjan_scc(&to_petgraph(adj))
        .into_iter()
        .map(|c| c.into_iter().map(|n| n.index()).collect())
        .collect()
}

/// Components that contain at least one cycle (several vertices, or a self-loop).
pub fn nontrivial_sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    sccs(adj)
        .into_iter()
        .filter(|c| c.len() > 1 || adj[c[0]].contains(&c[0]))
        .collect()
}

/// Vertices reachable from any of `roots` (roots included).
pub fn reachable_from(adj: &[Vec<usize>], roots: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = roots.to_vec();
    for &r in roots {
        seen[r] = true;
    }
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}
