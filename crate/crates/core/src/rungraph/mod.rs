//! Run graphs of universal automata on implementations, annotation
//! functions witnessing acceptance, and the SCC-based acceptance check.

use std::fmt::Write as _;

use crate::graph::{reachable_from, sccs};
use crate::ltl::WordAutomaton;
use crate::program::{MealyMachine, ProgramTree};
use crate::twoway::{mu_step, Dir, TwoWayAutomaton};

/// Acceptance condition over automaton states (indexed like `RunGraph::label`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acceptance {
    Buchi(Vec<bool>),
    CoBuchi(Vec<bool>),
    /// Pairs `(A, G)`: infinitely many `A` visits require infinitely many `G` visits.
    Streett(Vec<(Vec<bool>, Vec<bool>)>),
}

impl Acceptance {
    /// The condition as Streett pairs: Büchi `F` is `(Q, F)`, co-Büchi `F` is `(F, ∅)`.
    pub fn as_streett(&self) -> Vec<(Vec<bool>, Vec<bool>)> {
        match self {
            Acceptance::Buchi(f) => vec![(vec![true; f.len()], f.clone())],
            Acceptance::CoBuchi(f) => vec![(f.clone(), vec![false; f.len()])],
            Acceptance::Streett(pairs) => pairs.clone(),
        }
    }

    /// The basic comparison relations expressing the condition.
    pub fn relations(&self) -> Vec<BasicRelation> {
        match self {
            Acceptance::Buchi(f) => vec![BasicRelation::Buchi(f.clone())],
            Acceptance::CoBuchi(f) => vec![BasicRelation::CoBuchi(f.clone())],
            Acceptance::Streett(pairs) => pairs
                .iter()
                .map(|(a, g)| BasicRelation::Streett {
                    a: a.clone(),
                    g: g.clone(),
                })
                .collect(),
        }
    }
}

/// A basic annotation comparison relation `λ(v) ⊳ λ(v')`, depending on the
/// automaton state `f(v)` of the source vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasicRelation {
    /// True on `F`, strictly decreasing elsewhere.
    Buchi(Vec<bool>),
    /// Strictly decreasing on `F`, non-increasing elsewhere.
    CoBuchi(Vec<bool>),
    /// True on `G`, strictly decreasing on `A \ G`, non-increasing elsewhere.
    Streett { a: Vec<bool>, g: Vec<bool> },
}

/// What a relation demands of an edge leaving a vertex labelled `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demand {
    Free,
    Greater,
    GreaterEq,
}

impl BasicRelation {
    pub fn demand(&self, q: usize) -> Demand {
        match self {
            BasicRelation::Buchi(f) if f[q] => Demand::Free,
            BasicRelation::Buchi(_) => Demand::Greater,
            BasicRelation::CoBuchi(f) if f[q] => Demand::Greater,
            BasicRelation::CoBuchi(_) => Demand::GreaterEq,
            BasicRelation::Streett { g, .. } if g[q] => Demand::Free,
            BasicRelation::Streett { a, .. } if a[q] => Demand::Greater,
            BasicRelation::Streett { .. } => Demand::GreaterEq,
        }
    }

    pub fn holds(&self, q: usize, x: usize, y: usize) -> bool {
        match self.demand(q) {
            Demand::Free => true,
            Demand::Greater => x > y,
            Demand::GreaterEq => x >= y,
        }
    }
}

/// `(V, v0, E, f)` with vertices `0..label.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunGraph {
    pub initial: usize,
    pub edges: Vec<Vec<usize>>,
    /// Automaton state of every vertex.
    pub label: Vec<usize>,
}

impl RunGraph {
    pub fn num_vertices(&self) -> usize {
        self.label.len()
    }

    pub fn reachable(&self) -> Vec<bool> {
        reachable_from(&self.edges, &[self.initial])
    }

    /// Reachable vertices without successors.
    pub fn dead_ends(&self) -> Vec<usize> {
        let reach = self.reachable();
        (0..self.num_vertices())
            .filter(|&v| reach[v] && self.edges[v].is_empty())
            .collect()
    }

    /// Edge list with vertex labels: `v0 N`, then `v [q] -> w ...` per reachable vertex.
    pub fn dump(&self) -> String {
        let reach = self.reachable();
        let mut out = format!("v0 {}\n", self.initial);
        for (v, _) in reach.iter().enumerate().filter(|(_, &r)| r) {
            let _ = write!(out, "{v} [{}] ->", self.label[v]);
            for w in &self.edges[v] {
                let _ = write!(out, " {w}");
            }
            out.push('\n');
        }
        out
    }
}

/// Product of a universal word automaton with a Mealy machine; vertex
/// `(q, m)` has index `q · |M| + m`.
pub fn run_graph_word_on_mealy(a: &WordAutomaton, m: &MealyMachine) -> RunGraph {
    let nm = m.num_states();
    let nv = a.num_states() * nm;
    let mut edges = vec![Vec::new(); nv];
    let mut label = vec![0; nv];
    for q in 0..a.num_states() {
        for s in 0..nm {
            let v = q * nm + s;
            label[v] = q;
            for input in 0..1u32 << m.num_inputs {
                let out = m.output[s][input as usize];
                let s2 = m.next[s][input as usize];
                let letter = input | (out << m.num_inputs);
                for &q2 in a.successors(q, letter) {
                    let w = q2 * nm + s2;
                    if !edges[v].contains(&w) {
                        edges[v].push(w);
                    }
                }
            }
        }
    }
    RunGraph {
        initial: a.initial * nm + m.initial,
        edges,
        label,
    }
}

/// Index of vertex `(p, t, d)` in [`run_graph_twoway_on_tree`].
pub fn twoway_vertex(num_nodes: usize, p: usize, t: usize, d: Dir) -> usize {
    (p * num_nodes + t) * 3 + d.index()
}

/// Run graph of a two-way automaton on a program tree with vertices
/// `P × T × {D, L, R}`. Moves that leave the tree produce no edge.
pub fn run_graph_twoway_on_tree(a: &TwoWayAutomaton, tree: &ProgramTree) -> RunGraph {
    let nt = tree.len();
    let nv = a.num_states() * nt * 3;
    let parents = tree.parents();
    let mut edges = vec![Vec::new(); nv];
    let mut label = vec![0; nv];
    for p in 0..a.num_states() {
        for t in 0..nt {
            let l = a.label_index(tree.label(t));
            for d in Dir::ALL {
                let v = twoway_vertex(nt, p, t, d);
                label[v] = p;
                let Some(l) = l else { continue };
                for &(p2, mv) in a.successors(p, l, d) {
                    if let Ok((t2, d2)) = mu_step(tree, &parents, t, mv) {
                        let w = twoway_vertex(nt, p2, t2, d2);
                        if !edges[v].contains(&w) {
                            edges[v].push(w);
                        }
                    }
                }
            }
        }
    }
    RunGraph {
        initial: twoway_vertex(nt, a.initial, 0, Dir::D),
        edges,
        label,
    }
}

/// Whether `λ` is valid for `rel`: every edge between reachable vertices
/// satisfies the relation.
pub fn check_annotation_valid(g: &RunGraph, rel: &BasicRelation, lambda: &[usize]) -> bool {
    let reach = g.reachable();
    (0..g.num_vertices())
        .filter(|&v| reach[v])
        .all(|v| g.edges[v].iter().all(|&w| rel.holds(g.label[v], lambda[v], lambda[w])))
}

/// Reachable vertices outside `removed` that lie on a cycle avoiding `removed`.
fn cyclic_outside(g: &RunGraph, reach: &[bool], removed: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let sub: Vec<Vec<usize>> = (0..g.num_vertices())
        .map(|v| {
            if !reach[v] || removed(v) {
                Vec::new()
            } else {
                g.edges[v].iter().copied().filter(|&w| !removed(w)).collect()
            }
        })
        .collect();
    sccs(&sub)
        .into_iter()
        .filter(|c| c.len() > 1 || sub[c[0]].contains(&c[0]))
        .collect()
}

/// Whether every infinite path from the initial vertex satisfies `acc`.
/// Finite paths ending in dead ends impose nothing.
pub fn graph_satisfies_acceptance(g: &RunGraph, acc: &Acceptance) -> bool {
    let reach = g.reachable();
    acc.as_streett().iter().all(|(a, gs)| {
        cyclic_outside(g, &reach, &|v| gs[g.label[v]])
            .iter()
            .all(|c| !c.iter().any(|&v| a[g.label[v]]))
    })
}

/// A reachable cycle violating `acc`, as a lasso `(stem, loop)` of vertices.
pub fn violating_lasso(g: &RunGraph, acc: &Acceptance) -> Option<(Vec<usize>, Vec<usize>)> {
    let reach = g.reachable();
    for (a, gs) in acc.as_streett() {
        let removed = |v: usize| gs[g.label[v]];
        for comp in cyclic_outside(g, &reach, &removed) {
            let Some(&bad) = comp.iter().find(|&&v| a[g.label[v]]) else {
                continue;
            };
            let in_comp: std::collections::HashSet<usize> = comp.iter().copied().collect();
            let stem = bfs_path(g, g.initial, bad, &|_| true)?;
            let mut cycle = None;
            for &w in &g.edges[bad] {
                if in_comp.contains(&w) {
                    if let Some(mut back) = bfs_path(g, w, bad, &|v| in_comp.contains(&v)) {
                        back.pop();
                        let mut lp = vec![bad];
                        lp.extend(back);
                        cycle = Some(lp);
                        break;
                    }
                }
            }
            let cycle = cycle?;
            let mut stem = stem;
            stem.pop();
            return Some((stem, cycle));
        }
    }
    None
}

/// Shortest path `from ..= to` through vertices allowed by `ok`.
fn bfs_path(g: &RunGraph, from: usize, to: usize, ok: &dyn Fn(usize) -> bool) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; g.num_vertices()];
    let mut queue = std::collections::VecDeque::from([from]);
    prev[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &g.edges[v] {
            if prev[w] == usize::MAX && ok(w) {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Builds one `|V|`-bounded annotation per Streett pair, or `None` if the
/// graph violates some pair.
///
/// For pair `(A, G)`: vertices that are unreachable or in `G` get 0. In the
/// reachable graph without `G`, no cycle may contain an `A` vertex; the
/// annotation of a vertex is the maximal number of `A` vertices on a path
/// starting there, computed over the condensation DAG.
pub fn construct_streett_annotations(g: &RunGraph, pairs: &[(Vec<bool>, Vec<bool>)]) -> Option<Vec<Vec<usize>>> {
    let reach = g.reachable();
    let n = g.num_vertices();
    let mut out = Vec::with_capacity(pairs.len());
    for (a, gs) in pairs {
        let removed = |v: usize| !reach[v] || gs[g.label[v]];
        let sub: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if removed(v) {
                    Vec::new()
                } else {
                    g.edges[v].iter().copied().filter(|&w| !removed(w)).collect()
                }
            })
            .collect();
        // Tarjan yields components in reverse topological order: successors first.
        let comps = sccs(&sub);
        let mut comp_of = vec![0; n];
        for (ci, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = ci;
            }
        }
        let mut value = vec![0usize; comps.len()];
        for (ci, c) in comps.iter().enumerate() {
            if c.iter().all(|&v| removed(v)) {
                continue;
            }
            let cyclic = c.len() > 1 || sub[c[0]].contains(&c[0]);
            let bad = c.iter().filter(|&&v| a[g.label[v]]).count();
            if cyclic && bad > 0 {
                return None;
            }
            let best = c
                .iter()
                .flat_map(|&v| sub[v].iter())
                .map(|&w| comp_of[w])
                .filter(|&cj| cj != ci)
                .map(|cj| value[cj])
                .max()
                .unwrap_or(0);
            value[ci] = best + bad;
        }
        out.push((0..n).map(|v| if removed(v) { 0 } else { value[comp_of[v]] }).collect());
    }
    Some(out)
}

/// Annotations for any supported condition (via its Streett form).
pub fn construct_annotations(g: &RunGraph, acc: &Acceptance) -> Option<Vec<Vec<usize>>> {
    construct_streett_annotations(g, &acc.as_streett())
}

/// Searches all `λ : V → {0..=bound}` for one valid for `rel`. Exponential;
/// intended for graphs with a handful of vertices.
pub fn exists_valid_annotation_bruteforce(g: &RunGraph, rel: &BasicRelation, bound: usize) -> bool {
    let n = g.num_vertices();
    let mut lambda = vec![0usize; n];
    loop {
        if check_annotation_valid(g, rel, &lambda) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            if lambda[k] < bound {
                lambda[k] += 1;
                break;
            }
            lambda[k] = 0;
            k += 1;
        }
    }
}
