//! Bounded synthesis over the two-way automaton: guess a program tree, the
//! reachable configurations `(p, t, d)` of the universal automaton on it, and
//! one annotation per basic comparison relation.

use std::collections::BTreeMap;

use super::{decode_tree, encode_tree, EncodeError, TreeVars};
use crate::program::ProgramTree;
use crate::rungraph::{twoway_vertex, BasicRelation, Demand};
use crate::sat::{bits_for, BitVec, CompareOp, ConstraintSystem, Lit, Model};
use crate::twoway::{Dir, Move, TwoWayAutomaton};

pub struct TwoWayInstance {
    pub cs: ConstraintSystem,
    pub tree: TreeVars,
    pub bound: usize,
    /// `λ^B_{p,t,d}`, indexed by [`twoway_vertex`].
    pub reach: Vec<Lit>,
    /// `λ^#_{i,p,t,d}` per relation, indexed like `reach` (empty when a
    /// relation never constrains anything).
    pub annotations: Vec<Vec<BitVec>>,
    vars: crate::program::VarSet,
}

/// Default annotation bound: the size of the run graph, `|P|·|T|·3`.
pub fn default_bound(aut: &TwoWayAutomaton, nodes: usize) -> usize {
    aut.num_states() * nodes * 3
}

fn op_for(d: Demand) -> Option<CompareOp> {
    match d {
        Demand::Free => None,
        Demand::Greater => Some(CompareOp::Gt),
        Demand::GreaterEq => Some(CompareOp::Ge),
    }
}

/// Builds `Φ` for the automaton (read universally under its acceptance
/// condition), `nodes` candidate nodes and annotation bound `bound`.
pub fn encode_phi(aut: &TwoWayAutomaton, nodes: usize, bound: Option<usize>) -> Result<TwoWayInstance, EncodeError> {
    if nodes == 0 {
        return Err(EncodeError::EmptyBudget);
    }
    let bound = bound.unwrap_or_else(|| default_bound(aut, nodes));
    if bound == 0 {
        return Err(EncodeError::ZeroBound);
    }
    let mut cs = ConstraintSystem::new();
    let tree = encode_tree(&mut cs, &aut.labels, nodes)?;
    let np = aut.num_states();
    let vertex = |p: usize, t: usize, d: Dir| twoway_vertex(nodes, p, t, d);
    let mut reach = vec![0; np * nodes * 3];
    for p in 0..np {
        for t in 0..nodes {
            for d in Dir::ALL {
                reach[vertex(p, t, d)] = cs.alloc_var(&format!("lambdaB[{p},{t},{d:?}]"))?;
            }
        }
    }
    let relations = aut.acceptance.relations();
    let width = bits_for(bound as u64);
    let mut annotations = Vec::new();
    for (i, rel) in relations.iter().enumerate() {
        let needed = (0..np).any(|p| rel.demand(p) != Demand::Free);
        let mut ann = Vec::new();
        if needed {
            for p in 0..np {
                for t in 0..nodes {
                    for d in Dir::ALL {
                        let bv = cs.alloc_bitvec(&format!("lambda#[{i},{p},{t},{d:?}]"), width)?;
                        cs.le_const(&bv, bound as u64, &[]);
                        ann.push(bv);
                    }
                }
            }
        }
        annotations.push(ann);
    }

    cs.add_clause([reach[vertex(aut.initial, 0, Dir::D)]]);
    for p in 0..np {
        for t in 0..nodes {
            for d in Dir::ALL {
                let v = vertex(p, t, d);
                encode_configuration(&mut cs, aut, &tree, &reach, &annotations, &relations, p, t, d, v);
            }
        }
    }
    Ok(TwoWayInstance {
        cs,
        tree,
        bound,
        reach,
        annotations,
        vars: aut.vars.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
fn encode_configuration(
    cs: &mut ConstraintSystem,
    aut: &TwoWayAutomaton,
    tree: &TreeVars,
    reach: &[Lit],
    annotations: &[Vec<BitVec>],
    relations: &[BasicRelation],
    p: usize,
    t: usize,
    d: Dir,
    v: usize,
) {
    let nodes = tree.n;
    let here = reach[v];
    // Group labels by the transition they induce so that the successor
    // constraints are generated once per distinct transition.
    let mut groups: BTreeMap<(usize, Move), Vec<usize>> = BTreeMap::new();
    for s in 0..aut.labels.len() {
        let succ = aut.successors(p, s, d);
        if succ.is_empty() {
            // No run continues: a reachable configuration may not carry this label.
            cs.add_clause([-here, -tree.is[t][s]]);
        }
        for &(p2, mv) in succ {
            groups.entry((p2, mv)).or_default().push(s);
        }
    }
    for ((p2, mv), group) in groups {
        let takes = cs.new_var();
        for s in group {
            cs.add_clause([-here, -tree.is[t][s], takes]);
        }
        let targets = tree.mu_prime(t, mv);
        if targets.is_empty() {
            cs.add_clause([-takes]);
            continue;
        }
        for (phi, t2, d2) in targets {
            let w = twoway_vertex(nodes, p2, t2, d2);
            let guard: Vec<Lit> = std::iter::once(takes).chain(phi).collect();
            cs.add_clause(guard.iter().map(|&g| -g).chain([reach[w]]));
            for (i, rel) in relations.iter().enumerate() {
                if let Some(op) = op_for(rel.demand(p)) {
                    let (lhs, rhs) = (annotations[i][v].clone(), annotations[i][w].clone());
                    cs.assert_compare(&lhs, &rhs, op, &guard);
                }
            }
        }
    }
}

impl TwoWayInstance {
    pub fn decode_program(&self, model: &Model) -> Result<ProgramTree, EncodeError> {
        decode_tree(&self.tree, model, &self.vars)
    }
}
