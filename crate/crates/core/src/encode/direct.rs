//! The direct encoding: guess the program, simulate it deterministically
//! between `InOut` points inside the constraint system, and check the
//! resulting transition structure against the universal co-Büchi automaton
//! of the specification.
//!
//! A valuation is `(t, s, d, r)`: node, values of the non-input variables,
//! entry direction and last Boolean result. Every valuation is paired with
//! the input `i` read at the start of the current segment. For each pair the
//! encoding keeps a reachability bit, a shortcut `sc` naming the `InOut`
//! node/valuation that ends the segment, and a rank that strictly decreases
//! along the simulation so that every segment ends.
//!
//! Structure states are pairs `(t, s)` of an `InOut` node and a non-input
//! valuation. From state `x` on input `i` the program moves to
//! `sc(x, i)` and emits that state's designated outputs; the first visit
//! of the initial state reads only.

use std::collections::{BTreeMap, VecDeque};

use super::{decode_tree, encode_tree, EncodeError, TreeVars};
use crate::ltl::WordAutomaton;
use crate::program::{Dialect, Label, MealyMachine, ProgramTree, VarSet};
use crate::sat::{bits_for, BitVec, CompareOp, ConstraintSystem, Lit, Model};
use crate::twoway::{step, BState, Dir, Mode, Move, Payload};

/// The transition structure extracted from a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedStructure {
    /// `(InOut node, non-input valuation)` of every reachable state.
    pub states: Vec<(usize, u32)>,
    pub initial: usize,
    /// `next[x][i]`: successor of state `x` on input `i`.
    pub next: Vec<Vec<usize>>,
    /// Designated outputs emitted on entering each state.
    pub outputs: Vec<u32>,
    pub num_inputs: usize,
    pub num_outputs: usize,
}

impl ExtractedStructure {
    /// The structure as a Mealy machine: on input `i` in state `x`, emit the
    /// outputs of `next[x][i]` and move there.
    pub fn to_mealy(&self) -> MealyMachine {
        MealyMachine {
            num_inputs: self.num_inputs,
            num_outputs: self.num_outputs,
            initial: self.initial,
            next: self.next.clone(),
            output: self
                .next
                .iter()
                .map(|row| row.iter().map(|&y| self.outputs[y]).collect())
                .collect(),
        }
    }

    /// Edge list in the run-graph dump format, with the outputs as labels.
    pub fn dump(&self) -> String {
        let mut out = format!("v0 {}\n", self.initial);
        for (x, row) in self.next.iter().enumerate() {
            let (t, s) = self.states[x];
            out.push_str(&format!("{x} [node={t} s={s:b} out={:b}] ->", self.outputs[x]));
            for y in row {
                out.push_str(&format!(" {y}"));
            }
            out.push('\n');
        }
        out
    }
}

pub struct DirectInstance {
    pub cs: ConstraintSystem,
    pub tree: TreeVars,
    pub vars: VarSet,
    /// Reachability bit per structure state `x = t·2^nb + s`.
    pub reach_state: Vec<Lit>,
    /// Shortcut target per valuation/input pair.
    pub shortcut: Vec<BitVec>,
    pub rank: Vec<BitVec>,
    pub reach: Vec<Lit>,
    nb: usize,
    start: usize,
}

/// Index helpers for valuations `(t, s, d, r)` and their pairing with inputs.
#[derive(Clone, Copy)]
struct Layout {
    nodes: usize,
    nb: usize,
    ni: usize,
}

impl Layout {
    fn num_valuations(&self) -> usize {
        self.nodes * (1 << self.nb) * 3 * 2
    }

    fn valuation(&self, t: usize, s: u32, d: Dir, r: bool) -> usize {
        ((t * (1 << self.nb) + s as usize) * 3 + d.index()) * 2 + r as usize
    }

    fn pair(&self, v: usize, i: u32) -> usize {
        v * (1 << self.ni) + i as usize
    }

    fn state(&self, t: usize, s: u32) -> usize {
        t * (1 << self.nb) + s as usize
    }

    fn num_states(&self) -> usize {
        self.nodes * (1 << self.nb)
    }
}

/// Which payload the automaton carries when it is at a node with this label
/// entered from `d`: expressions and returns from a condition evaluate,
/// everything else executes.
fn payload_for(label: &Label, d: Dir, r: bool) -> Option<Payload> {
    let evaluating = label.context() == crate::program::Context::Expr
        || (d == Dir::L && matches!(label, Label::If | Label::While | Label::Assign(_)));
    if evaluating {
        Some(Payload::Expr(r))
    } else if r {
        None
    } else {
        Some(Payload::Exec(false))
    }
}

/// The deterministic successor of valuation `(s, d, r)` under input `i` at a
/// node labelled `label`, as `(s', r', move)`.
fn sim_step(
    trivial: &WordAutomaton,
    vars: &VarSet,
    label: &Label,
    s: u32,
    i: u32,
    d: Dir,
    r: bool,
) -> Option<(u32, bool, Move)> {
    let ni = vars.num_inputs;
    if *label == Label::InOut {
        return (d == Dir::D && !r).then_some((s, false, Move::U));
    }
    let payload = payload_for(label, d, r)?;
    let p = BState {
        s: (s << ni) | i,
        q: 0,
        i,
        m: Mode::Inp,
        payload,
    };
    let succ = step(trivial, vars, p, label, d);
    debug_assert!(succ.len() <= 1, "simulation must be deterministic");
    succ.first().map(|&(p2, mv)| {
        let r2 = match p2.payload {
            Payload::Expr(r) => r,
            Payload::Exec(_) => false,
        };
        (p2.s >> ni, r2, mv)
    })
}

/// Builds the direct encoding for the co-Büchi automaton `spec_ucb` (whose
/// accepting states must be visited finitely often), `nodes` candidate nodes
/// and an optional bound on the number of reachable structure states.
pub fn encode_direct(
    spec_ucb: &WordAutomaton,
    vars: &VarSet,
    nodes: usize,
    structure_bound: Option<usize>,
) -> Result<DirectInstance, EncodeError> {
    if vars.dialect != Dialect::InOut {
        return Err(EncodeError::NeedsInOut);
    }
    let expected = vars.num_inputs + vars.num_outputs;
    if spec_ucb.num_atoms != expected {
        return Err(EncodeError::ArityMismatch {
            expected,
            found: spec_ucb.num_atoms,
        });
    }
    if structure_bound == Some(0) {
        return Err(EncodeError::ZeroStructureBound);
    }
    if nodes == 0 {
        return Err(EncodeError::EmptyBudget);
    }
    let ni = vars.num_inputs;
    let nb = vars.len() - ni;
    let lay = Layout { nodes, nb, ni };
    let inputs = 1u32 << ni;
    let labels = vars.alphabet();
    let mut cs = ConstraintSystem::new();
    let tree = encode_tree(&mut cs, &labels, nodes)?;
    let inout = tree.label_index(&Label::InOut).expect("inout label");
    // A root InOut would read once and terminate.
    cs.add_clause([-tree.is[0][inout]]);

    // Part 2/3: simulation with shortcuts and ranks.
    let nv = lay.num_valuations();
    let sc_width = bits_for(lay.num_states() as u64 - 1);
    let rank_width = bits_for(nv as u64);
    let mut reach = Vec::with_capacity(nv << ni);
    let mut shortcut = Vec::with_capacity(nv << ni);
    let mut rank = Vec::with_capacity(nv << ni);
    for t in 0..nodes {
        for s in 0..(1u32 << nb) {
            for d in Dir::ALL {
                for r in [false, true] {
                    for i in 0..inputs {
                        let tag = format!("{t},{s},{d:?},{},{i}", r as u8);
                        reach.push(cs.alloc_var(&format!("reach[{tag}]"))?);
                        shortcut.push(cs.alloc_bitvec(&format!("sc[{tag}]"), sc_width)?);
                        rank.push(cs.alloc_bitvec(&format!("rank[{tag}]"), rank_width)?);
                    }
                }
            }
        }
    }
    let reach_state: Vec<Lit> = (0..lay.num_states())
        .map(|x| cs.alloc_var(&format!("reachS[{x}]")))
        .collect::<Result<_, _>>()?;
    let start = lay.valuation(0, 0, Dir::D, false);
    cs.add_clause([reach[lay.pair(start, 0)]]);

    let trivial = trivial_automaton(expected);
    for t in 0..nodes {
        for s in 0..(1u32 << nb) {
            for d in Dir::ALL {
                for r in [false, true] {
                    let v = lay.valuation(t, s, d, r);
                    for i in 0..inputs {
                        let vi = lay.pair(v, i);
                        let here = reach[vi];
                        let mut groups: BTreeMap<(u32, bool, Move), Vec<usize>> = BTreeMap::new();
                        for (k, label) in labels.iter().enumerate() {
                            match sim_step(&trivial, vars, label, s, i, d, r) {
                                None => cs.add_clause([-here, -tree.is[t][k]]),
                                Some(next) => groups.entry(next).or_default().push(k),
                            }
                        }
                        for ((s2, r2, mv), group) in groups {
                            let takes = cs.new_var();
                            for k in group {
                                cs.add_clause([-here, -tree.is[t][k], takes]);
                            }
                            let targets = tree.mu_prime(t, mv);
                            if targets.is_empty() {
                                cs.add_clause([-takes]);
                            }
                            for (phi, t2, d2) in targets {
                                let w = lay.pair(lay.valuation(t2, s2, d2, r2), i);
                                let guard: Vec<Lit> = std::iter::once(takes).chain(phi).collect();
                                let neg: Vec<Lit> = guard.iter().map(|&g| -g).collect();
                                let (sc_v, sc_w) = (shortcut[vi].clone(), shortcut[w].clone());
                                let (rk_v, rk_w) = (rank[vi].clone(), rank[w].clone());
                                if d2 == Dir::D {
                                    let io = tree.is[t2][inout];
                                    // Segment ends at an InOut node.
                                    let x = lay.state(t2, s2);
                                    cs.add_clause(neg.iter().copied().chain([-io, reach_state[x]]));
                                    let mut g = guard.clone();
                                    g.push(io);
                                    cs.eq_const(&sc_v, x as u64, &g);
                                    // Otherwise the simulation continues.
                                    cs.add_clause(neg.iter().copied().chain([io, reach[w]]));
                                    let mut g = guard.clone();
                                    g.push(-io);
                                    cs.assert_compare(&sc_v, &sc_w, CompareOp::Eq, &g);
                                    cs.assert_compare(&rk_v, &rk_w, CompareOp::Gt, &g);
                                } else {
                                    cs.add_clause(neg.iter().copied().chain([reach[w]]));
                                    cs.assert_compare(&sc_v, &sc_w, CompareOp::Eq, &guard);
                                    cs.assert_compare(&rk_v, &rk_w, CompareOp::Gt, &guard);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // A reached structure state continues on every input.
    for t in 0..nodes {
        for s in 0..(1u32 << nb) {
            let x = lay.state(t, s);
            let v = lay.valuation(t, s, Dir::D, false);
            for i in 0..inputs {
                cs.add_clause([-reach_state[x], reach[lay.pair(v, i)]]);
            }
        }
    }
    if let Some(k) = structure_bound {
        cs.at_most_k(&reach_state, k);
    }

    // Part 4: run graph of the specification automaton over the structure.
    let nq = spec_ucb.num_states();
    let nx = lay.num_states();
    let ann_width = bits_for((nq * nx) as u64);
    let mut rs = Vec::with_capacity(nq * nx);
    let mut ann = Vec::with_capacity(nq * nx);
    for q in 0..nq {
        for (x, &reached) in reach_state.iter().enumerate().take(nx) {
            let lit = cs.alloc_var(&format!("spec[{q},{x}]"))?;
            cs.add_clause([-lit, reached]);
            rs.push(lit);
            ann.push(cs.alloc_bitvec(&format!("lambdaC[{q},{x}]"), ann_width)?);
        }
    }
    let sc_start = shortcut[lay.pair(start, 0)].clone();
    for x in 0..nx {
        let e = cs.eq_const_lit(&sc_start, x as u64);
        cs.add_clause([-e, rs[spec_ucb.initial * nx + x]]);
    }
    let output_of = |x: usize| vars.designated_outputs(((x % (1 << nb)) as u32) << ni);
    for x in 0..nx {
        let t = x >> nb;
        let s = (x % (1 << nb)) as u32;
        let v = lay.valuation(t, s, Dir::D, false);
        for i in 0..inputs {
            let sc_x = shortcut[lay.pair(v, i)].clone();
            for y in 0..nx {
                let letter = i | (output_of(y) << ni);
                let moves: Vec<(usize, usize)> = (0..nq)
                    .flat_map(|q| spec_ucb.successors(q, letter).iter().map(move |&q2| (q, q2)))
                    .collect();
                if moves.is_empty() {
                    continue;
                }
                let e = cs.eq_const_lit(&sc_x, y as u64);
                for (q, q2) in moves {
                    let (a, b) = (q * nx + x, q2 * nx + y);
                    cs.add_clause([-rs[a], -e, rs[b]]);
                    let op = if spec_ucb.accepting[q] {
                        CompareOp::Gt
                    } else {
                        CompareOp::Ge
                    };
                    let (la, lb) = (ann[a].clone(), ann[b].clone());
                    cs.assert_compare(&la, &lb, op, &[rs[a], e]);
                }
            }
        }
    }
    Ok(DirectInstance {
        cs,
        tree,
        vars: vars.clone(),
        reach_state,
        shortcut,
        rank,
        reach,
        nb,
        start,
    })
}

/// A one-state automaton accepting every word; simulation steps never
/// consult it because the I/O label is handled separately.
fn trivial_automaton(num_atoms: usize) -> WordAutomaton {
    WordAutomaton {
        num_atoms,
        initial: 0,
        delta: vec![vec![vec![0]; 1 << num_atoms]],
        accepting: vec![false],
        kind: crate::ltl::AcceptanceKind::Buchi,
    }
}

impl DirectInstance {
    pub fn decode_program(&self, model: &Model) -> Result<ProgramTree, EncodeError> {
        decode_tree(&self.tree, model, &self.vars)
    }

    /// Decodes the program and the transition structure reachable from the
    /// initial shortcut.
    pub fn decode_direct(&self, model: &Model) -> Result<(ProgramTree, ExtractedStructure), EncodeError> {
        let tree = self.decode_program(model)?;
        let ni = self.vars.num_inputs;
        let inputs = 1usize << ni;
        let lay = Layout {
            nodes: self.tree.n,
            nb: self.nb,
            ni,
        };
        let target = |v: usize, i: u32| -> Result<usize, EncodeError> {
            let x = model.bitvec_value(&self.shortcut[lay.pair(v, i)]) as usize;
            if x >= lay.num_states() || !model.value(self.reach_state[x]) {
                return Err(EncodeError::Inconsistent(format!("shortcut to unreached state {x}")));
            }
            Ok(x)
        };
        let first = target(self.start, 0)?;
        let mut index: BTreeMap<usize, usize> = BTreeMap::from([(first, 0)]);
        let mut order = vec![first];
        let mut queue = VecDeque::from([first]);
        let mut next = Vec::new();
        while let Some(x) = queue.pop_front() {
            let (t, s) = (x >> self.nb, (x % (1 << self.nb)) as u32);
            let v = lay.valuation(t, s, Dir::D, false);
            let mut row = Vec::with_capacity(inputs);
            for i in 0..inputs as u32 {
                let y = target(v, i)?;
                let len = index.len();
                let id = *index.entry(y).or_insert_with(|| {
                    order.push(y);
                    queue.push_back(y);
                    len
                });
                row.push(id);
            }
            next.push(row);
        }
        let states: Vec<(usize, u32)> = order
            .iter()
            .map(|&x| (x >> self.nb, (x % (1 << self.nb)) as u32))
            .collect();
        let outputs = states
            .iter()
            .map(|&(_, s)| self.vars.designated_outputs(s << ni))
            .collect();
        Ok((
            tree,
            ExtractedStructure {
                states,
                initial: 0,
                next,
                outputs,
                num_inputs: ni,
                num_outputs: self.vars.num_outputs,
            },
        ))
    }
}
