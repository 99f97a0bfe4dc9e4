//! The two-way tree automaton that runs a specification automaton alongside
//! the execution of a program tree.
//!
//! A state carries the valuation `s`, the specification state `q`, the last
//! input `i`, the pending I/O mode `m`, and either an execution flag `t`
//! (set right after an output step) or the result `r` of the Boolean
//! expression currently being evaluated. Expressions are evaluated by
//! walking down into the expression subtree and back up, so no transition
//! ever terminates early.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::ltl::WordAutomaton;
use crate::program::{Dialect, Label, ProgramTree, VarSet};
use crate::rungraph::Acceptance;

/// Direction from which a node is entered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    /// From the parent.
    D,
    /// Back from the left child.
    L,
    /// Back from the right child.
    R,
}

impl Dir {
    pub const ALL: [Dir; 3] = [Dir::D, Dir::L, Dir::R];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Move of the automaton. `RL`/`RR` go to the right child (`then`) and on
/// to its left/right child in one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
    U,
    RL,
    RR,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Waiting for an input.
    Inp,
    /// Waiting for an output.
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    /// Executing statements; the flag marks the step right after an output.
    Exec(bool),
    /// Evaluating an expression; the current result.
    Expr(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BState {
    pub s: u32,
    pub q: usize,
    pub i: u32,
    pub m: Mode,
    pub payload: Payload,
}

impl BState {
    fn exec(self, t: bool) -> BState {
        BState {
            payload: Payload::Exec(t),
            ..self
        }
    }

    fn expr(self, r: bool) -> BState {
        BState {
            payload: Payload::Expr(r),
            ..self
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TwoWayError {
    #[error("specification automaton has {found} atoms, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("cannot move up from the root")]
    UpFromRoot,
    #[error("node {0} has no such child")]
    MissingChild(usize),
}

/// Per label, the `(successor, move)` pairs for each entry direction.
pub type Moves<S> = Vec<[Vec<(S, Move)>; 3]>;

/// Two-way tree automaton restricted to the states reachable from the
/// initial state over all labels and directions.
#[derive(Clone, Debug)]
pub struct TwoWayAutomaton {
    pub vars: VarSet,
    pub spec: WordAutomaton,
    pub labels: Vec<Label>,
    pub states: Vec<BState>,
    pub initial: usize,
    /// `delta[p][label][dir]` lists `(successor, move)`; empty means no run.
    pub delta: Vec<Moves<usize>>,
    pub acceptance: Acceptance,
    /// States with `t = 1` whose specification state is accepting.
    pub accepting_spec: Vec<bool>,
    /// States with `t = 1`, i.e. directly after an output.
    pub after_output: Vec<bool>,
    index: HashMap<BState, usize>,
}

fn set_bits(s: u32, vars: &[usize], value: u32) -> u32 {
    vars.iter()
        .enumerate()
        .fold(s, |acc, (k, &b)| (acc & !(1 << b)) | ((value >> k & 1) << b))
}

fn get_bits(s: u32, vars: &[usize]) -> u32 {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (k, &b)| acc | ((s >> b & 1) << k))
}

/// The transition rules for one state, label and entry direction.
pub fn step(spec: &WordAutomaton, vars: &VarSet, p: BState, label: &Label, d: Dir) -> Vec<(BState, Move)> {
    use Label::*;
    use Payload::*;
    let ni = vars.num_inputs;
    let inputs = 1u32 << ni;
    match (label, d, p.payload) {
        (True, Dir::D, Expr(false)) => vec![(p.expr(true), Move::U)],
        (False, Dir::D, Expr(false)) => vec![(p.expr(false), Move::U)],
        (Var(b), Dir::D, Expr(false)) => vec![(p.expr(p.s >> b & 1 == 1), Move::U)],
        (Or, Dir::D, Expr(false)) => vec![(p, Move::L)],
        (Or, Dir::L, Expr(r)) => vec![(p, if r { Move::U } else { Move::R })],
        (Or, Dir::R, Expr(_)) => vec![(p, Move::U)],
        (Not, Dir::D, Expr(false)) => vec![(p, Move::L)],
        (Not, Dir::L, Expr(r)) => vec![(p.expr(!r), Move::U)],

        (Skip, Dir::D, Exec(_)) => vec![(p.exec(false), Move::U)],
        (Assign(_), Dir::D, Exec(_)) => vec![(p.expr(false), Move::L)],
        (Assign(b), Dir::L, Expr(r)) => {
            let s = (p.s & !(1 << b)) | ((r as u32) << b);
            vec![(BState { s, ..p }.exec(false), Move::U)]
        }
        (If, Dir::D, Exec(_)) => vec![(p.expr(false), Move::L)],
        (If, Dir::L, Expr(r)) => vec![(p.exec(false), if r { Move::RL } else { Move::RR })],
        (If, Dir::R, Exec(_)) => vec![(p.exec(false), Move::U)],
        (While, Dir::D | Dir::R, Exec(_)) => vec![(p.expr(false), Move::L)],
        (While, Dir::L, Expr(r)) => vec![(p.exec(false), if r { Move::R } else { Move::U })],
        (Seq, Dir::D, Exec(_)) => vec![(p.exec(false), Move::L)],
        (Seq, Dir::L, Exec(_)) => vec![(p.exec(false), Move::R)],
        (Seq, Dir::R, Exec(_)) => vec![(p.exec(false), Move::U)],
        (Then, Dir::L | Dir::R, Exec(_)) => vec![(p, Move::U)],

        (Input(v), Dir::D, Exec(_)) if p.m == Mode::Inp => (0..inputs)
            .map(|val| {
                let next = BState {
                    s: set_bits(p.s, v, val),
                    i: val,
                    m: Mode::Out,
                    ..p
                };
                (next.exec(false), Move::U)
            })
            .collect(),
        (Output(v), Dir::D, Exec(_)) if p.m == Mode::Out => {
            let letter = p.i | (get_bits(p.s, v) << ni);
            spec.successors(p.q, letter)
                .iter()
                .map(|&q| {
                    let next = BState { q, m: Mode::Inp, ..p };
                    (next.exec(true), Move::U)
                })
                .collect()
        }
        (InOut, Dir::D, Exec(_)) => {
            let mask = inputs - 1;
            let read = |q: usize, t: bool| -> Vec<(BState, Move)> {
                (0..inputs)
                    .map(|val| {
                        let next = BState {
                            s: (p.s & !mask) | val,
                            q,
                            i: val,
                            m: Mode::Out,
                            payload: Exec(t),
                        };
                        (next, Move::U)
                    })
                    .collect()
            };
            match p.m {
                Mode::Inp => read(p.q, false),
                Mode::Out => {
                    let letter = p.i | (vars.designated_outputs(p.s) << ni);
                    spec.successors(p.q, letter)
                        .iter()
                        .flat_map(|&q| read(q, true))
                        .collect()
                }
            }
        }
        _ => Vec::new(),
    }
}

impl TwoWayAutomaton {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// `|P|` of the full product before restricting to reachable states:
    /// `2^|B| · |Q| · 2^N_I · 2 · 4` (two flag values each for execution and
    /// expression states).
    pub fn full_state_count(&self) -> usize {
        (1usize << self.vars.len()) * self.spec.num_states() * (1 << self.vars.num_inputs) * 2 * 4
    }

    pub fn state_index(&self, p: &BState) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn label_index(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn successors(&self, p: usize, label: usize, d: Dir) -> &[(usize, Move)] {
        &self.delta[p][label][d.index()]
    }

    /// Text dump `state label dir -> successor/move ...` for differential tests.
    pub fn dump_transitions(&self) -> String {
        let mut out = String::new();
        for (p, rows) in self.delta.iter().enumerate() {
            for (l, dirs) in rows.iter().enumerate() {
                for d in Dir::ALL {
                    let succ = &dirs[d.index()];
                    if succ.is_empty() {
                        continue;
                    }
                    let _ = write!(
                        out,
                        "{} {} {:?} ->",
                        describe(&self.states[p]),
                        self.labels[l].display(&self.vars),
                        d
                    );
                    for (p2, mv) in succ {
                        let _ = write!(out, " {}/{:?}", describe(&self.states[*p2]), mv);
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

fn describe(p: &BState) -> String {
    let m = match p.m {
        Mode::Inp => "inp",
        Mode::Out => "out",
    };
    match p.payload {
        Payload::Exec(t) => format!("(s={:b},q={},i={:b},{m},t={})", p.s, p.q, p.i, t as u8),
        Payload::Expr(r) => format!(
            "(s={:b},q={},i={:b},{m},r={})",
            p.s,
            p.q,
            p.i,
            if r { "T" } else { "F" }
        ),
    }
}

/// Builds the two-way Büchi automaton from the Büchi automaton of the negated
/// specification. Missing specification transitions are completed with a
/// neutral sink so that they do not create dead ends.
pub fn build_b(negated_spec: &WordAutomaton, vars: &VarSet) -> Result<TwoWayAutomaton, TwoWayError> {
    let expected = vars.num_inputs + vars.num_outputs;
    if negated_spec.num_atoms != expected {
        return Err(TwoWayError::ArityMismatch {
            expected,
            found: negated_spec.num_atoms,
        });
    }
    let spec = negated_spec.completed();
    let labels = vars.alphabet();
    let p0 = BState {
        s: 0,
        q: spec.initial,
        i: 0,
        m: Mode::Inp,
        payload: Payload::Exec(false),
    };
    let mut index = HashMap::new();
    let mut states = vec![p0];
    index.insert(p0, 0usize);
    let mut queue = VecDeque::from([p0]);
    let mut raw: Vec<Moves<BState>> = Vec::new();
    while let Some(p) = queue.pop_front() {
        let mut rows = Vec::with_capacity(labels.len());
        for label in &labels {
            let row = Dir::ALL.map(|d| step(&spec, vars, p, label, d));
            for (p2, _) in row.iter().flatten() {
                if !index.contains_key(p2) {
                    index.insert(*p2, states.len());
                    states.push(*p2);
                    queue.push_back(*p2);
                }
            }
            rows.push(row);
        }
        raw.push(rows);
    }
    let delta = raw
        .into_iter()
        .map(|rows| {
            rows.into_iter()
                .map(|row| row.map(|succ| succ.into_iter().map(|(p, m)| (index[&p], m)).collect()))
                .collect()
        })
        .collect();
    let after_output: Vec<bool> = states.iter().map(|p| p.payload == Payload::Exec(true)).collect();
    let accepting_spec: Vec<bool> = states
        .iter()
        .map(|p| p.payload == Payload::Exec(true) && spec.accepting[p.q])
        .collect();
    Ok(TwoWayAutomaton {
        vars: vars.clone(),
        spec,
        labels,
        states,
        initial: 0,
        delta,
        acceptance: Acceptance::Buchi(accepting_spec.clone()),
        accepting_spec,
        after_output,
        index,
    })
}

/// Rereads the Büchi automaton universally with the same set as co-Büchi.
pub fn complement_to_ucb(b: &TwoWayAutomaton) -> TwoWayAutomaton {
    let mut out = b.clone();
    out.acceptance = Acceptance::CoBuchi(b.accepting_spec.clone());
    out
}

/// Adds reactiveness: pairs `(F, ∅)` and `(P, after-output states)`.
pub fn build_streett_product(ucb: &TwoWayAutomaton) -> TwoWayAutomaton {
    let mut out = ucb.clone();
    let n = ucb.num_states();
    out.acceptance = Acceptance::Streett(vec![
        (ucb.accepting_spec.clone(), vec![false; n]),
        (vec![true; n], ucb.after_output.clone()),
    ]);
    out
}

/// Node reached by a single move, with the direction it is entered from.
pub fn mu_step(tree: &ProgramTree, parents: &[Option<usize>], t: usize, mv: Move) -> Result<(usize, Dir), TwoWayError> {
    let node = &tree.nodes[t];
    match mv {
        Move::L => node.left.map(|c| (c, Dir::D)).ok_or(TwoWayError::MissingChild(t)),
        Move::R => node.right.map(|c| (c, Dir::D)).ok_or(TwoWayError::MissingChild(t)),
        Move::U => {
            let p = parents[t].ok_or(TwoWayError::UpFromRoot)?;
            if tree.nodes[p].left == Some(t) {
                Ok((p, Dir::L))
            } else {
                Ok((p, Dir::R))
            }
        }
        Move::RL | Move::RR => {
            let (mid, _) = mu_step(tree, parents, t, Move::R)?;
            let second = if mv == Move::RL { Move::L } else { Move::R };
            mu_step(tree, parents, mid, second)
        }
    }
}

/// Whether the dialect of `vars` uses the combined I/O label.
pub fn uses_inout(vars: &VarSet) -> bool {
    vars.dialect == Dialect::InOut
}
