//! Reference interpreter and Mealy-machine extraction.
//!
//! The interpreter walks the tree with an explicit continuation stack of node
//! indices; a `while` node re-pushes itself below its body. Input/output
//! statements are the only points where the environment interacts.
//!
//! In the `InOut` dialect the first `InOut` visit only reads an input; every
//! later visit first emits the output variables and then reads the next
//! input. Hence the `k`-th letter pairs input `k` with the outputs emitted at
//! the `(k+1)`-th visit.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::{Dialect, Label, ProgramTree, VarSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("program terminated after {0} input/output steps")]
    Terminated(usize),
    #[error("more than {0} internal steps without input/output")]
    Divergence(usize),
    #[error("input and output statements do not alternate at node {0}")]
    AlternationViolation(usize),
    #[error("malformed program at node {0}")]
    Malformed(usize),
    #[error("more than {0} configurations")]
    TooManyConfigurations(usize),
}

/// Sequence of `(input, output)` vectors, bit `k` being component `k`.
pub type Trace = Vec<(u32, u32)>;

/// Evaluates the expression rooted at `root` under valuation `vals`.
pub fn eval_bool_expr(tree: &ProgramTree, root: usize, vals: u32) -> Result<bool, RunError> {
    let node = tree.nodes.get(root).ok_or(RunError::Malformed(root))?;
    let child = |c: Option<usize>| c.ok_or(RunError::Malformed(root));
    match node.label {
        Label::True => Ok(true),
        Label::False => Ok(false),
        Label::Var(b) => Ok(vals >> b & 1 == 1),
        Label::Not => Ok(!eval_bool_expr(tree, child(node.left)?, vals)?),
        Label::Or => {
            Ok(eval_bool_expr(tree, child(node.left)?, vals)? || eval_bool_expr(tree, child(node.right)?, vals)?)
        }
        _ => Err(RunError::Malformed(root)),
    }
}

/// What stopped [`Machine::run_to_io`].
enum Event {
    Input(Vec<usize>),
    Output(Vec<usize>),
    InOut,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Machine {
    stack: Vec<usize>,
    vals: u32,
}

impl Machine {
    fn start() -> Self {
        Machine {
            stack: vec![0],
            vals: 0,
        }
    }

    /// Executes until the next I/O statement, which is popped and returned.
    fn run_to_io(&mut self, tree: &ProgramTree, budget: usize, io_done: usize) -> Result<(usize, Event), RunError> {
        let mut steps = 0;
        loop {
            let n = self.stack.pop().ok_or(RunError::Terminated(io_done))?;
            steps += 1;
            if steps > budget {
                return Err(RunError::Divergence(budget));
            }
            let node = tree.nodes.get(n).ok_or(RunError::Malformed(n))?;
            let left = node.left.ok_or(RunError::Malformed(n));
            let right = node.right.ok_or(RunError::Malformed(n));
            match &node.label {
                Label::Seq => {
                    self.stack.push(right?);
                    self.stack.push(left?);
                }
                Label::If => {
                    let branches = tree.nodes.get(right?).ok_or(RunError::Malformed(n))?;
                    if branches.label != Label::Then {
                        return Err(RunError::Malformed(n));
                    }
                    let taken = if eval_bool_expr(tree, left?, self.vals)? {
                        branches.left
                    } else {
                        branches.right
                    };
                    self.stack.push(taken.ok_or(RunError::Malformed(n))?);
                }
                Label::While => {
                    if eval_bool_expr(tree, left?, self.vals)? {
                        self.stack.push(n);
                        self.stack.push(right?);
                    }
                }
                Label::Skip => {}
                Label::Assign(b) => {
                    let v = eval_bool_expr(tree, left?, self.vals)?;
                    self.vals = (self.vals & !(1 << b)) | ((v as u32) << b);
                }
                Label::Input(v) => return Ok((n, Event::Input(v.clone()))),
                Label::Output(v) => return Ok((n, Event::Output(v.clone()))),
                Label::InOut => return Ok((n, Event::InOut)),
                _ => return Err(RunError::Malformed(n)),
            }
        }
    }

    fn write(&mut self, vars: &[usize], value: u32) {
        for (k, &b) in vars.iter().enumerate() {
            self.vals = (self.vals & !(1 << b)) | ((value >> k & 1) << b);
        }
    }

    fn read(&self, vars: &[usize]) -> u32 {
        vars.iter()
            .enumerate()
            .fold(0, |acc, (k, &b)| acc | ((self.vals >> b & 1) << k))
    }
}

fn designated(vars: &VarSet) -> (Vec<usize>, Vec<usize>) {
    let ins = (0..vars.num_inputs).collect();
    let outs = (vars.num_inputs..vars.num_inputs + vars.num_outputs).collect();
    (ins, outs)
}

/// Runs the program on a finite input sequence and returns the trace of
/// `(input, output)` pairs, one per consumed input.
pub fn run_program(tree: &ProgramTree, vars: &VarSet, inputs: &[u32], step_budget: usize) -> Result<Trace, RunError> {
    let mut m = Machine::start();
    let mut trace = Vec::with_capacity(inputs.len());
    match vars.dialect {
        Dialect::Separate => {
            let mut expect_input = true;
            let mut pending_input = 0;
            loop {
                if expect_input && trace.len() == inputs.len() {
                    return Ok(trace);
                }
                let (n, ev) = m.run_to_io(tree, step_budget, trace.len())?;
                match ev {
                    Event::Input(v) if expect_input => {
                        pending_input = inputs[trace.len()];
                        m.write(&v, pending_input);
                        expect_input = false;
                    }
                    Event::Output(v) if !expect_input => {
                        trace.push((pending_input, m.read(&v)));
                        expect_input = true;
                    }
                    Event::InOut => return Err(RunError::Malformed(n)),
                    _ => return Err(RunError::AlternationViolation(n)),
                }
            }
        }
        Dialect::InOut => {
            let (ins, outs) = designated(vars);
            let mut first = true;
            let mut pending_input = 0;
            loop {
                let (n, ev) = m.run_to_io(tree, step_budget, trace.len())?;
                if !matches!(ev, Event::InOut) {
                    return Err(RunError::Malformed(n));
                }
                if !first {
                    trace.push((pending_input, m.read(&outs)));
                }
                first = false;
                if trace.len() == inputs.len() {
                    return Ok(trace);
                }
                pending_input = inputs[trace.len()];
                m.write(&ins, pending_input);
            }
        }
    }
}

/// Finite-state transducer with input vectors `0..2^num_inputs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyMachine {
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub initial: usize,
    pub next: Vec<Vec<usize>>,
    pub output: Vec<Vec<u32>>,
}

impl MealyMachine {
    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    /// Equivalent machine with the fewest states (reachable part only).
    pub fn minimized(&self) -> MealyMachine {
        let n = self.num_states();
        let mut block = vec![0usize; n];
        let mut count = 1;
        loop {
            let mut sigs = HashMap::new();
            let refined: Vec<usize> = (0..n)
                .map(|m| {
                    let sig = (
                        block[m],
                        self.output[m].clone(),
                        self.next[m].iter().map(|&s| block[s]).collect::<Vec<_>>(),
                    );
                    let fresh = sigs.len();
                    *sigs.entry(sig).or_insert(fresh)
                })
                .collect();
            block = refined;
            if sigs.len() == count {
                break;
            }
            count = sigs.len();
        }
        let mut next = vec![Vec::new(); count];
        let mut output = vec![Vec::new(); count];
        for m in 0..n {
            if next[block[m]].is_empty() {
                next[block[m]] = self.next[m].iter().map(|&s| block[s]).collect();
                output[block[m]] = self.output[m].clone();
            }
        }
        MealyMachine {
            num_inputs: self.num_inputs,
            num_outputs: self.num_outputs,
            initial: block[self.initial],
            next,
            output,
        }
    }

    pub fn trace(&self, inputs: &[u32]) -> Trace {
        let mut m = self.initial;
        inputs
            .iter()
            .map(|&i| {
                let o = self.output[m][i as usize];
                m = self.next[m][i as usize];
                (i, o)
            })
            .collect()
    }
}

/// Builds the Mealy machine whose states are the configurations in which the
/// program waits for its next input.
pub fn extract_mealy(
    tree: &ProgramTree,
    vars: &VarSet,
    config_budget: usize,
    step_budget: usize,
) -> Result<MealyMachine, RunError> {
    let letters = 1usize << vars.num_inputs;
    // A waiting configuration is the machine right before an input is written.
    let mut ids: HashMap<(Machine, Vec<usize>), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut next = Vec::new();
    let mut output = Vec::new();

    let (ins, outs) = designated(vars);
    let mut first = Machine::start();
    let first_target = match vars.dialect {
        Dialect::Separate => match first.run_to_io(tree, step_budget, 0)? {
            (_, Event::Input(v)) => v,
            (n, Event::Output(_)) => return Err(RunError::AlternationViolation(n)),
            (n, Event::InOut) => return Err(RunError::Malformed(n)),
        },
        Dialect::InOut => match first.run_to_io(tree, step_budget, 0)? {
            (_, Event::InOut) => ins.clone(),
            (n, _) => return Err(RunError::Malformed(n)),
        },
    };
    let canon = |mut m: Machine, target: &[usize]| {
        for &b in target {
            m.vals &= !(1 << b);
        }
        (m, target.to_vec())
    };
    let start = canon(first, &first_target);
    ids.insert(start.clone(), 0);
    next.push(vec![0; letters]);
    output.push(vec![0; letters]);
    queue.push_back(start);

    while let Some(cfg) = queue.pop_front() {
        let id = ids[&cfg];
        for letter in 0..letters as u32 {
            let (mut m, target) = cfg.clone();
            m.write(&target, letter);
            let (out, target2) = match vars.dialect {
                Dialect::Separate => {
                    let out = match m.run_to_io(tree, step_budget, 1)? {
                        (_, Event::Output(v)) => m.read(&v),
                        (n, Event::Input(_)) => return Err(RunError::AlternationViolation(n)),
                        (n, Event::InOut) => return Err(RunError::Malformed(n)),
                    };
                    let target2 = match m.run_to_io(tree, step_budget, 1)? {
                        (_, Event::Input(v)) => v,
                        (n, Event::Output(_)) => return Err(RunError::AlternationViolation(n)),
                        (n, Event::InOut) => return Err(RunError::Malformed(n)),
                    };
                    (out, target2)
                }
                Dialect::InOut => match m.run_to_io(tree, step_budget, 1)? {
                    (_, Event::InOut) => (m.read(&outs), ins.clone()),
                    (n, _) => return Err(RunError::Malformed(n)),
                },
            };
            let succ = canon(m, &target2);
            let sid = match ids.get(&succ) {
                Some(&s) => s,
                None => {
                    let s = next.len();
                    if s >= config_budget {
                        return Err(RunError::TooManyConfigurations(config_budget));
                    }
                    ids.insert(succ.clone(), s);
                    next.push(vec![0; letters]);
                    output.push(vec![0; letters]);
                    queue.push_back(succ);
                    s
                }
            };
            next[id][letter as usize] = sid;
            output[id][letter as usize] = out;
        }
    }
    Ok(MealyMachine {
        num_inputs: vars.num_inputs,
        num_outputs: vars.num_outputs,
        initial: 0,
        next,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    fn fig1() -> (ProgramTree, VarSet) {
        let vars = VarSet {
            names: vec!["r1".into(), "r2".into()],
            num_inputs: 2,
            num_outputs: 2,
            dialect: Dialect::Separate,
        };
        let text = "while(tt) { input (r1, r2); if(r1) then { r2 = ff } else { skip }; output (r1, r2) }";
        parse_program(text, &vars).unwrap()
    }

    #[test]
    fn figure_one_grants_first_request() {
        let (tree, vars) = fig1();
        assert_eq!(run_program(&tree, &vars, &[0b11], 100).unwrap(), vec![(0b11, 0b01)]);
        assert_eq!(run_program(&tree, &vars, &[0b10], 100).unwrap(), vec![(0b10, 0b10)]);
    }

    #[test]
    fn skip_loop_diverges() {
        let vars = VarSet::separate(1, 1, 1);
        let (tree, vars) = parse_program("while(tt) { skip }", &vars).unwrap();
        assert_eq!(run_program(&tree, &vars, &[0], 50), Err(RunError::Divergence(50)));
    }

    #[test]
    fn expression_semantics() {
        let vars = VarSet::separate(1, 1, 2);
        let (tree, _) = parse_program("b0 = not (b0 or b1)", &vars).unwrap();
        assert_eq!(eval_bool_expr(&tree, 1, 0b01), Ok(false));
        assert_eq!(eval_bool_expr(&tree, 1, 0b00), Ok(true));
    }

    #[test]
    fn copy_program_yields_one_state() {
        let vars = VarSet::inout(&["in".into()], &["out".into()], 0);
        let (tree, vars) = parse_program("while(tt) { out = in; InOut }", &vars).unwrap();
        let m = extract_mealy(&tree, &vars, 100, 100).unwrap();
        assert_eq!(m.num_states(), 2);
        let m = m.minimized();
        assert_eq!(m.num_states(), 1);
        assert_eq!(m.output[0], vec![0, 1]);
    }

    #[test]
    fn mealy_traces_match_interpreter() {
        let (tree, vars) = fig1();
        let m = extract_mealy(&tree, &vars, 100, 100).unwrap();
        let word = [0b11, 0b00, 0b10, 0b01];
        assert_eq!(m.trace(&word), run_program(&tree, &vars, &word, 100).unwrap());
    }
}
