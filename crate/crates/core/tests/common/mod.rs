//! Oracles shared by the integration tests. Nothing here uses the automaton
//! or SAT machinery of the library.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rpsynth::ltl::LtlFormula;
use rpsynth::program::{validate_program_tree, Label, MealyMachine, ProgramTree, TreeNode, VarSet};

/// Truth of `f` at position 0 of the ultimately periodic word
/// `stem · cycle^ω` (letters are atom bit masks; `cycle` is non-empty).
pub fn eval_lasso(f: &LtlFormula, stem: &[u32], cycle: &[u32]) -> bool {
    assert!(!cycle.is_empty());
    let word: Vec<u32> = stem.iter().chain(cycle).copied().collect();
    eval_positions(f, &word, stem.len())[0]
}

/// Truth of `f` at every position of `word`, where the last position is
/// followed by position `loop_start`.
fn eval_positions(f: &LtlFormula, word: &[u32], loop_start: usize) -> Vec<bool> {
    use LtlFormula::*;
    let n = word.len();
    let succ = |i: usize| if i + 1 == n { loop_start } else { i + 1 };
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(a) => word.iter().map(|&l| l >> a & 1 == 1).collect(),
        Not(g) => eval_positions(g, word, loop_start).into_iter().map(|b| !b).collect(),
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
            let x = eval_positions(a, word, loop_start);
            let y = eval_positions(b, word, loop_start);
            (0..n)
                .map(|i| match f {
                    And(..) => x[i] && y[i],
                    Or(..) => x[i] || y[i],
                    Implies(..) => !x[i] || y[i],
                    _ => x[i] == y[i],
                })
                .collect()
        }
        Next(g) => {
            let x = eval_positions(g, word, loop_start);
            (0..n).map(|i| x[succ(i)]).collect()
        }
        Until(a, b) => {
            let x = eval_positions(a, word, loop_start);
            let y = eval_positions(b, word, loop_start);
            fixpoint(n, false, &succ, |i, next| y[i] || (x[i] && next))
        }
        Finally(g) => {
            let y = eval_positions(g, word, loop_start);
            fixpoint(n, false, &succ, |i, next| y[i] || next)
        }
        Globally(g) => {
            let x = eval_positions(g, word, loop_start);
            fixpoint(n, true, &succ, |i, next| x[i] && next)
        }
    }
}

/// Least (`init = false`) or greatest (`init = true`) solution of
/// `v[i] = step(i, v[succ(i)])`.
fn fixpoint(n: usize, init: bool, succ: &dyn Fn(usize) -> usize, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let x = step(i, v[succ(i)]);
            if x != v[i] {
                v[i] = x;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// The `(input, output)` letters a Mealy machine produces on the input
/// lasso `stem · cycle^ω`, as a lasso of letters `input | output << ni`.
pub fn mealy_lasso(m: &MealyMachine, stem: &[u32], cycle: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let inputs: Vec<u32> = stem.iter().chain(cycle).copied().collect();
    let n = inputs.len();
    let mut seen = std::collections::HashMap::new();
    let (mut state, mut pos) = (m.initial, 0);
    let mut letters = Vec::new();
    loop {
        if pos >= stem.len() {
            if let Some(&k) = seen.get(&(state, pos)) {
                let cycle_letters = letters.split_off(k);
                return (letters, cycle_letters);
            }
            seen.insert((state, pos), letters.len());
        }
        let i = inputs[pos];
        letters.push(i | (m.output[state][i as usize] << m.num_inputs));
        state = m.next[state][i as usize];
        pos = if pos + 1 == n { stem.len() } else { pos + 1 };
    }
}

/// Random formula over `atoms` atoms of nesting depth at most `depth`
/// (atoms and constants have depth 1).
pub fn random_formula(rng: &mut ChaCha8Rng, atoms: usize, depth: usize) -> LtlFormula {
    use LtlFormula as F;
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => F::True,
            1 => F::False,
            _ => F::Atom(rng.gen_range(0..atoms)),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..9) {
        0 => F::not(sub(rng)),
        1 => F::and(sub(rng), sub(rng)),
        2 => F::or(sub(rng), sub(rng)),
        3 => F::implies(sub(rng), sub(rng)),
        4 => F::iff(sub(rng), sub(rng)),
        5 => F::next(sub(rng)),
        6 => F::until(sub(rng), sub(rng)),
        7 => F::finally(sub(rng)),
        _ => F::globally(sub(rng)),
    }
}

/// Every expression tree of depth at most `depth` over the given leaves,
/// built from `not` and `or`, as preorder node lists.
pub fn all_expressions(leaves: &[Label], depth: usize) -> Vec<Vec<TreeNode>> {
    if depth == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<TreeNode>> = leaves.iter().map(|l| vec![leaf(l.clone())]).collect();
    if depth == 1 {
        return out;
    }
    let smaller = all_expressions(leaves, depth - 1);
    for e in &smaller {
        out.push(unary(Label::Not, e));
    }
    for a in &smaller {
        for b in &smaller {
            out.push(binary(Label::Or, a, b));
        }
    }
    out
}

fn leaf(label: Label) -> TreeNode {
    TreeNode {
        label,
        left: None,
        right: None,
    }
}

fn shifted(nodes: &[TreeNode], by: usize) -> impl Iterator<Item = TreeNode> + '_ {
    nodes.iter().map(move |n| TreeNode {
        label: n.label.clone(),
        left: n.left.map(|c| c + by),
        right: n.right.map(|c| c + by),
    })
}

pub fn unary(label: Label, child: &[TreeNode]) -> Vec<TreeNode> {
    let mut v = vec![TreeNode {
        label,
        left: Some(1),
        right: None,
    }];
    v.extend(shifted(child, 1));
    v
}

pub fn binary(label: Label, a: &[TreeNode], b: &[TreeNode]) -> Vec<TreeNode> {
    let mut v = vec![TreeNode {
        label,
        left: Some(1),
        right: Some(1 + a.len()),
    }];
    v.extend(shifted(a, 1));
    v.extend(shifted(b, 1 + a.len()));
    v
}

/// Every syntactically valid program tree with exactly `n` nodes over
/// `vars`, enumerated from the grammar.
pub fn all_programs(vars: &VarSet, n: usize) -> Vec<ProgramTree> {
    let labels = vars.alphabet();
    stmts(&labels, n)
        .into_iter()
        .map(|nodes| ProgramTree { nodes })
        .filter(|t| validate_program_tree(t, vars).is_valid())
        .collect()
}

type Gen = fn(&[Label], usize) -> Vec<Vec<TreeNode>>;

/// Binary nodes with `n` nodes in total whose subtrees come from `left`
/// and `right`.
fn pairs(labels: &[Label], n: usize, label: &Label, left: Gen, right: Gen) -> Vec<Vec<TreeNode>> {
    let mut out = Vec::new();
    for k in 1..n.saturating_sub(1) {
        let rs = right(labels, n - 1 - k);
        for a in &left(labels, k) {
            for b in &rs {
                out.push(binary(label.clone(), a, b));
            }
        }
    }
    out
}

fn stmts(labels: &[Label], n: usize) -> Vec<Vec<TreeNode>> {
    let mut out = Vec::new();
    for l in labels {
        match l {
            Label::Skip | Label::InOut | Label::Input(_) | Label::Output(_) if n == 1 => {
                out.push(vec![leaf(l.clone())])
            }
            Label::Assign(_) if n >= 2 => out.extend(exprs(labels, n - 1).iter().map(|e| unary(l.clone(), e))),
            Label::Seq => out.extend(pairs(labels, n, l, stmts, stmts)),
            Label::While => out.extend(pairs(labels, n, l, exprs, stmts)),
            Label::If => out.extend(pairs(labels, n, l, exprs, branches)),
            _ => {}
        }
    }
    out
}

fn branches(labels: &[Label], n: usize) -> Vec<Vec<TreeNode>> {
    pairs(labels, n, &Label::Then, stmts, stmts)
}

fn exprs(labels: &[Label], n: usize) -> Vec<Vec<TreeNode>> {
    let mut out = Vec::new();
    for l in labels {
        match l {
            Label::True | Label::False | Label::Var(_) if n == 1 => out.push(vec![leaf(l.clone())]),
            Label::Not if n >= 2 => out.extend(exprs(labels, n - 1).iter().map(|e| unary(Label::Not, e))),
            Label::Or => out.extend(pairs(labels, n, l, exprs, exprs)),
            _ => {}
        }
    }
    out
}
