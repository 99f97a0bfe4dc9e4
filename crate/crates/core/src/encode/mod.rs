//! SAT encodings of bounded synthesis: the run-graph encoding over the
//! two-way automaton and the direct encoding that simulates the program
//! between I/O points. Both share the program-guessing part defined here.

pub mod direct;
pub mod twoway;

use thiserror::Error;

use crate::program::{validate_program_tree, Context, Label, ProgramTree, TreeNode, VarSet};
use crate::sat::{bits_for, BitVec, ConstraintSystem, Lit, Model, SatError};
use crate::twoway::{Dir, Move};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("node budget must be at least 1")]
    EmptyBudget,
    #[error("annotation bound must be at least 1")]
    ZeroBound,
    #[error("structure bound must be at least 1")]
    ZeroStructureBound,
    #[error("the direct encoding requires the inout dialect")]
    NeedsInOut,
    #[error("specification has {found} atoms, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("model decodes to an invalid program: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Sat(#[from] SatError),
}

/// Variables describing a candidate program tree over node addresses
/// `0..n`: node 0 is the root, a left child always sits directly after its
/// parent, and right children have larger addresses.
#[derive(Clone, Debug)]
pub struct TreeVars {
    pub n: usize,
    pub labels: Vec<Label>,
    /// `τ_t`: binary label index.
    pub tau: Vec<BitVec>,
    /// `is[t][σ] ⇔ τ_t = σ`.
    pub is: Vec<Vec<Lit>>,
    pub used: Vec<Lit>,
    /// `L_t`: node `t` is used and has the left child `t+1`.
    pub left: Vec<Lit>,
    /// Node `t` is used and has a right child.
    pub has_right: Vec<Lit>,
    /// `R_t`: binary address of the right child.
    pub right: Vec<BitVec>,
    /// `r[t][t'] ⇔ has_right_t ∧ R_t = t'`, present for `t' ≥ t+2`.
    pub r: Vec<Vec<Option<Lit>>>,
}

impl TreeVars {
    pub fn label_index(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Literal for "node `t` carries `label`", if the label is in the alphabet.
    pub fn has_label(&self, t: usize, label: &Label) -> Option<Lit> {
        self.label_index(label).map(|s| self.is[t][s])
    }

    /// `μ′`: the nodes reached from `t` by a move, each guarded by the
    /// conjunction of structure literals that makes it the target.
    pub fn mu_prime(&self, t: usize, mv: Move) -> Vec<(Vec<Lit>, usize, Dir)> {
        let n = self.n;
        let rights = |t: usize| (t + 2..n).filter_map(move |c| Some((c, self.r[t][c]?)));
        match mv {
            Move::L if t + 1 < n => vec![(vec![self.left[t]], t + 1, Dir::D)],
            Move::L => Vec::new(),
            Move::R => rights(t).map(|(c, l)| (vec![l], c, Dir::D)).collect(),
            Move::U if t == 0 => Vec::new(),
            Move::U => {
                let mut out = vec![(vec![self.left[t - 1]], t - 1, Dir::L)];
                for p in 0..t - 1 {
                    if let Some(l) = self.r[p][t] {
                        out.push((vec![l], p, Dir::R));
                    }
                }
                out
            }
            Move::RL => rights(t)
                .filter(|&(c, _)| c + 1 < n)
                .map(|(c, l)| (vec![l, self.left[c]], c + 1, Dir::D))
                .collect(),
            Move::RR => rights(t)
                .flat_map(|(c, l)| rights(c).map(move |(g, l2)| (vec![l, l2], g, Dir::D)))
                .collect(),
        }
    }
}

fn or_labels(tv: &TreeVars, t: usize, pred: impl Fn(&Label) -> bool) -> Vec<Lit> {
    tv.labels
        .iter()
        .enumerate()
        .filter(|(_, l)| pred(l))
        .map(|(s, _)| tv.is[t][s])
        .collect()
}

/// Allocates the tree variables and adds well-formedness and syntax
/// constraints: labels in range, arities matching child pointers, a unique
/// parent for every used node, used nodes forming a prefix of the address
/// space, and every child in the syntactic context its parent requires.
pub fn encode_tree(cs: &mut ConstraintSystem, labels: &[Label], n: usize) -> Result<TreeVars, EncodeError> {
    if n == 0 {
        return Err(EncodeError::EmptyBudget);
    }
    let label_width = bits_for(labels.len() as u64 - 1);
    let addr_width = bits_for(n as u64 - 1);
    let mut tv = TreeVars {
        n,
        labels: labels.to_vec(),
        tau: Vec::new(),
        is: Vec::new(),
        used: Vec::new(),
        left: Vec::new(),
        has_right: Vec::new(),
        right: Vec::new(),
        r: Vec::new(),
    };
    for t in 0..n {
        let tau = cs.alloc_bitvec(&format!("tau[{t}]"), label_width)?;
        cs.le_const(&tau, labels.len() as u64 - 1, &[]);
        let is = (0..labels.len()).map(|s| cs.eq_const_lit(&tau, s as u64)).collect();
        tv.tau.push(tau);
        tv.is.push(is);
        tv.used.push(cs.alloc_var(&format!("used[{t}]"))?);
        tv.left.push(cs.alloc_var(&format!("L[{t}]"))?);
        tv.has_right.push(cs.alloc_var(&format!("hasR[{t}]"))?);
        tv.right.push(cs.alloc_bitvec(&format!("R[{t}]"), addr_width)?);
    }
    for t in 0..n {
        let mut row = vec![None; n];
        for (c, slot) in row.iter_mut().enumerate().skip(t + 2) {
            let eq = cs.eq_const_lit(&tv.right[t], c as u64);
            *slot = Some(cs.and_lit(&[tv.has_right[t], eq]));
        }
        tv.r.push(row);
    }

    cs.add_clause([tv.used[0]]);
    for t in 0..n {
        let (used, left, hr) = (tv.used[t], tv.left[t], tv.has_right[t]);
        // L_t ⇔ used_t ∧ arity ≥ 1, hasR_t ⇔ used_t ∧ arity = 2.
        for (lit, min_arity) in [(left, 1), (hr, 2)] {
            cs.add_clause([-lit, used]);
            let matching = or_labels(&tv, t, |l| l.arity() >= min_arity);
            cs.add_clause(std::iter::once(-lit).chain(matching.iter().copied()));
            for m in matching {
                cs.add_clause([-used, -m, lit]);
            }
        }
        if t + 1 >= n {
            cs.add_clause([-left]);
        } else {
            cs.add_clause([-left, tv.used[t + 1]]);
        }
        for &b in &tv.right[t] {
            cs.add_clause([hr, -b]);
        }
        let targets: Vec<Lit> = tv.r[t].iter().flatten().copied().collect();
        cs.add_clause(std::iter::once(-hr).chain(targets.iter().copied()));
        for (c, l) in tv.r[t].iter().enumerate() {
            if let Some(l) = *l {
                cs.add_clause([-l, tv.used[c]]);
            }
        }
        if t > 0 {
            let mut parents = vec![tv.left[t - 1]];
            parents.extend((0..t - 1).filter_map(|p| tv.r[p][t]));
            cs.add_clause(std::iter::once(-used).chain(parents.iter().copied()));
            cs.at_most_one(&parents);
            cs.add_clause([-used, tv.used[t - 1]]);
        }
    }

    // Syntactic contexts.
    let in_context = |tv: &TreeVars, t: usize, ctx: Context| or_labels(tv, t, |l| l.context() == ctx);
    cs.add_clause(in_context(&tv, 0, Context::Stmt));
    for t in 0..n {
        for (s, label) in labels.iter().enumerate() {
            let [lc, rc] = label.child_contexts();
            if let Some(ctx) = lc {
                if t + 1 < n {
                    let ok = in_context(&tv, t + 1, ctx);
                    cs.add_clause([-tv.is[t][s], -tv.left[t]].into_iter().chain(ok));
                }
            }
            if let Some(ctx) = rc {
                for c in t + 2..n {
                    let r = tv.r[t][c].expect("right-child literal");
                    let ok = in_context(&tv, c, ctx);
                    cs.add_clause([-tv.is[t][s], -r].into_iter().chain(ok));
                }
            }
        }
    }
    Ok(tv)
}

/// Forbids subtrees that have a strictly smaller equivalent (`skip; S`,
/// `not not e`, `e or tt`, `x = x`, ...) and fixes one of two equivalent
/// nestings of `;` and `or`. Every program can be rewritten into the
/// remaining shapes without growing, so satisfiability for a node budget
/// is unchanged while the solver has fewer trees to refute.
pub fn forbid_redundant(cs: &mut ConstraintSystem, tv: &TreeVars) {
    use Label::*;
    let n = tv.n;
    let idx = |l: &Label| tv.label_index(l);
    let forbid_left = |cs: &mut ConstraintSystem, parent: &Label, child: &Label| {
        let (Some(p), Some(c)) = (idx(parent), idx(child)) else {
            return;
        };
        for t in 0..n.saturating_sub(1) {
            cs.add_clause([-tv.is[t][p], -tv.left[t], -tv.is[t + 1][c]]);
        }
    };
    forbid_left(cs, &Seq, &Skip);
    forbid_left(cs, &Seq, &Seq);
    for c in [Not, True, False] {
        forbid_left(cs, &Not, &c);
    }
    for c in [True, False, Or] {
        forbid_left(cs, &Or, &c);
    }
    for c in [True, False] {
        forbid_left(cs, &If, &c);
    }
    forbid_left(cs, &While, &False);
    for (k, label) in tv.labels.iter().enumerate() {
        if let Assign(b) = label {
            if let Some(c) = idx(&Var(*b)) {
                for t in 0..n.saturating_sub(1) {
                    cs.add_clause([-tv.is[t][k], -tv.left[t], -tv.is[t + 1][c]]);
                }
            }
        }
    }
    let forbid_right = |cs: &mut ConstraintSystem, parent: &Label, child: &Label| {
        let (Some(p), Some(c)) = (idx(parent), idx(child)) else {
            return;
        };
        for t in 0..n {
            for u in t + 2..n {
                if let Some(r) = tv.r[t][u] {
                    cs.add_clause([-tv.is[t][p], -r, -tv.is[u][c]]);
                }
            }
        }
    };
    forbid_right(cs, &Seq, &Skip);
    for c in [True, False] {
        forbid_right(cs, &Or, &c);
    }
    // `if (e) { skip } else { skip }` is `skip`.
    if let (Some(then), Some(skip)) = (idx(&Then), idx(&Skip)) {
        for t in 0..n.saturating_sub(1) {
            for u in t + 2..n {
                if let Some(r) = tv.r[t][u] {
                    cs.add_clause([-tv.is[t][then], -tv.left[t], -tv.is[t + 1][skip], -r, -tv.is[u][skip]]);
                }
            }
        }
    }
}

/// Restricts the tree variables to exactly the given program (used to check
/// fixed candidates). The tree must use the left-child-follows-parent layout.
pub fn fix_tree(cs: &mut ConstraintSystem, tv: &TreeVars, tree: &ProgramTree) -> Result<(), EncodeError> {
    if tree.len() > tv.n {
        return Err(EncodeError::Inconsistent(format!(
            "program has {} nodes, budget is {}",
            tree.len(),
            tv.n
        )));
    }
    for t in 0..tv.n {
        match tree.nodes.get(t) {
            None => cs.add_clause([-tv.used[t]]),
            Some(node) => {
                let s = tv
                    .label_index(&node.label)
                    .ok_or_else(|| EncodeError::Inconsistent(format!("label of node {t} is not in the alphabet")))?;
                cs.add_clause([tv.is[t][s]]);
                cs.add_clause([tv.used[t]]);
                if let Some(c) = node.right {
                    let r = tv.r[t].get(c).copied().flatten().ok_or_else(|| {
                        EncodeError::Inconsistent(format!("right child {c} of node {t} is out of layout"))
                    })?;
                    cs.add_clause([r]);
                }
            }
        }
    }
    Ok(())
}

/// Reads the program tree from a model and validates it.
pub fn decode_tree(tv: &TreeVars, model: &Model, vars: &VarSet) -> Result<ProgramTree, EncodeError> {
    let k = (0..tv.n).take_while(|&t| model.value(tv.used[t])).count();
    let mut nodes = Vec::with_capacity(k);
    for t in 0..k {
        let s = model.bitvec_value(&tv.tau[t]) as usize;
        let label = tv
            .labels
            .get(s)
            .cloned()
            .ok_or_else(|| EncodeError::Inconsistent(format!("label index {s} out of range")))?;
        let left = model.value(tv.left[t]).then_some(t + 1);
        let right = model
            .value(tv.has_right[t])
            .then(|| model.bitvec_value(&tv.right[t]) as usize);
        nodes.push(TreeNode { label, left, right });
    }
    let tree = ProgramTree { nodes };
    let validation = validate_program_tree(&tree, vars);
    if !validation.violations.is_empty() {
        return Err(EncodeError::Inconsistent(format!("{:?}", validation.violations)));
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;
    use crate::sat::{SolveResult, SolverChoice};

    fn inout_vars() -> VarSet {
        VarSet::inout(&["in".into()], &["out".into()], 0)
    }

    fn count_trees(n: usize, vars: &VarSet) -> usize {
        // Enumerate models by blocking the label/used assignments.
        let mut cs = ConstraintSystem::new();
        let tv = encode_tree(&mut cs, &vars.alphabet(), n).unwrap();
        let mut count = 0;
        loop {
            match cs.solve(&SolverChoice::Internal, None).unwrap() {
                SolveResult::Sat(m) => {
                    let tree = decode_tree(&tv, &m, vars).unwrap();
                    count += (tree.len() == n) as usize;
                    let mut block = Vec::new();
                    for t in 0..n {
                        block.push(if m.value(tv.used[t]) { -tv.used[t] } else { tv.used[t] });
                        if m.value(tv.used[t]) {
                            for &b in tv.tau[t].iter().chain(&tv.right[t]) {
                                block.push(if m.value(b) { -b } else { b });
                            }
                        }
                    }
                    cs.add_clause(block);
                }
                _ => return count,
            }
        }
    }

    #[test]
    fn single_node_trees_are_leaf_statements() {
        // skip and inout are the only one-node statements.
        assert_eq!(count_trees(1, &inout_vars()), 2);
    }

    #[test]
    fn two_node_trees_are_assignments() {
        // `out = e` for e in tt, ff, in, out; all other statements with
        // children need at least three nodes.
        assert_eq!(count_trees(2, &inout_vars()), 4);
    }

    #[test]
    fn fixed_program_round_trips() {
        let vars = inout_vars();
        let (tree, vars) = parse_program("while (tt) { out = in; InOut }", &vars).unwrap();
        let mut cs = ConstraintSystem::new();
        let tv = encode_tree(&mut cs, &vars.alphabet(), 8).unwrap();
        fix_tree(&mut cs, &tv, &tree).unwrap();
        match cs.solve(&SolverChoice::Internal, None).unwrap() {
            SolveResult::Sat(m) => assert_eq!(decode_tree(&tv, &m, &vars).unwrap(), tree),
            other => panic!("expected SAT, got {other:?}"),
        }
    }

    #[test]
    fn mu_prime_up_lists_all_parent_candidates() {
        let mut cs = ConstraintSystem::new();
        let tv = encode_tree(&mut cs, &inout_vars().alphabet(), 5).unwrap();
        let up = tv.mu_prime(3, Move::U);
        let targets: Vec<(usize, Dir)> = up.iter().map(|(_, t, d)| (*t, *d)).collect();
        assert_eq!(targets, vec![(2, Dir::L), (0, Dir::R), (1, Dir::R)]);
        assert!(tv.mu_prime(0, Move::U).is_empty());
        assert_eq!(tv.mu_prime(1, Move::L)[0].0, vec![tv.left[1]]);
    }
}
