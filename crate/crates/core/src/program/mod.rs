//! The reactive while-language: labels, program trees, static checks and
//! Boolean expression evaluation.
//!
//! A program tree is stored as a flat vector of nodes with node 0 as the
//! root. Children are referenced by index; the only shape rule beyond label
//! arity is that a node with one child has it on the left.

mod interp;
mod text;

pub use interp::{eval_bool_expr, extract_mealy, run_program, MealyMachine, RunError, Trace};
pub use text::{parse_program, print_program, ParseError};

use std::fmt;

use serde::Serialize;

/// How a program talks to its environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Dialect {
    /// Separate `input (b, ..)` / `output (b, ..)` statements over any variables.
    Separate,
    /// A single `InOut` statement; the first `N_I` variables hold inputs and
    /// the next `N_O` hold outputs.
    InOut,
}

/// The Boolean variables of a program together with the I/O arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    pub names: Vec<String>,
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub dialect: Dialect,
}

impl VarSet {
    /// Variables for the `InOut` dialect: inputs, outputs, then `extra`
    /// additional variables named `var` (one) or `var0`, `var1`, ...
    pub fn inout(inputs: &[String], outputs: &[String], extra: usize) -> Self {
        let mut names: Vec<String> = inputs.iter().chain(outputs).cloned().collect();
        let mut k = 0;
        while names.len() < inputs.len() + outputs.len() + extra {
            let candidate = if extra == 1 {
                "var".to_string()
            } else {
                format!("var{k}")
            };
            k += 1;
            if !names.contains(&candidate) {
                names.push(candidate);
            }
        }
        VarSet {
            names,
            num_inputs: inputs.len(),
            num_outputs: outputs.len(),
            dialect: Dialect::InOut,
        }
    }

    /// `count` free variables `b0, b1, ...` for the separate-statement dialect.
    pub fn separate(num_inputs: usize, num_outputs: usize, count: usize) -> Self {
        VarSet {
            names: (0..count).map(|i| format!("b{i}")).collect(),
            num_inputs,
            num_outputs,
            dialect: Dialect::Separate,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Variables beyond those designated for inputs and outputs.
    pub fn additional(&self) -> usize {
        self.names.len().saturating_sub(self.num_inputs + self.num_outputs)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Bit mask of the designated input variables (`InOut` dialect only).
    pub fn input_mask(&self) -> u32 {
        match self.dialect {
            Dialect::InOut => (1 << self.num_inputs) - 1,
            Dialect::Separate => 0,
        }
    }

    /// Output vector held by the designated output variables.
    pub fn designated_outputs(&self, vals: u32) -> u32 {
        (vals >> self.num_inputs) & ((1 << self.num_outputs) - 1)
    }

    /// Every label usable in a program over these variables.
    pub fn alphabet(&self) -> Vec<Label> {
        use Label::*;
        let n = self.names.len();
        let mut labels = vec![Not, Or, Seq, If, Then, While, Skip, True, False];
        labels.extend((0..n).map(Var));
        match self.dialect {
            Dialect::InOut => {
                labels.extend((self.num_inputs..n).map(Assign));
                labels.push(InOut);
            }
            Dialect::Separate => {
                labels.extend((0..n).map(Assign));
                for v in tuples(n, self.num_inputs) {
                    let mut sorted = v.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() == v.len() {
                        labels.push(Input(v));
                    }
                }
                labels.extend(tuples(n, self.num_outputs).into_iter().map(Output));
            }
        }
        labels
    }
}

fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |b| {
                    let mut t = t.clone();
                    t.push(b);
                    t
                })
            })
            .collect();
    }
    out
}

/// Node label of a program tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Not,
    Or,
    Seq,
    If,
    Then,
    While,
    Skip,
    True,
    False,
    Var(usize),
    Assign(usize),
    Input(Vec<usize>),
    Output(Vec<usize>),
    InOut,
}

/// Syntactic position of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Context {
    Stmt,
    Expr,
    /// The right child of `if`, holding both branches.
    Branches,
}

impl Label {
    /// Number of children the label requires.
    pub fn arity(&self) -> usize {
        use Label::*;
        match self {
            Not | Assign(_) => 1,
            Or | Seq | If | Then | While => 2,
            Skip | True | False | Var(_) | Input(_) | Output(_) | InOut => 0,
        }
    }

    pub fn context(&self) -> Context {
        use Label::*;
        match self {
            Not | Or | True | False | Var(_) => Context::Expr,
            Then => Context::Branches,
            _ => Context::Stmt,
        }
    }

    /// Required contexts of the left and right child.
    pub fn child_contexts(&self) -> [Option<Context>; 2] {
        use Context::*;
        use Label::*;
        match self {
            Not | Assign(_) => [Some(Expr), None],
            Or => [Some(Expr), Some(Expr)],
            If => [Some(Expr), Some(Branches)],
            While => [Some(Expr), Some(Stmt)],
            Seq | Then => [Some(Stmt), Some(Stmt)],
            _ => [None, None],
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Label::Input(_) | Label::Output(_) | Label::InOut)
    }

    /// Short name used in dumps, e.g. `assign(out)`.
    pub fn display<'a>(&'a self, vars: &'a VarSet) -> DisplayLabel<'a> {
        DisplayLabel { label: self, vars }
    }
}

pub struct DisplayLabel<'a> {
    label: &'a Label,
    vars: &'a VarSet,
}

impl fmt::Display for DisplayLabel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Label::*;
        let name = |b: &usize| self.vars.names.get(*b).cloned().unwrap_or_else(|| format!("#{b}"));
        let list = |v: &[usize]| v.iter().map(name).collect::<Vec<_>>().join(",");
        match self.label {
            Not => write!(f, "not"),
            Or => write!(f, "or"),
            Seq => write!(f, ";"),
            If => write!(f, "if"),
            Then => write!(f, "then"),
            While => write!(f, "while"),
            Skip => write!(f, "skip"),
            True => write!(f, "tt"),
            False => write!(f, "ff"),
            Var(b) => write!(f, "{}", name(b)),
            Assign(b) => write!(f, "assign({})", name(b)),
            Input(v) => write!(f, "input({})", list(v)),
            Output(v) => write!(f, "output({})", list(v)),
            InOut => write!(f, "InOut"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Label,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// A program tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramTree {
    pub nodes: Vec<TreeNode>,
}

/// A broken syntactic rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    Empty,
    /// A child index is out of range, shared, or cyclic, or a node is unreachable.
    NotATree {
        node: usize,
    },
    RightChildOnly {
        node: usize,
    },
    Arity {
        node: usize,
        expected: usize,
        found: usize,
    },
    Context {
        node: usize,
        expected: Context,
    },
    UnknownVariable {
        node: usize,
    },
    VectorLength {
        node: usize,
    },
    RepeatedInputVariable {
        node: usize,
    },
    /// Assignment to a designated input variable in the `InOut` dialect.
    AssignsInput {
        node: usize,
    },
    WrongDialect {
        node: usize,
    },
}

/// Result of [`validate_program_tree`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// Whether inputs and outputs alternate (starting with an input) on every
    /// control path. Always true in the `InOut` dialect.
    pub alternates: bool,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ProgramTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label(&self, n: usize) -> &Label {
        &self.nodes[n].label
    }

    /// Parent of every node (`None` for the root and detached nodes).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for c in [n.left, n.right].into_iter().flatten() {
                if c < parent.len() {
                    parent[c] = Some(i);
                }
            }
        }
        parent
    }

    /// `{L,R}*` address of every reachable node, in preorder.
    pub fn paths(&self) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, String::new())];
        let mut seen = vec![false; self.nodes.len()];
        while let Some((n, p)) = stack.pop() {
            if n >= self.nodes.len() || seen[n] {
                continue;
            }
            seen[n] = true;
            if let Some(r) = self.nodes[n].right {
                stack.push((r, format!("{p}R")));
            }
            if let Some(l) = self.nodes[n].left {
                stack.push((l, format!("{p}L")));
            }
            out.push((n, p));
        }
        out
    }

    /// Renumbers nodes in preorder so that every left child directly follows
    /// its parent; detached nodes are dropped.
    pub fn canonical(&self) -> ProgramTree {
        let order: Vec<usize> = self.paths().into_iter().map(|(n, _)| n).collect();
        let mut index = vec![usize::MAX; self.nodes.len()];
        for (i, &n) in order.iter().enumerate() {
            index[n] = i;
        }
        ProgramTree {
            nodes: order
                .iter()
                .map(|&n| {
                    let node = &self.nodes[n];
                    TreeNode {
                        label: node.label.clone(),
                        left: node.left.map(|c| index[c]),
                        right: node.right.map(|c| index[c]),
                    }
                })
                .collect(),
        }
    }

    /// JSON list of `{path, label}` objects in preorder.
    pub fn to_json(&self, vars: &VarSet) -> String {
        #[derive(Serialize)]
        struct Entry {
            path: String,
            label: String,
        }
        let entries: Vec<Entry> = self
            .paths()
            .into_iter()
            .map(|(n, path)| Entry {
                path,
                label: self.nodes[n].label.display(vars).to_string(),
            })
            .collect();
        serde_json::to_string_pretty(&entries).expect("serializable")
    }
}

/// Checks the grammar, label arities, the left-child rule and variable use,
/// and reports whether I/O statements alternate.
pub fn validate_program_tree(tree: &ProgramTree, vars: &VarSet) -> Validation {
    let mut violations = Vec::new();
    let n = tree.nodes.len();
    if n == 0 {
        return Validation {
            violations: vec![Violation::Empty],
            alternates: false,
        };
    }
    let mut indegree = vec![0usize; n];
    for (i, node) in tree.nodes.iter().enumerate() {
        for c in [node.left, node.right].into_iter().flatten() {
            if c >= n {
                violations.push(Violation::NotATree { node: i });
            } else {
                indegree[c] += 1;
            }
        }
    }
    if indegree[0] > 0 {
        violations.push(Violation::NotATree { node: 0 });
    }
    let reached: Vec<usize> = tree.paths().into_iter().map(|(i, _)| i).collect();
    let mut is_reached = vec![false; n];
    for &i in &reached {
        is_reached[i] = true;
    }
    for i in 1..n {
        if indegree[i] > 1 || !is_reached[i] {
            violations.push(Violation::NotATree { node: i });
        }
    }
    if !violations.is_empty() {
        return Validation {
            violations,
            alternates: false,
        };
    }

    let mut expected = vec![Context::Stmt; n];
    for &i in &reached {
        let node = &tree.nodes[i];
        let label = &node.label;
        if node.left.is_none() && node.right.is_some() {
            violations.push(Violation::RightChildOnly { node: i });
        }
        let found = node.left.is_some() as usize + node.right.is_some() as usize;
        if found != label.arity() {
            violations.push(Violation::Arity {
                node: i,
                expected: label.arity(),
                found,
            });
        }
        if label.context() != expected[i] {
            violations.push(Violation::Context {
                node: i,
                expected: expected[i],
            });
        }
        let [cl, cr] = label.child_contexts();
        if let (Some(c), Some(ctx)) = (node.left, cl) {
            expected[c] = ctx;
        }
        if let (Some(c), Some(ctx)) = (node.right, cr) {
            expected[c] = ctx;
        }
        let nv = vars.len();
        match label {
            Label::Var(b) | Label::Assign(b) if *b >= nv => violations.push(Violation::UnknownVariable { node: i }),
            Label::Assign(b) if vars.dialect == Dialect::InOut && *b < vars.num_inputs => {
                violations.push(Violation::AssignsInput { node: i })
            }
            Label::Input(v) | Label::Output(v) => {
                if vars.dialect != Dialect::Separate {
                    violations.push(Violation::WrongDialect { node: i });
                }
                let arity = if matches!(label, Label::Input(_)) {
                    vars.num_inputs
                } else {
                    vars.num_outputs
                };
                if v.len() != arity {
                    violations.push(Violation::VectorLength { node: i });
                }
                if v.iter().any(|&b| b >= nv) {
                    violations.push(Violation::UnknownVariable { node: i });
                }
                if matches!(label, Label::Input(_)) {
                    let mut s = v.clone();
                    s.sort_unstable();
                    s.dedup();
                    if s.len() != v.len() {
                        violations.push(Violation::RepeatedInputVariable { node: i });
                    }
                }
            }
            Label::InOut if vars.dialect != Dialect::InOut => violations.push(Violation::WrongDialect { node: i }),
            _ => {}
        }
    }
    let alternates = violations.is_empty() && alternation_holds(tree);
    Validation { violations, alternates }
}

const INP: u8 = 1;
const OUT: u8 = 2;

/// Abstract interpretation over the pending-I/O mode.
fn alternation_holds(tree: &ProgramTree) -> bool {
    fn flow(tree: &ProgramTree, n: usize, m: u8, ok: &mut bool) -> u8 {
        let node = &tree.nodes[n];
        match node.label {
            Label::Seq => {
                let mid = flow(tree, node.left.unwrap(), m, ok);
                flow(tree, node.right.unwrap(), mid, ok)
            }
            Label::If => {
                let then = &tree.nodes[node.right.unwrap()];
                flow(tree, then.left.unwrap(), m, ok) | flow(tree, then.right.unwrap(), m, ok)
            }
            Label::While => {
                let mut head = m;
                loop {
                    let next = m | flow(tree, node.right.unwrap(), head, ok);
                    if next == head {
                        return head;
                    }
                    head = next;
                }
            }
            Label::Input(_) => {
                if m & OUT != 0 {
                    *ok = false;
                }
                if m == 0 {
                    0
                } else {
                    OUT
                }
            }
            Label::Output(_) => {
                if m & INP != 0 {
                    *ok = false;
                }
                if m == 0 {
                    0
                } else {
                    INP
                }
            }
            _ => m,
        }
    }
    let mut ok = true;
    flow(tree, 0, INP, &mut ok);
    ok
}
