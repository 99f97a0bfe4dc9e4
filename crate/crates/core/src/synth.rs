//! Iterative-deepening synthesis: try node budgets smallest first, decode the
//! first satisfiable instance and verify the program independently.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::encode::direct::{encode_direct, ExtractedStructure};
use crate::encode::twoway::encode_phi;
use crate::encode::{forbid_redundant, EncodeError};
use crate::ltl::{ltl_to_nba, negate_and_dualize, AlphabetSpec, LtlFormula};
use crate::program::{Dialect, Label, ProgramTree, VarSet};
use crate::sat::{ConstraintSystem, Model, SatError, SolveResult, SolverChoice};
use crate::twoway::{build_b, build_streett_product, complement_to_ucb, TwoWayAutomaton, TwoWayError};
use crate::verify::{verify_program, VerifyError, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    TwoWay,
    Direct,
}

impl Encoding {
    /// The dialect each encoding uses unless told otherwise.
    pub fn default_dialect(self) -> Dialect {
        match self {
            Encoding::TwoWay => Dialect::Separate,
            Encoding::Direct => Dialect::InOut,
        }
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "twoway" | "two-way" => Ok(Encoding::TwoWay),
            "direct" => Ok(Encoding::Direct),
            other => Err(format!("unknown encoding `{other}` (expected twoway or direct)")),
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::TwoWay => "twoway",
            Encoding::Direct => "direct",
        })
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Automaton(#[from] TwoWayError),
    #[error("solver failed at {nodes} nodes: {source}")]
    Solver { nodes: usize, source: SatError },
    #[error("synthesized program could not be verified: {0}")]
    Verification(#[from] VerifyError),
    #[error("synthesized program failed verification (internal error):\n{0}")]
    Unsound(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Builds the variable set for `total` program variables.
pub fn make_vars(alphabet: &AlphabetSpec, total: usize, dialect: Dialect) -> Result<VarSet, SynthError> {
    let (ni, no) = (alphabet.num_inputs(), alphabet.num_outputs());
    match dialect {
        Dialect::InOut => {
            if total < ni + no {
                return Err(SynthError::Config(format!(
                    "the inout dialect needs at least {} variables (one per input and output), got {total}",
                    ni + no
                )));
            }
            Ok(VarSet::inout(&alphabet.inputs, &alphabet.outputs, total - ni - no))
        }
        Dialect::Separate => {
            if total < ni.max(no) {
                return Err(SynthError::Config(format!(
                    "at least {} variables are required, got {total}",
                    ni.max(no)
                )));
            }
            Ok(VarSet::separate(ni, no, total))
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub encoding: Encoding,
    pub vars: VarSet,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub bound: Option<usize>,
    pub structure_bound: Option<usize>,
    pub solver: SolverChoice,
    pub timeout: Option<Duration>,
    /// Keep going after a timed-out step instead of stopping.
    pub continue_on_timeout: bool,
    /// Directory for DIMACS and name-map dumps.
    pub dump_dir: Option<PathBuf>,
    /// Exclude program shapes that have a smaller or equally large
    /// equivalent; does not change the size of the smallest program.
    pub symmetry_breaking: bool,
}

impl SynthConfig {
    pub fn new(encoding: Encoding, vars: VarSet, max_nodes: usize) -> Self {
        SynthConfig {
            encoding,
            vars,
            min_nodes: 1,
            max_nodes,
            bound: None,
            structure_bound: None,
            solver: SolverChoice::default(),
            timeout: None,
            continue_on_timeout: false,
            dump_dir: None,
            symmetry_breaking: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Sat,
    Unsat,
    Timeout,
}

impl fmt::Display for StepOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepOutcome::Sat => "SAT",
            StepOutcome::Unsat => "UNSAT",
            StepOutcome::Timeout => "TIMEOUT",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub nodes: usize,
    pub num_vars: usize,
    pub num_clauses: usize,
    pub outcome: StepOutcome,
    pub encode_time: Duration,
    pub solve_time: Duration,
}

#[derive(Clone, Debug)]
pub struct Realized {
    pub program: ProgramTree,
    pub vars: VarSet,
    pub verification: VerifyReport,
    /// Extracted transition structure (direct encoding only).
    pub structure: Option<ExtractedStructure>,
    /// False if a smaller budget timed out, so minimality is not established.
    pub minimal: bool,
}

#[derive(Clone, Debug)]
pub enum SynthOutcome {
    Realized(Box<Realized>),
    /// Every budget up to the maximum was unsatisfiable.
    Unrealizable,
    /// A step timed out and the schedule stopped there.
    TimedOut {
        nodes: usize,
    },
}

#[derive(Clone, Debug)]
pub struct SynthResult {
    pub outcome: SynthOutcome,
    pub steps: Vec<StepReport>,
    /// `|B′|`: reachable states of the two-way product (two-way encoding only).
    pub automaton_states: Option<usize>,
    pub total_time: Duration,
}

/// The two-way Streett automaton `B′` for `formula` over `vars`.
pub fn streett_automaton(formula: &LtlFormula, vars: &VarSet) -> Result<TwoWayAutomaton, SynthError> {
    let atoms = vars.num_inputs + vars.num_outputs;
    let neg = ltl_to_nba(&LtlFormula::not(formula.clone()), atoms);
    Ok(build_streett_product(&complement_to_ucb(&build_b(&neg, vars)?)))
}

enum Prepared {
    TwoWay(Box<TwoWayAutomaton>),
    Direct(crate::ltl::WordAutomaton),
}

enum Instance {
    TwoWay(crate::encode::twoway::TwoWayInstance),
    Direct(crate::encode::direct::DirectInstance),
}

impl Instance {
    fn cs(&self) -> &ConstraintSystem {
        match self {
            Instance::TwoWay(i) => &i.cs,
            Instance::Direct(i) => &i.cs,
        }
    }

    fn forbid_redundant(&mut self) {
        match self {
            Instance::TwoWay(i) => forbid_redundant(&mut i.cs, &i.tree),
            Instance::Direct(i) => forbid_redundant(&mut i.cs, &i.tree),
        }
    }

    fn decode(&self, m: &Model) -> Result<(ProgramTree, Option<ExtractedStructure>), EncodeError> {
        match self {
            Instance::TwoWay(i) => Ok((i.decode_program(m)?, None)),
            Instance::Direct(i) => {
                let (tree, st) = i.decode_direct(m)?;
                Ok((tree, Some(st)))
            }
        }
    }
}

/// Runs the schedule `min_nodes..=max_nodes` and returns the first program.
pub fn synthesize(formula: &LtlFormula, cfg: &SynthConfig) -> Result<SynthResult, SynthError> {
    let started = Instant::now();
    if cfg.min_nodes == 0 || cfg.max_nodes < cfg.min_nodes {
        return Err(SynthError::Config(format!(
            "invalid node range {}..={}",
            cfg.min_nodes, cfg.max_nodes
        )));
    }
    let atoms = cfg.vars.num_inputs + cfg.vars.num_outputs;
    let prepared = match cfg.encoding {
        Encoding::TwoWay => Prepared::TwoWay(Box::new(streett_automaton(formula, &cfg.vars)?)),
        Encoding::Direct => {
            if cfg.vars.dialect != Dialect::InOut {
                return Err(EncodeError::NeedsInOut.into());
            }
            Prepared::Direct(negate_and_dualize(formula, atoms))
        }
    };
    let automaton_states = match &prepared {
        Prepared::TwoWay(a) => Some(a.num_states()),
        Prepared::Direct(_) => None,
    };
    let mut steps = Vec::new();
    let mut timed_out = false;
    for nodes in cfg.min_nodes..=cfg.max_nodes {
        let t0 = Instant::now();
        let mut inst = match &prepared {
            Prepared::TwoWay(a) => Instance::TwoWay(encode_phi(a, nodes, cfg.bound)?),
            Prepared::Direct(ucb) => Instance::Direct(encode_direct(ucb, &cfg.vars, nodes, cfg.structure_bound)?),
        };
        if cfg.symmetry_breaking {
            inst.forbid_redundant();
        }
        let encode_time = t0.elapsed();
        if let Some(dir) = &cfg.dump_dir {
            std::fs::create_dir_all(dir)?;
            let stem = dir.join(format!("{}-{nodes}", cfg.encoding));
            std::fs::write(stem.with_extension("cnf"), inst.cs().to_dimacs())?;
            std::fs::write(stem.with_extension("map"), inst.cs().name_map())?;
        }
        let t1 = Instant::now();
        let result = inst
            .cs()
            .solve(&cfg.solver, cfg.timeout)
            .map_err(|source| SynthError::Solver { nodes, source })?;
        let solve_time = t1.elapsed();
        let outcome = match &result {
            SolveResult::Sat(_) => StepOutcome::Sat,
            SolveResult::Unsat => StepOutcome::Unsat,
            SolveResult::Timeout => StepOutcome::Timeout,
        };
        steps.push(StepReport {
            nodes,
            num_vars: inst.cs().num_vars(),
            num_clauses: inst.cs().num_clauses(),
            outcome,
            encode_time,
            solve_time,
        });
        match result {
            SolveResult::Unsat => {}
            SolveResult::Timeout => {
                timed_out = true;
                if !cfg.continue_on_timeout {
                    return Ok(SynthResult {
                        outcome: SynthOutcome::TimedOut { nodes },
                        steps,
                        automaton_states,
                        total_time: started.elapsed(),
                    });
                }
            }
            SolveResult::Sat(model) => {
                let (program, structure) = inst.decode(&model)?;
                if let (Some(dir), Some(st)) = (&cfg.dump_dir, &structure) {
                    let path = dir.join(format!("{}-{nodes}.structure", cfg.encoding));
                    std::fs::write(path, st.dump())?;
                }
                let verification = verify_program(&program, &cfg.vars, formula)?;
                if !verification.passed() {
                    return Err(SynthError::Unsound(crate::program::print_program(&program, &cfg.vars)));
                }
                return Ok(SynthResult {
                    outcome: SynthOutcome::Realized(Box::new(Realized {
                        program,
                        vars: cfg.vars.clone(),
                        verification,
                        structure,
                        minimal: !timed_out,
                    })),
                    steps,
                    automaton_states,
                    total_time: started.elapsed(),
                });
            }
        }
    }
    Ok(SynthResult {
        outcome: if timed_out {
            SynthOutcome::TimedOut { nodes: cfg.max_nodes }
        } else {
            SynthOutcome::Unrealizable
        },
        steps,
        automaton_states,
        total_time: started.elapsed(),
    })
}

/// Number of variables a program references beyond the designated input
/// and output variables.
pub fn additional_variables(tree: &ProgramTree, vars: &VarSet) -> usize {
    let mut used = vec![false; vars.len()];
    for node in &tree.nodes {
        match &node.label {
            Label::Var(b) | Label::Assign(b) => used[*b] = true,
            Label::Input(v) | Label::Output(v) => v.iter().for_each(|&b| used[b] = true),
            _ => {}
        }
    }
    let count = used.iter().filter(|&&u| u).count();
    match vars.dialect {
        Dialect::InOut => used[vars.num_inputs + vars.num_outputs..]
            .iter()
            .filter(|&&u| u)
            .count(),
        Dialect::Separate => count.saturating_sub(vars.num_inputs.max(vars.num_outputs)),
    }
}
