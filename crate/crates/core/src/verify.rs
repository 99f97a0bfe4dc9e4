//! Independent verification of a program against an LTL specification.
//!
//! The program is turned into a Mealy machine by the interpreter, composed
//! with the universal co-Büchi automaton of the specification, and the run
//! graph is checked twice: by SCC analysis and by constructing annotations.
//! None of this shares code with the SAT encodings.

use thiserror::Error;

use crate::ltl::{negate_and_dualize, LtlFormula};
use crate::program::{extract_mealy, validate_program_tree, MealyMachine, ProgramTree, RunError, Trace, VarSet};
use crate::rungraph::{
    check_annotation_valid, construct_annotations, graph_satisfies_acceptance, run_graph_word_on_mealy,
    violating_lasso, Acceptance, RunGraph,
};

pub const DEFAULT_CONFIG_BUDGET: usize = 100_000;
pub const DEFAULT_STEP_BUDGET: usize = 100_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("program is not well-formed: {0}")]
    Invalid(String),
    #[error("program is not reactive: {0}")]
    NotReactive(#[from] RunError),
    #[error("SCC check ({scc}) and annotation check ({annotations}) disagree")]
    OracleDisagreement { scc: bool, annotations: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// A lasso of `(input, output)` letters on which the program violates
    /// the specification.
    Fail {
        stem: Trace,
        cycle: Trace,
    },
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub verdict: Verdict,
    pub mealy_states: usize,
    pub automaton_states: usize,
    pub run_graph_vertices: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Verifies `tree` against `formula` (atoms: inputs then outputs).
pub fn verify_program(tree: &ProgramTree, vars: &VarSet, formula: &LtlFormula) -> Result<VerifyReport, VerifyError> {
    let validation = validate_program_tree(tree, vars);
    if !validation.violations.is_empty() {
        return Err(VerifyError::Invalid(format!("{:?}", validation.violations)));
    }
    let mealy = extract_mealy(tree, vars, DEFAULT_CONFIG_BUDGET, DEFAULT_STEP_BUDGET)?;
    verify_mealy(&mealy, formula)
}

/// Verifies a Mealy machine against `formula`.
pub fn verify_mealy(mealy: &MealyMachine, formula: &LtlFormula) -> Result<VerifyReport, VerifyError> {
    let ucb = negate_and_dualize(formula, mealy.num_inputs + mealy.num_outputs);
    let graph = run_graph_word_on_mealy(&ucb, mealy);
    let acc = Acceptance::CoBuchi(ucb.accepting.clone());
    let scc = graph_satisfies_acceptance(&graph, &acc);
    let annotations = annotations_witness(&graph, &acc);
    if scc != annotations {
        return Err(VerifyError::OracleDisagreement { scc, annotations });
    }
    let verdict = if scc {
        Verdict::Pass
    } else {
        let (stem, cycle) = violating_lasso(&graph, &acc).expect("violated condition has a lasso");
        let (stem, cycle) = lasso_letters(&graph, mealy, &ucb, &stem, &cycle);
        Verdict::Fail { stem, cycle }
    };
    Ok(VerifyReport {
        verdict,
        mealy_states: mealy.num_states(),
        automaton_states: ucb.num_states(),
        run_graph_vertices: graph.num_vertices(),
    })
}

fn annotations_witness(graph: &RunGraph, acc: &Acceptance) -> bool {
    let bound = graph.num_vertices();
    match construct_annotations(graph, acc) {
        None => false,
        Some(lambdas) => acc
            .relations()
            .iter()
            .zip(&lambdas)
            .all(|(rel, l)| l.iter().all(|&x| x <= bound) && check_annotation_valid(graph, rel, l)),
    }
}

/// Recovers the I/O letters along a lasso of run-graph vertices.
fn lasso_letters(
    graph: &RunGraph,
    mealy: &MealyMachine,
    ucb: &crate::ltl::WordAutomaton,
    stem: &[usize],
    cycle: &[usize],
) -> (Trace, Trace) {
    let nm = mealy.num_states();
    let letter = |v: usize, w: usize| -> (u32, u32) {
        let (q, m) = (v / nm, v % nm);
        let (q2, m2) = (w / nm, w % nm);
        debug_assert!(graph.edges[v].contains(&w));
        (0..1u32 << mealy.num_inputs)
            .map(|i| (i, mealy.output[m][i as usize]))
            .find(|&(i, o)| {
                mealy.next[m][i as usize] == m2 && ucb.successors(q, i | (o << mealy.num_inputs)).contains(&q2)
            })
            .expect("every run-graph edge has a letter")
    };
    let mut path: Vec<usize> = stem.to_vec();
    path.extend(cycle);
    path.push(cycle[0]);
    let letters: Trace = path.windows(2).map(|w| letter(w[0], w[1])).collect();
    let (s, c) = letters.split_at(stem.len());
    (s.to_vec(), c.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_spec;
    use crate::program::parse_program;

    fn run(program: &str, spec: &str) -> VerifyReport {
        let sf = parse_spec(spec).unwrap();
        let vars = VarSet::inout(&sf.alphabet.inputs, &sf.alphabet.outputs, 0);
        let (tree, vars) = parse_program(program, &vars).unwrap();
        verify_program(&tree, &vars, &sf.formula).unwrap()
    }

    #[test]
    fn copy_passes_copy_spec() {
        let r = run(
            "while (tt) { out = in; InOut }",
            "inputs: in; outputs: out; spec: G(in <-> out);",
        );
        assert!(r.passed());
    }

    #[test]
    fn copy_fails_delayed_spec_with_violating_lasso() {
        let spec = "inputs: in; outputs: out; spec: G(in <-> X out) & !out;";
        let r = run("while (tt) { out = in; InOut }", spec);
        let Verdict::Fail { stem, cycle } = r.verdict else {
            panic!("expected FAIL");
        };
        assert!(!cycle.is_empty());
        let enc = |t: &Trace| t.iter().map(|&(i, o)| i | (o << 1)).collect::<Vec<_>>();
        let nba = crate::ltl::ltl_to_nba(&parse_spec(spec).unwrap().formula, 2);
        assert!(!nba.accepts_lasso(&enc(&stem), &enc(&cycle)));
    }

    #[test]
    fn terminating_program_is_an_error() {
        let sf = parse_spec("inputs: in; outputs: out; spec: tt;").unwrap();
        let vars = VarSet::inout(&sf.alphabet.inputs, &sf.alphabet.outputs, 0);
        let (tree, vars) = parse_program("InOut", &vars).unwrap();
        assert!(matches!(
            verify_program(&tree, &vars, &sf.formula),
            Err(VerifyError::NotReactive(_))
        ));
    }
}
