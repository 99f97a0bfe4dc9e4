//! LTL specifications over declared input/output bits and their translation
//! into word automata.
//!
//! Letters are total assignments to `inputs ∪ outputs`, packed into a `u32`:
//! bit `k` for `k < N_I` is input `k`, bit `N_I + j` is output `j`.

mod automaton;
mod hoa;
mod parse;
mod tableau;

pub use automaton::{AcceptanceKind, WordAutomaton};
pub use hoa::{read_automaton, write_automaton};
pub use parse::{parse_formula, parse_spec, SpecFile};
pub use tableau::ltl_to_nba;

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtlError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared atom `{0}`")]
    UndeclaredAtom(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("invalid automaton file: {0}")]
    Automaton(String),
}

/// Declared input and output bits of a specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetSpec {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl AlphabetSpec {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>) -> Result<Self, LtlError> {
        let mut seen = std::collections::HashSet::new();
        for name in inputs.iter().chain(outputs.iter()) {
            if !seen.insert(name.as_str()) {
                return Err(LtlError::DuplicateDeclaration(name.clone()));
            }
        }
        if inputs.is_empty() {
            return Err(LtlError::MissingSection("inputs"));
        }
        if outputs.is_empty() {
            return Err(LtlError::MissingSection("outputs"));
        }
        Ok(AlphabetSpec { inputs, outputs })
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.num_atoms()
    }

    /// Atom index of a declared name.
    pub fn atom(&self, name: &str) -> Option<usize> {
        self.inputs.iter().chain(self.outputs.iter()).position(|n| n == name)
    }

    pub fn atom_name(&self, atom: usize) -> &str {
        if atom < self.inputs.len() {
            &self.inputs[atom]
        } else {
            &self.outputs[atom - self.inputs.len()]
        }
    }

    pub fn letter(&self, input: u32, output: u32) -> u32 {
        input | (output << self.inputs.len())
    }

    pub fn split_letter(&self, letter: u32) -> (u32, u32) {
        let ni = self.inputs.len();
        (letter & ((1 << ni) - 1), letter >> ni)
    }
}

/// LTL formula over atom indices of an [`AlphabetSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LtlFormula {
    True,
    False,
    Atom(usize),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Iff(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Finally(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
}

impl LtlFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: LtlFormula) -> Self {
        LtlFormula::Not(Box::new(f))
    }
    pub fn and(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Iff(Box::new(a), Box::new(b))
    }
    pub fn next(f: LtlFormula) -> Self {
        LtlFormula::Next(Box::new(f))
    }
    pub fn until(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Until(Box::new(a), Box::new(b))
    }
    pub fn finally(f: LtlFormula) -> Self {
        LtlFormula::Finally(Box::new(f))
    }
    pub fn globally(f: LtlFormula) -> Self {
        LtlFormula::Globally(Box::new(f))
    }

    /// Largest atom index used, if any.
    pub fn max_atom(&self) -> Option<usize> {
        use LtlFormula::*;
        match self {
            True | False => None,
            Atom(a) => Some(*a),
            Not(f) | Next(f) | Finally(f) | Globally(f) => f.max_atom(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) => match (a.max_atom(), b.max_atom()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Nesting depth; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        use LtlFormula::*;
        match self {
            True | False | Atom(_) => 0,
            Not(f) | Next(f) | Finally(f) | Globally(f) => 1 + f.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a AlphabetSpec) -> DisplayLtl<'a> {
        DisplayLtl {
            formula: self,
            alphabet,
        }
    }
}

/// Prints a formula in the spec-file syntax.
pub struct DisplayLtl<'a> {
    formula: &'a LtlFormula,
    alphabet: &'a AlphabetSpec,
}

impl fmt::Display for DisplayLtl<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(g: &LtlFormula, a: &AlphabetSpec, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            use LtlFormula::*;
            match g {
                True => write!(f, "tt"),
                False => write!(f, "ff"),
                Atom(i) => write!(f, "{}", a.atom_name(*i)),
                Not(x) => {
                    write!(f, "!")?;
                    go(x, a, f)
                }
                Next(x) => {
                    write!(f, "X ")?;
                    go(x, a, f)
                }
                Finally(x) => {
                    write!(f, "F ")?;
                    go(x, a, f)
                }
                Globally(x) => {
                    write!(f, "G ")?;
                    go(x, a, f)
                }
                And(x, y) | Or(x, y) | Implies(x, y) | Iff(x, y) | Until(x, y) => {
                    let op = match g {
                        And(..) => "&",
                        Or(..) => "|",
                        Implies(..) => "->",
                        Iff(..) => "<->",
                        _ => "U",
                    };
                    write!(f, "(")?;
                    go(x, a, f)?;
                    write!(f, " {op} ")?;
                    go(y, a, f)?;
                    write!(f, ")")
                }
            }
        }
        go(self.formula, self.alphabet, f)
    }
}

/// Universal co-Büchi automaton for `f`: the Büchi automaton of `¬f` with its
/// accepting set reread as the rejecting set.
pub fn negate_and_dualize(f: &LtlFormula, num_atoms: usize) -> WordAutomaton {
    let mut nba = ltl_to_nba(&LtlFormula::not(f.clone()), num_atoms);
    nba.kind = AcceptanceKind::CoBuchi;
    nba
}
