//! Benchmark suites: a TOML list of specifications with bounds and expected
//! structural results, run through every requested encoding.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::parse_spec;
use crate::program::{print_program, Dialect};
use crate::sat::SolverChoice;
use crate::synth::{
    additional_variables, make_vars, streett_automaton, synthesize, Encoding, SynthConfig, SynthOutcome,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid suite file: {0}")]
    Suite(#[from] toml::de::Error),
}

#[derive(Clone, Debug, Deserialize)]
struct SuiteFile {
    bench: Vec<BenchEntry>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BenchEntry {
    pub name: String,
    pub spec: PathBuf,
    pub vars: usize,
    pub max_nodes: usize,
    #[serde(default)]
    pub min_nodes: Option<usize>,
    #[serde(default = "default_encodings")]
    pub encodings: Vec<String>,
    #[serde(default)]
    pub dialect: Option<String>,
    #[serde(default)]
    pub timeout: Option<f64>,
    #[serde(default)]
    pub expected_nodes: Option<usize>,
    #[serde(default)]
    pub expected_additional: Option<usize>,
    #[serde(default)]
    pub reference_bprime: Option<usize>,
}

fn default_encodings() -> Vec<String> {
    vec!["direct".into(), "twoway".into()]
}

/// One result line: a specification solved with one encoding.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub encoding: String,
    pub status: String,
    pub nodes: Option<usize>,
    pub additional_vars: Option<usize>,
    pub bprime: Option<usize>,
    pub expected_nodes: Option<usize>,
    pub expected_additional: Option<usize>,
    pub reference_bprime: Option<usize>,
    pub matches_expected: Option<bool>,
    pub verified: Option<bool>,
    pub time_s: f64,
    pub program: String,
}

pub fn parse_dialect(s: &str) -> Result<Dialect, String> {
    match s {
        "inout" => Ok(Dialect::InOut),
        "separate" => Ok(Dialect::Separate),
        other => Err(format!("unknown dialect `{other}` (expected inout or separate)")),
    }
}

pub fn load_suite(path: &Path) -> Result<Vec<BenchEntry>, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let suite: SuiteFile = toml::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(suite
        .bench
        .into_iter()
        .map(|mut e| {
            e.spec = base.join(&e.spec);
            e
        })
        .collect())
}

/// Runs one entry with one encoding. Failures are reported in the row.
pub fn run_entry(
    entry: &BenchEntry,
    encoding_name: &str,
    solver: &SolverChoice,
    timeout: Option<Duration>,
) -> BenchRow {
    let mut row = BenchRow {
        name: entry.name.clone(),
        encoding: encoding_name.to_string(),
        status: String::new(),
        nodes: None,
        additional_vars: None,
        bprime: None,
        expected_nodes: entry.expected_nodes,
        expected_additional: entry.expected_additional,
        reference_bprime: entry.reference_bprime,
        matches_expected: None,
        verified: None,
        time_s: 0.0,
        program: String::new(),
    };
    if let Err(message) = fill_row(&mut row, entry, encoding_name, solver, timeout) {
        row.status = format!("error: {message}");
    }
    row
}

fn fill_row(
    row: &mut BenchRow,
    entry: &BenchEntry,
    encoding_name: &str,
    solver: &SolverChoice,
    timeout: Option<Duration>,
) -> Result<(), String> {
    let encoding: Encoding = encoding_name.parse()?;
    let text = std::fs::read_to_string(&entry.spec).map_err(|e| format!("{}: {e}", entry.spec.display()))?;
    let spec = parse_spec(&text).map_err(|e| format!("{}: {e}", entry.spec.display()))?;
    let dialect = match &entry.dialect {
        Some(d) => parse_dialect(d)?,
        None => encoding.default_dialect(),
    };
    let vars = make_vars(&spec.alphabet, entry.vars, dialect).map_err(|e| e.to_string())?;
    row.bprime = Some(
        streett_automaton(&spec.formula, &vars)
            .map_err(|e| e.to_string())?
            .num_states(),
    );
    let mut cfg = SynthConfig::new(encoding, vars.clone(), entry.max_nodes);
    cfg.min_nodes = entry.min_nodes.unwrap_or(1);
    cfg.solver = solver.clone();
    cfg.timeout = timeout.or(entry.timeout.map(Duration::from_secs_f64));
    let result = synthesize(&spec.formula, &cfg).map_err(|e| e.to_string())?;
    row.time_s = result.total_time.as_secs_f64();
    match result.outcome {
        SynthOutcome::Realized(r) => {
            row.status = "realized".into();
            let nodes = r.program.len();
            let additional = additional_variables(&r.program, &vars);
            row.nodes = Some(nodes);
            row.additional_vars = Some(additional);
            row.verified = Some(r.verification.passed());
            row.program = print_program(&r.program, &vars)
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            if entry.expected_nodes.is_some() || entry.expected_additional.is_some() {
                row.matches_expected = Some(
                    entry.expected_nodes.is_none_or(|n| n == nodes)
                        && entry.expected_additional.is_none_or(|a| a == additional),
                );
            }
        }
        SynthOutcome::Unrealizable => row.status = "unrealizable".into(),
        SynthOutcome::TimedOut { nodes } => row.status = format!("timeout at {nodes} nodes"),
    }
    Ok(())
}

pub fn run_suite(entries: &[BenchEntry], solver: &SolverChoice, timeout: Option<Duration>) -> Vec<BenchRow> {
    entries
        .iter()
        .flat_map(|e| e.encodings.iter().map(move |enc| run_entry(e, enc, solver, timeout)))
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width table for terminals.
pub fn render_table(rows: &[BenchRow]) -> String {
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<8} {:<22} {:>6} {:>6} {:>7} {:>12} {:>9} {:>9}",
        "spec", "encoding", "status", "nodes", "vars+", "|B'|", "expect n/v+", "match", "time[s]"
    );
    for r in rows {
        let expected = format!("{}/{}", opt(r.expected_nodes), opt(r.expected_additional));
        let matches = match r.matches_expected {
            Some(true) => "yes",
            Some(false) => "MISMATCH",
            None => "-",
        };
        let _ = writeln!(
            out,
            "{:<16} {:<8} {:<22} {:>6} {:>6} {:>7} {:>12} {:>9} {:>9.2}",
            r.name,
            r.encoding,
            r.status,
            opt(r.nodes),
            opt(r.additional_vars),
            opt(r.bprime),
            expected,
            matches,
            r.time_s
        );
    }
    out
}
