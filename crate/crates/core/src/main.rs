use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use rpsynth::bench::{load_suite, parse_dialect, render_table, run_suite, write_csv};
use rpsynth::ltl::{parse_spec, AlphabetSpec, SpecFile};
use rpsynth::program::{parse_program, print_program, Dialect, Trace, VarSet};
use rpsynth::sat::{ConstraintSystem, SolveResult, SolverChoice};
use rpsynth::synth::{make_vars, synthesize, Encoding, SynthConfig, SynthOutcome};
use rpsynth::verify::{verify_program, Verdict};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFRA: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rpsynth",
    version,
    about = "Bounded synthesis of reactive while-programs from LTL"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the smallest program satisfying a specification.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        /// Total number of program variables.
        #[arg(long)]
        vars: usize,
        #[arg(long, default_value = "direct")]
        encoding: Encoding,
        #[arg(long)]
        max_nodes: usize,
        #[arg(long, default_value_t = 1)]
        min_nodes: usize,
        /// Annotation bound for the two-way encoding.
        #[arg(long)]
        bound: Option<usize>,
        /// Maximum number of structure states for the direct encoding.
        #[arg(long)]
        structure_bound: Option<usize>,
        /// internal, cadical, external:PATH or a path to a DIMACS solver.
        #[arg(long, env = "RPSYNTH_SOLVER", default_value = "cadical")]
        solver: String,
        /// Per-step solver timeout in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// inout or separate; defaults per encoding.
        #[arg(long)]
        dialect: Option<String>,
        /// Continue with larger budgets after a timeout.
        #[arg(long = "continue")]
        continue_on_timeout: bool,
        /// Write DIMACS, name maps and extracted structures here.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// Keep redundant program shapes in the search space.
        #[arg(long)]
        no_symmetry_breaking: bool,
    },
    /// Check a program against a specification.
    Verify {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// auto, inout or separate.
        #[arg(long, default_value = "auto")]
        dialect: String,
    },
    /// Run a benchmark suite and write a CSV report.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "RPSYNTH_SOLVER", default_value = "cadical")]
        solver: String,
        /// Per-step solver timeout in seconds, overriding the suite.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Solve a DIMACS file with the configured solver.
    #[command(hide = true)]
    SolveDimacs {
        file: PathBuf,
        #[arg(long, env = "RPSYNTH_SOLVER", default_value = "cadical")]
        solver: String,
    },
}

/// A failure carrying the process exit code.
struct Failure(u8, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn infra(msg: impl ToString) -> Failure {
    Failure(EXIT_INFRA, msg.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth {
            spec,
            vars,
            encoding,
            max_nodes,
            min_nodes,
            bound,
            structure_bound,
            solver,
            timeout,
            dialect,
            continue_on_timeout,
            dump_dir,
            no_symmetry_breaking,
        } => (|| {
            let sf = read_spec(&spec)?;
            let dialect = match dialect {
                Some(d) => parse_dialect(&d).map_err(usage)?,
                None => encoding.default_dialect(),
            };
            let vars = make_vars(&sf.alphabet, vars, dialect).map_err(usage)?;
            let mut cfg = SynthConfig::new(encoding, vars, max_nodes);
            cfg.min_nodes = min_nodes;
            cfg.bound = bound;
            cfg.structure_bound = structure_bound;
            cfg.solver = parse_solver(&solver)?;
            cfg.timeout = seconds(timeout)?;
            cfg.continue_on_timeout = continue_on_timeout;
            cfg.dump_dir = dump_dir;
            cfg.symmetry_breaking = !no_symmetry_breaking;
            run_synth(&sf, &cfg)
        })(),
        Command::Verify { program, spec, dialect } => run_verify(&program, &spec, &dialect),
        Command::Bench {
            suite,
            out,
            solver,
            timeout,
        } => (|| {
            let entries = load_suite(&suite).map_err(usage)?;
            let rows = run_suite(&entries, &parse_solver(&solver)?, seconds(timeout)?);
            print!("{}", render_table(&rows));
            let file = std::fs::File::create(&out).map_err(|e| infra(format!("{}: {e}", out.display())))?;
            write_csv(&rows, file).map_err(infra)?;
            eprintln!("wrote {}", out.display());
            if rows.iter().any(|r| r.status.starts_with("error")) {
                return Err(infra("some benchmarks failed"));
            }
            Ok(0)
        })(),
        Command::SolveDimacs { file, solver } => (|| {
            let text = read(&file)?;
            let cs = ConstraintSystem::from_dimacs(&text).map_err(usage)?;
            match cs.solve(&parse_solver(&solver)?, None).map_err(infra)? {
                SolveResult::Sat(m) => {
                    println!("s SATISFIABLE");
                    let lits: Vec<String> = (1..=cs.num_vars() as i32)
                        .map(|v| if m.value(v) { v } else { -v }.to_string())
                        .collect();
                    println!("v {} 0", lits.join(" "));
                    Ok(0)
                }
                SolveResult::Unsat => {
                    println!("s UNSATISFIABLE");
                    Ok(EXIT_FAIL)
                }
                SolveResult::Timeout => {
                    println!("s UNKNOWN");
                    Ok(EXIT_INFRA)
                }
            }
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<SpecFile, Failure> {
    parse_spec(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_solver(s: &str) -> Result<SolverChoice, Failure> {
    s.parse().or_else(|e| {
        if Path::new(s).exists() {
            Ok(SolverChoice::External(PathBuf::from(s)))
        } else {
            Err(usage(e))
        }
    })
}

fn seconds(t: Option<f64>) -> Result<Option<Duration>, Failure> {
    t.map(|s| Duration::try_from_secs_f64(s).map_err(|e| usage(format!("invalid timeout: {e}"))))
        .transpose()
}

fn run_synth(sf: &SpecFile, cfg: &SynthConfig) -> Result<u8, Failure> {
    let result = synthesize(&sf.formula, cfg).map_err(|e| match e {
        rpsynth::synth::SynthError::Config(_) | rpsynth::synth::SynthError::Encode(_) => usage(e),
        _ => infra(e),
    })?;
    if let Some(n) = result.automaton_states {
        eprintln!("two-way automaton: {n} states");
    }
    for s in &result.steps {
        eprintln!(
            "nodes {:>3}: {:>8} vars {:>9} clauses  {:<7} encode {:.3}s solve {:.3}s",
            s.nodes,
            s.num_vars,
            s.num_clauses,
            s.outcome.to_string(),
            s.encode_time.as_secs_f64(),
            s.solve_time.as_secs_f64()
        );
    }
    eprintln!("total {:.3}s", result.total_time.as_secs_f64());
    match result.outcome {
        SynthOutcome::Realized(r) => {
            println!(
                "# {} nodes{}, verified: {} Mealy states, {} run-graph vertices",
                r.program.len(),
                if r.minimal { "" } else { " (minimality not established)" },
                r.verification.mealy_states,
                r.verification.run_graph_vertices
            );
            println!("{}", print_program(&r.program, &r.vars).trim_end());
            Ok(0)
        }
        SynthOutcome::Unrealizable => {
            println!("UNREALIZABLE within {} nodes", cfg.max_nodes);
            Ok(EXIT_FAIL)
        }
        SynthOutcome::TimedOut { nodes } => {
            println!("TIMEOUT at {nodes} nodes");
            Ok(EXIT_INFRA)
        }
    }
}

fn run_verify(program: &Path, spec: &Path, dialect: &str) -> Result<u8, Failure> {
    let sf = read_spec(spec)?;
    let text = read(program)?;
    let dialect = match dialect {
        "auto" if text.split(|c: char| !c.is_alphanumeric()).any(|w| w == "InOut") => Dialect::InOut,
        "auto" => Dialect::Separate,
        d => parse_dialect(d).map_err(usage)?,
    };
    let (ni, no) = (sf.alphabet.num_inputs(), sf.alphabet.num_outputs());
    let base = match dialect {
        Dialect::InOut => VarSet::inout(&sf.alphabet.inputs, &sf.alphabet.outputs, 0),
        Dialect::Separate => VarSet::separate(ni, no, 0),
    };
    let (tree, vars) = parse_program(&text, &base).map_err(|e| usage(format!("{}: {e}", program.display())))?;
    let report = verify_program(&tree, &vars, &sf.formula).map_err(infra)?;
    match report.verdict {
        Verdict::Pass => {
            println!(
                "PASS ({} Mealy states, {} automaton states, {} run-graph vertices)",
                report.mealy_states, report.automaton_states, report.run_graph_vertices
            );
            Ok(0)
        }
        Verdict::Fail { stem, cycle } => {
            println!("FAIL");
            println!("stem:  {}", show_trace(&stem, &sf.alphabet));
            println!("cycle: {}", show_trace(&cycle, &sf.alphabet));
            Ok(EXIT_FAIL)
        }
    }
}

fn show_trace(trace: &Trace, alphabet: &AlphabetSpec) -> String {
    let bits = |names: &[String], v: u32| -> String {
        let set: Vec<&str> = names
            .iter()
            .enumerate()
            .filter(|(k, _)| v >> k & 1 == 1)
            .map(|(_, n)| n.as_str())
            .collect();
        format!("{{{}}}", set.join(","))
    };
    let steps: Vec<String> = trace
        .iter()
        .map(|&(i, o)| format!("{}/{}", bits(&alphabet.inputs, i), bits(&alphabet.outputs, o)))
        .collect();
    if steps.is_empty() {
        "(empty)".into()
    } else {
        steps.join(" ")
    }
}
