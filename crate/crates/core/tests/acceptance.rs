//! Acceptance checks, one PASS/FAIL line per criterion. Runs as a plain
//! binary (no test harness) so that every line is printed in order.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rpsynth::bench::load_suite;
use rpsynth::ltl::{ltl_to_nba, negate_and_dualize, parse_spec, LtlFormula};
use rpsynth::program::{
    eval_bool_expr, extract_mealy, parse_program, run_program, Dialect, Label, MealyMachine, ProgramTree, VarSet,
};
use rpsynth::rungraph::{
    check_annotation_valid, construct_annotations, exists_valid_annotation_bruteforce, graph_satisfies_acceptance,
    run_graph_word_on_mealy, Acceptance, RunGraph,
};
use rpsynth::synth::{additional_variables, make_vars, synthesize, Encoding, SynthConfig, SynthOutcome};
use rpsynth::twoway::{mu_step, step, BState, Dir, Mode, Payload};
use rpsynth::verify::{verify_program, DEFAULT_CONFIG_BUDGET, DEFAULT_STEP_BUDGET};

/// A program produced by one of the encodings, kept for the closed-loop check.
struct Emitted {
    origin: String,
    formula: LtlFormula,
    program: ProgramTree,
    vars: VarSet,
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

const BENCH_LIMIT: Duration = Duration::from_secs(600);

fn suite_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/benchmarks"))
}

fn synth_once(formula: &LtlFormula, encoding: Encoding, vars: VarSet, max_nodes: usize) -> (SynthOutcome, Duration) {
    let cfg = SynthConfig::new(encoding, vars, max_nodes);
    let r = synthesize(formula, &cfg).expect("synthesis runs");
    (r.outcome, r.total_time)
}

struct BenchRun {
    name: String,
    program: Option<(ProgramTree, VarSet)>,
}

/// Criterion 1: structural results on the benchmark suite.
fn benchmarks(emitted: &mut Vec<Emitted>, runs: &mut Vec<BenchRun>) -> Outcome {
    let expected: &[(&str, usize, Option<usize>)] = &[
        ("in_out", 6, Some(0)),
        ("in_x_out", 9, Some(1)),
        ("latch", 10, None),
        ("arbiter", 10, Some(0)),
    ];
    let entries = load_suite(&suite_dir().join("suite.toml")).expect("suite loads");
    let mut ok = true;
    let mut parts = Vec::new();
    for &(name, nodes, additional) in expected {
        let entry = entries
            .iter()
            .find(|e| e.spec.file_stem().is_some_and(|s| s == name))
            .expect("benchmark listed in suite");
        let spec = parse_spec(&std::fs::read_to_string(&entry.spec).unwrap()).unwrap();
        let vars = make_vars(&spec.alphabet, entry.vars, Dialect::InOut).unwrap();
        let (outcome, time) = synth_once(&spec.formula, Encoding::Direct, vars, entry.max_nodes);
        let mut run = BenchRun {
            name: name.into(),
            program: None,
        };
        match outcome {
            SynthOutcome::Realized(r) => {
                let n = r.program.len();
                let a = additional_variables(&r.program, &r.vars);
                let good = n == nodes && additional.is_none_or(|x| x == a) && time <= BENCH_LIMIT;
                ok &= good;
                parts.push(format!("{name}: {n} nodes/{a} vars in {:.0}s", time.as_secs_f64()));
                emitted.push(Emitted {
                    origin: format!("bench {name}"),
                    formula: spec.formula.clone(),
                    program: r.program.clone(),
                    vars: r.vars.clone(),
                });
                run.program = Some((r.program, r.vars));
            }
            other => {
                ok = false;
                parts.push(format!("{name}: {other:?}"));
            }
        }
        runs.push(run);
    }
    Outcome::new(ok, parts.join("; "))
}

/// Criterion 2: the direct encoding beats the two-way encoding on in ↔ out.
fn ordering(emitted: &mut Vec<Emitted>) -> Outcome {
    let spec = parse_spec(&std::fs::read_to_string(suite_dir().join("in_out.ltl")).unwrap()).unwrap();
    let vars = make_vars(&spec.alphabet, 2, Dialect::InOut).unwrap();
    let mut times = Vec::new();
    for enc in [Encoding::Direct, Encoding::TwoWay] {
        let (outcome, time) = synth_once(&spec.formula, enc, vars.clone(), 8);
        if let SynthOutcome::Realized(r) = outcome {
            emitted.push(Emitted {
                origin: format!("in_out {enc}"),
                formula: spec.formula.clone(),
                program: r.program,
                vars: r.vars,
            });
        }
        times.push(time);
    }
    Outcome::new(
        times[0] < times[1],
        format!(
            "direct {:.2}s < twoway {:.2}s",
            times[0].as_secs_f64(),
            times[1].as_secs_f64()
        ),
    )
}

const REFERENCE_PROGRAMS: &[(&str, &str)] = &[
    ("in_out", "while(tt) { out = in; InOut }"),
    ("in_x_out", "while(tt) { out = var; var = in; InOut }"),
    ("latch", "while (tt) { if (upd) { out = in } else { skip }; InOut }"),
    ("arbiter", "while (tt) { g0 = g1; g1 = not g1; InOut }"),
];

/// All input words of length `len` over `2^ni` letters.
fn words(ni: usize, len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..1u32 << ni).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// Criterion 3: synthesized benchmark programs are trace-equivalent to the
/// reference programs.
fn reference_programs(runs: &[BenchRun]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(name, text) in REFERENCE_PROGRAMS {
        let Some(run) = runs.iter().find(|r| r.name == name) else {
            ok = false;
            parts.push(format!("{name}: not run"));
            continue;
        };
        let Some((program, vars)) = &run.program else {
            ok = false;
            parts.push(format!("{name}: no program"));
            continue;
        };
        let base = VarSet {
            names: vars.names[..vars.num_inputs + vars.num_outputs].to_vec(),
            ..vars.clone()
        };
        let (reference, ref_vars) = parse_program(text, &base).expect("reference program parses");
        let mut checked = 0;
        let mut equal = true;
        for len in 0..=6 {
            for w in words(vars.num_inputs, len) {
                let a = run_program(program, vars, &w, DEFAULT_STEP_BUDGET).expect("synthesized program runs");
                let b = run_program(&reference, &ref_vars, &w, DEFAULT_STEP_BUDGET).expect("reference runs");
                equal &= a == b;
                checked += 1;
            }
        }
        ok &= equal;
        parts.push(format!(
            "{name}: {} on {checked} words",
            if equal { "equal" } else { "DIFFERENT" }
        ));
    }
    Outcome::new(ok, parts.join("; "))
}

fn random_graph(rng: &mut ChaCha8Rng) -> (RunGraph, Acceptance) {
    let n = rng.gen_range(1..=8);
    let states = rng.gen_range(1..=4);
    let density = rng.gen_range(0.1..0.6);
    let edges = (0..n)
        .map(|_| (0..n).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    let label = (0..n).map(|_| rng.gen_range(0..states)).collect();
    let subset = |rng: &mut ChaCha8Rng| -> Vec<bool> { (0..states).map(|_| rng.gen_bool(0.4)).collect() };
    let acc = match rng.gen_range(0..3) {
        0 => Acceptance::Buchi(subset(rng)),
        1 => Acceptance::CoBuchi(subset(rng)),
        _ => Acceptance::Streett((0..rng.gen_range(1..=2)).map(|_| (subset(rng), subset(rng))).collect()),
    };
    (
        RunGraph {
            initial: 0,
            edges,
            label,
        },
        acc,
    )
}

/// Criteria 4 and 5: SCC-based acceptance against annotations on random
/// run graphs.
fn annotations() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut disagreements, mut exhaustive, mut accepting, mut failures) = (0, 0, 0, 0);
    for _ in 0..500 {
        let (g, acc) = random_graph(&mut rng);
        let bound = g.num_vertices();
        let scc = graph_satisfies_acceptance(&g, &acc);
        let constructed = construct_annotations(&g, &acc);
        let constructed_valid = constructed.as_ref().is_some_and(|ls| {
            acc.relations()
                .iter()
                .zip(ls)
                .all(|(rel, l)| l.iter().all(|&x| x <= bound) && check_annotation_valid(&g, rel, l))
        });
        if scc != constructed_valid {
            disagreements += 1;
        }
        if bound <= 4 {
            exhaustive += 1;
            let brute = acc
                .relations()
                .iter()
                .all(|rel| exists_valid_annotation_bruteforce(&g, rel, bound));
            if brute != scc {
                disagreements += 1;
            }
        }
        if scc {
            accepting += 1;
            if !constructed_valid {
                failures += 1;
            }
        }
    }
    (
        Outcome::new(
            disagreements == 0,
            format!("500 graphs ({exhaustive} also exhaustive), {disagreements} disagreements"),
        ),
        Outcome::new(
            failures == 0,
            format!("{accepting} accepting graphs, {failures} construction failures"),
        ),
    )
}

/// Criterion 6: the automaton's expression round trip agrees with the
/// interpreter on every expression of depth ≤ 4 over three variables.
fn boolean_round_trip() -> Outcome {
    let vars = VarSet::separate(0, 0, 3);
    let spec = ltl_to_nba(&LtlFormula::True, 0);
    let leaves = [Label::True, Label::False, Label::Var(0), Label::Var(1), Label::Var(2)];
    let smaller = common::all_expressions(&leaves, 3);
    let (mut trees, mut mismatches) = (0usize, 0usize);
    let mut check = |expr: &[rpsynth::program::TreeNode]| {
        trees += 1;
        let tree = ProgramTree {
            nodes: common::unary(Label::Assign(0), expr),
        };
        let parents = tree.parents();
        for s in 0..8u32 {
            let expected = eval_bool_expr(&tree, 1, s).expect("expression evaluates");
            let mut p = BState {
                s,
                q: 0,
                i: 0,
                m: Mode::Inp,
                payload: Payload::Exec(false),
            };
            let (mut t, mut d) = (0, Dir::D);
            let result = loop {
                let next = step(&spec, &vars, p, &tree.nodes[t].label, d);
                let [(p2, mv)] = next[..] else { break None };
                (t, d) = match mu_step(&tree, &parents, t, mv) {
                    Ok(x) => x,
                    Err(_) => break None,
                };
                p = p2;
                if (t, d) == (0, Dir::L) {
                    break match p.payload {
                        Payload::Expr(r) if p.s == s => Some(r),
                        _ => None,
                    };
                }
            };
            if result != Some(expected) {
                mismatches += 1;
            }
        }
    };
    for leaf in &leaves {
        check(&[rpsynth::program::TreeNode {
            label: leaf.clone(),
            left: None,
            right: None,
        }]);
    }
    for e in &smaller {
        check(&common::unary(Label::Not, e));
    }
    for a in &smaller {
        for b in &smaller {
            check(&common::binary(Label::Or, a, b));
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("{trees} expressions x 8 valuations, {mismatches} mismatches"),
    )
}

/// Whether `mealy` satisfies the co-Büchi run-graph check for `formula`.
fn model_check(mealy: &MealyMachine, formula: &LtlFormula) -> bool {
    let ucb = negate_and_dualize(formula, mealy.num_inputs + mealy.num_outputs);
    let g = run_graph_word_on_mealy(&ucb, mealy);
    graph_satisfies_acceptance(&g, &Acceptance::CoBuchi(ucb.accepting.clone()))
}

/// Smallest size (up to `max`) of an enumerated program satisfying `formula`.
fn brute_force_size(machines: &[(usize, Vec<MealyMachine>)], formula: &LtlFormula) -> Option<usize> {
    machines
        .iter()
        .find(|(_, ms)| ms.iter().any(|m| model_check(m, formula)))
        .map(|(n, _)| *n)
}

/// Criterion 7: both encodings agree with brute-force enumeration on small
/// random specifications.
fn micro_specs(emitted: &mut Vec<Emitted>) -> Outcome {
    const FORMULAS: usize = 60;
    const SMALL: usize = 4;
    const LARGE: usize = 6;
    let alphabet = rpsynth::ltl::AlphabetSpec::new(vec!["in".into()], vec!["out".into()]).unwrap();
    let vars = make_vars(&alphabet, 2, Dialect::InOut).unwrap();
    // Reactive programs of each size, as distinct minimized machines.
    let machines: Vec<(usize, Vec<MealyMachine>)> = (1..=LARGE)
        .map(|n| {
            let mut ms: Vec<MealyMachine> = common::all_programs(&vars, n)
                .iter()
                .filter_map(|t| extract_mealy(t, &vars, DEFAULT_CONFIG_BUDGET, DEFAULT_STEP_BUDGET).ok())
                .map(|m| m.minimized())
                .collect();
            ms.sort_by_key(|m| format!("{m:?}"));
            ms.dedup();
            (n, ms)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut disagreements, mut realizable) = (0, 0);
    for k in 0..FORMULAS {
        let formula = common::random_formula(&mut rng, 2, 3);
        let expected_small = brute_force_size(&machines[..SMALL], &formula);
        let expected_large = brute_force_size(&machines, &formula);
        realizable += expected_large.is_some() as usize;
        let runs = [
            (Encoding::Direct, SMALL, expected_small),
            (Encoding::TwoWay, SMALL, expected_small),
            (Encoding::Direct, LARGE, expected_large),
        ];
        for (enc, max, expected) in runs {
            let (outcome, _) = synth_once(&formula, enc, vars.clone(), max);
            let got = match outcome {
                SynthOutcome::Realized(r) => {
                    let n = r.program.len();
                    emitted.push(Emitted {
                        origin: format!("micro #{k} {enc}"),
                        formula: formula.clone(),
                        program: r.program,
                        vars: r.vars,
                    });
                    Some(n)
                }
                _ => None,
            };
            if got != expected {
                disagreements += 1;
                println!(
                    "  formula {}: {enc} up to {max} nodes found {got:?}, enumeration {expected:?}",
                    formula.display(&alphabet)
                );
            }
        }
    }
    Outcome::new(
        disagreements == 0,
        format!("{FORMULAS} formulas ({realizable} realizable within {LARGE} nodes), {disagreements} disagreements"),
    )
}

/// Criterion 8: every emitted program passes verification, and its outputs
/// satisfy the formula on random input lassos under a direct LTL evaluator.
fn closed_loop(emitted: &[Emitted]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    for e in emitted {
        let verified = verify_program(&e.program, &e.vars, &e.formula).is_ok_and(|r| r.passed());
        let mealy = extract_mealy(&e.program, &e.vars, DEFAULT_CONFIG_BUDGET, DEFAULT_STEP_BUDGET);
        let traces_ok = mealy.is_ok_and(|m| {
            (0..20).all(|_| {
                let letters = 1u32 << m.num_inputs;
                let word = |rng: &mut ChaCha8Rng, len: usize| -> Vec<u32> {
                    (0..len).map(|_| rng.gen_range(0..letters)).collect()
                };
                let (stem_len, cycle_len) = (rng.gen_range(0..4), rng.gen_range(1..4));
                let stem = word(&mut rng, stem_len);
                let cycle = word(&mut rng, cycle_len);
                let (s, c) = common::mealy_lasso(&m, &stem, &cycle);
                common::eval_lasso(&e.formula, &s, &c)
            })
        });
        if !(verified && traces_ok) {
            failures.push(e.origin.clone());
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{} programs, failures: {:?}", emitted.len(), failures),
    )
}

fn main() -> ExitCode {
    let mut emitted = Vec::new();
    let mut runs = Vec::new();
    let mut all = true;
    let mut report = |n: usize, what: &str, o: Outcome, started: Instant| {
        all &= o.passed;
        println!(
            "criterion {n} ({what}): {} - {} [{:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            started.elapsed().as_secs_f64()
        );
    };

    let t = Instant::now();
    let o = benchmarks(&mut emitted, &mut runs);
    report(1, "benchmark structure", o, t);
    let t = Instant::now();
    let o = ordering(&mut emitted);
    report(2, "encoding ordering", o, t);
    let t = Instant::now();
    report(3, "trace equivalence", reference_programs(&runs), t);
    let t = Instant::now();
    let (c4, c5) = annotations();
    report(4, "acceptance vs annotations", c4, t);
    report(5, "annotation construction", c5, t);
    let t = Instant::now();
    report(6, "Boolean evaluation", boolean_round_trip(), t);
    let t = Instant::now();
    let o = micro_specs(&mut emitted);
    report(7, "micro specifications", o, t);
    let t = Instant::now();
    report(8, "closed loop", closed_loop(&emitted), t);

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
