//! Propositional constraint building and SAT solving.
//!
//! [`ConstraintSystem`] hands out variables, keeps a registry of named bit
//! vectors (so models can be decoded and dumped), and provides the gadgets the
//! encodings need: one-hot constraints and guarded unsigned comparisons of bit
//! vectors. Three interchangeable backends solve the result.

mod cdcl;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

/// A DIMACS literal: positive or negative variable index (never 0).
pub type Lit = i32;

/// An unsigned integer stored most-significant-bit first.
pub type BitVec = Vec<Lit>;

#[derive(Debug, Error)]
pub enum SatError {
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("DIMACS parse error on line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("external solver `{solver}` failed: {message}")]
    External { solver: String, message: String },
    #[error("unknown solver `{0}` (expected internal, cadical, or external:<path>)")]
    UnknownSolver(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Comparison operator for [`ConstraintSystem::assert_compare`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareOp {
    Gt,
    Ge,
    Eq,
}

/// Number of bits needed to represent every value in `0..=max`.
pub fn bits_for(max: u64) -> usize {
    (64 - max.leading_zeros() as usize).max(1)
}

#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    num_vars: usize,
    lits: Vec<Lit>,
    ends: Vec<usize>,
    names: BTreeMap<String, BitVec>,
}

impl ConstraintSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.ends.len()
    }

    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }

    /// A fresh anonymous bit vector of `width` bits.
    pub fn new_bitvec(&mut self, width: usize) -> BitVec {
        (0..width).map(|_| self.new_var()).collect()
    }

    /// A fresh named bit vector; names must be unique.
    pub fn alloc_bitvec(&mut self, name: &str, width: usize) -> Result<BitVec, SatError> {
        if self.names.contains_key(name) {
            return Err(SatError::DuplicateName(name.to_string()));
        }
        let bv = self.new_bitvec(width);
        self.names.insert(name.to_string(), bv.clone());
        Ok(bv)
    }

    /// A fresh named single variable.
    pub fn alloc_var(&mut self, name: &str) -> Result<Lit, SatError> {
        Ok(self.alloc_bitvec(name, 1)?[0])
    }

    pub fn lookup(&self, name: &str) -> Option<&BitVec> {
        self.names.get(name)
    }

    pub fn names(&self) -> &BTreeMap<String, BitVec> {
        &self.names
    }

    pub fn add_clause<I: IntoIterator<Item = Lit>>(&mut self, lits: I) {
        for l in lits {
            debug_assert!(l != 0 && l.unsigned_abs() as usize <= self.num_vars);
            self.lits.push(l);
        }
        self.ends.push(self.lits.len());
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[Lit]> {
        let starts = std::iter::once(0).chain(self.ends.iter().copied());
        starts.zip(self.ends.iter().copied()).map(|(a, b)| &self.lits[a..b])
    }

    /// `guard → clause`: the guard literals are negated into the clause.
    fn add_guarded(&mut self, guard: &[Lit], lits: &[Lit]) {
        let c: Vec<Lit> = guard.iter().map(|&g| -g).chain(lits.iter().copied()).collect();
        self.add_clause(c);
    }

    pub fn at_most_one(&mut self, lits: &[Lit]) {
        if lits.len() <= 6 {
            for i in 0..lits.len() {
                for j in i + 1..lits.len() {
                    self.add_clause([-lits[i], -lits[j]]);
                }
            }
        } else {
            self.at_most_k(lits, 1);
        }
    }

    pub fn exactly_one(&mut self, lits: &[Lit]) {
        self.add_clause(lits.iter().copied());
        self.at_most_one(lits);
    }

    /// Sequential-counter encoding of `Σ lits ≤ k`.
    pub fn at_most_k(&mut self, lits: &[Lit], k: usize) {
        let n = lits.len();
        if k >= n {
            return;
        }
        if k == 0 {
            for &l in lits {
                self.add_clause([-l]);
            }
            return;
        }
        // s[i][j]: at least j+1 of lits[0..=i] are true.
        let s: Vec<Vec<Lit>> = (0..n - 1).map(|_| self.new_bitvec(k)).collect();
        self.add_clause([-lits[0], s[0][0]]);
        for &l in &s[0][1..k] {
            self.add_clause([-l]);
        }
        for i in 1..n - 1 {
            self.add_clause([-lits[i], s[i][0]]);
            self.add_clause([-s[i - 1][0], s[i][0]]);
            for j in 1..k {
                self.add_clause([-lits[i], -s[i - 1][j - 1], s[i][j]]);
                self.add_clause([-s[i - 1][j], s[i][j]]);
            }
            self.add_clause([-lits[i], -s[i - 1][k - 1]]);
        }
        self.add_clause([-lits[n - 1], -s[n - 2][k - 1]]);
    }

    /// Under `guard` (a conjunction), `value(bv) ≤ c`.
    pub fn le_const(&mut self, bv: &[Lit], c: u64, guard: &[Lit]) {
        let w = bv.len();
        if w < 64 && c >= (1u64 << w) - 1 {
            return;
        }
        // Forbid every prefix that agrees with c on higher bits and has a 1
        // where c has a 0.
        for i in 0..w {
            let bit = (c >> (w - 1 - i)) & 1;
            if bit == 1 {
                continue;
            }
            let prefix_ones: Vec<Lit> = bv
                .iter()
                .enumerate()
                .take(i)
                .filter(|&(j, _)| (c >> (w - 1 - j)) & 1 == 1)
                .map(|(_, &l)| -l)
                .collect();
            let mut full = vec![-bv[i]];
            full.extend(prefix_ones);
            self.add_guarded(guard, &full);
        }
    }

    /// Under `guard`, `value(bv) = c` (bits of `c` beyond the width must be 0).
    pub fn eq_const(&mut self, bv: &[Lit], c: u64, guard: &[Lit]) {
        let w = bv.len();
        for (i, &l) in bv.iter().enumerate() {
            let bit = (c >> (w - 1 - i)) & 1;
            self.add_guarded(guard, &[if bit == 1 { l } else { -l }]);
        }
        if w < 64 && c >> w != 0 {
            self.add_guarded(guard, &[]);
        }
    }

    /// A fresh literal equivalent to `value(bv) = c`.
    pub fn eq_const_lit(&mut self, bv: &[Lit], c: u64) -> Lit {
        let w = bv.len();
        let e = self.new_var();
        if w < 64 && c >> w != 0 {
            self.add_clause([-e]);
            return e;
        }
        let bits: Vec<Lit> = bv
            .iter()
            .enumerate()
            .map(|(i, &l)| if (c >> (w - 1 - i)) & 1 == 1 { l } else { -l })
            .collect();
        for &b in &bits {
            self.add_clause([-e, b]);
        }
        self.add_clause(bits.iter().map(|&b| -b).chain([e]));
        e
    }

    /// A fresh literal equivalent to the conjunction of `lits`.
    pub fn and_lit(&mut self, lits: &[Lit]) -> Lit {
        let e = self.new_var();
        for &l in lits {
            self.add_clause([-e, l]);
        }
        self.add_clause(lits.iter().map(|&l| -l).chain([e]));
        e
    }

    /// Under `guard`, `value(lhs) op value(rhs)` for equal-width vectors.
    ///
    /// Uses an MSB-first chain of "equal so far" auxiliaries: `e_i` is forced
    /// once the first `i+1` bits agree, and under `e_{i-1}` bit `i` may not
    /// favour `rhs`. Guard literals are negated into every clause, so a false guard
    /// imposes nothing.
    pub fn assert_compare(&mut self, lhs: &[Lit], rhs: &[Lit], op: CompareOp, guard: &[Lit]) {
        assert_eq!(lhs.len(), rhs.len(), "compared vectors must have equal width");
        let w = lhs.len();
        if op == CompareOp::Eq {
            for i in 0..w {
                self.add_guarded(guard, &[-lhs[i], rhs[i]]);
                self.add_guarded(guard, &[lhs[i], -rhs[i]]);
            }
            return;
        }
        if w == 0 {
            if op == CompareOp::Gt {
                self.add_guarded(guard, &[]);
            }
            return;
        }
        // With e_{-1} = true: at each bit, if the prefix is equal then either
        // lhs wins here, or the bits agree and e_i holds.
        // Bit i: e_{i-1} → (lhs_i ∧ ¬rhs_i) ∨ (lhs_i ↔ rhs_i ∧ e_i).
        // Last bit (Gt): e_{w-2} → lhs ∧ ¬rhs; (Ge): e_{w-2} → lhs ∨ ¬rhs.
        let mut prev: Option<Lit> = None;
        for i in 0..w {
            let (a, b) = (lhs[i], rhs[i]);
            let mut g: Vec<Lit> = guard.to_vec();
            if let Some(p) = prev {
                g.push(p);
            }
            if i + 1 == w {
                match op {
                    CompareOp::Gt => {
                        self.add_guarded(&g, &[a]);
                        self.add_guarded(&g, &[-b]);
                    }
                    CompareOp::Ge => self.add_guarded(&g, &[a, -b]),
                    CompareOp::Eq => unreachable!(),
                }
            } else {
                let e = self.new_var();
                // never rhs>lhs at this bit
                self.add_guarded(&g, &[a, -b]);
                // if equal here, continue the chain
                self.add_guarded(&g, &[-a, -b, e]);
                self.add_guarded(&g, &[a, b, e]);
                prev = Some(e);
            }
        }
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.num_clauses());
        for c in self.clauses() {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// One line per named vector: `name v1 v2 ...` (MSB first).
    pub fn name_map(&self) -> String {
        let mut out = String::new();
        for (name, bv) in &self.names {
            let _ = write!(out, "{name}");
            for l in bv {
                let _ = write!(out, " {l}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<Self, SatError> {
        let mut cs = ConstraintSystem::new();
        let mut declared: Option<(usize, usize)> = None;
        let mut current: Vec<Lit> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            let err = |message: String| SatError::Dimacs { line: n + 1, message };
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(err("malformed header".into()));
                }
                let v = parts[1].parse().map_err(|_| err("bad variable count".into()))?;
                let c = parts[2].parse().map_err(|_| err("bad clause count".into()))?;
                declared = Some((v, c));
                cs.num_vars = v;
                continue;
            }
            if declared.is_none() {
                return Err(err("clause before header".into()));
            }
            for tok in line.split_whitespace() {
                let l: Lit = tok.parse().map_err(|_| err(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    cs.add_clause(std::mem::take(&mut current));
                } else {
                    if l.unsigned_abs() as usize > cs.num_vars {
                        return Err(err(format!("literal {l} exceeds declared variables")));
                    }
                    current.push(l);
                }
            }
        }
        if !current.is_empty() {
            cs.add_clause(current);
        }
        match declared {
            None => Err(SatError::Dimacs {
                line: 0,
                message: "missing header".into(),
            }),
            Some(_) => Ok(cs),
        }
    }

    pub fn solve(&self, solver: &SolverChoice, timeout: Option<Duration>) -> Result<SolveResult, SatError> {
        match solver {
            SolverChoice::Internal => Ok(self.solve_internal(timeout)),
            SolverChoice::Cadical => Ok(self.solve_cadical(timeout)),
            SolverChoice::External(path) => self.solve_external(path, timeout),
        }
    }

    fn solve_internal(&self, timeout: Option<Duration>) -> SolveResult {
        let deadline = timeout.map(|t| Instant::now() + t);
        let clauses: Vec<&[Lit]> = self.clauses().collect();
        match cdcl::solve(self.num_vars, &clauses, deadline) {
            cdcl::Outcome::Sat(values) => SolveResult::Sat(Model { values }),
            cdcl::Outcome::Unsat => SolveResult::Unsat,
            cdcl::Outcome::Timeout => SolveResult::Timeout,
        }
    }

    fn solve_cadical(&self, timeout: Option<Duration>) -> SolveResult {
        let mut solver: cadical::Solver = cadical::Solver::new();
        if let Some(t) = timeout {
            solver.set_callbacks(Some(cadical::Timeout::new(t.as_secs_f32())));
        }
        for c in self.clauses() {
            solver.add_clause(c.iter().copied());
        }
        match solver.solve() {
            None => SolveResult::Timeout,
            Some(false) => SolveResult::Unsat,
            Some(true) => {
                let values = (1..=self.num_vars as Lit)
                    .map(|v| solver.value(v).unwrap_or(false))
                    .collect();
                SolveResult::Sat(Model { values })
            }
        }
    }

    fn solve_external(&self, path: &PathBuf, timeout: Option<Duration>) -> Result<SolveResult, SatError> {
        let solver_name = path.display().to_string();
        let ext = |message: String| SatError::External {
            solver: solver_name.clone(),
            message,
        };
        let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
        file.write_all(self.to_dimacs().as_bytes())?;
        file.flush()?;
        let out_file = tempfile::tempfile()?;
        let mut child = Command::new(path)
            .arg(file.path())
            .stdin(Stdio::null())
            .stdout(Stdio::from(out_file.try_clone()?))
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| ext(format!("could not start: {e}")))?;
        let start = Instant::now();
        let status = loop {
            if let Some(status) = child.try_wait()? {
                break status;
            }
            if let Some(t) = timeout {
                if start.elapsed() >= t {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Ok(SolveResult::Timeout);
                }
            }
            std::thread::sleep(Duration::from_millis(5));
        };
        let mut out_file = out_file;
        let mut output = String::new();
        use std::io::{Read, Seek};
        out_file.rewind()?;
        out_file.read_to_string(&mut output)?;
        parse_solver_output(&output, status.code(), self.num_vars).map_err(ext)
    }
}

/// Interprets a solver's stdout (`s`/`v` lines or a bare `SAT`/`UNSAT`
/// verdict) and exit code (10 = SAT, 20 = UNSAT).
pub fn parse_solver_output(output: &str, exit_code: Option<i32>, num_vars: usize) -> Result<SolveResult, String> {
    let mut verdict: Option<bool> = None;
    let mut values = vec![false; num_vars];
    let mut saw_values = false;
    for line in output.lines() {
        let line = line.trim();
        let (tag, rest) = match line.split_once(char::is_whitespace) {
            Some((t, r)) => (t, r.trim()),
            None => (line, ""),
        };
        match tag {
            "s" => match rest {
                "SATISFIABLE" => verdict = Some(true),
                "UNSATISFIABLE" => verdict = Some(false),
                "UNKNOWN" => return Ok(SolveResult::Timeout),
                other => return Err(format!("unrecognised status `{other}`")),
            },
            "SAT" | "SATISFIABLE" if rest.is_empty() => verdict = Some(true),
            "UNSAT" | "UNSATISFIABLE" if rest.is_empty() => verdict = Some(false),
            "v" => {
                saw_values = true;
                for tok in rest.split_whitespace() {
                    let l: i64 = tok.parse().map_err(|_| format!("bad value literal `{tok}`"))?;
                    if l != 0 && (l.unsigned_abs() as usize) <= num_vars {
                        values[l.unsigned_abs() as usize - 1] = l > 0;
                    }
                }
            }
            _ => {}
        }
    }
    let verdict = verdict.or(match exit_code {
        Some(10) => Some(true),
        Some(20) => Some(false),
        _ => None,
    });
    match verdict {
        Some(true) if saw_values => Ok(SolveResult::Sat(Model { values })),
        Some(true) => Err("satisfiable but no model was printed".into()),
        Some(false) => Ok(SolveResult::Unsat),
        None => Err(format!("no verdict (exit code {exit_code:?})")),
    }
}

/// Which SAT backend to run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum SolverChoice {
    Internal,
    #[default]
    Cadical,
    External(PathBuf),
}

impl FromStr for SolverChoice {
    type Err = SatError;

    fn from_str(s: &str) -> Result<Self, SatError> {
        match s {
            "internal" => Ok(SolverChoice::Internal),
            "cadical" | "embedded" => Ok(SolverChoice::Cadical),
            _ => match s.strip_prefix("external:") {
                Some(path) if !path.is_empty() => Ok(SolverChoice::External(PathBuf::from(path))),
                _ => Err(SatError::UnknownSolver(s.to_string())),
            },
        }
    }
}

impl std::fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverChoice::Internal => write!(f, "internal"),
            SolverChoice::Cadical => write!(f, "cadical"),
            SolverChoice::External(p) => write!(f, "external:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn value(&self, lit: Lit) -> bool {
        let v = self.values[lit.unsigned_abs() as usize - 1];
        if lit > 0 {
            v
        } else {
            !v
        }
    }

    pub fn bitvec_value(&self, bv: &[Lit]) -> u64 {
        bv.iter().fold(0, |acc, &l| (acc << 1) | self.value(l) as u64)
    }

    /// Checks the model against every clause.
    pub fn satisfies(&self, cs: &ConstraintSystem) -> bool {
        cs.clauses().all(|c| c.iter().any(|&l| self.value(l)))
    }
}

#[derive(Clone, Debug)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
    Timeout,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVERS: [SolverChoice; 2] = [SolverChoice::Internal, SolverChoice::Cadical];

    fn all_models(cs: &ConstraintSystem, free: &[Lit]) -> usize {
        // Count assignments to `free` that extend to a model.
        let mut count = 0;
        for bits in 0..(1u32 << free.len()) {
            let mut c = cs.clone();
            for (i, &l) in free.iter().enumerate() {
                c.add_clause([if bits >> i & 1 == 1 { l } else { -l }]);
            }
            if c.solve(&SolverChoice::Internal, None).unwrap().is_sat() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn contradiction_and_disjunction() {
        for s in &SOLVERS {
            let mut cs = ConstraintSystem::new();
            let x = cs.new_var();
            cs.add_clause([x]);
            cs.add_clause([-x]);
            assert!(cs.solve(s, None).unwrap().is_unsat());

            let mut cs = ConstraintSystem::new();
            let (x, y) = (cs.new_var(), cs.new_var());
            cs.add_clause([x, y]);
            match cs.solve(s, None).unwrap() {
                SolveResult::Sat(m) => assert!(m.value(x) || m.value(y)),
                _ => panic!("expected SAT"),
            }
        }
    }

    #[test]
    fn pigeonhole_three_into_two() {
        for s in &SOLVERS {
            let mut cs = ConstraintSystem::new();
            let p: Vec<Vec<Lit>> = (0..3).map(|_| cs.new_bitvec(2)).collect();
            for row in &p {
                cs.add_clause(row.iter().copied());
            }
            for h in 0..2 {
                let col: Vec<Lit> = p.iter().map(|r| r[h]).collect();
                cs.at_most_one(&col);
            }
            assert!(cs.solve(s, None).unwrap().is_unsat());
        }
    }

    #[test]
    fn compare_gadgets_are_exact() {
        for w in 1..=3usize {
            for op in [CompareOp::Gt, CompareOp::Ge, CompareOp::Eq] {
                let mut cs = ConstraintSystem::new();
                let a = cs.new_bitvec(w);
                let b = cs.new_bitvec(w);
                cs.assert_compare(&a, &b, op, &[]);
                let n = 1u64 << w;
                let expected = (0..n)
                    .flat_map(|x| (0..n).map(move |y| (x, y)))
                    .filter(|&(x, y)| match op {
                        CompareOp::Gt => x > y,
                        CompareOp::Ge => x >= y,
                        CompareOp::Eq => x == y,
                    })
                    .count();
                let free: Vec<Lit> = a.iter().chain(&b).copied().collect();
                assert_eq!(all_models(&cs, &free), expected, "w={w} op={op:?}");
            }
        }
    }

    #[test]
    fn width_two_greater_has_six_solutions() {
        let mut cs = ConstraintSystem::new();
        let a = cs.new_bitvec(2);
        let b = cs.new_bitvec(2);
        cs.assert_compare(&a, &b, CompareOp::Gt, &[]);
        let free: Vec<Lit> = a.iter().chain(&b).copied().collect();
        assert_eq!(all_models(&cs, &free), 6);
    }

    #[test]
    fn false_guard_imposes_nothing() {
        let mut cs = ConstraintSystem::new();
        let a = cs.new_bitvec(2);
        let b = cs.new_bitvec(2);
        let g = cs.new_var();
        cs.add_clause([-g]);
        cs.assert_compare(&a, &b, CompareOp::Gt, &[g]);
        cs.le_const(&a, 0, &[g]);
        cs.eq_const(&b, 3, &[g]);
        let free: Vec<Lit> = a.iter().chain(&b).copied().collect();
        assert_eq!(all_models(&cs, &free), 16);
    }

    #[test]
    fn constant_gadgets() {
        for w in 1..=3usize {
            for c in 0..(1u64 << w) {
                let mut cs = ConstraintSystem::new();
                let a = cs.new_bitvec(w);
                cs.le_const(&a, c, &[]);
                assert_eq!(all_models(&cs, &a), c as usize + 1, "le w={w} c={c}");
                let mut cs = ConstraintSystem::new();
                let a = cs.new_bitvec(w);
                cs.eq_const(&a, c, &[]);
                match cs.solve(&SolverChoice::Internal, None).unwrap() {
                    SolveResult::Sat(m) => assert_eq!(m.bitvec_value(&a), c),
                    _ => panic!(),
                }
            }
        }
    }

    #[test]
    fn at_most_k_counts() {
        for n in 1..=5usize {
            for k in 0..=n {
                let mut cs = ConstraintSystem::new();
                let xs = cs.new_bitvec(n);
                cs.at_most_k(&xs, k);
                let expected = (0..(1u32 << n)).filter(|b| b.count_ones() as usize <= k).count();
                assert_eq!(all_models(&cs, &xs), expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn dimacs_round_trip() {
        let mut cs = ConstraintSystem::new();
        let v = cs.alloc_bitvec("x", 3).unwrap();
        cs.add_clause([v[0], -v[1]]);
        cs.add_clause([v[2]]);
        cs.add_clause([]);
        let text = cs.to_dimacs();
        let back = ConstraintSystem::from_dimacs(&text).unwrap();
        assert_eq!(back.num_vars(), 3);
        let a: Vec<Vec<Lit>> = cs.clauses().map(|c| c.to_vec()).collect();
        let b: Vec<Vec<Lit>> = back.clauses().map(|c| c.to_vec()).collect();
        assert_eq!(a, b);
        assert!(cs.alloc_bitvec("x", 1).is_err());
        assert_eq!(cs.name_map(), "x 1 2 3\n");
    }

    #[test]
    fn solver_output_parsing() {
        let r = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", Some(10), 3).unwrap();
        match r {
            SolveResult::Sat(m) => assert_eq!((m.value(1), m.value(2), m.value(3)), (true, false, true)),
            _ => panic!(),
        }
        assert!(parse_solver_output("UNSAT\n", None, 2).unwrap().is_unsat());
        assert!(parse_solver_output("", Some(20), 2).unwrap().is_unsat());
        assert!(parse_solver_output("", Some(1), 2).is_err());
        assert!("external:/bin/x".parse::<SolverChoice>().is_ok());
        assert!("bogus".parse::<SolverChoice>().is_err());
    }
}
