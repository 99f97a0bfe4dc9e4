//! A compact conflict-driven clause-learning solver for test-sized formulas:
//! two watched literals, first-UIP learning, activity-based branching with a
//! lazy heap, and Luby restarts. Learnt clauses are never deleted.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

/// Literal code: `2·(var-1)` for positive, `+1` for negative.
type Code = u32;

fn code(lit: i32) -> Code {
    let v = lit.unsigned_abs() - 1;
    2 * v + (lit < 0) as u32
}

fn var_of(c: Code) -> usize {
    (c >> 1) as usize
}

#[derive(PartialEq)]
struct Scored(f64, usize);

impl Eq for Scored {}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.1.cmp(&self.1))
    }
}

pub(crate) enum Outcome {
    Sat(Vec<bool>),
    Unsat,
    Timeout,
}

struct Solver {
    clauses: Vec<Vec<Code>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Code>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    bump: f64,
    heap: BinaryHeap<Scored>,
    phase: Vec<bool>,
}

impl Solver {
    fn lit_value(&self, c: Code) -> i8 {
        let v = self.value[var_of(c)];
        if v < 0 {
            -1
        } else if c & 1 == 0 {
            v
        } else {
            1 - v
        }
    }

    fn assign(&mut self, c: Code, reason: Option<usize>) {
        let v = var_of(c);
        self.value[v] = (c & 1 == 0) as i8;
        self.level[v] = self.trail_lim.len();
        self.reason[v] = reason;
        self.phase[v] = c & 1 == 0;
        self.trail.push(c);
    }

    /// Adds a clause at level 0. Returns false on a top-level conflict.
    fn add_clause(&mut self, lits: &[i32]) -> bool {
        let mut c: Vec<Code> = lits.iter().map(|&l| code(l)).collect();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return true;
        }
        c.retain(|&l| self.lit_value(l) != 0);
        if c.iter().any(|&l| self.lit_value(l) == 1) {
            return true;
        }
        match c.len() {
            0 => false,
            1 => {
                self.assign(c[0], None);
                self.propagate().is_none()
            }
            _ => {
                let idx = self.clauses.len();
                self.watches[c[0] as usize].push(idx);
                self.watches[c[1] as usize].push(idx);
                self.clauses.push(c);
                true
            }
        }
    }

    /// Unit propagation; returns a conflicting clause if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let falsified = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[falsified as usize]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.value[var_of(first)];
                    if v < 0 {
                        -1
                    } else if first & 1 == 0 {
                        v
                    } else {
                        1 - v
                    }
                };
                if first_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.value[var_of(l)];
                    let lv = if v < 0 {
                        -1
                    } else if l & 1 == 0 {
                        v
                    } else {
                        1 - v
                    };
                    if lv != 0 {
                        clause.swap(1, k);
                        self.watches[clause[1] as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    ws.swap_remove(i);
                    continue;
                }
                i += 1;
                if first_val == 0 {
                    conflict = Some(ci);
                    break;
                }
                self.assign(first, Some(ci));
            }
            let rest = std::mem::take(&mut self.watches[falsified as usize]);
            ws.extend(rest);
            self.watches[falsified as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Code>, usize) {
        let current = self.trail_lim.len();
        let mut seen = vec![false; self.value.len()];
        let mut learnt: Vec<Code> = vec![0];
        let mut counter = 0;
        let mut idx = self.trail.len();
        let mut p: Option<Code> = None;
        loop {
            let clause = self.clauses[confl].clone();
            for &q in &clause {
                if Some(q) == p {
                    continue;
                }
                let v = var_of(q);
                if !seen[v] && self.level[v] > 0 {
                    seen[v] = true;
                    self.activity[v] += self.bump;
                    self.heap.push(Scored(self.activity[v], v));
                    if self.level[v] == current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if seen[var_of(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            seen[var_of(lit)] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = lit ^ 1;
                break;
            }
            confl = self.reason[var_of(lit)].expect("implied literal has a reason");
        }
        self.bump *= 1.05;
        if self.bump > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.bump *= 1e-100;
            let entries: Vec<Scored> = (0..self.activity.len()).map(|v| Scored(self.activity[v], v)).collect();
            self.heap = entries.into_iter().collect();
        }
        let mut back = 0;
        let mut max_i = 1;
        for (i, &l) in learnt.iter().enumerate().skip(1) {
            let lv = self.level[var_of(l)];
            if lv > back {
                back = lv;
                max_i = i;
            }
        }
        if learnt.len() > 1 {
            learnt.swap(1, max_i);
        }
        (learnt, back)
    }

    fn backtrack(&mut self, level: usize) {
        if self.trail_lim.len() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for &c in &self.trail[lim..] {
            let v = var_of(c);
            self.value[v] = -1;
            self.reason[v] = None;
            self.heap.push(Scored(self.activity[v], v));
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn decide(&mut self) -> Option<Code> {
        while let Some(Scored(_, v)) = self.heap.pop() {
            if self.value[v] < 0 {
                return Some(2 * v as u32 + (!self.phase[v]) as u32);
            }
        }
        (0..self.value.len())
            .find(|&v| self.value[v] < 0)
            .map(|v| 2 * v as u32 + (!self.phase[v]) as u32)
    }
}

fn luby(mut i: u64) -> u64 {
    let mut size = 1;
    let mut seq = 0;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

pub(crate) fn solve(num_vars: usize, clauses: &[&[i32]], deadline: Option<Instant>) -> Outcome {
    let mut s = Solver {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * num_vars],
        value: vec![-1; num_vars],
        level: vec![0; num_vars],
        reason: vec![None; num_vars],
        trail: Vec::new(),
        trail_lim: Vec::new(),
        qhead: 0,
        activity: vec![0.0; num_vars],
        bump: 1.0,
        heap: (0..num_vars).map(|v| Scored(0.0, v)).collect(),
        phase: vec![false; num_vars],
    };
    for c in clauses {
        if !s.add_clause(c) {
            return Outcome::Unsat;
        }
    }
    let mut conflicts: u64 = 0;
    let mut restart = 0;
    let mut limit = 100 * luby(restart);
    loop {
        if let Some(confl) = s.propagate() {
            conflicts += 1;
            if s.trail_lim.is_empty() {
                return Outcome::Unsat;
            }
            let (learnt, back) = s.analyze(confl);
            s.backtrack(back);
            if learnt.len() == 1 {
                s.assign(learnt[0], None);
            } else {
                let idx = s.clauses.len();
                s.watches[learnt[0] as usize].push(idx);
                s.watches[learnt[1] as usize].push(idx);
                let first = learnt[0];
                s.clauses.push(learnt);
                s.assign(first, Some(idx));
            }
            if conflicts.is_multiple_of(256) {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Outcome::Timeout;
                    }
                }
            }
            continue;
        }
        if conflicts >= limit {
            restart += 1;
            limit = conflicts + 100 * luby(restart);
            s.backtrack(0);
        }
        match s.decide() {
            None => {
                return Outcome::Sat(s.value.iter().map(|&v| v == 1).collect());
            }
            Some(lit) => {
                s.trail_lim.push(s.trail.len());
                s.assign(lit, None);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(num_vars: usize, clauses: &[Vec<i32>]) -> Option<Vec<bool>> {
        let refs: Vec<&[i32]> = clauses.iter().map(|c| c.as_slice()).collect();
        match solve(num_vars, &refs, None) {
            Outcome::Sat(m) => {
                for c in clauses {
                    assert!(c.iter().any(|&l| m[l.unsigned_abs() as usize - 1] == (l > 0)));
                }
                Some(m)
            }
            Outcome::Unsat => None,
            Outcome::Timeout => unreachable!(),
        }
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..7).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4]);
    }

    #[test]
    fn pigeonhole_four_into_three() {
        let var = |p: i32, h: i32| p * 3 + h + 1;
        let mut cls = Vec::new();
        for p in 0..4 {
            cls.push((0..3).map(|h| var(p, h)).collect());
        }
        for h in 0..3 {
            for p in 0..4 {
                for q in p + 1..4 {
                    cls.push(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        assert!(check(12, &cls).is_none());
    }

    #[test]
    fn chain_of_implications() {
        let mut cls: Vec<Vec<i32>> = (1..50).map(|i| vec![-i, i + 1]).collect();
        cls.push(vec![1]);
        let m = check(50, &cls).unwrap();
        assert!(m.iter().all(|&b| b));
    }
}
