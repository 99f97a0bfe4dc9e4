use crate::graph::{nontrivial_sccs, reachable_from};

/// How the set `accepting` of a [`WordAutomaton`] is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AcceptanceKind {
    /// Nondeterministic Büchi: some run visits an accepting state infinitely often.
    Buchi,
    /// Universal co-Büchi: no run visits a rejecting state infinitely often.
    CoBuchi,
}

/// Explicit word automaton over letters `0..2^num_atoms`.
///
/// `delta[q][letter]` lists the successors; an empty list means the branch
/// dies on that letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordAutomaton {
    pub num_atoms: usize,
    pub initial: usize,
    pub delta: Vec<Vec<Vec<usize>>>,
    /// Accepting set for Büchi, rejecting set for co-Büchi.
    pub accepting: Vec<bool>,
    pub kind: AcceptanceKind,
}

impl WordAutomaton {
    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.num_atoms
    }

    pub fn successors(&self, q: usize, letter: u32) -> &[usize] {
        &self.delta[q][letter as usize]
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.delta
            .iter()
            .map(|row| {
                let mut succ: Vec<usize> = row.iter().flatten().copied().collect();
                succ.sort_unstable();
                succ.dedup();
                succ
            })
            .collect()
    }

    /// Whether every `(state, letter)` pair has a successor.
    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(|s| !s.is_empty()))
    }

    /// Copy in which every missing transition leads to a fresh sink that is
    /// neither accepting nor rejecting and loops on every letter. Under the
    /// Büchi reading the sink kills the run; under the co-Büchi reading it
    /// frees it. Languages are unchanged; automata that are already complete
    /// are returned as is.
    pub fn completed(&self) -> WordAutomaton {
        if self.is_complete() {
            return self.clone();
        }
        let sink = self.num_states();
        let mut out = self.clone();
        for row in &mut out.delta {
            for succ in row.iter_mut() {
                if succ.is_empty() {
                    succ.push(sink);
                }
            }
        }
        out.delta.push(vec![vec![sink]; self.num_letters()]);
        out.accepting.push(false);
        out
    }

    /// Büchi emptiness of the underlying graph: no reachable cycle through an
    /// accepting state. For a co-Büchi automaton this means no word has a
    /// rejecting run, i.e. the automaton accepts every word.
    pub fn is_empty_language(&self) -> bool {
        let adj = self.adjacency();
        let reach = reachable_from(&adj, &[self.initial]);
        nontrivial_sccs(&adj)
            .iter()
            .all(|scc| !scc.iter().any(|&v| reach[v] && self.accepting[v]))
    }

    /// Decides membership of the ultimately periodic word `stem · loop^ω`.
    pub fn accepts_lasso(&self, stem: &[u32], cycle: &[u32]) -> bool {
        assert!(!cycle.is_empty(), "lasso loop must be non-empty");
        let len = stem.len() + cycle.len();
        let letter_at = |pos: usize| {
            if pos < stem.len() {
                stem[pos]
            } else {
                cycle[pos - stem.len()]
            }
        };
        let next_pos = |pos: usize| if pos + 1 == len { stem.len() } else { pos + 1 };
        let n = self.num_states();
        let id = |q: usize, pos: usize| pos * n + q;
        let mut adj = vec![Vec::new(); n * len];
        for pos in 0..len {
            for q in 0..n {
                for &q2 in self.successors(q, letter_at(pos)) {
                    adj[id(q, pos)].push(id(q2, next_pos(pos)));
                }
            }
        }
        let reach = reachable_from(&adj, &[id(self.initial, 0)]);
        let has_accepting_cycle = nontrivial_sccs(&adj)
            .iter()
            .any(|scc| scc.iter().any(|&v| reach[v] && self.accepting[v % n]));
        match self.kind {
            AcceptanceKind::Buchi => has_accepting_cycle,
            AcceptanceKind::CoBuchi => !has_accepting_cycle,
        }
    }

    /// Drops states that are unreachable or cannot reach an accepting cycle
    /// (Büchi reading). Keeps the initial state even if its language is empty.
    pub fn trimmed(&self) -> WordAutomaton {
        let adj = self.adjacency();
        let reach = reachable_from(&adj, &[self.initial]);
        let mut good: Vec<usize> = Vec::new();
        for scc in nontrivial_sccs(&adj) {
            if scc.iter().any(|&v| self.accepting[v]) {
                good.extend(scc);
            }
        }
        let mut rev = vec![Vec::new(); adj.len()];
        for (v, succ) in adj.iter().enumerate() {
            for &w in succ {
                rev[w].push(v);
            }
        }
        let productive = reachable_from(&rev, &good);
        let keep: Vec<bool> = (0..self.num_states())
            .map(|q| q == self.initial || (reach[q] && productive[q]))
            .collect();
        self.restricted(&keep)
    }

    fn restricted(&self, keep: &[bool]) -> WordAutomaton {
        let mut index = vec![usize::MAX; self.num_states()];
        let mut next = 0;
        for (q, &k) in keep.iter().enumerate() {
            if k {
                index[q] = next;
                next += 1;
            }
        }
        let mut delta = Vec::with_capacity(next);
        let mut accepting = Vec::with_capacity(next);
        for q in (0..self.num_states()).filter(|&q| keep[q]) {
            delta.push(
                self.delta[q]
                    .iter()
                    .map(|succ| succ.iter().filter(|&&s| keep[s]).map(|&s| index[s]).collect())
                    .collect(),
            );
            accepting.push(self.accepting[q]);
        }
        WordAutomaton {
            num_atoms: self.num_atoms,
            initial: index[self.initial],
            delta,
            accepting,
            kind: self.kind,
        }
    }

    /// Quotient by the coarsest bisimulation that respects the accepting set.
    pub fn bisimulation_quotient(&self) -> WordAutomaton {
        let n = self.num_states();
        let mut block: Vec<usize> = self.accepting.iter().map(|&a| a as usize).collect();
        if !block.contains(&0) {
            block.iter_mut().for_each(|b| *b = 0);
        }
        loop {
            let mut signatures = std::collections::HashMap::new();
            let mut refined = vec![0; n];
            for q in 0..n {
                let sig: (usize, Vec<Vec<usize>>) = (
                    block[q],
                    self.delta[q]
                        .iter()
                        .map(|succ| {
                            let mut b: Vec<usize> = succ.iter().map(|&s| block[s]).collect();
                            b.sort_unstable();
                            b.dedup();
                            b
                        })
                        .collect(),
                );
                let fresh = signatures.len();
                refined[q] = *signatures.entry(sig).or_insert(fresh);
            }
            let before = block.iter().max().map_or(0, |m| m + 1);
            let after = signatures.len();
            block = refined;
            if after == before {
                break;
            }
        }
        let blocks = block.iter().max().map_or(0, |m| m + 1);
        let mut delta = vec![Vec::new(); blocks];
        let mut accepting = vec![false; blocks];
        let mut done = vec![false; blocks];
        for q in 0..n {
            let b = block[q];
            if done[b] {
                continue;
            }
            done[b] = true;
            accepting[b] = self.accepting[q];
            delta[b] = self.delta[q]
                .iter()
                .map(|succ| {
                    let mut t: Vec<usize> = succ.iter().map(|&s| block[s]).collect();
                    t.sort_unstable();
                    t.dedup();
                    t
                })
                .collect();
        }
        WordAutomaton {
            num_atoms: self.num_atoms,
            initial: block[self.initial],
            delta,
            accepting,
            kind: self.kind,
        }
    }
}
