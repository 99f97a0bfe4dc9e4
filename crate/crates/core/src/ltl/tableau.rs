//! Tableau translation from LTL to Büchi automata.
//!
//! Formulas are brought into negation normal form over an interned arena.
//! A tableau state is the set of obligations that must hold at the current
//! position; expanding it yields the letter constraints, the obligations for
//! the next position and the untils whose eventuality was postponed. The
//! resulting generalized Büchi automaton (one acceptance set per until) is
//! degeneralized with a level counter, trimmed and quotiented by bisimulation.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{AcceptanceKind, LtlFormula, WordAutomaton};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    fn tt(&mut self) -> u32 {
        self.intern(Node::True)
    }

    fn ff(&mut self) -> u32 {
        self.intern(Node::False)
    }

    fn and(&mut self, a: u32, b: u32) -> u32 {
        match (self.nodes[a as usize], self.nodes[b as usize]) {
            (Node::False, _) | (_, Node::False) => self.ff(),
            (Node::True, _) => b,
            (_, Node::True) => a,
            _ if a == b => a,
            _ => self.intern(Node::And(a.min(b), a.max(b))),
        }
    }

    fn or(&mut self, a: u32, b: u32) -> u32 {
        match (self.nodes[a as usize], self.nodes[b as usize]) {
            (Node::True, _) | (_, Node::True) => self.tt(),
            (Node::False, _) => b,
            (_, Node::False) => a,
            _ if a == b => a,
            _ => self.intern(Node::Or(a.min(b), a.max(b))),
        }
    }

    fn next(&mut self, a: u32) -> u32 {
        match self.nodes[a as usize] {
            Node::True | Node::False => a,
            _ => self.intern(Node::Next(a)),
        }
    }

    fn until(&mut self, a: u32, b: u32) -> u32 {
        match (self.nodes[a as usize], self.nodes[b as usize]) {
            (_, Node::True) | (_, Node::False) | (Node::False, _) => b,
            _ => self.intern(Node::Until(a, b)),
        }
    }

    fn release(&mut self, a: u32, b: u32) -> u32 {
        match (self.nodes[a as usize], self.nodes[b as usize]) {
            (_, Node::True) | (_, Node::False) | (Node::True, _) => b,
            _ => self.intern(Node::Release(a, b)),
        }
    }

    /// Negation normal form of `f` (negated when `neg`).
    fn nnf(&mut self, f: &LtlFormula, neg: bool) -> u32 {
        use LtlFormula as F;
        match (f, neg) {
            (F::True, false) | (F::False, true) => self.tt(),
            (F::True, true) | (F::False, false) => self.ff(),
            (F::Atom(a), _) => self.intern(Node::Lit(*a, !neg)),
            (F::Not(g), _) => self.nnf(g, !neg),
            (F::And(a, b), false) | (F::Or(a, b), true) => {
                let (x, y) = (self.nnf(a, neg), self.nnf(b, neg));
                self.and(x, y)
            }
            (F::Or(a, b), false) | (F::And(a, b), true) => {
                let (x, y) = (self.nnf(a, neg), self.nnf(b, neg));
                self.or(x, y)
            }
            (F::Implies(a, b), false) => {
                let (x, y) = (self.nnf(a, true), self.nnf(b, false));
                self.or(x, y)
            }
            (F::Implies(a, b), true) => {
                let (x, y) = (self.nnf(a, false), self.nnf(b, true));
                self.and(x, y)
            }
            (F::Iff(a, b), _) => {
                // a <-> b  ==  (a & b) | (!a & !b);  !(a <-> b) == (a & !b) | (!a & b)
                let pa = self.nnf(a, false);
                let na = self.nnf(a, true);
                let pb = self.nnf(b, neg);
                let nb = self.nnf(b, !neg);
                let l = self.and(pa, pb);
                let r = self.and(na, nb);
                self.or(l, r)
            }
            (F::Next(g), _) => {
                let x = self.nnf(g, neg);
                self.next(x)
            }
            (F::Until(a, b), false) => {
                let (x, y) = (self.nnf(a, false), self.nnf(b, false));
                self.until(x, y)
            }
            (F::Until(a, b), true) => {
                let (x, y) = (self.nnf(a, true), self.nnf(b, true));
                self.release(x, y)
            }
            (F::Finally(g), false) | (F::Globally(g), true) => {
                let t = self.tt();
                let x = self.nnf(g, neg);
                self.until(t, x)
            }
            (F::Globally(g), false) | (F::Finally(g), true) => {
                let f = self.ff();
                let x = self.nnf(g, neg);
                self.release(f, x)
            }
        }
    }
}

/// One way of satisfying a tableau state at the current position.
#[derive(Clone, Debug, Default)]
struct Cover {
    pos: u32,
    neg: u32,
    next: BTreeSet<u32>,
    postponed: BTreeSet<u32>,
}

fn expand(arena: &Arena, state: &BTreeSet<u32>) -> Vec<Cover> {
    let mut done = Vec::new();
    let mut stack = vec![(state.iter().copied().collect::<Vec<u32>>(), Cover::default())];
    while let Some((mut todo, mut cover)) = stack.pop() {
        let mut dead = false;
        while let Some(f) = todo.pop() {
            match arena.nodes[f as usize] {
                Node::True => {}
                Node::False => {
                    dead = true;
                    break;
                }
                Node::Lit(a, positive) => {
                    let bit = 1u32 << a;
                    if positive {
                        cover.pos |= bit;
                    } else {
                        cover.neg |= bit;
                    }
                    if cover.pos & cover.neg != 0 {
                        dead = true;
                        break;
                    }
                }
                Node::And(a, b) => {
                    todo.push(a);
                    todo.push(b);
                }
                Node::Or(a, b) => {
                    let mut alt = todo.clone();
                    alt.push(b);
                    stack.push((alt, cover.clone()));
                    todo.push(a);
                }
                Node::Next(a) => {
                    cover.next.insert(a);
                }
                Node::Until(a, b) => {
                    let mut alt = todo.clone();
                    alt.push(a);
                    let mut alt_cover = cover.clone();
                    alt_cover.next.insert(f);
                    alt_cover.postponed.insert(f);
                    stack.push((alt, alt_cover));
                    todo.push(b);
                }
                Node::Release(a, b) => {
                    let mut alt = todo.clone();
                    alt.push(b);
                    let mut alt_cover = cover.clone();
                    alt_cover.next.insert(f);
                    stack.push((alt, alt_cover));
                    todo.push(a);
                    todo.push(b);
                }
            }
        }
        if !dead {
            done.push(cover);
        }
    }
    done
}

/// Nondeterministic Büchi automaton accepting exactly the words satisfying `f`
/// over `num_atoms` atoms.
pub fn ltl_to_nba(f: &LtlFormula, num_atoms: usize) -> WordAutomaton {
    assert!(num_atoms < 31, "too many atoms for packed letters");
    let mut arena = Arena::default();
    let root = arena.nnf(f, false);
    let untils: Vec<u32> = (0..arena.nodes.len() as u32)
        .filter(|&i| matches!(arena.nodes[i as usize], Node::Until(..)))
        .collect();
    let m = untils.len();
    let letters = 1usize << num_atoms;

    // Product states: (obligation set, level).
    let mut ids: HashMap<(BTreeSet<u32>, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut delta: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut accepting = Vec::new();
    let mut covers_cache: HashMap<BTreeSet<u32>, Vec<Cover>> = HashMap::new();

    let init: BTreeSet<u32> = [root].into_iter().collect();
    ids.insert((init.clone(), 0), 0);
    delta.push(vec![Vec::new(); letters]);
    accepting.push(m == 0);
    queue.push_back((init, 0usize));

    while let Some((set, level)) = queue.pop_front() {
        let src = ids[&(set.clone(), level)];
        let covers = covers_cache
            .entry(set.clone())
            .or_insert_with(|| expand(&arena, &set))
            .clone();
        for cover in covers {
            let mut j = if level == m { 0 } else { level };
            while j < m && !cover.postponed.contains(&untils[j]) {
                j += 1;
            }
            let key = (cover.next.clone(), j);
            let dst = match ids.get(&key) {
                Some(&d) => d,
                None => {
                    let d = delta.len();
                    ids.insert(key.clone(), d);
                    delta.push(vec![Vec::new(); letters]);
                    accepting.push(j == m);
                    queue.push_back(key);
                    d
                }
            };
            for (letter, succ) in delta[src].iter_mut().enumerate() {
                let l = letter as u32;
                if l & cover.pos == cover.pos && l & cover.neg == 0 && !succ.contains(&dst) {
                    succ.push(dst);
                }
            }
        }
    }
    for row in &mut delta {
        for succ in row.iter_mut() {
            succ.sort_unstable();
        }
    }
    let nba = WordAutomaton {
        num_atoms,
        initial: 0,
        delta,
        accepting,
        kind: AcceptanceKind::Buchi,
    };
    nba.trimmed().bisimulation_quotient().trimmed()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(i: usize) -> LtlFormula {
        LtlFormula::Atom(i)
    }

    #[test]
    fn false_has_empty_language() {
        assert!(ltl_to_nba(&LtlFormula::False, 1).is_empty_language());
    }

    #[test]
    fn globally_a_on_small_lassos() {
        let nba = ltl_to_nba(&LtlFormula::globally(atom(0)), 1);
        assert!(nba.accepts_lasso(&[], &[1]));
        assert!(!nba.accepts_lasso(&[1, 0], &[1]));
        assert!(!nba.accepts_lasso(&[1], &[1, 0]));
    }

    #[test]
    fn finally_needs_an_occurrence() {
        let nba = ltl_to_nba(&LtlFormula::finally(atom(0)), 1);
        assert!(nba.accepts_lasso(&[0, 0, 1], &[0]));
        assert!(!nba.accepts_lasso(&[0], &[0]));
    }

    #[test]
    fn infinitely_often_is_a_cycle_property() {
        let f = LtlFormula::globally(LtlFormula::finally(atom(0)));
        let nba = ltl_to_nba(&f, 1);
        assert!(nba.accepts_lasso(&[], &[0, 0, 1]));
        assert!(!nba.accepts_lasso(&[1, 1], &[0]));
    }
}
