//! Finite automata for factorial languages: subset construction, Moore minimisation and
//! equivalence with a shortest distinguishing word.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};

/// Labelled graph read as an automaton in which every state is initial and accepting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    pub alphabet: usize,
    /// `edges[s]` lists `(label, target)`.
    pub edges: Vec<Vec<(u8, usize)>>,
}

impl Nfa {
    pub fn states(&self) -> usize {
        self.edges.len()
    }
}

/// Complete deterministic automaton; state 0 is the start and `dead` the rejecting sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: usize,
    pub delta: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl Dfa {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn accepts(&self, word: &[u8]) -> bool {
        let mut s = 0;
        for &a in word {
            s = self.delta[s][a as usize];
        }
        self.accepting[s]
    }
}

/// Subset construction from the set of all states; fails once `max_states` subsets are reached.
pub fn determinize(nfa: &Nfa, max_states: usize) -> Result<Dfa> {
    let start: Vec<usize> = (0..nfa.states()).collect();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0);
    sets.push(start);
    let mut i = 0;
    while i < sets.len() {
        let mut row = vec![0usize; nfa.alphabet];
        let mut next: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
        for &s in &sets[i] {
            for &(a, t) in &nfa.edges[s] {
                next.entry(a).or_default().push(t);
            }
        }
        for a in 0..nfa.alphabet {
            let mut target = next.remove(&(a as u8)).unwrap_or_default();
            target.sort_unstable();
            target.dedup();
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    if sets.len() >= max_states {
                        return Err(Error::Budget(format!(
                            "subset construction exceeded {max_states} states"
                        )));
                    }
                    index.insert(target.clone(), sets.len());
                    sets.push(target);
                    sets.len() - 1
                }
            };
            row[a] = id;
        }
        delta.push(row);
        i += 1;
    }
    let accepting = sets.iter().map(|s| !s.is_empty()).collect();
    Ok(Dfa {
        alphabet: nfa.alphabet,
        delta,
        accepting,
    })
}

/// Moore partition refinement restricted to states reachable from the start.
pub fn minimize(dfa: &Dfa) -> Dfa {
    let mut reach = vec![false; dfa.states()];
    let mut order = vec![0usize];
    reach[0] = true;
    let mut i = 0;
    while i < order.len() {
        for &t in &dfa.delta[order[i]] {
            if !reach[t] {
                reach[t] = true;
                order.push(t);
            }
        }
        i += 1;
    }
    let mut class: Vec<usize> = (0..dfa.states())
        .map(|s| dfa.accepting[s] as usize)
        .collect();
    let mut count = 0;
    loop {
        let mut sig: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![0usize; dfa.states()];
        for &s in &order {
            let mut key = Vec::with_capacity(dfa.alphabet + 1);
            key.push(class[s]);
            key.extend(dfa.delta[s].iter().map(|&t| class[t]));
            let n = sig.len();
            next[s] = *sig.entry(key).or_insert(n);
        }
        let new_count = sig.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let mut delta = vec![vec![0usize; dfa.alphabet]; count];
    let mut accepting = vec![false; count];
    for &s in &order {
        let c = class[s];
        accepting[c] = dfa.accepting[s];
        for (a, &t) in dfa.delta[s].iter().enumerate() {
            delta[c][a] = class[t];
        }
    }
    let start = class[0];
    if start != 0 {
        delta.swap(0, start);
        accepting.swap(0, start);
        for row in &mut delta {
            for t in row.iter_mut() {
                if *t == 0 {
                    *t = start;
                } else if *t == start {
                    *t = 0;
                }
            }
        }
    }
    Dfa {
        alphabet: dfa.alphabet,
        delta,
        accepting,
    }
}

/// A shortest word (lexicographically least among those) accepted by exactly one automaton,
/// or `None` when the languages agree.
pub fn distinguishing_word(a: &Dfa, b: &Dfa) -> Option<Vec<u8>> {
    assert_eq!(a.alphabet, b.alphabet, "automata over different alphabets");
    let mut prev: HashMap<(usize, usize), Option<((usize, usize), u8)>> = HashMap::new();
    let mut queue = VecDeque::new();
    prev.insert((0, 0), None);
    queue.push_back((0, 0));
    while let Some(p) = queue.pop_front() {
        if a.accepting[p.0] != b.accepting[p.1] {
            let mut word = Vec::new();
            let mut cur = p;
            while let Some(Some((q, s))) = prev.get(&cur) {
                word.push(*s);
                cur = *q;
            }
            word.reverse();
            return Some(word);
        }
        for s in 0..a.alphabet {
            let q = (a.delta[p.0][s], b.delta[p.1][s]);
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(q) {
                e.insert(Some((p, s as u8)));
                queue.push_back(q);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Nfa {
        Nfa {
            alphabet: 2,
            edges: vec![vec![(0, 0), (1, 1)], vec![(0, 0)]],
        }
    }

    fn full() -> Nfa {
        Nfa {
            alphabet: 2,
            edges: vec![vec![(0, 0), (1, 0)]],
        }
    }

    #[test]
    fn golden_mean_rejects_11() {
        let d = minimize(&determinize(&golden(), 100).unwrap());
        assert!(d.accepts(&[1, 0, 1, 0]));
        assert!(!d.accepts(&[0, 1, 1]));
        assert_eq!(d.states(), 3);
    }

    #[test]
    fn shortest_distinguishing_word() {
        let g = minimize(&determinize(&golden(), 100).unwrap());
        let f = minimize(&determinize(&full(), 100).unwrap());
        assert_eq!(distinguishing_word(&g, &f), Some(vec![1, 1]));
        assert_eq!(distinguishing_word(&g, &g), None);
        let g2 = determinize(&golden(), 100).unwrap();
        assert_eq!(distinguishing_word(&g, &g2), None);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(determinize(&golden(), 1), Err(Error::Budget(_))));
    }
}
