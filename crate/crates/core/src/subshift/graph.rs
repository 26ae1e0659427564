//! Edge graph of a one-dimensional shift of finite type.
//!
//! A forbidden list of words of length `w` gives the graph whose edges are the allowed words of
//! length `w` and whose vertices are words of length `w - 1`; bi-infinite edge paths are exactly
//! the points of the shift. Trimming to the essential part makes every surviving edge extend in
//! both directions, so any finite path is globally admissible.

use std::collections::HashMap;

use crate::subshift::pattern::TableMode;

/// Small growable bitset over edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(Vec<u64>);

impl EdgeSet {
    pub fn new(n: usize) -> Self {
        EdgeSet(vec![0; n.div_ceil(64).max(1)])
    }

    pub fn full(n: usize) -> Self {
        let mut s = EdgeSet::new(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, bits)| {
            let mut b = *bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let t = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }
}

/// Essential edge graph of a 1-d SFT.
#[derive(Debug, Clone)]
pub struct SftGraph {
    pub alphabet: usize,
    /// Allowed words of length `memory + 1`, essential part only.
    pub edges: Vec<Vec<u8>>,
    succ: Vec<EdgeSet>,
    /// Edges whose first symbol is `a`.
    by_first: Vec<EdgeSet>,
}

impl SftGraph {
    /// `forbidden` words must share a common length; an empty list is the full shift.
    pub fn new(alphabet: usize, forbidden: &[Vec<u8>]) -> Self {
        let w = forbidden.first().map(|f| f.len()).unwrap_or(1).max(1);
        let forbidden: std::collections::HashSet<&[u8]> =
            forbidden.iter().map(|f| f.as_slice()).collect();
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..w {
            let mut next = Vec::with_capacity(words.len() * alphabet);
            for word in &words {
                for a in 0..alphabet as u8 {
                    let mut v = word.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            words = next;
        }
        let mut edges: Vec<Vec<u8>> = words
            .into_iter()
            .filter(|e| !forbidden.contains(e.as_slice()))
            .collect();
        // trim to the essential part
        loop {
            let mut by_src: HashMap<&[u8], usize> = HashMap::new();
            let mut by_dst: HashMap<&[u8], usize> = HashMap::new();
            for e in &edges {
                *by_src.entry(&e[..w - 1]).or_default() += 1;
                *by_dst.entry(&e[1..]).or_default() += 1;
            }
            let keep: Vec<bool> = edges
                .iter()
                .map(|e| by_src.contains_key(&e[1..]) && by_dst.contains_key(&e[..w - 1]))
                .collect();
            if keep.iter().all(|k| *k) {
                break;
            }
            edges = edges
                .into_iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(e, _)| e)
                .collect();
        }
        let n = edges.len();
        let mut src_index: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            src_index.entry(e[..w - 1].to_vec()).or_default().push(i);
        }
        let succ = edges
            .iter()
            .map(|e| {
                let mut s = EdgeSet::new(n);
                if let Some(list) = src_index.get(&e[1..]) {
                    for &j in list {
                        s.insert(j);
                    }
                }
                s
            })
            .collect();
        let mut by_first = vec![EdgeSet::new(n); alphabet];
        for (i, e) in edges.iter().enumerate() {
            by_first[e[0] as usize].insert(i);
        }
        SftGraph {
            alphabet,
            edges,
            succ,
            by_first,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::full(self.edges.len())
    }

    pub fn step(&self, set: &EdgeSet) -> EdgeSet {
        let mut out = EdgeSet::new(self.edges.len());
        for e in set.iter() {
            out.union_with(&self.succ[e]);
        }
        out
    }

    pub fn restrict_first(&self, set: &EdgeSet, symbol: u8) -> EdgeSet {
        let mut s = set.clone();
        s.intersect_with(&self.by_first[symbol as usize]);
        s
    }

    fn advance(&self, set: &EdgeSet, steps: i64) -> EdgeSet {
        let mut s = set.clone();
        for _ in 0..steps {
            s = self.step(&s);
        }
        s
    }

    /// All globally admissible patterns on the sorted positions `xs`, as a flat buffer in
    /// lexicographic order, or `None` when more than `limit` patterns exist.
    pub fn enumerate(&self, xs: &[i64], limit: usize) -> Option<Vec<u8>> {
        let mut out = Vec::new();
        if xs.is_empty() {
            return Some(out);
        }
        if self.is_empty() {
            return Some(out);
        }
        let mut count = 0usize;
        let mut buf = vec![0u8; xs.len()];
        let ok = self.dfs(
            xs,
            0,
            self.all_edges(),
            &mut buf,
            &mut out,
            &mut count,
            limit,
        );
        ok.then_some(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        xs: &[i64],
        i: usize,
        set: EdgeSet,
        buf: &mut Vec<u8>,
        out: &mut Vec<u8>,
        count: &mut usize,
        limit: usize,
    ) -> bool {
        for a in 0..self.alphabet as u8 {
            let here = self.restrict_first(&set, a);
            if here.is_empty() {
                continue;
            }
            buf[i] = a;
            if i + 1 == xs.len() {
                *count += 1;
                if *count > limit {
                    return false;
                }
                out.extend_from_slice(buf);
            } else {
                let next = self.advance(&here, xs[i + 1] - xs[i]);
                if !next.is_empty() && !self.dfs(xs, i + 1, next, buf, out, count, limit) {
                    return false;
                }
            }
        }
        true
    }

    /// Number of admissible patterns on `xs`, by dynamic programming over reachable edge sets.
    pub fn count(&self, xs: &[i64]) -> u128 {
        if xs.is_empty() {
            return 1;
        }
        if self.is_empty() {
            return 0;
        }
        let mut layer: HashMap<EdgeSet, u128> = HashMap::new();
        layer.insert(self.all_edges(), 1);
        for i in 0..xs.len() {
            let mut next: HashMap<EdgeSet, u128> = HashMap::new();
            for (set, c) in layer {
                for a in 0..self.alphabet as u8 {
                    let here = self.restrict_first(&set, a);
                    if here.is_empty() {
                        continue;
                    }
                    let key = if i + 1 == xs.len() {
                        here
                    } else {
                        self.advance(&here, xs[i + 1] - xs[i])
                    };
                    if key.is_empty() {
                        continue;
                    }
                    let e = next.entry(key).or_insert(0);
                    *e = e.saturating_add(c);
                }
            }
            layer = next;
        }
        layer.values().fold(0u128, |a, b| a.saturating_add(*b))
    }

    pub fn mode(&self) -> TableMode {
        TableMode::Exact
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let g = SftGraph::new(2, &[vec![1, 1]]);
        let mut fib = vec![1u128, 2];
        for i in 2..30 {
            fib.push(fib[i - 1] + fib[i - 2]);
        }
        for n in 1..25i64 {
            let xs: Vec<i64> = (0..n).collect();
            assert_eq!(g.count(&xs), fib[n as usize]);
        }
    }

    #[test]
    fn trimming_removes_dead_ends() {
        // forbidding 01 and 11 leaves only 0^∞ and ...1000... is not bi-infinite: only 00 and 10;
        // 10 has no predecessor ending in 1 so only 00 survives
        let g = SftGraph::new(2, &[vec![0, 1], vec![1, 1]]);
        assert_eq!(g.edges, vec![vec![0, 0]]);
        assert_eq!(g.count(&[0, 1, 2]), 1);
    }

    #[test]
    fn sparse_positions_project_the_language() {
        let g = SftGraph::new(2, &[vec![1, 1]]);
        // positions 0 and 2 of the golden mean shift are unconstrained
        assert_eq!(g.count(&[0, 2]), 4);
        assert_eq!(g.count(&[0, 1]), 3);
        let flat = g.enumerate(&[0, 1], 100).unwrap();
        assert_eq!(flat, vec![0, 0, 0, 1, 1, 0]);
    }
}
