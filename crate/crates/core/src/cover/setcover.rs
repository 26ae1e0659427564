//! Exact minimum covers: explicit set cover, and the grouping form used for join covers.

use serde::Serialize;

use crate::error::{Error, Result};

/// A certified interval for a minimum; exact when `lower == upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Count {
    #[serde(serialize_with = "wide")]
    pub lower: u128,
    #[serde(serialize_with = "wide")]
    pub upper: u128,
}

/// Values beyond `u64` are written as decimal strings so JSON readers keep them exact.
fn wide<S: serde::Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    match u64::try_from(*v) {
        Ok(small) => s.serialize_u64(small),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

impl Count {
    pub fn exact(v: u128) -> Self {
        Count { lower: v, upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Componentwise maximum (a max over fibers of intervals).
    pub fn max(self, other: Count) -> Count {
        Count {
            lower: self.lower.max(other.lower),
            upper: self.upper.max(other.upper),
        }
    }
}

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0; n.div_ceil(64).max(1)]
}

fn bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn popcount(b: &Bits) -> u32 {
    b.iter().map(|w| w.count_ones()).sum()
}

/// Minimum number of `sets` (each a list of universe indices in `0..universe`) covering the universe.
/// Greedy upper bound, then branch and bound on the element with fewest covering sets; after
/// `node_budget` nodes the best bounds found so far are returned.
pub fn min_subcover(universe: usize, sets: &[Vec<usize>], node_budget: u64) -> Result<Count> {
    if universe == 0 {
        return Ok(Count::exact(0));
    }
    let mut family: Vec<Bits> = Vec::with_capacity(sets.len());
    for s in sets {
        let mut b = bits_new(universe);
        for &e in s {
            if e >= universe {
                return Err(Error::InvalidArgument(format!(
                    "set element {e} outside universe of {universe}"
                )));
            }
            b[e / 64] |= 1 << (e % 64);
        }
        family.push(b);
    }
    let mut all = bits_new(universe);
    for f in &family {
        for (a, w) in all.iter_mut().zip(f) {
            *a |= w;
        }
    }
    if popcount(&all) as usize != universe {
        let e = (0..universe)
            .find(|&e| !bit(&all, e))
            .expect("uncovered element");
        return Err(Error::Infeasible(format!(
            "element {e} is not covered by any set"
        )));
    }
    // drop sets contained in another (keep the first of equal sets)
    let mut keep: Vec<Bits> = Vec::new();
    for (i, f) in family.iter().enumerate() {
        let dominated = family
            .iter()
            .enumerate()
            .any(|(j, g)| j != i && f.iter().zip(g).all(|(a, b)| a & !b == 0) && (f != g || j < i));
        if !dominated {
            keep.push(f.clone());
        }
    }
    keep.sort_by_key(|b| std::cmp::Reverse(popcount(b)));
    let covering: Vec<Vec<usize>> = (0..universe)
        .map(|e| (0..keep.len()).filter(|&s| bit(&keep[s], e)).collect())
        .collect();
    let max_size = keep.iter().map(popcount).max().unwrap_or(1).max(1) as usize;

    let greedy = greedy_cover(universe, &keep);
    let mut search = SetCoverSearch {
        keep: &keep,
        covering: &covering,
        max_size,
        best: greedy,
        nodes: 0,
        budget: node_budget,
    };
    let mut uncovered = all.clone();
    let complete = search.run(&mut uncovered, universe, 0);
    let lower_root = universe.div_ceil(max_size) as u128;
    if complete {
        Ok(Count::exact(search.best as u128))
    } else {
        Ok(Count {
            lower: lower_root.min(search.best as u128),
            upper: search.best as u128,
        })
    }
}

fn greedy_cover(universe: usize, sets: &[Bits]) -> usize {
    let mut left = bits_new(universe);
    for e in 0..universe {
        left[e / 64] |= 1 << (e % 64);
    }
    let mut used = 0;
    while popcount(&left) > 0 {
        let best = sets
            .iter()
            .max_by_key(|s| {
                (
                    s.iter()
                        .zip(&left)
                        .map(|(a, b)| (a & b).count_ones())
                        .sum::<u32>(),
                    std::cmp::Reverse(0),
                )
            })
            .expect("non-empty family");
        for (l, s) in left.iter_mut().zip(best) {
            *l &= !s;
        }
        used += 1;
    }
    used
}

struct SetCoverSearch<'a> {
    keep: &'a [Bits],
    covering: &'a [Vec<usize>],
    max_size: usize,
    best: usize,
    nodes: u64,
    budget: u64,
}

impl SetCoverSearch<'_> {
    /// Returns false when the node budget ran out.
    fn run(&mut self, uncovered: &mut Bits, remaining: usize, used: usize) -> bool {
        if remaining == 0 {
            self.best = self.best.min(used);
            return true;
        }
        if used + remaining.div_ceil(self.max_size) >= self.best {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let pick = (0..uncovered.len() * 64)
            .filter(|&e| e < self.covering.len() && bit(uncovered, e))
            .min_by_key(|&e| self.covering[e].len())
            .expect("some element uncovered");
        for &s in &self.covering[pick] {
            let set = &self.keep[s];
            let saved = uncovered.clone();
            let mut gained = 0usize;
            for (u, w) in uncovered.iter_mut().zip(set) {
                gained += (*u & w).count_ones() as usize;
                *u &= !w;
            }
            let ok = self.run(uncovered, remaining - gained, used + 1);
            *uncovered = saved;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Minimum number of groups partitioning `profiles` such that, inside every group, the element
/// masks at each coordinate have a common element. Each profile lists one non-empty mask per
/// coordinate. This is the least number of join cells `⋂_g g⁻¹U_{s(g)}` covering the patterns.
pub fn min_groups(profiles: &[Vec<u64>], node_budget: u64) -> Count {
    let mut items: Vec<Vec<u64>> = profiles.to_vec();
    items.sort_unstable();
    items.dedup();
    if items.is_empty() {
        return Count::exact(0);
    }
    if items.iter().all(|p| p.iter().all(|m| m.count_ones() == 1)) {
        return Count::exact(items.len() as u128);
    }
    if items.len() <= 4096 {
        items = remove_dominated(items);
    }
    let m = items.len();
    if m == 1 {
        return Count::exact(1);
    }
    let conflicts = |a: &[u64], b: &[u64]| a.iter().zip(b).any(|(x, y)| x & y == 0);
    let adj: Option<Vec<Bits>> = (m <= 8192).then(|| {
        (0..m)
            .map(|i| {
                let mut b = bits_new(m);
                for j in 0..m {
                    if i != j && conflicts(&items[i], &items[j]) {
                        b[j / 64] |= 1 << (j % 64);
                    }
                }
                b
            })
            .collect()
    });
    let lower = match &adj {
        Some(adj) => greedy_clique(adj, m),
        None => 1,
    };
    let upper = first_fit(&items);
    if lower == upper {
        return Count::exact(lower as u128);
    }
    let Some(adj) = adj else {
        return Count {
            lower: lower as u128,
            upper: upper as u128,
        };
    };
    let mut s = GroupSearch {
        items: &items,
        adj: &adj,
        best: upper,
        lower,
        nodes: 0,
        budget: node_budget,
        group_of: vec![usize::MAX; m],
        groups: Vec::new(),
    };
    let complete = s.run(0);
    if complete {
        Count::exact(s.best as u128)
    } else {
        Count {
            lower: lower as u128,
            upper: s.best as u128,
        }
    }
}

/// Drops profiles whose masks contain another profile's masks at every coordinate: such a
/// pattern can join the other's group without affecting feasibility.
fn remove_dominated(items: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let dominated = |p: &[u64], q: &[u64]| p.iter().zip(q).all(|(a, b)| b & !a == 0);
    let mut out: Vec<Vec<u64>> = Vec::new();
    // most constrained first so dominators are seen before the profiles they absorb
    let mut order = items;
    order.sort_by_key(|p| p.iter().map(|m| m.count_ones()).sum::<u32>());
    for p in order {
        if !out.iter().any(|q| dominated(&p, q)) {
            out.push(p);
        }
    }
    out.sort_unstable();
    out
}

fn greedy_clique(adj: &[Bits], m: usize) -> usize {
    let deg: Vec<u32> = adj.iter().map(popcount).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(deg[i]), i));
    let mut best = 1;
    for &start in order.iter().take(64) {
        let mut clique = vec![start];
        for &v in &order {
            if v != start && clique.iter().all(|&c| bit(&adj[c], v)) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

fn first_fit(items: &[Vec<u64>]) -> usize {
    let mut groups: Vec<Vec<u64>> = Vec::new();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| (items[i].iter().map(|m| m.count_ones()).sum::<u32>(), i));
    for i in order {
        let p = &items[i];
        match groups
            .iter_mut()
            .find(|g| g.iter().zip(p).all(|(a, b)| a & b != 0))
        {
            Some(g) => g.iter_mut().zip(p).for_each(|(a, b)| *a &= b),
            None => groups.push(p.clone()),
        }
    }
    groups.len()
}

struct GroupSearch<'a> {
    items: &'a [Vec<u64>],
    adj: &'a [Bits],
    best: usize,
    lower: usize,
    nodes: u64,
    budget: u64,
    group_of: Vec<usize>,
    /// Running intersection of masks per open group.
    groups: Vec<Vec<u64>>,
}

impl GroupSearch<'_> {
    fn fits(&self, i: usize, g: usize) -> bool {
        self.groups[g]
            .iter()
            .zip(&self.items[i])
            .all(|(a, b)| a & b != 0)
    }

    /// DSatur-style branching: most constrained unassigned item first. False when out of budget.
    fn run(&mut self, assigned: usize) -> bool {
        if self.best == self.lower {
            return true;
        }
        let m = self.items.len();
        if assigned == m {
            self.best = self.best.min(self.groups.len());
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let mut pick = usize::MAX;
        let mut pick_key = (usize::MAX, 0u32);
        for i in 0..m {
            if self.group_of[i] != usize::MAX {
                continue;
            }
            let options = (0..self.groups.len()).filter(|&g| self.fits(i, g)).count();
            let key = (options, u32::MAX - popcount(&self.adj[i]));
            if key < pick_key {
                pick_key = key;
                pick = i;
            }
        }
        let i = pick;
        for g in 0..self.groups.len() {
            if !self.fits(i, g) {
                continue;
            }
            let saved = self.groups[g].clone();
            self.groups[g]
                .iter_mut()
                .zip(&self.items[i])
                .for_each(|(a, b)| *a &= b);
            self.group_of[i] = g;
            let ok = self.run(assigned + 1);
            self.group_of[i] = usize::MAX;
            self.groups[g] = saved;
            if !ok {
                return false;
            }
        }
        if self.groups.len() + 1 < self.best {
            self.groups.push(self.items[i].clone());
            self.group_of[i] = self.groups.len() - 1;
            let ok = self.run(assigned + 1);
            self.group_of[i] = usize::MAX;
            self.groups.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_needs_two() {
        let sets = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        assert_eq!(min_subcover(3, &sets, 1_000_000).unwrap(), Count::exact(2));
        assert_eq!(
            min_subcover(1, &[vec![0], vec![0]], 10).unwrap(),
            Count::exact(1)
        );
        assert!(matches!(
            min_subcover(2, &[vec![0]], 10),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn groups_respect_helly_failure() {
        // masks {0,1}, {1,2}, {0,2} pairwise compatible but with no common element
        let p = vec![vec![0b011], vec![0b110], vec![0b101]];
        assert_eq!(min_groups(&p, 1000), Count::exact(2));
        let q = vec![vec![0b01, 0b11], vec![0b10, 0b11], vec![0b11, 0b01]];
        assert_eq!(min_groups(&q, 1000), Count::exact(2));
    }
}
