//! Combinatorial independence of a pair of disjoint cylinder sets along subsets of the group,
//! relative to a factor map.

use serde::Serialize;

use crate::cover::{ClopenCover, ClopenSet, ComplexityOptions, CoverKind};
use crate::error::{Error, Result};
use crate::lattice::Shape;
use crate::par;
use crate::subshift::code::FiberUniverse;
use crate::subshift::pattern::{positions_in, Pattern};
use crate::subshift::FactorMap;

/// Largest `W` handled by the sign-vector bitsets.
pub const MAX_W: usize = 20;

/// Two disjoint, non-empty unions of cylinders on a common base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependencePair {
    a1: ClopenSet,
    a2: ClopenSet,
}

impl IndependencePair {
    pub fn new(a1: ClopenSet, a2: ClopenSet) -> Result<Self> {
        if a1.is_complement() || a2.is_complement() {
            return Err(Error::InvalidArgument(
                "independence sets must be plain unions of cylinders".into(),
            ));
        }
        if a1.base() != a2.base() {
            return Err(Error::InvalidArgument(
                "independence sets must share a base".into(),
            ));
        }
        if a1.listed().is_empty() || a2.listed().is_empty() {
            return Err(Error::InvalidArgument(
                "independence sets must be non-empty".into(),
            ));
        }
        if let Some(r) = a1.listed().rows().find(|r| a2.listed().contains(r)) {
            return Err(Error::InvalidArgument(format!(
                "independence sets intersect in {}",
                crate::subshift::pattern::word_string(r)
            )));
        }
        Ok(IndependencePair { a1, a2 })
    }

    /// One-word cylinders of two 1-d words of equal length.
    pub fn from_words(w1: &str, w2: &str) -> Result<Self> {
        IndependencePair::new(ClopenSet::words(&[w1])?, ClopenSet::words(&[w2])?)
    }

    /// Recovers `A₁, A₂` from a standard cover `{X∖A₁, X∖A₂}`.
    pub fn from_standard(u: &ClopenCover) -> Result<Self> {
        let els = u.elements();
        if u.kind() != CoverKind::Standard
            || els.len() != 2
            || !els.iter().all(|e| e.is_complement())
        {
            return Err(Error::InvalidArgument(
                "expected a standard cover of two complements".into(),
            ));
        }
        let plain = |e: &ClopenSet| {
            ClopenSet::cylinders(
                e.base().clone(),
                e.listed().rows().map(|r| r.to_vec()).collect(),
            )
        };
        IndependencePair::new(plain(&els[0])?, plain(&els[1])?)
    }

    pub fn a1(&self) -> &ClopenSet {
        &self.a1
    }

    pub fn a2(&self) -> &ClopenSet {
        &self.a2
    }

    pub fn base(&self) -> &Shape {
        self.a1.base()
    }

    /// The standard cover `{X∖A₁, X∖A₂}`.
    pub fn cover(&self) -> Result<ClopenCover> {
        let rows = |s: &ClopenSet| s.listed().rows().map(|r| r.to_vec()).collect();
        ClopenCover::standard(self.base().clone(), rows(&self.a1), rows(&self.a2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShatterMode {
    Exact,
    Greedy,
    /// Exact search stopped by the node budget; `w` is the best set found.
    Budget,
}

/// Outcome of a shattering query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShatterResult {
    pub w: Shape,
    /// Codomain pattern of the fiber achieving the most sign vectors (none for the trivial factor).
    pub witness_y: Option<Pattern>,
    /// Number of sign vectors in `{1,2}^W` realised by that fiber.
    pub achieved: u64,
    /// For sign vector `s` (bit `i` set when `W[i]` lands in `A₂`), the index of a realising
    /// pattern among the sorted fiber patterns on `W ⊕ base`. Filled only when complete.
    pub certificate: Vec<u32>,
    pub mode: ShatterMode,
}

impl ShatterResult {
    pub fn is_shattered(&self) -> bool {
        self.achieved == 1u64 << self.w.len()
    }
}

/// Sign-vector data of a fiber: for each pattern, `(m1, m2)` with bit `i` set when the translate
/// at coordinate `i` lies in `A₁` (resp. `A₂`).
pub type Fiber = Vec<(u32, u32)>;

fn compress(m: u32, pos: &[u32]) -> usize {
    pos.iter().enumerate().fold(0usize, |acc, (i, &p)| {
        acc | ((((m >> p) & 1) as usize) << i)
    })
}

fn positions(wmask: u32) -> Vec<u32> {
    (0..32).filter(|i| wmask >> i & 1 == 1).collect()
}

/// Number of distinct sign vectors on `wmask` realised by one fiber.
pub fn achieved(fiber: &[(u32, u32)], wmask: u32) -> u64 {
    let pos = positions(wmask);
    let k = pos.len();
    if k > MAX_W {
        return 0;
    }
    let mut seen = vec![0u64; (1usize << k).div_ceil(64)];
    let mut count = 0u64;
    for &(m1, m2) in fiber {
        if (m1 | m2) & wmask != wmask {
            continue;
        }
        let s = compress(m2, &pos);
        let (word, bit) = (s / 64, 1u64 << (s % 64));
        if seen[word] & bit == 0 {
            seen[word] |= bit;
            count += 1;
        }
    }
    count
}

fn shatters(fiber: &[(u32, u32)], wmask: u32) -> bool {
    let k = wmask.count_ones();
    fiber.len() as u64 >= 1u64 << k && achieved(fiber, wmask) == 1u64 << k
}

/// Index of the first fiber shattering `wmask`.
pub fn shattered_by(fibers: &[Fiber], wmask: u32) -> Option<usize> {
    fibers.iter().position(|f| shatters(f, wmask))
}

/// Maximum-cardinality subset of `{0..bits}` shattered by a single fiber, searched top-down by
/// size and lexicographically within a size. Returns the mask and whether the search completed
/// within `budget` subset tests.
pub fn max_shattered_family(fibers: &[Fiber], bits: usize, budget: u64) -> (u32, bool) {
    assert!(
        bits <= MAX_W,
        "family search is limited to {MAX_W} coordinates"
    );
    let candidates: Vec<u32> = (0..bits as u32)
        .filter(|&b| shattered_by(fibers, 1 << b).is_some())
        .collect();
    let largest = fibers.iter().map(|f| f.len()).max().unwrap_or(0);
    if largest == 0 {
        return (0, true);
    }
    let k_max = (usize::BITS - 1 - largest.leading_zeros()) as usize;
    let k_max = k_max.min(candidates.len());
    let mut tests = 0u64;
    let mut fallback = 0u32;
    for k in (1..=k_max).rev() {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let wmask = idx.iter().fold(0u32, |m, &i| m | 1 << candidates[i]);
            tests += 1;
            if shattered_by(fibers, wmask).is_some() {
                return (wmask, true);
            }
            if tests >= budget {
                if fallback == 0 {
                    fallback = greedy_family(fibers, &candidates);
                }
                return (fallback, false);
            }
            if !next_combination(&mut idx, candidates.len()) {
                break;
            }
        }
    }
    (0, true)
}

fn greedy_family(fibers: &[Fiber], candidates: &[u32]) -> u32 {
    let mut w = 0u32;
    for &b in candidates {
        if shattered_by(fibers, w | 1 << b).is_some() {
            w |= 1 << b;
        }
    }
    w
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Largest `k` with `num_vectors > Σ_{i<k} C(b, i)`: every family of that many vectors on `b`
/// coordinates shatters some `k`-set.
pub fn sauer_bound(num_vectors: u128, b: usize) -> usize {
    let mut sum: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=b {
        sum = sum.saturating_add(binom);
        if num_vectors <= sum {
            return k;
        }
        binom = binom.saturating_mul((b - k) as u128) / (k as u128 + 1);
    }
    b
}

struct Universe {
    fibers: Vec<Fiber>,
    universe: FiberUniverse,
}

fn sign_universe(
    map: &FactorMap,
    pair: &IndependencePair,
    w: &Shape,
    opts: &ComplexityOptions,
) -> Result<Universe> {
    if w.len() > 32 {
        return Err(Error::Capacity(format!(
            "sign masks hold 32 coordinates, got {}",
            w.len()
        )));
    }
    let ushape = w.product(pair.base())?;
    let universe = FiberUniverse::new(map, &ushape, &opts.language)?.map_err(|_| {
        Error::Capacity(format!(
            "language on {} points too large to materialise",
            ushape.len()
        ))
    })?;
    if universe.is_empty() {
        return Err(Error::Degenerate(
            "fiber universe is empty (unreachable shape)".into(),
        ));
    }
    let offsets = w
        .iter()
        .map(|g| positions_in(&ushape, &pair.base().translate(*g)))
        .collect::<Result<Vec<_>>>()?;
    let fibers = par::map_range(opts.language.exec, universe.len(), |i| {
        let mut buf = Vec::new();
        let mut signs = |row: &[u8]| {
            let (mut m1, mut m2) = (0u32, 0u32);
            for (j, idx) in offsets.iter().enumerate() {
                buf.clear();
                buf.extend(idx.iter().map(|&p| row[p]));
                if pair.a1.contains(&buf) {
                    m1 |= 1 << j;
                } else if pair.a2.contains(&buf) {
                    m2 |= 1 << j;
                }
            }
            (m1, m2)
        };
        match universe.raw(i) {
            Some((table, idx)) => idx.iter().map(|&r| signs(table.row(r))).collect::<Fiber>(),
            None => universe.rows(i).iter().map(|r| signs(r)).collect(),
        }
    });
    Ok(Universe { fibers, universe })
}

/// Whether `{A₁, A₂}` is independent along `W` relative to `map`: some fiber realises every
/// sign vector in `{1,2}^W`.
pub fn independent_along(
    map: &FactorMap,
    pair: &IndependencePair,
    w: &Shape,
    opts: &ComplexityOptions,
) -> Result<ShatterResult> {
    if w.len() > MAX_W {
        return Err(Error::Capacity(format!(
            "independence checks are limited to |W| ≤ {MAX_W}, got {}",
            w.len()
        )));
    }
    if w.is_empty() {
        return Ok(ShatterResult {
            w: w.clone(),
            witness_y: None,
            achieved: 1,
            certificate: vec![0],
            mode: ShatterMode::Exact,
        });
    }
    let u = sign_universe(map, pair, w, opts)?;
    let full = (1u32 << w.len()) - 1;
    let counts: Vec<u64> = u.fibers.iter().map(|f| achieved(f, full)).collect();
    let (best, &achieved_max) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty universe");
    let complete = achieved_max == 1u64 << w.len();
    let mut certificate = Vec::new();
    if complete {
        certificate = vec![u32::MAX; 1 << w.len()];
        let pos = positions(full);
        for (id, &(m1, m2)) in u.fibers[best].iter().enumerate() {
            if m1 | m2 == full {
                let s = compress(m2, &pos);
                if certificate[s] == u32::MAX {
                    certificate[s] = id as u32;
                }
            }
        }
    }
    let witness_y = if map.is_trivial() {
        None
    } else {
        Some(u.universe.witness(best)?)
    };
    Ok(ShatterResult {
        w: w.clone(),
        witness_y,
        achieved: achieved_max,
        certificate,
        mode: ShatterMode::Exact,
    })
}

/// A largest `W ⊆ B` along which `{A₁, A₂}` is independent. Exact for `|B| ≤ 20`; beyond that,
/// a maximal-by-inclusion set grown lexicographically and capped at 20 points.
pub fn max_shattered(
    map: &FactorMap,
    pair: &IndependencePair,
    b: &Shape,
    opts: &ComplexityOptions,
) -> Result<ShatterResult> {
    let (w, mode) = if b.len() <= MAX_W {
        let u = sign_universe(map, pair, b, opts)?;
        let (mask, complete) = max_shattered_family(&u.fibers, b.len(), opts.node_budget);
        let w = Shape::new(
            b.dim(),
            b.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| *p),
        )?;
        (
            w,
            if complete {
                ShatterMode::Exact
            } else {
                ShatterMode::Budget
            },
        )
    } else {
        (greedy_shattered(map, pair, b, opts)?, ShatterMode::Greedy)
    };
    let mut r = independent_along(map, pair, &w, opts)?;
    if !r.is_shattered() {
        return Err(Error::Invariant(format!(
            "shattered set {w} failed re-verification"
        )));
    }
    r.mode = mode;
    Ok(r)
}

fn greedy_shattered(
    map: &FactorMap,
    pair: &IndependencePair,
    b: &Shape,
    opts: &ComplexityOptions,
) -> Result<Shape> {
    let mut w: Vec<_> = Vec::new();
    for p in b.iter() {
        if w.len() == MAX_W {
            break;
        }
        let mut trial = w.clone();
        trial.push(*p);
        let shape = Shape::new(b.dim(), trial.clone())?;
        let u = sign_universe(map, pair, &shape, opts)?;
        let full = (1u32 << shape.len()) - 1;
        if shattered_by(&u.fibers, full).is_some() {
            w = trial;
        }
    }
    Shape::new(b.dim(), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subshift::{BlockCode, LanguageSource};

    fn opts() -> ComplexityOptions {
        ComplexityOptions::default()
    }

    fn xor_map() -> FactorMap {
        FactorMap::new(
            LanguageSource::full_shift(1, 2).unwrap(),
            LanguageSource::full_shift(1, 2).unwrap(),
            BlockCode::xor(),
        )
        .unwrap()
    }

    #[test]
    fn full_shift_is_independent_everywhere() {
        let map = FactorMap::trivial(LanguageSource::full_shift(1, 2).unwrap());
        let pair = IndependencePair::from_words("0", "1").unwrap();
        let r = independent_along(&map, &pair, &Shape::interval(0, 10), &opts()).unwrap();
        assert!(r.is_shattered());
        assert_eq!(r.certificate.len(), 1024);
        let r = max_shattered(&map, &pair, &Shape::interval(0, 12), &opts()).unwrap();
        assert_eq!(r.w, Shape::interval(0, 12));
        assert_eq!(r.mode, ShatterMode::Exact);
    }

    #[test]
    fn xor_fibers_do_not_shatter_pairs() {
        let pair = IndependencePair::from_words("0", "1").unwrap();
        let r = independent_along(&xor_map(), &pair, &Shape::interval(0, 2), &opts()).unwrap();
        assert!(!r.is_shattered());
        assert_eq!(r.achieved, 2);
        let r = max_shattered(&xor_map(), &pair, &Shape::interval(0, 6), &opts()).unwrap();
        assert_eq!(r.w.len(), 1);
    }

    #[test]
    fn golden_mean_forbids_adjacent_ones() {
        let map = FactorMap::trivial(LanguageSource::golden_mean());
        let pair = IndependencePair::from_words("1", "0").unwrap();
        let r = independent_along(&map, &pair, &Shape::interval(0, 2), &opts()).unwrap();
        assert_eq!(r.achieved, 3);
        let r = max_shattered(&map, &pair, &Shape::interval(0, 8), &opts()).unwrap();
        assert_eq!(r.w, Shape::from_1d([0, 2, 4, 6]));
    }

    #[test]
    fn greedy_mode_caps_at_twenty() {
        let map = FactorMap::trivial(LanguageSource::full_shift(1, 2).unwrap());
        let pair = IndependencePair::from_words("0", "1").unwrap();
        let r = max_shattered(&map, &pair, &Shape::interval(0, 24), &opts()).unwrap();
        assert_eq!(r.mode, ShatterMode::Greedy);
        assert_eq!(r.w, Shape::interval(0, 20));
    }

    #[test]
    fn sauer_values() {
        assert_eq!(sauer_bound(1 << 10, 10), 10);
        assert_eq!(sauer_bound(2, 5), 1);
        assert_eq!(sauer_bound(1, 5), 0);
        assert_eq!(sauer_bound(8, 10), 1);
        assert_eq!(sauer_bound(12, 10), 2);
    }

    #[test]
    fn constant_patterns_shatter_one_point() {
        let fibers = vec![vec![(0b111, 0), (0, 0b111)]];
        assert_eq!(max_shattered_family(&fibers, 3, 1000), (0b001, true));
    }

    #[test]
    fn pair_validation() {
        assert!(IndependencePair::from_words("0", "0").is_err());
        assert!(IndependencePair::from_words("0", "10").is_err());
        let u = ClopenCover::standard_from_words("11", "00").unwrap();
        let p = IndependencePair::from_standard(&u).unwrap();
        assert_eq!(p.cover().unwrap(), u);
    }
}
