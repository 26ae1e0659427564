use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{check_dim, GroupPoint, IndexSet, Shape};
use crate::par::Exec;
use crate::subshift::graph::SftGraph;
use crate::subshift::pattern::{Pattern, PatternTable, TableMode};

/// Limits applied when materialising languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LanguageOptions {
    /// Extra margin used for locally admissible patterns in dimension 2.
    pub margin: usize,
    /// Maximum number of patterns a table may hold before degrading to bounds.
    pub max_patterns: usize,
    pub exec: Exec,
}

impl Default for LanguageOptions {
    fn default() -> Self {
        LanguageOptions {
            margin: 1,
            max_patterns: 1 << 21,
            exec: Exec::default(),
        }
    }
}

/// A shift of finite type: forbidden patterns sharing one window shape.
#[derive(Debug, Clone)]
pub struct Sft {
    pub window: Shape,
    pub forbidden: Vec<Vec<u8>>,
    graph: Option<Arc<SftGraph>>,
}

/// Orbit closure of the binary points supported inside `S ⊆ ℤ`.
#[derive(Debug, Clone)]
pub struct FreeBits {
    pub support: IndexSet,
}

#[derive(Debug, Clone)]
pub enum SourceKind {
    Sft(Sft),
    FreeBits(FreeBits),
    Product(Vec<LanguageSource>),
}

/// A subshift presented by forbidden patterns, by a free-bits construction, or as a product.
#[derive(Debug, Clone)]
pub struct LanguageSource {
    dim: usize,
    alphabet: usize,
    kind: SourceKind,
}

impl LanguageSource {
    /// SFT from forbidden patterns that all share the same shape (the window).
    pub fn sft(dim: usize, alphabet: usize, forbidden: Vec<Pattern>) -> Result<Self> {
        check_dim(dim)?;
        if alphabet == 0 || alphabet > 255 {
            return Err(Error::InvalidArgument(format!(
                "alphabet size {alphabet} outside 1..=255"
            )));
        }
        let window = match forbidden.first() {
            Some(p) => p.shape().clone(),
            None => Shape::singleton(dim, GroupPoint::ORIGIN),
        };
        if window.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: window.dim(),
            });
        }
        if window.is_empty() {
            return Err(Error::EmptyShape);
        }
        let mut rows = Vec::with_capacity(forbidden.len());
        for f in &forbidden {
            if f.shape() != &window {
                return Err(Error::InvalidArgument(
                    "forbidden patterns must share one window shape".into(),
                ));
            }
            if let Some(m) = f.max_symbol() {
                if m as usize >= alphabet {
                    return Err(Error::Symbol {
                        symbol: m as u32,
                        size: alphabet,
                    });
                }
            }
            rows.push(f.symbols().to_vec());
        }
        let graph = if dim == 1 {
            if !window.is_box() {
                return Err(Error::InvalidArgument(
                    "1-d forbidden window must be an interval".into(),
                ));
            }
            Some(Arc::new(SftGraph::new(alphabet, &rows)))
        } else {
            None
        };
        Ok(LanguageSource {
            dim,
            alphabet,
            kind: SourceKind::Sft(Sft {
                window,
                forbidden: rows,
                graph,
            }),
        })
    }

    /// 1-d SFT from forbidden words such as `"11"`.
    pub fn sft_words(alphabet: usize, forbidden: &[&str]) -> Result<Self> {
        let pats = forbidden
            .iter()
            .map(|w| Pattern::word(w))
            .collect::<Result<Vec<_>>>()?;
        LanguageSource::sft(1, alphabet, pats)
    }

    pub fn full_shift(dim: usize, alphabet: usize) -> Result<Self> {
        LanguageSource::sft(dim, alphabet, Vec::new())
    }

    /// The golden-mean shift (no two adjacent ones).
    pub fn golden_mean() -> Self {
        LanguageSource::sft_words(2, &["11"]).expect("valid SFT")
    }

    /// The one-point system.
    pub fn fixed_point(dim: usize) -> Result<Self> {
        LanguageSource::full_shift(dim, 1)
    }

    pub fn free_bits(support: IndexSet) -> Self {
        LanguageSource {
            dim: 1,
            alphabet: 2,
            kind: SourceKind::FreeBits(FreeBits { support }),
        }
    }

    /// Product system; the symbol of the product is the mixed-radix combination of the factor
    /// symbols with the first factor least significant.
    pub fn product(factors: Vec<LanguageSource>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let dim = first.dim;
        let mut alphabet = 1usize;
        for f in &factors {
            if f.dim != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: f.dim,
                });
            }
            alphabet *= f.alphabet;
        }
        if alphabet > 255 {
            return Err(Error::InvalidArgument(format!(
                "product alphabet {alphabet} exceeds 255"
            )));
        }
        Ok(LanguageSource {
            dim,
            alphabet,
            kind: SourceKind::Product(factors),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn factor_alphabets(&self) -> Vec<usize> {
        match &self.kind {
            SourceKind::Product(fs) => fs.iter().map(|f| f.alphabet).collect(),
            _ => vec![self.alphabet],
        }
    }

    /// Whether the language computation on `shape` is exact (not an approximation).
    pub fn is_exact_on(&self, shape: &Shape) -> bool {
        match &self.kind {
            SourceKind::Sft(s) => self.dim == 1 || s.forbidden.is_empty() || shape.is_empty(),
            SourceKind::FreeBits(_) => true,
            SourceKind::Product(fs) => fs.iter().all(|f| f.is_exact_on(shape)),
        }
    }

    /// The (approximate, in dimension 2) language of the source on `shape`.
    pub fn language(&self, shape: &Shape, opts: &LanguageOptions) -> Result<PatternTable> {
        if shape.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: shape.dim(),
            });
        }
        if shape.is_empty() {
            return Ok(PatternTable::from_rows(
                shape.clone(),
                vec![Vec::new()],
                TableMode::Exact,
            ));
        }
        match &self.kind {
            SourceKind::Sft(sft) => self.sft_language(sft, shape, opts),
            SourceKind::FreeBits(fb) => free_bits_language(&fb.support, shape, opts),
            SourceKind::Product(fs) => product_language(fs, shape, opts),
        }
    }

    /// Language count without materialising when possible (exact for 1-d SFTs and products of
    /// them; bounds otherwise).
    pub fn count(&self, shape: &Shape, opts: &LanguageOptions) -> Result<(u128, u128)> {
        match &self.kind {
            SourceKind::Sft(sft) if self.dim == 1 => {
                let xs: Vec<i64> = shape.iter().map(|p| p.x()).collect();
                let c = sft.graph.as_ref().expect("1-d graph").count(&xs);
                Ok((c, c))
            }
            SourceKind::Product(fs) => {
                let mut lo = 1u128;
                let mut hi = 1u128;
                for f in fs {
                    let (a, b) = f.count(shape, opts)?;
                    lo = lo.saturating_mul(a);
                    hi = hi.saturating_mul(b);
                }
                Ok((lo, hi))
            }
            _ => Ok(self.language(shape, opts)?.count_bounds()),
        }
    }

    fn sft_language(
        &self,
        sft: &Sft,
        shape: &Shape,
        opts: &LanguageOptions,
    ) -> Result<PatternTable> {
        if self.dim == 1 {
            let graph = sft.graph.as_ref().expect("1-d graph");
            let xs: Vec<i64> = shape.iter().map(|p| p.x()).collect();
            return Ok(match graph.enumerate(&xs, opts.max_patterns) {
                Some(flat) => PatternTable::from_sorted_flat(shape.clone(), flat, TableMode::Exact),
                None => {
                    let c = graph.count(&xs);
                    PatternTable::bounds_only(shape.clone(), c, c)
                }
            });
        }
        if sft.forbidden.is_empty() {
            return all_patterns(shape, self.alphabet, opts.max_patterns);
        }
        local_language_2d(sft, self.alphabet, shape, opts)
    }
}

fn all_patterns(shape: &Shape, alphabet: usize, limit: usize) -> Result<PatternTable> {
    let total = (alphabet as u128).checked_pow(shape.len() as u32);
    match total {
        Some(t) if t <= limit as u128 => {
            let n = shape.len();
            let mut data = Vec::with_capacity(t as usize * n);
            let mut row = vec![0u8; n];
            for _ in 0..t {
                data.extend_from_slice(&row);
                for i in (0..n).rev() {
                    row[i] += 1;
                    if (row[i] as usize) < alphabet {
                        break;
                    }
                    row[i] = 0;
                }
            }
            Ok(PatternTable::from_sorted_flat(
                shape.clone(),
                data,
                TableMode::Exact,
            ))
        }
        Some(t) => Ok(PatternTable::bounds_only(shape.clone(), t, t)),
        None => Ok(PatternTable::bounds_only(
            shape.clone(),
            u128::MAX,
            u128::MAX,
        )),
    }
}

/// Backtracking over the margin-inflated hull; every forbidden window that fits entirely inside
/// the inflated box is checked, then rows are restricted to `shape`.
fn local_language_2d(
    sft: &Sft,
    alphabet: usize,
    shape: &Shape,
    opts: &LanguageOptions,
) -> Result<PatternTable> {
    let hull = shape.hull();
    let lo = hull.min_point().expect("non-empty");
    let hi = *hull.points().last().expect("non-empty");
    let m = opts.margin as i64;
    let cells = Shape::rect(lo.x() - m, hi.x() + 1 + m, lo.y() - m, hi.y() + 1 + m);
    // order cells row-major so windows complete early
    let mut order: Vec<GroupPoint> = cells.points().to_vec();
    order.sort_by_key(|p| (p.y(), p.x()));
    let index_of = |p: &GroupPoint| order.iter().position(|q| q == p);
    let wmax = sft
        .window
        .points()
        .iter()
        .copied()
        .max_by_key(|p| (p.y(), p.x()))
        .expect("non-empty window");
    // windows anchored at each translate that fits, checked when their last cell is assigned
    let mut checks: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); order.len()];
    for anchor in cells.iter() {
        let placed: Option<Vec<usize>> = sft
            .window
            .iter()
            .map(|w| index_of(&anchor.add(*w)))
            .collect();
        if let Some(idx) = placed {
            let last = index_of(&anchor.add(wmax)).expect("inside");
            let last = idx.iter().copied().max().unwrap_or(last);
            checks[last].push((0, idx));
        }
    }
    let forbidden: HashSet<&[u8]> = sft.forbidden.iter().map(|f| f.as_slice()).collect();
    let proj: Vec<usize> = shape
        .iter()
        .map(|p| index_of(p).expect("shape inside inflated hull"))
        .collect();
    let mut assign = vec![0u8; order.len()];
    let mut rows: HashSet<Vec<u8>> = HashSet::new();
    let mut visited = 0usize;
    let budget = opts.max_patterns.saturating_mul(64);
    fn rec(
        i: usize,
        alphabet: usize,
        assign: &mut Vec<u8>,
        checks: &[Vec<(usize, Vec<usize>)>],
        forbidden: &HashSet<&[u8]>,
        proj: &[usize],
        rows: &mut HashSet<Vec<u8>>,
        visited: &mut usize,
        budget: usize,
    ) -> bool {
        if i == assign.len() {
            rows.insert(proj.iter().map(|&j| assign[j]).collect());
            return true;
        }
        for a in 0..alphabet as u8 {
            *visited += 1;
            if *visited > budget {
                return false;
            }
            assign[i] = a;
            let ok = checks[i].iter().all(|(_, idx)| {
                let w: Vec<u8> = idx.iter().map(|&j| assign[j]).collect();
                !forbidden.contains(w.as_slice())
            });
            if ok
                && !rec(
                    i + 1,
                    alphabet,
                    assign,
                    checks,
                    forbidden,
                    proj,
                    rows,
                    visited,
                    budget,
                )
            {
                return false;
            }
        }
        true
    }
    let finished = rec(
        0,
        alphabet,
        &mut assign,
        &checks,
        &forbidden,
        &proj,
        &mut rows,
        &mut visited,
        budget,
    );
    if !finished {
        let upper = (alphabet as u128).saturating_pow(shape.len() as u32);
        return Ok(PatternTable::bounds_only(
            shape.clone(),
            rows.len() as u128,
            upper,
        ));
    }
    Ok(PatternTable::from_rows(
        shape.clone(),
        rows.into_iter().collect(),
        TableMode::LocallyAdmissible {
            margin: opts.margin,
        },
    ))
}

/// Maximal supports `(S - t) ∩ W` over all translates, as bitmasks over the points of `W`.
pub(crate) fn free_bits_supports(support: &IndexSet, shape: &Shape) -> Result<Vec<u128>> {
    if shape.len() > 128 {
        return Err(Error::Capacity(format!(
            "free-bits window of {} points exceeds 128",
            shape.len()
        )));
    }
    let xs: Vec<i64> = shape.iter().map(|p| p.x()).collect();
    let a = xs[0];
    let b = *xs.last().expect("non-empty");
    let width = b - a + 1;
    let lo = support.lower_end_1d(width);
    let hi = support.horizon_1d(width) + width;
    let pts = support.points_1d_in(lo, hi + 1);
    let mut masks: HashSet<u128> = HashSet::new();
    masks.insert(0);
    // only translates that hit the window matter: t = s - x
    let mut ts: Vec<i64> = pts
        .iter()
        .flat_map(|s| xs.iter().map(move |x| s - x))
        .collect();
    ts.sort_unstable();
    ts.dedup();
    let set: HashSet<i64> = pts.iter().copied().collect();
    let full_rule = matches!(
        support.rule,
        crate::lattice::IndexRule::NonNegative | crate::lattice::IndexRule::All
    );
    for t in ts {
        let mut m = 0u128;
        for (i, x) in xs.iter().enumerate() {
            let g = x + t;
            let inside = if full_rule {
                support.contains(&GroupPoint::d1(g))
            } else {
                set.contains(&g)
            };
            if inside {
                m |= 1 << i;
            }
        }
        masks.insert(m);
    }
    let mut v: Vec<u128> = masks.into_iter().collect();
    v.sort_unstable_by(|p, q| q.count_ones().cmp(&p.count_ones()).then(p.cmp(q)));
    let mut maximal: Vec<u128> = Vec::new();
    for m in v {
        if !maximal.iter().any(|big| m & !big == 0) {
            maximal.push(m);
        }
    }
    maximal.sort_unstable();
    Ok(maximal)
}

fn pow2(k: u32) -> u128 {
    1u128.checked_shl(k).unwrap_or(u128::MAX)
}

/// Count bounds `max_t 2^{k_t} ≤ N ≤ Σ_t 2^{k_t}` with `k_t = |(S - t) ∩ W|`, without listing supports.
pub(crate) fn free_bits_bounds(support: &IndexSet, shape: &Shape) -> (u128, u128) {
    let xs: Vec<i64> = shape.iter().map(|p| p.x()).collect();
    let (a, b) = (xs[0], *xs.last().expect("non-empty"));
    let width = b - a + 1;
    let lo = support.lower_end_1d(width) - b;
    let hi = support.horizon_1d(width) - a;
    let pts = support.points_1d_in(lo + a, hi + b + 1);
    let span = (hi - lo + 1) as usize;
    let mut k = vec![0u32; span];
    if shape.is_box() {
        // prefix sums over the covered range
        let base = lo + a;
        let len = (hi + b + 1 - base) as usize;
        let mut prefix = vec![0u32; len + 1];
        let mut it = pts.iter().peekable();
        for i in 0..len {
            let x = base + i as i64;
            let mut c = 0;
            while it.peek().is_some_and(|&&p| p == x) {
                c = 1;
                it.next();
            }
            prefix[i + 1] = prefix[i] + c;
        }
        for (j, kt) in k.iter_mut().enumerate() {
            let start = j; // t = lo + j, window [a + t, b + t]
            *kt = prefix[start + width as usize] - prefix[start];
        }
    } else {
        for &p in &pts {
            for &x in &xs {
                let t = p - x;
                if (lo..=hi).contains(&t) {
                    k[(t - lo) as usize] += 1;
                }
            }
        }
    }
    let lower = pow2(k.iter().copied().max().unwrap_or(0));
    let mut upper = k
        .iter()
        .fold(1u128, |acc, &kt| acc.saturating_add(pow2(kt)));
    if !support.is_finite() {
        upper = upper.saturating_add(2 * xs.len() as u128);
    }
    (lower, upper.min(pow2(xs.len() as u32)).max(lower))
}

fn free_bits_language(
    support: &IndexSet,
    shape: &Shape,
    opts: &LanguageOptions,
) -> Result<PatternTable> {
    if shape.dim() != 1 {
        return Err(Error::UnsupportedDimension(shape.dim()));
    }
    if shape.len() > 128 {
        let (lower, upper) = free_bits_bounds(support, shape);
        return Ok(PatternTable::bounds_only(shape.clone(), lower, upper));
    }
    let maximal = free_bits_supports(support, shape)?;
    let upper: u128 = maximal
        .iter()
        .fold(0u128, |acc, m| acc.saturating_add(pow2(m.count_ones())));
    let lower: u128 = maximal
        .iter()
        .map(|m| pow2(m.count_ones()))
        .max()
        .unwrap_or(1);
    if upper > opts.max_patterns as u128 * 4 {
        return Ok(PatternTable::bounds_only(
            shape.clone(),
            lower,
            upper.min(pow2(shape.len() as u32)),
        ));
    }
    let mut all: HashSet<u128> = HashSet::new();
    for &m in &maximal {
        // enumerate the subsets of m
        let mut sub = m;
        loop {
            all.insert(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & m;
        }
    }
    if all.len() > opts.max_patterns {
        return Ok(PatternTable::bounds_only(
            shape.clone(),
            all.len() as u128,
            all.len() as u128,
        ));
    }
    let n = shape.len();
    let rows = all
        .into_iter()
        .map(|m| (0..n).map(|i| ((m >> i) & 1) as u8).collect())
        .collect();
    Ok(PatternTable::from_rows(
        shape.clone(),
        rows,
        TableMode::Exact,
    ))
}

fn product_language(
    factors: &[LanguageSource],
    shape: &Shape,
    opts: &LanguageOptions,
) -> Result<PatternTable> {
    let tables = factors
        .iter()
        .map(|f| f.language(shape, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut lo = 1u128;
    let mut hi = 1u128;
    for t in &tables {
        let (a, b) = t.count_bounds();
        lo = lo.saturating_mul(a);
        hi = hi.saturating_mul(b);
    }
    if tables.iter().any(|t| !t.is_materialized()) || hi > opts.max_patterns as u128 {
        return Ok(PatternTable::bounds_only(shape.clone(), lo, hi));
    }
    let mode = tables
        .iter()
        .map(|t| t.mode().clone())
        .find(|m| *m != TableMode::Exact)
        .unwrap_or(TableMode::Exact);
    let radices: Vec<usize> = factors.iter().map(|f| f.alphabet).collect();
    let n = shape.len();
    let mut rows: Vec<Vec<u8>> = vec![vec![0u8; n]];
    let mut place = 1usize;
    for (t, k) in tables.iter().zip(&radices) {
        let mut next = Vec::with_capacity(rows.len() * t.len());
        for r in &rows {
            for row in t.rows() {
                let mut v = r.clone();
                for (i, s) in row.iter().enumerate() {
                    v[i] += (*s as usize * place) as u8;
                }
                next.push(v);
            }
        }
        rows = next;
        place *= k;
    }
    Ok(PatternTable::from_rows(shape.clone(), rows, mode))
}

/// `product_system` as a free function.
pub fn product_system(sources: Vec<LanguageSource>) -> Result<LanguageSource> {
    LanguageSource::product(sources)
}

/// Splits a product symbol into its factor symbols.
pub fn split_symbol(mut s: u8, radices: &[usize]) -> Vec<u8> {
    radices
        .iter()
        .map(|&k| {
            let v = s as usize % k;
            s = (s as usize / k) as u8;
            v as u8
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> LanguageOptions {
        LanguageOptions::default()
    }

    #[test]
    fn full_shift_and_golden_mean() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        for n in 1..12 {
            assert_eq!(
                full.language(&Shape::interval(0, n), &opts())
                    .unwrap()
                    .len(),
                1 << n
            );
        }
        let gm = LanguageSource::golden_mean();
        assert_eq!(
            gm.language(&Shape::interval(0, 4), &opts()).unwrap().len(),
            8
        );
    }

    #[test]
    fn squares_free_bits_contain_all_subsets_of_squares() {
        let fb = LanguageSource::free_bits(IndexSet::power(2.0));
        let t = fb.language(&Shape::interval(0, 16), &opts()).unwrap();
        assert!(t.len() >= 16);
        for m in 0u32..16 {
            let mut row = vec![0u8; 16];
            for (i, p) in [0usize, 1, 4, 9].iter().enumerate() {
                if m >> i & 1 == 1 {
                    row[*p] = 1;
                }
            }
            assert!(t.contains(&row));
        }
    }

    #[test]
    fn sliding_bounds_bracket_exact_free_bits_counts() {
        let sets = [
            IndexSet::power(2.0),
            IndexSet::explicit_1d([0, 1, 2, 10, 11, 30], "blocks"),
        ];
        for s in &sets {
            let fb = LanguageSource::free_bits(s.clone());
            for n in [1, 5, 16, 40] {
                let shape = Shape::interval(0, n);
                let exact = fb.language(&shape, &opts()).unwrap().len() as u128;
                let (lo, hi) = free_bits_bounds(s, &shape);
                assert!(lo <= exact && exact <= hi, "{lo} {exact} {hi}");
                let sparse = Shape::from_1d([0, 3, 7]);
                let exact = fb.language(&sparse, &opts()).unwrap().len() as u128;
                let (lo, hi) = free_bits_bounds(s, &sparse);
                assert!(lo <= exact && exact <= hi);
            }
        }
    }

    #[test]
    fn products_multiply_counts() {
        let gm = LanguageSource::golden_mean();
        let p = product_system(vec![gm.clone(), gm]).unwrap();
        assert_eq!(
            p.language(&Shape::interval(0, 4), &opts()).unwrap().len(),
            64
        );
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let sq = product_system(vec![full.clone(), full.clone()]).unwrap();
        let four = LanguageSource::full_shift(1, 4).unwrap();
        let s = Shape::interval(0, 5);
        assert_eq!(
            sq.language(&s, &opts()).unwrap(),
            four.language(&s, &opts()).unwrap()
        );
        let with_point =
            product_system(vec![full.clone(), LanguageSource::fixed_point(1).unwrap()]).unwrap();
        assert_eq!(
            with_point.language(&s, &opts()).unwrap().len(),
            full.language(&s, &opts()).unwrap().len()
        );
        assert!(product_system(vec![full, LanguageSource::full_shift(2, 2).unwrap()]).is_err());
    }

    #[test]
    fn two_dimensional_local_language() {
        // no two horizontally adjacent ones
        let gm2 = LanguageSource::sft(2, 2, vec![Pattern::block(&["11"]).unwrap()]).unwrap();
        let t = gm2.language(&Shape::rect(0, 2, 0, 2), &opts()).unwrap();
        assert_eq!(t.len(), 9);
        assert_eq!(t.mode(), &TableMode::LocallyAdmissible { margin: 1 });
        let full = LanguageSource::full_shift(2, 2).unwrap();
        assert_eq!(
            full.language(&Shape::rect(0, 2, 0, 2), &opts())
                .unwrap()
                .len(),
            16
        );
    }

    #[test]
    fn empty_sft_is_flagged_empty() {
        let none = LanguageSource::sft_words(2, &["00", "01", "10", "11"]).unwrap();
        assert!(none
            .language(&Shape::interval(0, 3), &opts())
            .unwrap()
            .is_empty());
    }
}
