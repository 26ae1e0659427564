//! Finite geometry of ℤ and ℤ²: points, finite shapes, Følner box sequences
//! and index sets with their counting data.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of ℤ^d for d ∈ {1, 2}. In dimension 1 the second coordinate is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupPoint(pub [i64; 2]);

impl GroupPoint {
    pub const ORIGIN: GroupPoint = GroupPoint([0, 0]);

    pub fn d1(x: i64) -> Self {
        GroupPoint([x, 0])
    }

    pub fn d2(x: i64, y: i64) -> Self {
        GroupPoint([x, y])
    }

    pub fn x(&self) -> i64 {
        self.0[0]
    }

    pub fn y(&self) -> i64 {
        self.0[1]
    }

    pub fn add(self, other: GroupPoint) -> GroupPoint {
        GroupPoint([self.0[0] + other.0[0], self.0[1] + other.0[1]])
    }

    pub fn sub(self, other: GroupPoint) -> GroupPoint {
        GroupPoint([self.0[0] - other.0[0], self.0[1] - other.0[1]])
    }

    pub fn neg(self) -> GroupPoint {
        GroupPoint([-self.0[0], -self.0[1]])
    }

    /// Sup-norm, used by the cylinder metric.
    pub fn norm_inf(&self) -> i64 {
        self.0[0].abs().max(self.0[1].abs())
    }

    pub fn coords(&self, dim: usize) -> Vec<i64> {
        self.0[..dim].to_vec()
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0[0], self.0[1])
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// A finite subset of ℤ^d, stored sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dim: usize,
    points: Vec<GroupPoint>,
}

impl Shape {
    pub fn new(dim: usize, points: impl IntoIterator<Item = GroupPoint>) -> Result<Self> {
        check_dim(dim)?;
        let mut points: Vec<GroupPoint> = points.into_iter().collect();
        if dim == 1 && points.iter().any(|p| p.y() != 0) {
            return Err(Error::InvalidArgument(
                "1-d shape with non-zero second coordinate".into(),
            ));
        }
        points.sort_unstable();
        points.dedup();
        Ok(Shape { dim, points })
    }

    pub fn empty(dim: usize) -> Self {
        Shape {
            dim,
            points: Vec::new(),
        }
    }

    pub fn singleton(dim: usize, p: GroupPoint) -> Self {
        Shape {
            dim,
            points: vec![p],
        }
    }

    /// `{a, a+1, .., b-1}` in ℤ.
    pub fn interval(a: i64, b: i64) -> Self {
        Shape {
            dim: 1,
            points: (a..b).map(GroupPoint::d1).collect(),
        }
    }

    pub fn from_1d(xs: impl IntoIterator<Item = i64>) -> Self {
        Shape::new(1, xs.into_iter().map(GroupPoint::d1)).expect("dimension 1 is valid")
    }

    /// `[x0, x1) × [y0, y1)` in ℤ².
    pub fn rect(x0: i64, x1: i64, y0: i64, y1: i64) -> Self {
        let mut points = Vec::new();
        for x in x0..x1 {
            for y in y0..y1 {
                points.push(GroupPoint::d2(x, y));
            }
        }
        Shape { dim: 2, points }
    }

    /// The box `[0, side)^dim`.
    pub fn cube(dim: usize, side: i64) -> Result<Self> {
        check_dim(dim)?;
        Ok(if dim == 1 {
            Shape::interval(0, side)
        } else {
            Shape::rect(0, side, 0, side)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupPoint> {
        self.points.iter()
    }

    pub fn contains(&self, p: &GroupPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &GroupPoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn is_subset(&self, other: &Shape) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    fn same_dim(&self, other: &Shape) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        } else {
            Ok(())
        }
    }

    pub fn translate(&self, g: GroupPoint) -> Shape {
        Shape {
            dim: self.dim,
            points: self.points.iter().map(|p| p.add(g)).collect(),
        }
    }

    /// `KF = {k + f}`.
    pub fn product(&self, other: &Shape) -> Result<Shape> {
        self.same_dim(other)?;
        let mut set = BTreeSet::new();
        for k in &self.points {
            for f in &other.points {
                set.insert(k.add(*f));
            }
        }
        Ok(Shape {
            dim: self.dim,
            points: set.into_iter().collect(),
        })
    }

    pub fn union(&self, other: &Shape) -> Result<Shape> {
        self.same_dim(other)?;
        Shape::new(
            self.dim,
            self.points.iter().chain(other.points.iter()).copied(),
        )
    }

    pub fn intersection(&self, other: &Shape) -> Result<Shape> {
        self.same_dim(other)?;
        Ok(Shape {
            dim: self.dim,
            points: self
                .points
                .iter()
                .filter(|p| other.contains(p))
                .copied()
                .collect(),
        })
    }

    pub fn difference(&self, other: &Shape) -> Result<Shape> {
        self.same_dim(other)?;
        Ok(Shape {
            dim: self.dim,
            points: self
                .points
                .iter()
                .filter(|p| !other.contains(p))
                .copied()
                .collect(),
        })
    }

    pub fn symmetric_difference_len(&self, other: &Shape) -> Result<usize> {
        self.same_dim(other)?;
        let a = self.points.iter().filter(|p| !other.contains(p)).count();
        let b = other.points.iter().filter(|p| !self.contains(p)).count();
        Ok(a + b)
    }

    /// Smallest box containing the shape.
    pub fn hull(&self) -> Shape {
        if self.points.is_empty() {
            return self.clone();
        }
        let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for p in &self.points {
            x0 = x0.min(p.x());
            x1 = x1.max(p.x());
            y0 = y0.min(p.y());
            y1 = y1.max(p.y());
        }
        if self.dim == 1 {
            Shape::interval(x0, x1 + 1)
        } else {
            Shape::rect(x0, x1 + 1, y0, y1 + 1)
        }
    }

    pub fn is_box(&self) -> bool {
        self.hull().len() == self.len()
    }

    /// `{u : u + w ∈ self for all w ∈ window}`.
    pub fn erode(&self, window: &Shape) -> Result<Shape> {
        self.same_dim(window)?;
        if window.is_empty() {
            return Ok(self.clone());
        }
        let w0 = window.points[0];
        let pts = self
            .points
            .iter()
            .map(|p| p.sub(w0))
            .filter(|u| window.points.iter().all(|w| self.contains(&u.add(*w))))
            .collect::<BTreeSet<_>>();
        Ok(Shape {
            dim: self.dim,
            points: pts.into_iter().collect(),
        })
    }

    /// Max sup-norm of the points; 0 for the empty shape.
    pub fn radius(&self) -> i64 {
        self.points.iter().map(|p| p.norm_inf()).max().unwrap_or(0)
    }

    pub fn min_point(&self) -> Option<GroupPoint> {
        self.points.first().copied()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if self.dim == 1 {
                write!(f, "{}", p.x())?;
            } else {
                write!(f, "{p}")?;
            }
        }
        write!(f, "}}")
    }
}

/// `|KF △ F| / |F|` as an exact rational.
pub fn invariance_defect(k: &Shape, f: &Shape) -> Result<Ratio<u64>> {
    if f.is_empty() {
        return Err(Error::EmptyShape);
    }
    let kf = k.product(f)?;
    let sym = kf.symmetric_difference_len(f)?;
    Ok(Ratio::new(sym as u64, f.len() as u64))
}

/// `K ⊕ F`, the group product of two shapes.
pub fn shape_product(k: &Shape, f: &Shape) -> Result<Shape> {
    k.product(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum FolnerKind {
    Boxes,
    Explicit(Vec<Shape>),
}

/// An indexed family of finite shapes `F_0 ⊆ F_1 ⊆ ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolnerSequence {
    dim: usize,
    count: usize,
    kind: FolnerKind,
    monotone: bool,
}

impl FolnerSequence {
    /// Boxes `F_n = [0, n+1)^dim` for `n = 0..count`.
    pub fn boxes(dim: usize, count: usize) -> Result<Self> {
        check_dim(dim)?;
        if count == 0 {
            return Err(Error::InvalidArgument(
                "Følner sequence needs count ≥ 1".into(),
            ));
        }
        Ok(FolnerSequence {
            dim,
            count,
            kind: FolnerKind::Boxes,
            monotone: true,
        })
    }

    /// Takes an explicit list. With `monotone = true` the list must be strictly
    /// increasing under inclusion and `F_0` must contain the origin.
    pub fn explicit(shapes: Vec<Shape>, monotone: bool) -> Result<Self> {
        let first = shapes
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Følner list".into()))?;
        let dim = first.dim();
        for s in &shapes {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: s.dim(),
                });
            }
            if s.is_empty() {
                return Err(Error::EmptyShape);
            }
        }
        if monotone {
            if !first.contains(&GroupPoint::ORIGIN) {
                return Err(Error::InvalidArgument(
                    "F_0 must contain the identity".into(),
                ));
            }
            for w in shapes.windows(2) {
                if !(w[0].is_subset(&w[1]) && w[0].len() < w[1].len()) {
                    return Err(Error::InvalidArgument(
                        "shapes are not strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(FolnerSequence {
            dim,
            count: shapes.len(),
            kind: FolnerKind::Explicit(shapes),
            monotone,
        })
    }

    /// Cumulative-union normalisation `F*_1 = {e} ∪ F'_{n_1}`, `F*_k = F*_{k-1} ∪ F'_{n_k}`,
    /// dropping stages that do not grow so the result is strictly increasing.
    pub fn normalized(shapes: &[Shape]) -> Result<Self> {
        let first = shapes
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Følner list".into()))?;
        let dim = first.dim();
        let mut acc = Shape::singleton(dim, GroupPoint::ORIGIN);
        let mut out: Vec<Shape> = Vec::new();
        for s in shapes {
            acc = acc.union(s)?;
            if out.last().map(|l| l.len() < acc.len()).unwrap_or(true) {
                out.push(acc.clone());
            }
        }
        FolnerSequence::explicit(out, true)
    }

    /// The box sequence restricted to the given indices, normalised.
    pub fn subsequence(&self, indices: &[usize]) -> Result<Self> {
        let shapes = indices
            .iter()
            .map(|&i| self.shape(i))
            .collect::<Result<Vec<_>>>()?;
        FolnerSequence::normalized(&shapes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn is_boxes(&self) -> bool {
        matches!(self.kind, FolnerKind::Boxes)
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n >= self.count {
            Err(Error::InvalidArgument(format!(
                "index {n} outside Følner range 0..{}",
                self.count
            )))
        } else {
            Ok(())
        }
    }

    pub fn shape(&self, n: usize) -> Result<Shape> {
        self.check_index(n)?;
        Ok(match &self.kind {
            FolnerKind::Boxes => Shape::cube(self.dim, n as i64 + 1)?,
            FolnerKind::Explicit(v) => v[n].clone(),
        })
    }

    pub fn size(&self, n: usize) -> Result<usize> {
        self.check_index(n)?;
        Ok(match &self.kind {
            FolnerKind::Boxes => (n + 1).pow(self.dim as u32),
            FolnerKind::Explicit(v) => v[n].len(),
        })
    }

    /// `F_n ∖ F_{n-1}` (with `F_{-1} = ∅`), for monotone sequences.
    pub fn annulus(&self, n: usize) -> Result<Vec<GroupPoint>> {
        self.check_index(n)?;
        match &self.kind {
            FolnerKind::Boxes => {
                let m = n as i64;
                if self.dim == 1 {
                    Ok(vec![GroupPoint::d1(m)])
                } else {
                    let mut v: Vec<GroupPoint> = (0..=m).map(|y| GroupPoint::d2(m, y)).collect();
                    v.extend((0..m).map(|x| GroupPoint::d2(x, m)));
                    v.sort_unstable();
                    Ok(v)
                }
            }
            FolnerKind::Explicit(v) => {
                if n == 0 {
                    Ok(v[0].points().to_vec())
                } else {
                    Ok(v[n].difference(&v[n - 1])?.points().to_vec())
                }
            }
        }
    }
}

/// One block `{from, from + stride, ...} ∩ [from, to)` of a block-wise index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub from: i64,
    pub to: i64,
    #[serde(default = "one")]
    pub stride: i64,
}

fn one() -> i64 {
    1
}

/// Membership rule of an [`IndexSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexRule {
    /// `{⌊j^p⌋ : j ≥ 0}` in ℤ, `p ≥ 1`.
    Power {
        p: f64,
    },
    /// Finite explicit list; points are `[x]` or `[x, y]`.
    Explicit {
        points: Vec<Vec<i64>>,
    },
    /// Finite union of arithmetic blocks in ℤ.
    Blocks {
        blocks: Vec<Block>,
    },
    /// `{x : x ≥ 0}` in ℤ, or the non-negative quadrant in ℤ².
    NonNegative,
    /// The whole group.
    All,
    Empty,
}

/// A subset `S ⊆ G` given by a membership rule.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    pub rule: IndexRule,
    pub label: String,
    explicit: BTreeSet<GroupPoint>,
}

impl IndexSet {
    pub fn new(rule: IndexRule, label: impl Into<String>) -> Result<Self> {
        let mut explicit = BTreeSet::new();
        match &rule {
            IndexRule::Power { p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "power rule needs p ≥ 1, got {p}"
                    )));
                }
            }
            IndexRule::Explicit { points } => {
                for c in points {
                    let g = match c.as_slice() {
                        [x] => GroupPoint::d1(*x),
                        [x, y] => GroupPoint::d2(*x, *y),
                        _ => return Err(Error::UnsupportedDimension(c.len())),
                    };
                    explicit.insert(g);
                }
            }
            IndexRule::Blocks { blocks } => {
                for b in blocks {
                    if b.stride <= 0 {
                        return Err(Error::InvalidArgument(
                            "block stride must be positive".into(),
                        ));
                    }
                    let mut x = b.from;
                    while x < b.to {
                        explicit.insert(GroupPoint::d1(x));
                        x += b.stride;
                    }
                }
            }
            _ => {}
        }
        Ok(IndexSet {
            rule,
            label: label.into(),
            explicit,
        })
    }

    pub fn power(p: f64) -> Self {
        IndexSet::new(IndexRule::Power { p }, format!("power({p})")).expect("valid power")
    }

    pub fn explicit_1d(xs: impl IntoIterator<Item = i64>, label: impl Into<String>) -> Self {
        let points = xs.into_iter().map(|x| vec![x]).collect();
        IndexSet::new(IndexRule::Explicit { points }, label).expect("valid explicit set")
    }

    pub fn from_points(
        points: impl IntoIterator<Item = GroupPoint>,
        dim: usize,
        label: impl Into<String>,
    ) -> Self {
        let points = points.into_iter().map(|p| p.coords(dim)).collect();
        IndexSet::new(IndexRule::Explicit { points }, label).expect("valid explicit set")
    }

    pub fn non_negative() -> Self {
        IndexSet::new(IndexRule::NonNegative, "nonnegative").expect("valid")
    }

    pub fn all() -> Self {
        IndexSet::new(IndexRule::All, "all").expect("valid")
    }

    pub fn empty() -> Self {
        IndexSet::new(IndexRule::Empty, "empty").expect("valid")
    }

    pub fn contains(&self, g: &GroupPoint) -> bool {
        match &self.rule {
            IndexRule::Power { p } => g.y() == 0 && power_contains(*p, g.x()),
            IndexRule::Explicit { .. } | IndexRule::Blocks { .. } => self.explicit.contains(g),
            IndexRule::NonNegative => g.x() >= 0 && g.y() >= 0,
            IndexRule::All => true,
            IndexRule::Empty => false,
        }
    }

    /// Whether the set is finite (only explicit and block rules, and the empty set).
    pub fn is_finite(&self) -> bool {
        matches!(
            self.rule,
            IndexRule::Explicit { .. } | IndexRule::Blocks { .. } | IndexRule::Empty
        )
    }

    /// Points of `S` in ℤ lying in `[lo, hi)`, sorted.
    pub fn points_1d_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        match &self.rule {
            IndexRule::Power { p } => {
                let mut out = Vec::new();
                let mut j: u64 = 0;
                loop {
                    let v = floor_pow(j, *p);
                    if v >= hi {
                        break;
                    }
                    if v >= lo && out.last() != Some(&v) {
                        out.push(v);
                    }
                    j += 1;
                }
                out
            }
            IndexRule::Explicit { .. } | IndexRule::Blocks { .. } => self
                .explicit
                .range(GroupPoint::d1(lo)..GroupPoint::d1(hi))
                .filter(|g| g.y() == 0)
                .map(|g| g.x())
                .collect(),
            IndexRule::NonNegative => (lo.max(0)..hi.max(0)).collect(),
            IndexRule::All => (lo..hi).collect(),
            IndexRule::Empty => Vec::new(),
        }
    }

    /// `S ∩ shape` as a shape.
    pub fn intersect(&self, shape: &Shape) -> Shape {
        Shape::new(
            shape.dim(),
            shape.iter().filter(|g| self.contains(g)).copied(),
        )
        .expect("same dim")
    }

    /// Smallest coordinate `h` such that every window of length `width` starting at or beyond `h`
    /// sees at most one point of `S`, or the whole window lies in `S` (for the non-negative/all
    /// rules). Translates of `S` beyond `h` then add no new local configurations.
    pub fn horizon_1d(&self, width: i64) -> i64 {
        match &self.rule {
            IndexRule::Power { p } => {
                let mut j: u64 = 1;
                loop {
                    let a = floor_pow(j, *p);
                    let b = floor_pow(j + 1, *p);
                    if b - a >= width || (*p == 1.0) {
                        return a + width;
                    }
                    j += 1;
                }
            }
            IndexRule::Explicit { .. } | IndexRule::Blocks { .. } => {
                self.explicit.iter().map(|g| g.x()).max().unwrap_or(0) + 1
            }
            IndexRule::NonNegative | IndexRule::All => width,
            IndexRule::Empty => 0,
        }
    }

    /// Smallest coordinate of `S` in ℤ relevant for translates (clipped for unbounded-below rules).
    pub fn lower_end_1d(&self, width: i64) -> i64 {
        match &self.rule {
            IndexRule::Explicit { .. } | IndexRule::Blocks { .. } => {
                self.explicit.iter().map(|g| g.x()).min().unwrap_or(0)
            }
            IndexRule::All => -width,
            _ => 0,
        }
    }
}

fn floor_pow(j: u64, p: f64) -> i64 {
    if p.fract() == 0.0 && p <= 6.0 {
        (j as i64).pow(p as u32)
    } else {
        (j as f64).powf(p).floor() as i64
    }
}

fn power_contains(p: f64, x: i64) -> bool {
    if x < 0 {
        return false;
    }
    let guess = (x as f64).powf(1.0 / p).floor() as i64;
    (guess.saturating_sub(2).max(0)..=guess + 2).any(|j| floor_pow(j as u64, p) == x)
}

/// One row of [`index_counts`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub n: usize,
    pub count: u64,
    pub size: u64,
}

impl CountRow {
    pub fn density(&self) -> Ratio<u64> {
        Ratio::new(self.count, self.size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexCounts {
    pub rows: Vec<CountRow>,
    /// Finite proxy for `S ∈ 𝓘(G)`: the count grew over the second half of the range.
    pub unbounded: bool,
}

impl IndexCounts {
    pub fn densities(&self) -> Vec<Ratio<u64>> {
        self.rows.iter().map(CountRow::density).collect()
    }
}

/// Exact counts `|S ∩ F_n|` for `n = 0..=n_max`.
pub fn index_counts(s: &IndexSet, folner: &FolnerSequence, n_max: usize) -> Result<IndexCounts> {
    if n_max >= folner.len() {
        return Err(Error::InvalidArgument(format!(
            "n_max {n_max} outside Følner range {}",
            folner.len()
        )));
    }
    let mut rows = Vec::with_capacity(n_max + 1);
    if folner.is_monotone() {
        let mut count = 0u64;
        for n in 0..=n_max {
            count += folner.annulus(n)?.iter().filter(|g| s.contains(g)).count() as u64;
            rows.push(CountRow {
                n,
                count,
                size: folner.size(n)? as u64,
            });
        }
    } else {
        for n in 0..=n_max {
            let shape = folner.shape(n)?;
            let count = shape.iter().filter(|g| s.contains(g)).count() as u64;
            rows.push(CountRow {
                n,
                count,
                size: shape.len() as u64,
            });
        }
    }
    let mid = rows[rows.len() / 2].count;
    let unbounded = rows.last().map(|r| r.count > mid).unwrap_or(false);
    Ok(IndexCounts { rows, unbounded })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxes_in_one_and_two_dimensions() {
        let f = FolnerSequence::boxes(1, 3).unwrap();
        assert_eq!(f.shape(0).unwrap(), Shape::from_1d([0]));
        assert_eq!(f.shape(2).unwrap(), Shape::from_1d([0, 1, 2]));
        let g = FolnerSequence::boxes(2, 2).unwrap();
        assert_eq!(g.shape(0).unwrap(), Shape::singleton(2, GroupPoint::ORIGIN));
        assert_eq!(g.shape(1).unwrap(), Shape::rect(0, 2, 0, 2));
        let big = FolnerSequence::boxes(1, 100).unwrap();
        for n in 0..100 {
            assert_eq!(big.size(n).unwrap(), n + 1);
            assert_eq!(big.shape(n).unwrap().len(), n + 1);
        }
        assert_eq!(
            FolnerSequence::boxes(3, 2),
            Err(Error::UnsupportedDimension(3))
        );
    }

    #[test]
    fn products_of_shapes() {
        let k = Shape::from_1d([0, 1]);
        assert_eq!(
            shape_product(&k, &Shape::from_1d([0, 1, 2])).unwrap(),
            Shape::interval(0, 4)
        );
        let f = Shape::from_1d([3, 7, -2]);
        assert_eq!(shape_product(&Shape::from_1d([0]), &f).unwrap(), f);
        let sq = Shape::rect(0, 2, 0, 2);
        assert_eq!(shape_product(&sq, &sq).unwrap(), Shape::rect(0, 3, 0, 3));
        assert!(matches!(
            shape_product(&k, &sq),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn defects_match_boundary_counts() {
        let k = Shape::from_1d([0, 1]);
        for n in 1..30 {
            assert_eq!(
                invariance_defect(&k, &Shape::interval(0, n)).unwrap(),
                Ratio::new(1, n as u64)
            );
            assert_eq!(
                invariance_defect(&Shape::from_1d([0]), &Shape::interval(0, n)).unwrap(),
                Ratio::from_integer(0)
            );
        }
        let k2 = Shape::rect(0, 2, 0, 2);
        for n in 1..12u64 {
            let f = Shape::rect(0, n as i64, 0, n as i64);
            assert_eq!(
                invariance_defect(&k2, &f).unwrap(),
                Ratio::new(2 * n + 1, n * n)
            );
        }
        assert_eq!(
            invariance_defect(&k, &Shape::empty(1)),
            Err(Error::EmptyShape)
        );
    }

    #[test]
    fn counts_of_squares_and_trivial_sets() {
        let f = FolnerSequence::boxes(1, 20).unwrap();
        let sq = index_counts(&IndexSet::power(2.0), &f, 15).unwrap();
        assert_eq!(sq.rows[15].count, 4);
        let all = index_counts(&IndexSet::all(), &f, 19).unwrap();
        assert!(all.rows.iter().all(|r| r.count == r.size));
        assert!(all.densities().iter().all(|d| *d == Ratio::from_integer(1)));
        let empty = index_counts(&IndexSet::empty(), &f, 19).unwrap();
        assert!(empty.rows.iter().all(|r| r.count == 0));
        assert!(!empty.unbounded);
    }

    #[test]
    fn normalization_is_cumulative_and_strict() {
        let seq = FolnerSequence::normalized(&[
            Shape::interval(0, 3),
            Shape::interval(0, 2),
            Shape::interval(2, 6),
        ])
        .unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(seq.shape(1).unwrap(), Shape::interval(0, 6));
        assert!(FolnerSequence::explicit(vec![Shape::interval(1, 3)], true).is_err());
    }

    #[test]
    fn erosion_and_hull() {
        let s = Shape::from_1d([0, 1, 2, 5]);
        assert_eq!(
            s.erode(&Shape::from_1d([0, 1])).unwrap(),
            Shape::from_1d([0, 1])
        );
        assert_eq!(s.hull(), Shape::interval(0, 6));
        assert!(!s.is_box());
    }

    #[test]
    fn power_membership() {
        let s = IndexSet::power(2.0);
        let pts: Vec<i64> = (0..50)
            .filter(|x| s.contains(&GroupPoint::d1(*x)))
            .collect();
        assert_eq!(pts, vec![0, 1, 4, 9, 16, 25, 36, 49]);
        assert_eq!(s.points_1d_in(0, 50), pts);
        let c = IndexSet::power(1.5);
        let q: Vec<i64> = c.points_1d_in(0, 30);
        let r: Vec<i64> = (0..30)
            .filter(|x| c.contains(&GroupPoint::d1(*x)))
            .collect();
        assert_eq!(q, r);
    }
}
