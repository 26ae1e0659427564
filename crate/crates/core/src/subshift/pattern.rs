use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{GroupPoint, Shape};

/// Encodes a symbol id as a single character (`0-9a-z`).
pub fn symbol_char(s: u8) -> char {
    std::char::from_digit(s as u32, 36).unwrap_or('?')
}

pub fn parse_symbol(c: char) -> Result<u8> {
    c.to_digit(36)
        .map(|d| d as u8)
        .ok_or_else(|| Error::InvalidArgument(format!("bad symbol character {c:?}")))
}

/// Parses a word like `"0110"` into symbol ids.
pub fn parse_word(s: &str) -> Result<Vec<u8>> {
    s.chars().map(parse_symbol).collect()
}

pub fn word_string(w: &[u8]) -> String {
    w.iter().map(|&s| symbol_char(s)).collect()
}

/// A finite pattern: a shape together with a symbol at each of its points
/// (stored in the shape's sorted point order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    shape: Shape,
    symbols: Vec<u8>,
}

impl Pattern {
    pub fn new(shape: Shape, symbols: Vec<u8>) -> Result<Self> {
        if shape.len() != symbols.len() {
            return Err(Error::InvalidArgument(format!(
                "pattern has {} symbols for a shape of {} points",
                symbols.len(),
                shape.len()
            )));
        }
        Ok(Pattern { shape, symbols })
    }

    /// A 1-d word placed on `[offset, offset + len)`.
    pub fn word_at(word: &str, offset: i64) -> Result<Self> {
        let symbols = parse_word(word)?;
        let shape = Shape::interval(offset, offset + symbols.len() as i64);
        Pattern::new(shape, symbols)
    }

    pub fn word(word: &str) -> Result<Self> {
        Pattern::word_at(word, 0)
    }

    /// A 2-d block given as rows (row `y` is `rows[y]`, column `x` its `x`-th character).
    pub fn block(rows: &[&str]) -> Result<Self> {
        let height = rows.len() as i64;
        let width = rows.first().map(|r| r.chars().count()).unwrap_or(0) as i64;
        if rows.iter().any(|r| r.chars().count() as i64 != width) {
            return Err(Error::InvalidArgument("ragged 2-d block".into()));
        }
        let shape = Shape::rect(0, width, 0, height);
        let grid: Vec<Vec<u8>> = rows.iter().map(|r| parse_word(r)).collect::<Result<_>>()?;
        let symbols = shape
            .iter()
            .map(|p| grid[p.y() as usize][p.x() as usize])
            .collect();
        Pattern::new(shape, symbols)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn get(&self, p: &GroupPoint) -> Option<u8> {
        self.shape.index_of(p).map(|i| self.symbols[i])
    }

    pub fn max_symbol(&self) -> Option<u8> {
        self.symbols.iter().copied().max()
    }

    /// Restriction to a sub-shape.
    pub fn restrict(&self, sub: &Shape) -> Result<Pattern> {
        let mut symbols = Vec::with_capacity(sub.len());
        let mut missing = Vec::new();
        for p in sub.iter() {
            match self.get(p) {
                Some(s) => symbols.push(s),
                None => missing.push(p.coords(sub.dim())),
            }
        }
        if !missing.is_empty() {
            return Err(Error::Margin { missing });
        }
        Pattern::new(sub.clone(), symbols)
    }

    pub fn translate(&self, g: GroupPoint) -> Pattern {
        Pattern {
            shape: self.shape.translate(g),
            symbols: self.symbols.clone(),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shape.dim() == 1 {
            write!(f, "{}", word_string(&self.symbols))
        } else {
            let mut first = true;
            for (p, s) in self.shape.iter().zip(&self.symbols) {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{}:{}", p, symbol_char(*s))?;
            }
            Ok(())
        }
    }
}

/// How a [`PatternTable`] relates to the true language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableMode {
    /// Exactly the globally admissible patterns.
    Exact,
    /// Patterns that are locally admissible on the shape inflated by `margin`,
    /// restricted to the shape: an upper approximation.
    LocallyAdmissible { margin: usize },
    /// Too many patterns to materialise; only a certified count interval is known.
    Bounds { lower: u128, upper: u128 },
}

/// A canonical (sorted, duplicate-free) set of patterns on a fixed shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTable {
    shape: Shape,
    width: usize,
    data: Vec<u8>,
    mode: TableMode,
    /// Set by fiber queries when the codomain pattern is not admissible.
    pub unreachable: bool,
}

impl PatternTable {
    /// Builds a table from arbitrary rows; sorts and deduplicates.
    pub fn from_rows(shape: Shape, mut rows: Vec<Vec<u8>>, mode: TableMode) -> Self {
        rows.sort_unstable();
        rows.dedup();
        let width = shape.len();
        let mut data = Vec::with_capacity(rows.len() * width);
        for r in &rows {
            debug_assert_eq!(r.len(), width);
            data.extend_from_slice(r);
        }
        PatternTable {
            shape,
            width,
            data,
            mode,
            unreachable: false,
        }
    }

    /// Builds from a flat buffer already in canonical order.
    pub(crate) fn from_sorted_flat(shape: Shape, data: Vec<u8>, mode: TableMode) -> Self {
        let width = shape.len();
        PatternTable {
            shape,
            width,
            data,
            mode,
            unreachable: false,
        }
    }

    pub fn bounds_only(shape: Shape, lower: u128, upper: u128) -> Self {
        let width = shape.len();
        PatternTable {
            shape,
            width,
            data: Vec::new(),
            mode: TableMode::Bounds { lower, upper },
            unreachable: false,
        }
    }

    pub fn empty(shape: Shape) -> Self {
        PatternTable::from_rows(shape, Vec::new(), TableMode::Exact)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn mode(&self) -> &TableMode {
        &self.mode
    }

    pub fn is_materialized(&self) -> bool {
        !matches!(self.mode, TableMode::Bounds { .. })
    }

    /// Number of stored patterns. For a zero-point shape the single empty pattern counts once.
    pub fn len(&self) -> usize {
        if !self.is_materialized() {
            return 0;
        }
        if self.width == 0 {
            return usize::from(!self.data.is_empty() || !self.unreachable_empty_marker());
        }
        self.data.len() / self.width
    }

    fn unreachable_empty_marker(&self) -> bool {
        self.unreachable
    }

    /// Count, or its certified interval for unmaterialised tables.
    pub fn count_bounds(&self) -> (u128, u128) {
        match self.mode {
            TableMode::Bounds { lower, upper } => (lower, upper),
            _ => (self.len() as u128, self.len() as u128),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count_bounds().1 == 0
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }

    pub fn pattern(&self, i: usize) -> Pattern {
        Pattern::new(self.shape.clone(), self.row(i).to_vec()).expect("row width matches shape")
    }

    pub fn contains(&self, symbols: &[u8]) -> bool {
        self.position(symbols).is_some()
    }

    pub fn position(&self, symbols: &[u8]) -> Option<usize> {
        if symbols.len() != self.width || !self.is_materialized() {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(symbols) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Projects every row onto `sub` (a subset of the table's shape), deduplicating.
    pub fn project(&self, sub: &Shape) -> Result<PatternTable> {
        let idx = positions_in(&self.shape, sub)?;
        let rows = self
            .rows()
            .map(|r| idx.iter().map(|&i| r[i]).collect())
            .collect();
        Ok(PatternTable::from_rows(
            sub.clone(),
            rows,
            self.mode.clone(),
        ))
    }
}

/// Indices of `sub`'s points inside `shape`, or a margin error naming the missing points.
pub fn positions_in(shape: &Shape, sub: &Shape) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(sub.len());
    let mut missing = Vec::new();
    for p in sub.iter() {
        match shape.index_of(p) {
            Some(i) => idx.push(i),
            None => missing.push(p.coords(sub.dim())),
        }
    }
    if missing.is_empty() {
        Ok(idx)
    } else {
        Err(Error::Margin { missing })
    }
}
