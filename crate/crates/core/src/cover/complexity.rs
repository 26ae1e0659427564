use serde::Serialize;

use crate::cover::clopen::ClopenCover;
use crate::cover::setcover::{min_groups, Count};
use crate::error::{Error, Result};
use crate::lattice::{FolnerSequence, Shape};
use crate::par;
use crate::subshift::code::{FactorMap, FiberUniverse};
use crate::subshift::pattern::{positions_in, Pattern, TableMode};
use crate::subshift::source::{LanguageOptions, LanguageSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityOptions {
    pub language: LanguageOptions,
    /// Branch-and-bound nodes per set-cover instance.
    pub node_budget: u64,
}

impl Default for ComplexityOptions {
    fn default() -> Self {
        ComplexityOptions {
            language: LanguageOptions::default(),
            node_budget: 1_000_000,
        }
    }
}

/// Approximation status of a complexity value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowMode {
    Exact,
    /// Only a certified interval is known (budget or pattern-table limit reached).
    Bounds,
    /// Computed on locally admissible patterns (2-d SFTs).
    LocallyAdmissible,
}

impl RowMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowMode::Exact => "exact",
            RowMode::Bounds => "bounds",
            RowMode::LocallyAdmissible => "locally_admissible",
        }
    }
}

/// `N(⋁_{g∈F} g⁻¹U | π)` with its witness fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complexity {
    pub count: Count,
    pub mode: RowMode,
    /// Codomain pattern of a maximising fiber (none for the trivial factor).
    pub witness: Option<Pattern>,
    pub fibers: usize,
}

fn mode_of(table_mode: &TableMode, count: &Count) -> RowMode {
    if !count.is_exact() || matches!(table_mode, TableMode::Bounds { .. }) {
        RowMode::Bounds
    } else if matches!(table_mode, TableMode::LocallyAdmissible { .. }) {
        RowMode::LocallyAdmissible
    } else {
        RowMode::Exact
    }
}

/// Per-window-word membership masks of a cover.
struct MaskLookup<'a> {
    cover: &'a ClopenCover,
    alphabet: usize,
    dense: Option<Vec<u64>>,
}

impl<'a> MaskLookup<'a> {
    fn new(cover: &'a ClopenCover, alphabet: usize) -> Self {
        let m = cover.base().len();
        let size = (alphabet as u128)
            .checked_pow(m as u32)
            .filter(|s| *s <= 1 << 16);
        let dense = size.map(|size| {
            let mut w = vec![0u8; m];
            (0..size as usize)
                .map(|i| {
                    let mut r = i;
                    for j in (0..m).rev() {
                        w[j] = (r % alphabet) as u8;
                        r /= alphabet;
                    }
                    cover.mask(&w)
                })
                .collect()
        });
        MaskLookup {
            cover,
            alphabet,
            dense,
        }
    }

    fn mask(&self, w: &[u8]) -> u64 {
        match &self.dense {
            Some(t) => {
                t[w.iter()
                    .fold(0usize, |a, &s| a * self.alphabet + s as usize)]
            }
            None => self.cover.mask(w),
        }
    }
}

/// Element-membership profiles `(mask_g)_{g∈F}` of patterns on `F ⊕ base`.
struct Profiler<'a> {
    lookup: MaskLookup<'a>,
    offsets: Vec<Vec<usize>>,
}

impl<'a> Profiler<'a> {
    fn new(cover: &'a ClopenCover, alphabet: usize, f: &Shape, ushape: &Shape) -> Result<Self> {
        let offsets = f
            .iter()
            .map(|g| positions_in(ushape, &cover.base().translate(*g)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Profiler {
            lookup: MaskLookup::new(cover, alphabet),
            offsets,
        })
    }

    fn profile(&self, row: &[u8], buf: &mut Vec<u8>) -> Result<Vec<u64>> {
        self.offsets
            .iter()
            .map(|idx| {
                buf.clear();
                buf.extend(idx.iter().map(|&i| row[i]));
                let m = self.lookup.mask(buf);
                if m == 0 {
                    Err(Error::CoverageGap {
                        pattern: crate::subshift::pattern::word_string(buf),
                    })
                } else {
                    Ok(m)
                }
            })
            .collect()
    }
}

/// Minimum number of join cells covering the given patterns on `F ⊕ base`.
pub fn join_cover_count<'r>(
    rows: impl Iterator<Item = &'r [u8]>,
    cover: &ClopenCover,
    alphabet: usize,
    f: &Shape,
    ushape: &Shape,
    node_budget: u64,
) -> Result<Count> {
    Profiler::new(cover, alphabet, f, ushape)?.count(rows, node_budget)
}

impl Profiler<'_> {
    fn count<'r>(&self, rows: impl Iterator<Item = &'r [u8]>, node_budget: u64) -> Result<Count> {
        let mut buf = Vec::new();
        let profiles = rows
            .map(|r| self.profile(r, &mut buf))
            .collect::<Result<Vec<_>>>()?;
        if profiles.is_empty() {
            return Ok(Count::exact(0));
        }
        Ok(min_groups(&profiles, node_budget))
    }
}

/// `N(⋁_{g∈F} g⁻¹U)` for the whole of `X`.
pub fn complexity_absolute(
    x: &LanguageSource,
    u: &ClopenCover,
    f: &Shape,
    opts: &ComplexityOptions,
) -> Result<Complexity> {
    complexity_relative(&FactorMap::trivial(x.clone()), u, f, opts)
}

/// `N(⋁_{g∈F} g⁻¹U | π) = max_y N(⋁_{g∈F} g⁻¹U, π⁻¹(y))`, the max taken over codomain patterns on
/// the erosion of the domain shape by the code window. When `F ⊕ base` is not a box and the
/// code window has more than one point, fibers are taken over its hull and then projected.
pub fn complexity_relative(
    map: &FactorMap,
    u: &ClopenCover,
    f: &Shape,
    opts: &ComplexityOptions,
) -> Result<Complexity> {
    let x = &map.domain;
    if u.dim() != x.dim() || f.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: f.dim(),
        });
    }
    if f.is_empty() {
        return Ok(Complexity {
            count: Count::exact(1),
            mode: RowMode::Exact,
            witness: None,
            fibers: 1,
        });
    }
    let ushape = f.product(u.base())?;
    let universe = match FiberUniverse::new(map, &ushape, &opts.language)? {
        Ok(universe) => universe,
        Err((lo, hi)) => {
            if hi == 0 {
                return Err(Error::Degenerate(
                    "empty language on the query shape".into(),
                ));
            }
            let cap = (u.len() as u128)
                .checked_pow(f.len() as u32)
                .unwrap_or(u128::MAX);
            let count = if map.is_trivial() && u.is_symbol_partition(x.alphabet()) {
                Count {
                    lower: lo.max(1),
                    upper: hi,
                }
            } else {
                Count {
                    lower: 1,
                    upper: hi.min(cap).max(1),
                }
            };
            let mode = if count.is_exact() {
                RowMode::Exact
            } else {
                RowMode::Bounds
            };
            return Ok(Complexity {
                count,
                mode,
                witness: None,
                fibers: 0,
            });
        }
    };
    if universe.is_empty() {
        return Err(Error::Degenerate(
            "empty language on the query shape".into(),
        ));
    }
    let profiler = Profiler::new(u, x.alphabet(), f, &ushape)?;
    let solve = |i: usize| -> Result<Count> {
        match universe.raw(i) {
            Some((table, idx)) => {
                profiler.count(idx.iter().map(|&r| table.row(r)), opts.node_budget)
            }
            None => profiler.count(
                universe.rows(i).iter().map(|r| r.as_slice()),
                opts.node_budget,
            ),
        }
    };
    let counts = par::map_range(opts.language.exec, universe.len(), solve);
    let mut best: Option<(Count, usize)> = None;
    for (i, c) in counts.into_iter().enumerate() {
        let c = c?;
        best = match best {
            Some((b, j)) if b.upper >= c.upper => Some((b.max(c), j)),
            Some((b, _)) => Some((b.max(c), i)),
            None => Some((c, i)),
        };
    }
    let (count, at) = best.expect("non-empty language has a fiber");
    let witness = if map.is_trivial() {
        None
    } else {
        Some(universe.witness(at)?)
    };
    Ok(Complexity {
        mode: mode_of(universe.mode(), &count),
        count,
        witness,
        fibers: universe.len(),
    })
}

/// One row of a [`ComplexityCurve`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub size: usize,
    pub count: Count,
    pub mode: RowMode,
}

impl CurveRow {
    /// `ln N` as an interval.
    pub fn log_interval(&self) -> (f64, f64) {
        (
            (self.count.lower.max(1) as f64).ln(),
            (self.count.upper.max(1) as f64).ln(),
        )
    }
}

/// The sequence `n ↦ N(⋁_{g∈F_n} g⁻¹U | π)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexityCurve {
    pub rows: Vec<CurveRow>,
}

impl ComplexityCurve {
    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(|r| r.mode == RowMode::Exact)
    }

    /// Builds a curve from `(n, |F_n|, N)` triples, e.g. for synthetic inputs.
    pub fn from_counts(rows: impl IntoIterator<Item = (usize, usize, Count)>) -> Self {
        let rows = rows
            .into_iter()
            .map(|(n, size, count)| CurveRow {
                n,
                size,
                mode: if count.is_exact() {
                    RowMode::Exact
                } else {
                    RowMode::Bounds
                },
                count,
            })
            .collect();
        ComplexityCurve { rows }
    }
}

/// Complexity along arbitrary shapes (indexed `0..`), in parallel over the shapes.
pub fn complexity_along(
    map: &FactorMap,
    u: &ClopenCover,
    shapes: &[Shape],
    opts: &ComplexityOptions,
) -> Result<ComplexityCurve> {
    let results = par::map_range(opts.language.exec, shapes.len(), |i| {
        complexity_relative(map, u, &shapes[i], opts)
    });
    let mut rows = Vec::with_capacity(shapes.len());
    for (n, r) in results.into_iter().enumerate() {
        let c = r?;
        rows.push(CurveRow {
            n,
            size: shapes[n].len(),
            count: c.count,
            mode: c.mode,
        });
    }
    Ok(ComplexityCurve { rows })
}

/// Complexity along `F_0, ..., F_{n_max}`.
pub fn complexity_curve(
    map: &FactorMap,
    u: &ClopenCover,
    folner: &FolnerSequence,
    n_max: usize,
    opts: &ComplexityOptions,
) -> Result<ComplexityCurve> {
    let shapes = (0..=n_max)
        .map(|n| folner.shape(n))
        .collect::<Result<Vec<_>>>()?;
    complexity_along(map, u, &shapes, opts)
}

/// Every fiber's complexity, keyed by codomain pattern.
pub fn fiber_complexities(
    map: &FactorMap,
    u: &ClopenCover,
    f: &Shape,
    opts: &ComplexityOptions,
) -> Result<Vec<(Vec<u8>, Count)>> {
    let ushape = f.product(u.base())?;
    let universe = FiberUniverse::new(map, &ushape, &opts.language)?
        .map_err(|_| Error::Capacity("fiber listing needs a materialised language".into()))?;
    (0..universe.len())
        .map(|i| {
            let rows = universe.rows(i);
            let c = join_cover_count(
                rows.iter().map(|r| r.as_slice()),
                u,
                map.domain.alphabet(),
                f,
                &ushape,
                opts.node_budget,
            )?;
            Ok((universe.image(i).to_vec(), c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subshift::code::BlockCode;

    fn opts() -> ComplexityOptions {
        ComplexityOptions::default()
    }

    #[test]
    fn full_shift_partition_counts_words() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let u = ClopenCover::symbols(1, 2);
        for n in 1..=10 {
            let c = complexity_absolute(&full, &u, &Shape::interval(0, n), &opts()).unwrap();
            assert_eq!(c.count, Count::exact(1 << n));
        }
        let gm = LanguageSource::golden_mean();
        assert_eq!(
            complexity_absolute(&gm, &u, &Shape::interval(0, 4), &opts())
                .unwrap()
                .count,
            Count::exact(8)
        );
    }

    #[test]
    fn standard_cover_from_symbols_needs_every_word() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let s = ClopenCover::standard(Shape::interval(0, 1), vec![vec![0]], vec![vec![1]]).unwrap();
        assert_eq!(
            complexity_absolute(&full, &s, &Shape::interval(0, 2), &opts())
                .unwrap()
                .count,
            Count::exact(4)
        );
    }

    #[test]
    fn relative_examples() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let u = ClopenCover::symbols(1, 2);
        let id = FactorMap::identity(full.clone());
        let xor = FactorMap::new(full.clone(), full.clone(), BlockCode::xor()).unwrap();
        for n in 1..=8 {
            let f = Shape::interval(0, n);
            assert_eq!(
                complexity_relative(&id, &u, &f, &opts()).unwrap().count,
                Count::exact(1)
            );
            let c = complexity_relative(&xor, &u, &f, &opts()).unwrap();
            assert_eq!(c.count, Count::exact(2));
            assert!(c.witness.is_some());
        }
    }
}
