use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{GroupPoint, Shape};
use crate::subshift::code::BlockCode;
use crate::subshift::pattern::{positions_in, word_string, Pattern, PatternTable, TableMode};
use crate::subshift::source::{LanguageOptions, LanguageSource};

/// A union of cylinders on a common base, or the complement of one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClopenSet {
    base: Shape,
    patterns: PatternTable,
    complement: bool,
}

impl ClopenSet {
    pub fn cylinders(base: Shape, rows: Vec<Vec<u8>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != base.len()) {
            return Err(Error::InvalidArgument(format!(
                "cylinder rows must have {} symbols",
                base.len()
            )));
        }
        let patterns = PatternTable::from_rows(base.clone(), rows, TableMode::Exact);
        Ok(ClopenSet {
            base,
            patterns,
            complement: false,
        })
    }

    /// `X ∖ (union of the given cylinders)`.
    pub fn complement_of(base: Shape, rows: Vec<Vec<u8>>) -> Result<Self> {
        let mut s = ClopenSet::cylinders(base, rows)?;
        s.complement = true;
        Ok(s)
    }

    /// Cylinders of 1-d words placed at the origin.
    pub fn words(words: &[&str]) -> Result<Self> {
        let pats = words
            .iter()
            .map(|w| Pattern::word(w))
            .collect::<Result<Vec<_>>>()?;
        let base = pats
            .first()
            .map(|p| p.shape().clone())
            .ok_or_else(|| Error::InvalidArgument("no words".into()))?;
        ClopenSet::cylinders(
            base,
            pats.into_iter().map(|p| p.symbols().to_vec()).collect(),
        )
    }

    pub fn base(&self) -> &Shape {
        &self.base
    }

    pub fn is_complement(&self) -> bool {
        self.complement
    }

    /// The listed cylinder words (the removed ones for a complement).
    pub fn listed(&self) -> &PatternTable {
        &self.patterns
    }

    pub fn contains(&self, row: &[u8]) -> bool {
        self.patterns.contains(row) != self.complement
    }

    pub fn translate(&self, g: GroupPoint) -> ClopenSet {
        let base = self.base.translate(g);
        let rows = self.patterns.rows().map(|r| r.to_vec()).collect();
        ClopenSet {
            patterns: PatternTable::from_rows(base.clone(), rows, TableMode::Exact),
            base,
            complement: self.complement,
        }
    }

    /// Materialises the set as a plain union of cylinders on its base, within the language of `x`.
    pub fn admissible_rows(
        &self,
        x: &LanguageSource,
        opts: &LanguageOptions,
    ) -> Result<Vec<Vec<u8>>> {
        let lang = x.language(&self.base, opts)?;
        materialized(&lang)?;
        Ok(lang
            .rows()
            .filter(|r| self.contains(r))
            .map(|r| r.to_vec())
            .collect())
    }

    fn describe(&self) -> String {
        let words: Vec<String> = self.patterns.rows().map(word_string).collect();
        if self.complement {
            format!("X∖[{}]", words.join(","))
        } else {
            format!("[{}]", words.join(","))
        }
    }
}

fn materialized(t: &PatternTable) -> Result<()> {
    if t.is_materialized() {
        Ok(())
    } else {
        Err(Error::Capacity(format!(
            "language on {} points too large to materialise",
            t.shape().len()
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverKind {
    General,
    Partition,
    Standard,
}

/// A finite cover by clopen sets sharing one base shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClopenCover {
    base: Shape,
    elements: Vec<ClopenSet>,
    kind: CoverKind,
}

impl ClopenCover {
    /// Elements may have different bases; each is re-expressed on the union of the bases.
    pub fn new(elements: Vec<ClopenSet>, kind: CoverKind) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("cover needs at least one element".into()))?;
        let mut base = first.base.clone();
        for e in &elements[1..] {
            base = base.union(&e.base)?;
        }
        if base.is_empty() {
            return Err(Error::EmptyShape);
        }
        if elements.len() > 64 {
            return Err(Error::Capacity("covers are limited to 64 elements".into()));
        }
        if elements.iter().any(|e| e.base != base) {
            return Err(Error::InvalidArgument(
                "cover elements must share one base shape".into(),
            ));
        }
        Ok(ClopenCover {
            base,
            elements,
            kind,
        })
    }

    /// The partition of `x` into cylinders of its admissible patterns on `base`.
    pub fn partition(x: &LanguageSource, base: &Shape, opts: &LanguageOptions) -> Result<Self> {
        let lang = x.language(base, opts)?;
        materialized(&lang)?;
        let elements = lang
            .rows()
            .map(|r| ClopenSet::cylinders(base.clone(), vec![r.to_vec()]))
            .collect::<Result<Vec<_>>>()?;
        ClopenCover::new(elements, CoverKind::Partition)
    }

    /// The partition into one-symbol cylinders at the origin.
    pub fn symbols(dim: usize, alphabet: usize) -> Self {
        let base = Shape::singleton(dim, GroupPoint::ORIGIN);
        let elements = (0..alphabet as u8)
            .map(|a| ClopenSet::cylinders(base.clone(), vec![vec![a]]).expect("valid"))
            .collect();
        ClopenCover::new(elements, CoverKind::Partition).expect("valid")
    }

    /// `{X ∖ A₁, X ∖ A₂}` for cylinder sets `A₁`, `A₂` on a common base.
    pub fn standard(base: Shape, a1: Vec<Vec<u8>>, a2: Vec<Vec<u8>>) -> Result<Self> {
        let e1 = ClopenSet::complement_of(base.clone(), a1)?;
        let e2 = ClopenSet::complement_of(base, a2)?;
        ClopenCover::new(vec![e1, e2], CoverKind::Standard)
    }

    /// Standard cover from two 1-d words of equal length, e.g. `["11", "00"]`.
    pub fn standard_from_words(w1: &str, w2: &str) -> Result<Self> {
        let p1 = Pattern::word(w1)?;
        let p2 = Pattern::word(w2)?;
        if p1.shape() != p2.shape() {
            return Err(Error::InvalidArgument(
                "standard-cover words must have equal length".into(),
            ));
        }
        ClopenCover::standard(
            p1.shape().clone(),
            vec![p1.symbols().to_vec()],
            vec![p2.symbols().to_vec()],
        )
    }

    pub fn base(&self) -> &Shape {
        &self.base
    }

    pub fn elements(&self) -> &[ClopenSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn kind(&self) -> CoverKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Bitmask of the elements containing a pattern on the base.
    pub fn mask(&self, row: &[u8]) -> u64 {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains(row))
            .fold(0u64, |m, (i, _)| m | 1 << i)
    }

    /// Whether this is the partition into one-symbol cylinders at the origin covering `alphabet`.
    pub fn is_symbol_partition(&self, alphabet: usize) -> bool {
        self.base.len() == 1
            && self.base.contains(&GroupPoint::ORIGIN)
            && (0..alphabet as u8).all(|a| self.mask(&[a]).count_ones() == 1)
    }

    pub fn translate(&self, g: GroupPoint) -> ClopenCover {
        ClopenCover {
            base: self.base.translate(g),
            elements: self.elements.iter().map(|e| e.translate(g)).collect(),
            kind: self.kind,
        }
    }

    /// Re-expresses every element as a union of admissible cylinders on `base` (a superset of the
    /// current base).
    pub fn extend_base(
        &self,
        x: &LanguageSource,
        base: &Shape,
        opts: &LanguageOptions,
    ) -> Result<ClopenCover> {
        if !self.base.is_subset(base) {
            return Err(Error::InvalidArgument(
                "new base must contain the old one".into(),
            ));
        }
        let lang = x.language(base, opts)?;
        materialized(&lang)?;
        let idx = positions_in(base, &self.base)?;
        let mut sub = vec![0u8; idx.len()];
        let elements = self
            .elements
            .iter()
            .map(|e| {
                let rows = lang
                    .rows()
                    .filter(|r| {
                        for (s, &i) in sub.iter_mut().zip(&idx) {
                            *s = r[i];
                        }
                        e.contains(&sub)
                    })
                    .map(|r| r.to_vec())
                    .collect();
                ClopenSet::cylinders(base.clone(), rows)
            })
            .collect::<Result<Vec<_>>>()?;
        ClopenCover::new(elements, CoverKind::General)
    }

    /// `U ∨ V = {U_i ∩ V_j}`, with empty intersections dropped.
    pub fn join(
        &self,
        other: &ClopenCover,
        x: &LanguageSource,
        opts: &LanguageOptions,
    ) -> Result<ClopenCover> {
        let base = self.base.union(&other.base)?;
        let a = self.extend_base(x, &base, opts)?;
        let b = other.extend_base(x, &base, opts)?;
        let mut elements = Vec::new();
        for u in &a.elements {
            for v in &b.elements {
                let rows: Vec<Vec<u8>> = u
                    .patterns
                    .rows()
                    .filter(|r| v.patterns.contains(r))
                    .map(|r| r.to_vec())
                    .collect();
                if !rows.is_empty() {
                    elements.push(ClopenSet::cylinders(base.clone(), rows)?);
                }
            }
        }
        let kind = if self.kind == CoverKind::Partition && other.kind == CoverKind::Partition {
            CoverKind::Partition
        } else {
            CoverKind::General
        };
        ClopenCover::new(elements, kind)
    }

    /// `π⁻¹V` as a cover of the domain of `code`, on base `V.base ⊕ W`.
    pub fn pullback(
        &self,
        code: &BlockCode,
        x: &LanguageSource,
        opts: &LanguageOptions,
    ) -> Result<ClopenCover> {
        let base = self.base.product(code.window())?;
        let lang = x.language(&base, opts)?;
        materialized(&lang)?;
        let a = code.applier(&base, &self.base)?;
        let mut img = vec![0u8; self.base.len()];
        let mut members: Vec<Vec<Vec<u8>>> = vec![Vec::new(); self.elements.len()];
        for r in lang.rows() {
            a.apply_row(r, &mut img)?;
            for (i, e) in self.elements.iter().enumerate() {
                if e.contains(&img) {
                    members[i].push(r.to_vec());
                }
            }
        }
        let elements = members
            .into_iter()
            .map(|rows| ClopenSet::cylinders(base.clone(), rows))
            .collect::<Result<Vec<_>>>()?;
        let kind = if self.kind == CoverKind::Partition {
            CoverKind::Partition
        } else {
            CoverKind::General
        };
        ClopenCover::new(elements, kind)
    }

    /// Whether every element of `self` lies inside some element of `coarser`, within `L_X`.
    pub fn refines(
        &self,
        coarser: &ClopenCover,
        x: &LanguageSource,
        opts: &LanguageOptions,
    ) -> Result<bool> {
        let base = self.base.union(&coarser.base)?;
        let a = self.extend_base(x, &base, opts)?;
        let b = coarser.extend_base(x, &base, opts)?;
        Ok(a.elements.iter().all(|u| {
            b.elements
                .iter()
                .any(|v| u.patterns.rows().all(|r| v.patterns.contains(r)))
        }))
    }

    pub fn describe(&self) -> Vec<String> {
        self.elements.iter().map(ClopenSet::describe).collect()
    }
}

/// Outcome of [`cover_validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub kind: CoverKind,
    pub declared: CoverKind,
    pub elements: usize,
    pub patterns_checked: usize,
}

/// Checks coverage of `L_X(base)` and classifies the cover.
pub fn cover_validate(
    x: &LanguageSource,
    u: &ClopenCover,
    opts: &LanguageOptions,
) -> Result<CoverReport> {
    if u.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: u.dim(),
        });
    }
    let lang = x.language(&u.base, opts)?;
    materialized(&lang)?;
    let mut partition = true;
    for r in lang.rows() {
        if let Some(bad) = r.iter().find(|&&s| s as usize >= x.alphabet()) {
            return Err(Error::Symbol {
                symbol: *bad as u32,
                size: x.alphabet(),
            });
        }
        let m = u.mask(r);
        if m == 0 {
            let p = Pattern::new(u.base.clone(), r.to_vec())?;
            return Err(Error::CoverageGap {
                pattern: p.to_string(),
            });
        }
        partition &= m.count_ones() == 1;
    }
    let standard = u.elements.len() == 2 && u.elements.iter().all(|e| e.complement) && {
        let a1: Vec<&[u8]> = lang
            .rows()
            .filter(|r| u.elements[0].patterns.contains(r))
            .collect();
        let a2: Vec<&[u8]> = lang
            .rows()
            .filter(|r| u.elements[1].patterns.contains(r))
            .collect();
        !a1.is_empty() && !a2.is_empty() && a1.iter().all(|r| !a2.contains(r))
    };
    let kind = if partition {
        CoverKind::Partition
    } else if standard {
        CoverKind::Standard
    } else {
        CoverKind::General
    };
    if u.kind == CoverKind::Standard && !standard {
        return Err(Error::InvalidArgument(
            "declared standard cover is not the complement pair of two disjoint non-empty cylinder sets".into(),
        ));
    }
    Ok(CoverReport {
        kind,
        declared: u.kind,
        elements: u.elements.len(),
        patterns_checked: lang.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> LanguageOptions {
        LanguageOptions::default()
    }

    #[test]
    fn validation_examples() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let p = ClopenCover::symbols(1, 2);
        assert_eq!(
            cover_validate(&full, &p, &opts()).unwrap().kind,
            CoverKind::Partition
        );
        let s = ClopenCover::standard_from_words("11", "00").unwrap();
        assert_eq!(
            cover_validate(&full, &s, &opts()).unwrap().kind,
            CoverKind::Standard
        );
        let gap =
            ClopenCover::new(vec![ClopenSet::words(&["0"]).unwrap()], CoverKind::General).unwrap();
        assert_eq!(
            cover_validate(&full, &gap, &opts()),
            Err(Error::CoverageGap {
                pattern: "1".into()
            })
        );
    }

    #[test]
    fn joins_refine_their_factors() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let p = ClopenCover::symbols(1, 2);
        let q = ClopenCover::standard_from_words("11", "00").unwrap();
        let j = p.join(&q, &full, &opts()).unwrap();
        assert!(j.refines(&p, &full, &opts()).unwrap());
        assert!(j.refines(&q, &full, &opts()).unwrap());
        assert!(!q.refines(&p, &full, &opts()).unwrap());
    }

    #[test]
    fn pullback_through_xor() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let p = ClopenCover::symbols(1, 2);
        let back = p.pullback(&BlockCode::xor(), &full, &opts()).unwrap();
        assert_eq!(back.base(), &Shape::interval(0, 2));
        assert_eq!(back.elements()[0].listed().len(), 2);
        assert!(back.elements()[0].contains(&[1, 1]));
    }
}
