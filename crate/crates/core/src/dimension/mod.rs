//! Upper and lower (relative) entropy dimensions, subset dimensions, entropy-generating-set tests
//! and the constructions built on them.

pub mod construct;
pub mod estimate;

use serde::Serialize;

pub use construct::{
    construct_interpolated_set, construct_pos_upper_set, construct_thm_genset,
    folner_minimizing_subsequence, AnnulusRecord, InterpolatedSet, MinimizingSubsequence,
    PosUpperSet, ThmConstruction, ThmParams,
};
pub use estimate::{critical_exponent, ExponentEstimate, GrowthRow, GrowthSeries, Method};

use crate::cover::{
    complexity_curve, complexity_relative, ClopenCover, ComplexityCurve, ComplexityOptions, RowMode,
};
use crate::error::{Error, Result};
use crate::lattice::{index_counts, FolnerSequence, IndexCounts, IndexSet};
use crate::subshift::point::central_cube;
use crate::subshift::{FactorMap, LanguageSource};

/// Default positivity threshold (nats) for generating-set verdicts.
pub const TAU: f64 = 1e-3;

/// A complexity curve and its exponent estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveDimension {
    pub curve: ComplexityCurve,
    pub estimate: ExponentEstimate,
}

/// `D̄(G, U | π)` and `D̲(G, U | π)` along `F_0, ..., F_{n_max}`.
pub fn cover_dimension(
    map: &FactorMap,
    u: &ClopenCover,
    folner: &FolnerSequence,
    n_max: usize,
    opts: &ComplexityOptions,
) -> Result<CurveDimension> {
    if n_max < 4 {
        return Err(Error::InvalidArgument(format!(
            "dimension estimates need n_max ≥ 4, got {n_max}"
        )));
    }
    let curve = complexity_curve(map, u, folner, n_max, opts)?;
    let estimate = critical_exponent(&GrowthSeries::from_curve(&curve))?;
    Ok(CurveDimension { curve, estimate })
}

/// Maximum of [`cover_dimension`] over a finite family of covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDimension {
    pub estimate: ExponentEstimate,
    /// Index of the maximising cover (first on ties).
    pub witness: usize,
    pub per_cover: Vec<ExponentEstimate>,
}

pub fn system_dimension(
    map: &FactorMap,
    family: &[ClopenCover],
    folner: &FolnerSequence,
    n_max: usize,
    opts: &ComplexityOptions,
) -> Result<SystemDimension> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty cover family".into()));
    }
    let per_cover = family
        .iter()
        .map(|u| cover_dimension(map, u, folner, n_max, opts).map(|d| d.estimate))
        .collect::<Result<Vec<_>>>()?;
    let mut witness = 0;
    for (i, e) in per_cover.iter().enumerate() {
        if e.upper > per_cover[witness].upper {
            witness = i;
        }
    }
    Ok(SystemDimension {
        estimate: per_cover[witness].clone(),
        witness,
        per_cover,
    })
}

/// Standard covers `{X∖[p], X∖[q]}` for all pairs of distinct admissible patterns `p < q` on
/// the central cubes of radius `1..=radius`.
pub fn standard_cover_family(
    x: &LanguageSource,
    radius: usize,
    opts: &ComplexityOptions,
) -> Result<Vec<ClopenCover>> {
    let mut family = Vec::new();
    for r in 1..=radius {
        let base = central_cube(x.dim(), r);
        let lang = x.language(&base, &opts.language)?;
        if !lang.is_materialized() {
            return Err(Error::Capacity(format!(
                "language on the radius-{r} cube is too large"
            )));
        }
        let rows: Vec<Vec<u8>> = lang.rows().map(|r| r.to_vec()).collect();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                family.push(ClopenCover::standard(
                    base.clone(),
                    vec![rows[i].clone()],
                    vec![rows[j].clone()],
                )?);
            }
        }
    }
    Ok(family)
}

/// `D̄(S)` and `D̲(S)` from the counts `|S ∩ F_n|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetDimension {
    pub counts: Vec<crate::lattice::CountRow>,
    pub estimate: ExponentEstimate,
    /// Finite proxy for `S ∈ 𝓘(G)`.
    pub unbounded: bool,
}

pub fn subset_dimension(
    s: &IndexSet,
    folner: &FolnerSequence,
    n_max: usize,
) -> Result<SubsetDimension> {
    let IndexCounts { rows, unbounded } = index_counts(s, folner, n_max)?;
    let mut estimate = critical_exponent(&GrowthSeries::from_counts(&rows))?;
    if !unbounded {
        estimate.degenerate = true;
    }
    Ok(SubsetDimension {
        counts: rows,
        estimate,
        unbounded,
    })
}

/// One row of a [`GenSetReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenSetRow {
    pub n: usize,
    /// `|S ∩ F_n|`.
    pub size: usize,
    /// Lower and upper `ln N` over `S ∩ F_n`.
    pub log_lower: f64,
    pub log_upper: f64,
    pub mode: RowMode,
    /// `log_lower / size`.
    pub ratio: f64,
}

/// Finite-range test of `S ∈ 𝓔(G, U | π)` (liminf) and `S ∈ 𝓟(G, U | π)` (limsup).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenSetReport {
    pub set: String,
    pub ratios: Vec<GenSetRow>,
    /// Tail minimum and maximum of the ratios.
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub window: (usize, usize),
    pub tau: f64,
    pub verdict_e: bool,
    pub verdict_p: bool,
}

impl GenSetReport {
    fn from_rows(set: String, ratios: Vec<GenSetRow>, tau: f64) -> Result<Self> {
        let live: Vec<&GenSetRow> = ratios.iter().filter(|r| r.size > 0).collect();
        if live.is_empty() {
            return Err(Error::Degenerate(format!(
                "{set} misses every computed F_n"
            )));
        }
        let tail = &live[live.len() / 2..];
        let liminf_est = tail.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let limsup_est = tail
            .iter()
            .map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(GenSetReport {
            set,
            window: (tail[0].n, tail[tail.len() - 1].n),
            liminf_est,
            limsup_est,
            tau,
            verdict_e: liminf_est > tau,
            verdict_p: limsup_est > tau,
            ratios,
        })
    }
}

/// Ratios `(1/|F_n ∩ S|) ln N(⋁_{g∈F_n∩S} g⁻¹U | π)` for `n = 0..=n_max`.
pub fn genset_test(
    s: &IndexSet,
    map: &FactorMap,
    u: &ClopenCover,
    folner: &FolnerSequence,
    n_max: usize,
    opts: &ComplexityOptions,
) -> Result<GenSetReport> {
    genset_test_with(s, map, u, folner, n_max, TAU, opts)
}

pub fn genset_test_with(
    s: &IndexSet,
    map: &FactorMap,
    u: &ClopenCover,
    folner: &FolnerSequence,
    n_max: usize,
    tau: f64,
    opts: &ComplexityOptions,
) -> Result<GenSetReport> {
    let shapes = (0..=n_max)
        .map(|n| folner.shape(n).map(|f| s.intersect(&f)))
        .collect::<Result<Vec<_>>>()?;
    let results = crate::par::map_range(opts.language.exec, shapes.len(), |n| {
        complexity_relative(map, u, &shapes[n], opts)
    });
    let mut ratios = Vec::with_capacity(shapes.len());
    for (n, r) in results.into_iter().enumerate() {
        let c = r?;
        let size = shapes[n].len();
        let log_lower = (c.count.lower.max(1) as f64).ln();
        let log_upper = (c.count.upper.max(1) as f64).ln();
        let ratio = if size == 0 {
            0.0
        } else {
            log_lower / size as f64
        };
        ratios.push(GenSetRow {
            n,
            size,
            log_lower,
            log_upper,
            mode: c.mode,
            ratio,
        });
    }
    GenSetReport::from_rows(s.label.clone(), ratios, tau)
}
