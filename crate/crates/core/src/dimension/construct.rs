//! Constructions of index sets with prescribed dimensions and of entropy generating sets, and the
//! Følner-subsequence reduction of the upper exponent.

use serde::Serialize;

use super::estimate::{critical_exponent, ExponentEstimate, GrowthSeries};
use super::{cover_dimension, genset_test, GenSetReport};
use crate::cover::{complexity_relative, ClopenCover, ComplexityOptions, RowMode};
use crate::error::{Error, Result};
use crate::independence::{max_shattered, IndependencePair, ShatterMode, MAX_W};
use crate::lattice::{index_counts, CountRow, FolnerSequence, GroupPoint, IndexSet, Shape};
use crate::subshift::FactorMap;

fn floor_pow(size: usize, alpha: f64) -> u64 {
    ((size as f64).powf(alpha) + 1e-9).floor() as u64
}

fn points_label(points: &[GroupPoint], dim: usize, label: String) -> IndexSet {
    IndexSet::from_points(points.iter().copied(), dim, label)
}

fn require_monotone(folner: &FolnerSequence) -> Result<()> {
    if folner.is_monotone() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "construction needs an increasing Følner sequence".into(),
        ))
    }
}

/// `F = S ∪ ⋃ M_i` with `|M_i| = ⌊|F_i|^α⌋ − ⌊|F_{i−1}|^α⌋`, truncated to `F_{n_max}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolatedSet {
    #[serde(skip)]
    pub set: IndexSet,
    pub points: usize,
    /// `|F ∩ F_n|`.
    pub counts: Vec<CountRow>,
    /// `⌊|F_n|^α⌋`.
    pub targets: Vec<u64>,
    pub estimate: ExponentEstimate,
    /// Measured lower dimension is at least `α − 0.05`.
    pub meets_alpha: bool,
}

/// Adds to `S` the lexicographically least `m_i` points of each annulus `F_i ∖ F_{i−1}`.
pub fn construct_interpolated_set(
    s: &IndexSet,
    alpha: f64,
    folner: &FolnerSequence,
    n_max: usize,
) -> Result<InterpolatedSet> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "α must lie in (0, 1], got {alpha}"
        )));
    }
    require_monotone(folner)?;
    let dim = folner.dim();
    let mut points: Vec<GroupPoint> = s.intersect(&folner.shape(n_max)?).points().to_vec();
    let mut targets = Vec::with_capacity(n_max + 1);
    let mut prev = 0u64;
    for i in 0..=n_max {
        let target = floor_pow(folner.size(i)?, alpha);
        let needed = target.saturating_sub(prev) as usize;
        let annulus = folner.annulus(i)?;
        if needed > annulus.len() {
            return Err(Error::InfeasibleAnnulus {
                n: i,
                needed,
                available: annulus.len(),
            });
        }
        points.extend_from_slice(&annulus[..needed]);
        targets.push(target);
        prev = target;
    }
    points.sort_unstable();
    points.dedup();
    let set = points_label(&points, dim, format!("{} ∪ M(α={alpha})", s.label));
    let counts = index_counts(&set, folner, n_max)?.rows;
    let estimate = critical_exponent(&GrowthSeries::from_counts(&counts))?;
    let meets_alpha = estimate.lower >= alpha - 0.05;
    Ok(InterpolatedSet {
        set,
        points: points.len(),
        counts,
        targets,
        estimate,
        meets_alpha,
    })
}

/// Density of both candidate sets at one selected scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub n: usize,
    pub size: usize,
    pub count_a: usize,
    pub count_b: usize,
    pub density_a: f64,
    pub density_b: f64,
}

/// The two readings of `F = F_{n_1} ∪ S ∪ ⋃ F_{n_{i+1}} ∖ (F_{n_i} ∩ S)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosUpperSet {
    pub scales: Vec<usize>,
    /// Literal reading: every `F_{n_{i+1}} ∖ (F_{n_i} ∩ S)` joins `F`.
    #[serde(skip)]
    pub reading_a: IndexSet,
    /// Reading with `F ∩ F_{n_j} ⊆ (S ∩ F_{n_j}) ∪ F_{n_{j−1}}`: `F = F_{n_1} ∪ S`.
    #[serde(skip)]
    pub reading_b: IndexSet,
    pub densities: Vec<DensityRow>,
    /// Tail maxima of the densities at the selected scales.
    pub limsup_a: f64,
    pub limsup_b: f64,
    /// Whether each reading's upper density is within 0.1 of 1/2.
    pub matches_half_a: bool,
    pub matches_half_b: bool,
}

/// Greedy scales `n_1 < n_2 < ...` with `2|F_{n_j} ∩ S| ≤ |F_{n_{j+1}}| ≤ |F_{n_{j+2}} ∩ S|`.
/// The sequence must have at least three scales and must not stall before the second half of
/// the range.
pub fn select_scales(s: &IndexSet, folner: &FolnerSequence, n_max: usize) -> Result<Vec<usize>> {
    if n_max < 1 {
        return Err(Error::ScaleSelection(
            "range too short for three scales".into(),
        ));
    }
    let rows = index_counts(s, folner, n_max)?.rows;
    let mut scales = vec![1usize];
    loop {
        let last = *scales.last().expect("non-empty");
        let need_size = 2 * rows[last].count;
        let need_count = if scales.len() >= 2 {
            rows[last].size
        } else {
            0
        };
        match (last + 1..=n_max).find(|&n| rows[n].size >= need_size && rows[n].count >= need_count)
        {
            Some(n) => scales.push(n),
            None => break,
        }
    }
    if scales.len() < 3 {
        return Err(Error::ScaleSelection(format!(
            "only {} scale(s) satisfy 2|F_n∩S| ≤ |F_m| ≤ |F_k∩S| within n ≤ {n_max}",
            scales.len()
        )));
    }
    let last = *scales.last().expect("non-empty");
    if 2 * last < n_max {
        return Err(Error::ScaleSelection(format!(
            "scale sequence {scales:?} stalls at n = {last} (range {n_max})"
        )));
    }
    Ok(scales)
}

/// Builds both readings of the positive-upper-dimension set from `S ∈ 𝓟(G, U | π)`.
pub fn construct_pos_upper_set(
    s: &IndexSet,
    report: &GenSetReport,
    folner: &FolnerSequence,
    n_max: usize,
) -> Result<PosUpperSet> {
    require_monotone(folner)?;
    if !report.verdict_p {
        return Err(Error::InvalidArgument(format!(
            "{} fails the limsup test of the supplied report",
            report.set
        )));
    }
    let scales = select_scales(s, folner, n_max)?;
    let last = folner.shape(*scales.last().expect("three scales"))?;
    let first = folner.shape(scales[0])?;
    let s_last = s.intersect(&last);
    let mut a = first.union(&s_last)?;
    for w in scales.windows(2) {
        let inner = s.intersect(&folner.shape(w[0])?);
        a = a.union(&folner.shape(w[1])?.difference(&inner)?)?;
    }
    let b = first.union(&s_last)?;
    let dim = folner.dim();
    let reading_a = points_label(a.points(), dim, format!("A({})", s.label));
    let reading_b = points_label(b.points(), dim, format!("B({})", s.label));
    let mut densities = Vec::with_capacity(scales.len());
    for &n in &scales {
        let f = folner.shape(n)?;
        let count_a = a.intersection(&f)?.len();
        let count_b = b.intersection(&f)?.len();
        densities.push(DensityRow {
            n,
            size: f.len(),
            count_a,
            count_b,
            density_a: count_a as f64 / f.len() as f64,
            density_b: count_b as f64 / f.len() as f64,
        });
    }
    let tail = &densities[densities.len() / 2..];
    let limsup_a = tail.iter().map(|d| d.density_a).fold(0.0, f64::max);
    let limsup_b = tail.iter().map(|d| d.density_b).fold(0.0, f64::max);
    Ok(PosUpperSet {
        scales,
        reading_a,
        reading_b,
        densities,
        limsup_a,
        limsup_b,
        matches_half_a: (limsup_a - 0.5).abs() <= 0.1,
        matches_half_b: (limsup_b - 0.5).abs() <= 0.1,
    })
}

/// Schedule of the generating-set construction. Unset fields take their defaults: `a` is the
/// tail maximum of `ln N_n / |F_n|^D̂`, `α_j = D̂ − 1/(j+2)` and `η_j = (α_{j−1} + α_j)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThmParams {
    pub a: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub etas: Option<Vec<f64>>,
    /// Largest required `|W_j|` attempted.
    pub max_w: usize,
}

impl Default for ThmParams {
    fn default() -> Self {
        ThmParams {
            a: None,
            alphas: None,
            etas: None,
            max_w: MAX_W,
        }
    }
}

/// One accepted annulus `F_{n_to} ∖ F_{n_from}` and its shattered subset `W_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusRecord {
    pub j: usize,
    pub n_from: usize,
    pub n_to: usize,
    pub size: usize,
    pub alpha: f64,
    pub eta: f64,
    /// `(a/2)|annulus|^{α_j}`, the required `ln N`.
    pub threshold: f64,
    /// `ln N` of the annulus join, lower end.
    pub log_count: f64,
    pub count_mode: RowMode,
    pub w: Vec<Vec<i64>>,
    pub shatter_mode: ShatterMode,
    /// `|W_j| ≥ |annulus|^{η_j}`.
    pub meets_eta: bool,
    /// `N ≥ 2^{|W_j|}` on the annulus.
    pub certificate_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThmConstruction {
    pub d_hat: f64,
    pub a: f64,
    #[serde(skip)]
    pub set: IndexSet,
    pub points: Vec<Vec<i64>>,
    pub annuli: Vec<AnnulusRecord>,
    pub report: Option<GenSetReport>,
    /// Why the scan ended (or why nothing was built).
    pub stop_reason: String,
    /// Tail-min generating ratio is at least `¼ ln 2`.
    pub tail_ok: bool,
}

/// Scans annuli meeting the complexity threshold and extracts a shattered subset of each;
/// `F = ⋃ W_j` is then tested as an entropy generating set.
pub fn construct_thm_genset(
    map: &FactorMap,
    u: &ClopenCover,
    params: &ThmParams,
    folner: &FolnerSequence,
    n_max: usize,
    opts: &ComplexityOptions,
) -> Result<ThmConstruction> {
    require_monotone(folner)?;
    let pair = IndependencePair::from_standard(u)?;
    let dim = folner.dim();
    let d = cover_dimension(map, u, folner, n_max, opts)?;
    let d_hat = d.estimate.upper;
    let empty = |d_hat: f64, a: f64, reason: String| ThmConstruction {
        d_hat,
        a,
        set: IndexSet::empty(),
        points: Vec::new(),
        annuli: Vec::new(),
        report: None,
        stop_reason: reason,
        tail_ok: false,
    };
    if d_hat <= 0.05 {
        return Ok(empty(
            d_hat,
            0.0,
            format!("estimated upper dimension {d_hat:.3} is not positive"),
        ));
    }
    let a = params.a.unwrap_or_else(|| {
        let rows = &d.curve.rows;
        rows[rows.len() / 2..]
            .iter()
            .map(|r| r.log_interval().0 / (r.size as f64).powf(d_hat))
            .fold(0.0, f64::max)
    });
    if a <= 0.0 {
        return Ok(empty(
            d_hat,
            a,
            "complexity constant a is not positive".into(),
        ));
    }
    let alpha = |j: usize| -> f64 {
        match &params.alphas {
            Some(v) if j >= 1 && j <= v.len() => v[j - 1],
            _ => d_hat - 1.0 / (j as f64 + 2.0),
        }
    };
    let eta = |j: usize| -> f64 {
        match &params.etas {
            Some(v) if j >= 1 && j <= v.len() => v[j - 1],
            _ => (alpha(j - 1) + alpha(j)) / 2.0,
        }
    };
    let mut annuli = Vec::new();
    let mut points: Vec<GroupPoint> = Vec::new();
    let mut n_prev = 0usize;
    let mut j = 1usize;
    let reason = 'scan: loop {
        let (aj, ej) = (alpha(j), eta(j));
        if aj <= 0.0 || ej <= 0.0 {
            j += 1;
            continue;
        }
        let base = folner.shape(n_prev)?;
        let mut n = n_prev + 1;
        loop {
            if n > n_max {
                break 'scan format!("no qualifying annulus for j = {j} within n ≤ {n_max}");
            }
            let ann = folner.shape(n)?.difference(&base)?;
            let size = ann.len();
            if (size as f64).powf(ej) < (j * base.len()) as f64 {
                n += 1;
                continue;
            }
            let required = (size as f64).powf(ej).ceil() as usize;
            if required > params.max_w {
                break 'scan format!(
                    "annulus j = {j} needs |W| ≥ {required}, beyond the shattering cap {}",
                    params.max_w
                );
            }
            let c = complexity_relative(map, u, &ann, opts)?;
            let r = max_shattered(map, &pair, &ann, opts)?;
            let k = r.w.len();
            let log_lower = (c.count.lower.max(1) as f64).ln().max(k as f64 * 2f64.ln());
            let threshold = a / 2.0 * (size as f64).powf(aj);
            if log_lower < threshold {
                n += 1;
                continue;
            }
            let pow = 1u128.checked_shl(k as u32).unwrap_or(u128::MAX);
            if c.count.is_exact() && c.count.lower < pow {
                return Err(Error::Invariant(format!(
                    "annulus N = {} below 2^{k} for a shattered set",
                    c.count.lower
                )));
            }
            annuli.push(AnnulusRecord {
                j,
                n_from: n_prev,
                n_to: n,
                size,
                alpha: aj,
                eta: ej,
                threshold,
                log_count: (c.count.lower.max(1) as f64).ln(),
                count_mode: c.mode,
                w: r.w.iter().map(|p| p.coords(dim)).collect(),
                shatter_mode: r.mode,
                meets_eta: k >= required,
                certificate_ok: r.is_shattered() && c.count.upper >= pow,
            });
            points.extend(r.w.iter().copied());
            n_prev = n;
            j += 1;
            break;
        }
    };
    points.sort_unstable();
    points.dedup();
    if points.is_empty() {
        return Ok(empty(d_hat, a, reason));
    }
    let set = points_label(&points, dim, "F".to_string());
    let report = genset_test(&set, map, u, folner, n_max, opts)?;
    let tail_ok = report.liminf_est >= 0.25 * 2f64.ln();
    Ok(ThmConstruction {
        d_hat,
        a,
        points: points.iter().map(|p| p.coords(dim)).collect(),
        set,
        annuli,
        report: Some(report),
        stop_reason: reason,
        tail_ok,
    })
}

/// Dyadic-block minimisers of `ln N_n / |F_n|^α` and the exponent along them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizingSubsequence {
    pub indices: Vec<usize>,
    #[serde(skip)]
    pub folner: FolnerSequence,
    pub alpha: f64,
    pub estimate_full: ExponentEstimate,
    pub estimate_sub: ExponentEstimate,
    /// The re-estimated upper exponent does not exceed `α`.
    pub below_alpha: bool,
}

/// Picks, in each block `[2^k, 2^{k+1})` with `2^k ≥ start`, the row minimising
/// `ln N_n / |F_n|^α` (lowest `n` on ties), and re-estimates the exponent on those rows. The
/// returned sequence is the cumulative-union normalisation of the selected shapes.
pub fn folner_minimizing_subsequence(
    series: &GrowthSeries,
    folner: &FolnerSequence,
    alpha: f64,
    start: usize,
) -> Result<MinimizingSubsequence> {
    if series.rows.len() < 8 {
        return Err(Error::InvalidArgument(format!(
            "subsequence selection needs at least 8 rows, got {}",
            series.rows.len()
        )));
    }
    let score = |i: usize| {
        let r = &series.rows[i];
        r.upper / r.size.powf(alpha)
    };
    let mut picks = Vec::new();
    let mut lo = 1usize;
    while lo < series.rows.len() {
        let hi = (2 * lo).min(series.rows.len());
        if lo >= start {
            let best = (lo..hi).fold(lo, |b, i| if score(i) < score(b) { i } else { b });
            picks.push(best);
        }
        lo *= 2;
    }
    let estimate_full = critical_exponent(series)?;
    let estimate_sub = critical_exponent(&series.select(&picks))?;
    let indices: Vec<usize> = picks.iter().map(|&i| series.rows[i].n).collect();
    let shapes = indices
        .iter()
        .map(|&n| folner.shape(n))
        .collect::<Result<Vec<Shape>>>()?;
    let folner = FolnerSequence::normalized(&shapes)?;
    Ok(MinimizingSubsequence {
        below_alpha: estimate_sub.upper <= alpha,
        indices,
        folner,
        alpha,
        estimate_full,
        estimate_sub,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Count;
    use crate::subshift::{BlockCode, LanguageSource};

    fn boxes(n: usize) -> FolnerSequence {
        FolnerSequence::boxes(1, n + 1).unwrap()
    }

    fn full() -> LanguageSource {
        LanguageSource::full_shift(1, 2).unwrap()
    }

    #[test]
    fn interpolation_meets_targets() {
        let r =
            construct_interpolated_set(&IndexSet::power(2.0), 0.75, &boxes(1024), 1024).unwrap();
        for (row, t) in r.counts.iter().zip(&r.targets) {
            assert!(row.count >= *t);
        }
        let pow2 = IndexSet::explicit_1d((0..11).map(|k| 1i64 << k), "2^j");
        let r = construct_interpolated_set(&pow2, 0.5, &boxes(1024), 1024).unwrap();
        assert!(r
            .counts
            .iter()
            .all(|c| c.count >= ((c.size as f64).sqrt() + 1e-9).floor() as u64));
        let r = construct_interpolated_set(&IndexSet::empty(), 0.5, &boxes(1024), 1024).unwrap();
        assert!(r.meets_alpha, "{:?}", r.estimate);
        let r = construct_interpolated_set(&IndexSet::empty(), 1.0, &boxes(64), 64).unwrap();
        assert_eq!(r.points, 65);
        assert!((r.estimate.lower - 1.0).abs() < 0.05);
    }

    #[test]
    fn interpolation_on_explicit_sequences() {
        let f =
            FolnerSequence::explicit((0..6).map(|k| Shape::interval(-k, k + 1)).collect(), true)
                .unwrap();
        let r = construct_interpolated_set(&IndexSet::empty(), 0.5, &f, 5).unwrap();
        assert_eq!(r.set.points_1d_in(-10, 10), vec![-4, -2, 0]);
        assert!(matches!(
            construct_interpolated_set(&IndexSet::empty(), 1.5, &f, 5),
            Err(Error::InvalidArgument(_))
        ));
    }

    fn report(set: &IndexSet, n: usize) -> GenSetReport {
        let opts = ComplexityOptions::default();
        genset_test(
            set,
            &FactorMap::trivial(full()),
            &ClopenCover::symbols(1, 2),
            &boxes(n),
            n.min(14),
            &opts,
        )
        .unwrap()
    }

    #[test]
    fn positive_upper_scales() {
        let s = IndexSet::non_negative();
        let r = construct_pos_upper_set(&s, &report(&s, 14), &boxes(256), 256).unwrap();
        assert_eq!(&r.scales[..4], &[1, 3, 7, 15]);
        assert!((r.limsup_a - 1.0).abs() < 1e-12);
        let sparse = IndexSet::explicit_1d((0..9).map(|k| 1i64 << k), "2^j");
        let rep = report(&sparse, 14);
        assert!(rep.verdict_p);
        assert!(matches!(
            construct_pos_upper_set(&sparse, &rep, &boxes(256), 256),
            Err(Error::ScaleSelection(_))
        ));
        assert!(matches!(
            select_scales(&s, &boxes(2), 2),
            Err(Error::ScaleSelection(_))
        ));
    }

    #[test]
    fn theorem_construction_on_the_full_shift() {
        let u = ClopenCover::standard_from_words("0", "1").unwrap();
        let opts = ComplexityOptions::default();
        let r = construct_thm_genset(
            &FactorMap::trivial(full()),
            &u,
            &ThmParams::default(),
            &boxes(14),
            14,
            &opts,
        )
        .unwrap();
        assert!(r.d_hat > 0.95);
        assert!(r
            .annuli
            .iter()
            .all(|a| a.certificate_ok && a.w.len() == a.size));
        assert!(r.tail_ok, "{r:?}");
        let xor = FactorMap::new(full(), full(), BlockCode::xor()).unwrap();
        let r =
            construct_thm_genset(&xor, &u, &ThmParams::default(), &boxes(12), 12, &opts).unwrap();
        assert!(r.annuli.is_empty() && r.report.is_none());
    }

    #[test]
    fn minimizing_subsequence_picks_slow_scales() {
        let n_max = (1 << 16) - 1;
        let series = GrowthSeries::from_fn((0..=n_max).map(|n| (n, n + 1)), |s| {
            if (s as usize).is_power_of_two() {
                s.ln()
            } else {
                s.sqrt()
            }
        });
        let r = folner_minimizing_subsequence(&series, &boxes(n_max), 0.3, 1).unwrap();
        assert!(r.estimate_full.upper >= 0.45, "{:?}", r.estimate_full);
        assert!(r.below_alpha, "{:?}", r.estimate_sub);
        assert_eq!(r.indices[..3], [1, 3, 7]);
        let full_curve = crate::cover::ComplexityCurve::from_counts(
            (0..64usize)
                .map(|n| (n, n + 1, Count::exact(1u128 << (n + 1))))
                .collect::<Vec<_>>(),
        );
        let r = folner_minimizing_subsequence(
            &GrowthSeries::from_curve(&full_curve),
            &boxes(63),
            0.3,
            1,
        )
        .unwrap();
        assert!((r.estimate_sub.upper - 1.0).abs() < 0.05);
    }
}
