//! Relative dimensions of tuples of points through ball-complement covers, and sampled
//! dimension sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cover::{ClopenCover, ClopenSet, ComplexityOptions, CoverKind};
use crate::dimension::{cover_dimension, CurveDimension, ExponentEstimate};
use crate::error::{Error, Result};
use crate::lattice::FolnerSequence;
use crate::subshift::point::{ball_radius, central_cube, check_point, point_pattern};
use crate::subshift::{FactorMap, LanguageSource, PointSpec};

/// `n ≥ 2` points of a common dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSpec {
    pub points: Vec<PointSpec>,
}

impl TupleSpec {
    pub fn new(points: Vec<PointSpec>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a tuple needs at least 2 points, got {}",
                points.len()
            )));
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: p.dim(),
            });
        }
        Ok(TupleSpec { points })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// `𝓤_k = {X ∖ B̄(x_i, 1/k)}`; fails when two points share their ball.
    pub fn ball_cover(&self, k: u64) -> Result<ClopenCover> {
        let radius = ball_radius(k);
        let base = central_cube(self.dim(), radius);
        if base.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} gives balls equal to the whole space"
            )));
        }
        let rows: Vec<Vec<u8>> = self
            .points
            .iter()
            .map(|p| point_pattern(p, &base).symbols().to_vec())
            .collect();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if rows[i] == rows[j] {
                    return Err(Error::DegenerateTuple {
                        first: i,
                        second: j,
                        radius,
                    });
                }
            }
        }
        let elements = rows
            .into_iter()
            .map(|r| ClopenSet::complement_of(base.clone(), vec![r]))
            .collect::<Result<Vec<_>>>()?;
        let kind = if elements.len() == 2 {
            CoverKind::Standard
        } else {
            CoverKind::General
        };
        ClopenCover::new(elements, kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleRow {
    pub k: u64,
    pub radius: usize,
    #[serde(flatten)]
    pub dimension: CurveDimension,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleDimension {
    pub rows: Vec<TupleRow>,
    /// Estimate at the largest `k`.
    pub tail: ExponentEstimate,
    /// `N_{k'}(F) ≤ N_k(F)` held on every exact row for consecutive `k < k'`.
    pub nested_ok: bool,
}

/// `D̄(G, 𝓤_k | π)` for each `k ≥ 2` in `ks` (sorted ascending).
pub fn tuple_dimension(
    map: &FactorMap,
    tuple: &TupleSpec,
    ks: &[u64],
    folner: &FolnerSequence,
    n_max: usize,
    opts: &ComplexityOptions,
) -> Result<TupleDimension> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() || ks[0] < 2 {
        return Err(Error::InvalidArgument("k values must be at least 2".into()));
    }
    if tuple.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            left: map.dim(),
            right: tuple.dim(),
        });
    }
    tuple.ball_cover(*ks.last().expect("non-empty"))?;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in &ks {
        let u = tuple.ball_cover(k)?;
        rows.push(TupleRow {
            k,
            radius: ball_radius(k),
            dimension: cover_dimension(map, &u, folner, n_max, opts)?,
        });
    }
    let nested_ok = rows.windows(2).all(|w| {
        w[0].dimension
            .curve
            .rows
            .iter()
            .zip(&w[1].dimension.curve.rows)
            .all(|(a, b)| {
                !(a.count.is_exact() && b.count.is_exact()) || b.count.upper <= a.count.upper
            })
    });
    let tail = rows.last().expect("non-empty").dimension.estimate.clone();
    Ok(TupleDimension {
        rows,
        tail,
        nested_ok,
    })
}

/// Histogram bin width of [`DimensionSetSample`].
pub const BIN_WIDTH: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionSetSample {
    /// Tail upper estimate per tuple.
    pub estimates: Vec<f64>,
    /// Counts over `[0, 0.1), [0.1, 0.2), …, [0.9, 1.0]`.
    pub histogram: Vec<usize>,
    pub threshold: f64,
    /// Every sampled value is at least `threshold`.
    pub all_above: bool,
}

/// Under-approximation of the relative dimension set by the given tuples.
pub fn dimension_set_sample(
    map: &FactorMap,
    tuples: &[TupleSpec],
    ks: &[u64],
    folner: &FolnerSequence,
    n_max: usize,
    threshold: f64,
    opts: &ComplexityOptions,
) -> Result<DimensionSetSample> {
    if tuples.is_empty() {
        return Err(Error::InvalidArgument("no tuples to sample".into()));
    }
    let estimates = tuples
        .iter()
        .map(|t| tuple_dimension(map, t, ks, folner, n_max, opts).map(|d| d.tail.upper))
        .collect::<Result<Vec<_>>>()?;
    Ok(DimensionSetSample::from_estimates(estimates, threshold))
}

impl DimensionSetSample {
    pub fn from_estimates(estimates: Vec<f64>, threshold: f64) -> Self {
        let mut histogram = vec![0usize; 10];
        for &e in &estimates {
            histogram[((e / BIN_WIDTH).floor().max(0.0) as usize).min(9)] += 1;
        }
        DimensionSetSample {
            all_above: estimates.iter().all(|&e| e >= threshold),
            estimates,
            histogram,
            threshold,
        }
    }
}

/// `count` tuples of `n` admissible 1-d periodic points of period `period`, pairwise distinct on
/// the ball of `k`, drawn with a seeded generator.
pub fn random_tuples(
    x: &LanguageSource,
    n: usize,
    count: usize,
    period: usize,
    k: u64,
    seed: u64,
) -> Result<Vec<TupleSpec>> {
    if x.dim() != 1 || period == 0 {
        return Err(Error::InvalidArgument(
            "random tuples need a 1-d system and a positive period".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = central_cube(1, ball_radius(k).max(1) + period);
    let opts = Default::default();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::Infeasible(format!(
                "could not sample {count} distinct admissible {n}-tuples"
            )));
        }
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let word: String = (0..period)
                .map(
                    |_| crate::subshift::pattern::symbol_char(rng.gen_range(0..x.alphabet()) as u8),
                )
                .collect();
            points.push(PointSpec::periodic(&word)?);
        }
        let mut ok = true;
        for p in &points {
            ok &= check_point(x, p, &window, &opts)?;
        }
        let t = TupleSpec::new(points)?;
        if ok && t.ball_cover(k).is_ok() {
            out.push(t);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subshift::BlockCode;

    fn full() -> LanguageSource {
        LanguageSource::full_shift(1, 2).unwrap()
    }

    fn pair(a: &str, b: &str) -> TupleSpec {
        TupleSpec::new(vec![
            PointSpec::periodic(a).unwrap(),
            PointSpec::periodic(b).unwrap(),
        ])
        .unwrap()
    }

    fn boxes(n: usize) -> FolnerSequence {
        FolnerSequence::boxes(1, n + 1).unwrap()
    }

    #[test]
    fn constant_pair_over_trivial_factor() {
        let d = tuple_dimension(
            &FactorMap::trivial(full()),
            &pair("0", "1"),
            &[2, 4],
            &boxes(8),
            8,
            &Default::default(),
        )
        .unwrap();
        assert!(d.nested_ok);
        for r in &d.rows {
            assert!(
                r.dimension.estimate.upper > 0.9,
                "{:?}",
                r.dimension.estimate
            );
        }
    }

    #[test]
    fn identity_and_xor_collapse() {
        let t = pair("01", "10");
        let d = tuple_dimension(
            &FactorMap::identity(full()),
            &t,
            &[2, 4],
            &boxes(10),
            10,
            &Default::default(),
        )
        .unwrap();
        assert!(d.tail.upper < 0.05);
        let xor = FactorMap::new(full(), full(), BlockCode::xor()).unwrap();
        let d = tuple_dimension(&xor, &t, &[2], &boxes(10), 10, &Default::default()).unwrap();
        assert!(d.tail.upper < 0.05);
        assert!(d.rows[0]
            .dimension
            .curve
            .rows
            .iter()
            .all(|r| r.count.upper <= 2));
    }

    #[test]
    fn equal_balls_are_rejected() {
        let t = pair("0", "0001");
        assert!(matches!(
            t.ball_cover(2),
            Err(Error::DegenerateTuple {
                first: 0,
                second: 1,
                radius: 1
            })
        ));
        assert!(t.ball_cover(8).is_ok());
        assert!(tuple_dimension(
            &FactorMap::trivial(full()),
            &t,
            &[2, 8],
            &boxes(6),
            6,
            &Default::default()
        )
        .is_err());
    }

    #[test]
    fn sampled_dimension_sets() {
        let tuples = random_tuples(&full(), 2, 10, 3, 2, 7).unwrap();
        assert_eq!(tuples, random_tuples(&full(), 2, 10, 3, 2, 7).unwrap());
        let s = dimension_set_sample(
            &FactorMap::trivial(full()),
            &tuples,
            &[2],
            &boxes(10),
            10,
            0.9,
            &Default::default(),
        )
        .unwrap();
        assert!(s.all_above, "{s:?}");
        assert_eq!(s.histogram[9], 10);
        let s = dimension_set_sample(
            &FactorMap::identity(full()),
            &tuples,
            &[2],
            &boxes(10),
            10,
            0.9,
            &Default::default(),
        )
        .unwrap();
        assert!(s.estimates.iter().all(|&e| e < 0.05) && !s.all_above);
    }
}
