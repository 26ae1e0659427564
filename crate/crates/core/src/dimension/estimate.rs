//! Critical-exponent estimation from growth sequences `G_n` sampled along `|F_n|`.

use serde::Serialize;

use crate::cover::ComplexityCurve;
use crate::error::{Error, Result};
use crate::lattice::CountRow;

/// Step of the threshold-scan grid.
pub const SCAN_STEP: f64 = 0.01;

/// One sample `G_n ∈ [lower, upper]` at size `|F_n|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub size: f64,
    pub lower: f64,
    pub upper: f64,
}

/// The quantity whose critical exponent against `|F_n|` is estimated: `ln N_n` for complexity
/// curves, `|S ∩ F_n|` for index sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSeries {
    pub rows: Vec<GrowthRow>,
}

impl GrowthSeries {
    pub fn from_curve(curve: &ComplexityCurve) -> Self {
        let rows = curve
            .rows
            .iter()
            .map(|r| {
                let (lower, upper) = r.log_interval();
                GrowthRow {
                    n: r.n,
                    size: r.size as f64,
                    lower,
                    upper,
                }
            })
            .collect();
        GrowthSeries { rows }
    }

    pub fn from_counts(rows: &[CountRow]) -> Self {
        let rows = rows
            .iter()
            .map(|r| GrowthRow {
                n: r.n,
                size: r.size as f64,
                lower: r.count as f64,
                upper: r.count as f64,
            })
            .collect();
        GrowthSeries { rows }
    }

    /// Exact values `g(|F_n|)` at the given `(n, |F_n|)` pairs.
    pub fn from_fn(
        sizes: impl IntoIterator<Item = (usize, usize)>,
        g: impl Fn(f64) -> f64,
    ) -> Self {
        let rows = sizes
            .into_iter()
            .map(|(n, s)| {
                let v = g(s as f64);
                GrowthRow {
                    n,
                    size: s as f64,
                    lower: v,
                    upper: v,
                }
            })
            .collect();
        GrowthSeries { rows }
    }

    /// Keeps the rows at the given positions.
    pub fn select(&self, idx: &[usize]) -> Self {
        GrowthSeries {
            rows: idx
                .iter()
                .filter_map(|&i| self.rows.get(i).copied())
                .collect(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(|r| r.lower == r.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LoglogSlope,
    ThresholdScan,
}

/// Upper and lower critical exponents with the diagnostics of both estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentEstimate {
    /// Headline values (from `method`).
    pub upper: f64,
    pub lower: f64,
    pub method: Method,
    /// Least-squares slope of `ln G` against `ln |F|` over the tail.
    pub slope: f64,
    pub scan_upper: f64,
    pub scan_lower: f64,
    /// `(n_min, n_max)` of the tail window.
    pub window: (usize, usize),
    /// RMS residual of the tail fit.
    pub residual: f64,
    /// All values were `G ≤ 0` (e.g. `N_n = 1`); exponents are reported as 0.
    pub degenerate: bool,
    /// Some rows carried bounds rather than exact values.
    pub bounded: bool,
}

impl ExponentEstimate {
    fn degenerate(window: (usize, usize), bounded: bool) -> Self {
        ExponentEstimate {
            upper: 0.0,
            lower: 0.0,
            method: Method::LoglogSlope,
            slope: 0.0,
            scan_upper: 0.0,
            scan_lower: 0.0,
            window,
            residual: 0.0,
            degenerate: true,
            bounded,
        }
    }
}

fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (x - mx), b + (x - mx) * (y - my))
    });
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let rss: f64 = points
        .iter()
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    (slope, (rss / m).sqrt())
}

/// Slopes over windows `[j/4, j]` for every end `j` in the second half of the points.
fn local_slopes(points: &[(f64, f64)]) -> Vec<f64> {
    let m = points.len();
    let mut prefix = vec![[0.0f64; 4]; m + 1];
    for (i, (x, y)) in points.iter().enumerate() {
        let p = prefix[i];
        prefix[i + 1] = [p[0] + x, p[1] + y, p[2] + x * x, p[3] + x * y];
    }
    (m / 2..m)
        .filter(|&j| j >= 1)
        .map(|j| {
            let (a, b) = (j / 4, j + 1);
            let k = (b - a) as f64;
            let s: Vec<f64> = (0..4).map(|t| prefix[b][t] - prefix[a][t]).collect();
            let sxx = s[2] - s[0] * s[0] / k;
            let sxy = s[3] - s[0] * s[1] / k;
            if sxx <= 1e-12 * s[2].abs().max(1.0) {
                0.0
            } else {
                sxy / sxx
            }
        })
        .collect()
}

fn log_points(rows: &[GrowthRow], value: impl Fn(&GrowthRow) -> f64) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| value(r) > 0.0 && r.size > 1.0)
        .map(|r| (r.size.ln(), value(r).ln()))
        .collect()
}

/// Largest grid exponent at which the normalised sequence `G/|F|^α` still rises between the two
/// halves of the tail: by its maximum when `upper`, by its minimum otherwise.
fn threshold_scan(points: &[(f64, f64)], upper: bool) -> f64 {
    let m = points.len();
    let tail = &points[m / 2..];
    if tail.len() < 2 {
        return 0.0;
    }
    let (h1, h2) = tail.split_at(tail.len() / 2);
    let steps = (1.0 / SCAN_STEP).round() as usize;
    let mut best = 0.0;
    for k in 0..=steps {
        let a = k as f64 * SCAN_STEP;
        let norm = |p: &(f64, f64)| p.1 - a * p.0;
        let pick = |h: &[(f64, f64)]| {
            let it = h.iter().map(norm);
            if upper {
                it.fold(f64::NEG_INFINITY, f64::max)
            } else {
                it.fold(f64::INFINITY, f64::min)
            }
        };
        if pick(h2) > pick(h1) + 1e-9 {
            best = a;
        }
    }
    best
}

/// Critical exponent of `G_n` against `|F_n|`, upper and lower.
///
/// Upper estimates use the upper values of bounded rows and lower estimates the lower values.
/// Rows with `G ≤ 0` or `|F| = 1` are skipped.
pub fn critical_exponent(series: &GrowthSeries) -> Result<ExponentEstimate> {
    let rows = &series.rows;
    if rows.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "exponent estimation needs at least 4 rows, got {}",
            rows.len()
        )));
    }
    let bounded = !series.is_exact();
    let hi = log_points(rows, |r| r.upper);
    let lo = log_points(rows, |r| r.lower);
    let usable: Vec<&GrowthRow> = rows
        .iter()
        .filter(|r| r.upper > 0.0 && r.size > 1.0)
        .collect();
    let full_window = (rows[0].n, rows[rows.len() - 1].n);
    if hi.len() < 2 {
        return Ok(ExponentEstimate::degenerate(full_window, bounded));
    }
    let window = (usable[usable.len() / 2].n, usable[usable.len() - 1].n);
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    let upper = clamp(
        local_slopes(&hi)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max),
    );
    let lower = if lo.len() < 2 {
        0.0
    } else {
        clamp(local_slopes(&lo).into_iter().fold(f64::INFINITY, f64::min))
    };
    let tail = &hi[hi.len() / 2..];
    let (slope, residual) = if tail.len() >= 2 { fit(tail) } else { fit(&hi) };
    let scan_upper = threshold_scan(&hi, true);
    let scan_lower = if lo.len() < 2 {
        0.0
    } else {
        threshold_scan(&lo, false).min(scan_upper)
    };
    Ok(ExponentEstimate {
        upper,
        lower: lower.min(upper),
        method: Method::LoglogSlope,
        slope,
        scan_upper,
        scan_lower,
        window,
        residual,
        degenerate: false,
        bounded,
    })
}
