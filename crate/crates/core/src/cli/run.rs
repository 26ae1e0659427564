//! Dispatch of a configured task to the library and assembly of its report.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cli::config::*;
use crate::cli::emit::{to_json_value, Cell, RunReport, Status, Table};
use crate::cover::{ComplexityCurve, ComplexityOptions, RowMode};
use crate::dimension::{
    construct_interpolated_set, construct_pos_upper_set, construct_thm_genset, cover_dimension,
    folner_minimizing_subsequence, genset_test_with, standard_cover_family, subset_dimension,
    system_dimension, ExponentEstimate, GrowthSeries, TAU,
};
use crate::error::{Error, Result};
use crate::independence::{
    independent_along, max_shattered, IndependencePair, ShatterMode, ShatterResult,
};
use crate::joinings::tuples::random_tuples;
use crate::joinings::{
    factor_probe, fiber_product, joining_check, proper_joining_search, tuple_dimension,
    DimensionSetSample, JoiningCandidate, SearchVerdict, TupleSpec,
};
use crate::lattice::invariance_defect;
use crate::par::Exec;
use crate::subshift::{FactorMap, LanguageOptions, PointSpec};

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Replaces the node and search budgets.
    pub budget: Option<u64>,
    pub exec: Exec,
}

struct Outcome {
    table: Table,
    result: Value,
    warnings: Vec<String>,
    degraded: bool,
}

impl Outcome {
    fn new(table: Table, result: Value) -> Self {
        Outcome {
            table,
            result,
            warnings: Vec::new(),
            degraded: false,
        }
    }

    fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    fn degrade(&mut self, w: impl Into<String>) {
        self.degraded = true;
        self.warn(w);
    }
}

/// SHA-256 of the canonical JSON form of the config, without its output section.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let mut c = config.clone();
    c.output = OutputSpec::default();
    let text =
        serde_json::to_string(&serde_json::to_value(&c).expect("config serialises")).expect("json");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// The config with command-line overrides applied.
pub fn effective(
    config: &ExperimentConfig,
    task: Option<Task>,
    opts: &RunOptions,
) -> Result<ExperimentConfig> {
    let mut c = config.clone();
    match (c.task, task) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::config(
                "/task",
                format!(
                    "config is for task {:?} but {:?} was requested",
                    a.as_str(),
                    b.as_str()
                ),
            ))
        }
        (None, Some(b)) => c.task = Some(b),
        (None, None) => return Err(Error::config("/task", "no task given")),
        _ => {}
    }
    if let Some(b) = opts.budget {
        c.budget.node_budget = b;
        c.budget.search_budget = b;
    }
    Ok(c)
}

pub fn run(config: &ExperimentConfig, task: Option<Task>, opts: &RunOptions) -> Result<RunReport> {
    let c = effective(config, task, opts)?;
    let task = c.task.expect("task resolved");
    let copts = ComplexityOptions {
        language: LanguageOptions {
            margin: c.budget.margin,
            max_patterns: c.budget.max_patterns,
            exec: opts.exec,
        },
        node_budget: c.budget.node_budget,
    };
    let out = match task {
        Task::Complexity => run_curve(&c, &copts, false)?,
        Task::Dimension => run_curve(&c, &copts, true)?,
        Task::SubsetDim => run_subset(&c)?,
        Task::Genset => run_genset(&c, &copts)?,
        Task::Construct => run_construct(&c, &copts)?,
        Task::Independence => run_independence(&c, &copts)?,
        Task::TupleDim => run_tuples(&c, &copts)?,
        Task::Joining => run_joining(&c, opts.exec)?,
        Task::Folner => run_folner(&c)?,
    };
    Ok(RunReport {
        config_hash: config_hash(&c),
        task: task.as_str().into(),
        status: if out.degraded {
            Status::Degraded
        } else {
            Status::Ok
        },
        warnings: out.warnings,
        table: out.table,
        result: out.result,
    })
}

const CURVE_COLUMNS: [&str; 8] = [
    "n",
    "folner_size",
    "N",
    "N_upper",
    "mode",
    "lograt",
    "alpha_upper",
    "alpha_lower",
];

fn curve_rows(
    table: &mut Table,
    curve: &ComplexityCurve,
    est: Option<&ExponentEstimate>,
    prefix: &[Cell],
) {
    for r in &curve.rows {
        let mut row = prefix.to_vec();
        row.extend([
            Cell::from(r.n),
            Cell::from(r.size),
            Cell::from(r.count.lower),
            Cell::from(r.count.upper),
            Cell::from(r.mode.as_str()),
            Cell::from((r.count.lower.max(1) as f64).ln() / r.size.max(1) as f64),
            Cell::from(est.map(|e| e.upper)),
            Cell::from(est.map(|e| e.lower)),
        ]);
        table.push(row);
    }
}

fn curve_warnings(out: &mut Outcome, curve: &ComplexityCurve) {
    let bounds = curve
        .rows
        .iter()
        .filter(|r| r.mode == RowMode::Bounds)
        .count();
    if bounds > 0 {
        out.degrade(format!(
            "{bounds} of {} rows are bounds (budget or pattern-table limit reached)",
            curve.rows.len()
        ));
    }
    if curve
        .rows
        .iter()
        .any(|r| r.mode == RowMode::LocallyAdmissible)
    {
        out.warn("rows computed on locally admissible patterns (2-d approximation)");
    }
}

fn estimate_warnings(out: &mut Outcome, e: &ExponentEstimate) {
    if e.degenerate {
        out.warn("degenerate growth: exponents reported as 0");
    }
    if e.bounded {
        out.degraded = true;
    }
}

fn run_curve(c: &ExperimentConfig, copts: &ComplexityOptions, estimate: bool) -> Result<Outcome> {
    let p: CurveParams = c.params()?;
    let map = c.factor(&p.system, &p.factor)?;
    let folner = p.folner.build(map.dim(), p.n_max)?;
    if let Some(radius) = p.standard_radius {
        if !estimate || p.cover.is_some() {
            return Err(Error::config(
                "/params/standard_radius",
                "only for dimension tasks without a cover",
            ));
        }
        let family = standard_cover_family(&map.domain, radius, copts)?;
        let d = system_dimension(&map, &family, &folner, p.n_max, copts)?;
        let mut t = Table::new(&[
            "cover",
            "elements",
            "alpha_upper",
            "alpha_lower",
            "slope",
            "residual",
            "mode",
        ]);
        for (i, (u, e)) in family.iter().zip(&d.per_cover).enumerate() {
            t.push(vec![
                Cell::from(i),
                Cell::from(u.describe().join(" | ")),
                Cell::from(e.upper),
                Cell::from(e.lower),
                Cell::from(e.slope),
                Cell::from(e.residual),
                Cell::from(if e.bounded { "bounds" } else { "exact" }),
            ]);
        }
        let mut out = Outcome::new(t, to_json_value(&d)?);
        if d.per_cover.iter().any(|e| e.bounded) {
            out.degrade("some covers have bound-mode rows");
        }
        estimate_warnings(&mut out, &d.estimate);
        return Ok(out);
    }
    let name = p
        .cover
        .as_deref()
        .ok_or_else(|| Error::config("/params/cover", "missing cover"))?;
    let u = c.cover(name, &map.domain, &copts.language)?;
    let mut t = Table::new(&CURVE_COLUMNS);
    if estimate {
        let d = cover_dimension(&map, &u, &folner, p.n_max, copts)?;
        curve_rows(&mut t, &d.curve, Some(&d.estimate), &[]);
        let mut out = Outcome::new(t, to_json_value(&d)?);
        curve_warnings(&mut out, &d.curve);
        estimate_warnings(&mut out, &d.estimate);
        Ok(out)
    } else {
        let curve = crate::cover::complexity_curve(&map, &u, &folner, p.n_max, copts)?;
        curve_rows(&mut t, &curve, None, &[]);
        let mut out = Outcome::new(t, json!({ "curve": to_json_value(&curve)? }));
        curve_warnings(&mut out, &curve);
        Ok(out)
    }
}

fn run_subset(c: &ExperimentConfig) -> Result<Outcome> {
    let p: SubsetParams = c.params()?;
    let s = p
        .set
        .build()
        .map_err(|e| Error::config("/params/set", e.to_string()))?;
    let folner = p.folner.build(p.dim, p.n_max)?;
    let d = subset_dimension(&s, &folner, p.n_max)?;
    let mut t = Table::new(&["n", "folner_size", "count", "alpha_upper", "alpha_lower"]);
    for r in &d.counts {
        t.push(vec![
            r.n.into(),
            r.size.into(),
            r.count.into(),
            d.estimate.upper.into(),
            d.estimate.lower.into(),
        ]);
    }
    let mut out = Outcome::new(t, to_json_value(&d)?);
    if !d.unbounded {
        out.warn("the set looks finite on the computed range");
    }
    Ok(out)
}

fn run_genset(c: &ExperimentConfig, copts: &ComplexityOptions) -> Result<Outcome> {
    let p: GensetParams = c.params()?;
    let s = p
        .set
        .build()
        .map_err(|e| Error::config("/params/set", e.to_string()))?;
    let map = c.factor(&p.system, &p.factor)?;
    let u = c.cover(&p.cover, &map.domain, &copts.language)?;
    let folner = p.folner.build(map.dim(), p.n_max)?;
    let r = genset_test_with(&s, &map, &u, &folner, p.n_max, p.tau.unwrap_or(TAU), copts)?;
    let mut t = Table::new(&["n", "size", "log_lower", "log_upper", "mode", "ratio"]);
    for row in &r.ratios {
        t.push(vec![
            row.n.into(),
            row.size.into(),
            row.log_lower.into(),
            row.log_upper.into(),
            row.mode.as_str().into(),
            row.ratio.into(),
        ]);
    }
    let mut out = Outcome::new(t, to_json_value(&r)?);
    if r.ratios.iter().any(|x| x.mode == RowMode::Bounds) {
        out.degrade("some ratios rest on bounds");
    }
    Ok(out)
}

fn run_construct(c: &ExperimentConfig, copts: &ComplexityOptions) -> Result<Outcome> {
    let p: ConstructParams = c.params()?;
    match p {
        ConstructParams::Interpolated {
            set,
            alpha,
            dim,
            folner,
            n_max,
        } => {
            let s = set
                .build()
                .map_err(|e| Error::config("/params/set", e.to_string()))?;
            let folner = folner.build(dim, n_max)?;
            let r = construct_interpolated_set(&s, alpha, &folner, n_max)?;
            let mut t = Table::new(&["n", "folner_size", "count", "target"]);
            for (row, target) in r.counts.iter().zip(&r.targets) {
                t.push(vec![
                    row.n.into(),
                    row.size.into(),
                    row.count.into(),
                    (*target).into(),
                ]);
            }
            let mut out = Outcome::new(t, to_json_value(&r)?);
            if !r.meets_alpha {
                out.warn("measured lower exponent is below α − 0.05 on this range");
            }
            Ok(out)
        }
        ConstructParams::PosUpper {
            set,
            system,
            factor,
            cover,
            folner,
            n_max,
        } => {
            let s = set
                .build()
                .map_err(|e| Error::config("/params/set", e.to_string()))?;
            let map = c.factor(&system, &factor)?;
            let u = c.cover(&cover, &map.domain, &copts.language)?;
            let folner = folner.build(map.dim(), n_max)?;
            let report = genset_test_with(&s, &map, &u, &folner, n_max, TAU, copts)?;
            let r = construct_pos_upper_set(&s, &report, &folner, n_max)?;
            let mut t = Table::new(&[
                "n",
                "folner_size",
                "count_a",
                "count_b",
                "density_a",
                "density_b",
            ]);
            for d in &r.densities {
                t.push(vec![
                    d.n.into(),
                    d.size.into(),
                    d.count_a.into(),
                    d.count_b.into(),
                    d.density_a.into(),
                    d.density_b.into(),
                ]);
            }
            Ok(Outcome::new(
                t,
                json!({ "construction": to_json_value(&r)?, "genset": to_json_value(&report)? }),
            ))
        }
        ConstructParams::Thm {
            system,
            factor,
            cover,
            folner,
            n_max,
            schedule,
        } => {
            let map = c.factor(&system, &factor)?;
            let u = c.cover(&cover, &map.domain, &copts.language)?;
            let folner = folner.build(map.dim(), n_max)?;
            let r = construct_thm_genset(&map, &u, &schedule, &folner, n_max, copts)?;
            let mut t = Table::new(&[
                "j",
                "n_from",
                "n_to",
                "size",
                "alpha",
                "eta",
                "threshold",
                "log_count",
                "count_mode",
                "w_size",
                "shatter_mode",
                "meets_eta",
                "certificate_ok",
            ]);
            let mut out_degraded = false;
            for a in &r.annuli {
                out_degraded |=
                    a.count_mode == RowMode::Bounds || a.shatter_mode == ShatterMode::Budget;
                t.push(vec![
                    a.j.into(),
                    a.n_from.into(),
                    a.n_to.into(),
                    a.size.into(),
                    a.alpha.into(),
                    a.eta.into(),
                    a.threshold.into(),
                    a.log_count.into(),
                    a.count_mode.as_str().into(),
                    a.w.len().into(),
                    shatter_mode(a.shatter_mode).into(),
                    a.meets_eta.into(),
                    a.certificate_ok.into(),
                ]);
            }
            let mut out = Outcome::new(t, to_json_value(&r)?);
            if out_degraded {
                out.degrade("some annuli rest on bounds or greedy shattering");
            }
            if !r.tail_ok {
                out.warn("tail-minimum generating ratio is below ¼ ln 2");
            }
            Ok(out)
        }
        ConstructParams::MinimizingSubsequence {
            system,
            factor,
            cover,
            folner,
            n_max,
            alpha,
            start,
        } => {
            let map = c.factor(&system, &factor)?;
            let u = c.cover(&cover, &map.domain, &copts.language)?;
            let folner = folner.build(map.dim(), n_max)?;
            let d = cover_dimension(&map, &u, &folner, n_max, copts)?;
            let series = GrowthSeries::from_curve(&d.curve);
            let m = folner_minimizing_subsequence(&series, &folner, alpha, start)?;
            let mut t = Table::new(&["k", "n", "folner_size", "N", "N_upper", "mode", "score"]);
            for (k, &n) in m.indices.iter().enumerate() {
                let r = &d.curve.rows[n];
                let (_, hi) = r.log_interval();
                t.push(vec![
                    k.into(),
                    n.into(),
                    r.size.into(),
                    r.count.lower.into(),
                    r.count.upper.into(),
                    r.mode.as_str().into(),
                    (hi / (r.size as f64).powf(alpha)).into(),
                ]);
            }
            let mut out = Outcome::new(
                t,
                json!({
                    "alpha": alpha,
                    "indices": m.indices,
                    "estimate_full": to_json_value(&m.estimate_full)?,
                    "estimate_sub": to_json_value(&m.estimate_sub)?,
                    "below_alpha": m.below_alpha,
                    "gap": m.estimate_full.upper - m.estimate_sub.upper,
                }),
            );
            curve_warnings(&mut out, &d.curve);
            Ok(out)
        }
    }
}

fn shatter_mode(m: ShatterMode) -> &'static str {
    match m {
        ShatterMode::Exact => "exact",
        ShatterMode::Greedy => "greedy",
        ShatterMode::Budget => "budget",
    }
}

fn shatter_json(r: &ShatterResult) -> Value {
    json!({
        "w": r.w.iter().map(|p| p.coords(r.w.dim())).collect::<Vec<_>>(),
        "witness_y": r.witness_y.as_ref().map(|p| p.to_string()),
        "achieved": r.achieved,
        "shattered": r.is_shattered(),
        "certificate": r.certificate,
        "mode": shatter_mode(r.mode),
    })
}

fn run_independence(c: &ExperimentConfig, copts: &ComplexityOptions) -> Result<Outcome> {
    let p: IndependenceParams = c.params()?;
    let map = c.factor(&p.system, &p.factor)?;
    let u = c.cover(&p.cover, &map.domain, &copts.language)?;
    let pair = IndependencePair::from_standard(&u)
        .map_err(|e| Error::config(format!("/covers/{}", p.cover), e.to_string()))?;
    let (query, r) = match (&p.w, &p.b) {
        (Some(w), None) => (
            "along",
            independent_along(&map, &pair, &w.build(map.dim())?, copts)?,
        ),
        (None, Some(b)) => (
            "max",
            max_shattered(&map, &pair, &b.build(map.dim())?, copts)?,
        ),
        _ => return Err(Error::config("/params", "give exactly one of w and b")),
    };
    let mut t = Table::new(&["query", "mode", "size", "achieved", "shattered", "w"]);
    let w: Vec<String> =
        r.w.iter()
            .map(|g| format!("{:?}", g.coords(r.w.dim())))
            .collect();
    t.push(vec![
        query.into(),
        shatter_mode(r.mode).into(),
        r.w.len().into(),
        r.achieved.into(),
        r.is_shattered().into(),
        w.join(" ").into(),
    ]);
    let mut out = Outcome::new(t, shatter_json(&r));
    if r.mode != ShatterMode::Exact {
        out.degrade("shattering result is not exact");
    }
    Ok(out)
}

fn run_tuples(c: &ExperimentConfig, copts: &ComplexityOptions) -> Result<Outcome> {
    let p: TupleParams = c.params()?;
    let map: FactorMap = c.factor(&p.system, &p.factor)?;
    let folner = p.folner.build(map.dim(), p.n_max)?;
    let k_max =
        p.ks.iter()
            .copied()
            .max()
            .ok_or_else(|| Error::config("/params/ks", "no k values"))?;
    let tuples = match (&p.tuples, &p.random) {
        (Some(list), None) => list
            .iter()
            .enumerate()
            .map(|(i, words)| {
                let pts = words
                    .iter()
                    .map(|w| PointSpec::periodic(w))
                    .collect::<Result<Vec<_>>>();
                pts.and_then(TupleSpec::new)
                    .map_err(|e| Error::config(format!("/params/tuples/{i}"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?,
        (None, Some(r)) => random_tuples(&map.domain, r.n, r.count, r.period, k_max, r.seed)?,
        _ => {
            return Err(Error::config(
                "/params",
                "give exactly one of tuples and random",
            ))
        }
    };
    if tuples.is_empty() {
        return Err(Error::config("/params/tuples", "no tuples"));
    }
    let mut t = Table::new(&[
        "tuple",
        "k",
        "radius",
        "n",
        "folner_size",
        "N",
        "N_upper",
        "mode",
        "lograt",
        "alpha_upper",
        "alpha_lower",
    ]);
    let mut per = Vec::new();
    let mut tails = Vec::new();
    let mut out_warn = Vec::new();
    let mut degraded = false;
    for (i, tup) in tuples.iter().enumerate() {
        let d = tuple_dimension(&map, tup, &p.ks, &folner, p.n_max, copts)?;
        for row in &d.rows {
            let prefix = [Cell::from(i), Cell::from(row.k), Cell::from(row.radius)];
            curve_rows(
                &mut t,
                &row.dimension.curve,
                Some(&row.dimension.estimate),
                &prefix,
            );
            degraded |= row
                .dimension
                .curve
                .rows
                .iter()
                .any(|r| r.mode == RowMode::Bounds);
        }
        if !d.nested_ok {
            out_warn.push(format!("tuple {i}: nested ball covers violated N_k' ≤ N_k"));
        }
        tails.push(d.tail.upper);
        per.push(to_json_value(&d)?);
    }
    let points: Vec<Vec<String>> = tuples
        .iter()
        .map(|tup| {
            tup.points
                .iter()
                .map(|pt| match pt {
                    PointSpec::Periodic { tile } => tile.to_string(),
                    other => format!("{other:?}"),
                })
                .collect()
        })
        .collect();
    let sample = DimensionSetSample::from_estimates(tails, p.threshold);
    let mut out = Outcome::new(
        t,
        json!({ "tuples": points, "per_tuple": per, "sample": to_json_value(&sample)? }),
    );
    for w in out_warn {
        out.warn(w);
    }
    if degraded {
        out.degrade("some rows are bounds");
    }
    Ok(out)
}

fn run_joining(c: &ExperimentConfig, exec: Exec) -> Result<Outcome> {
    let p: JoiningParams = c.params()?;
    let x = c.system(&p.x)?;
    let y = c.system(&p.y)?;
    let z = c.system(&p.z)?;
    let pi_x = c.code(&p.pi_x, &x, &z)?;
    let pi_y = c.code(&p.pi_y, &y, &z)?;
    let columns = [
        "verdict",
        "window",
        "examined",
        "distinguishing_x",
        "distinguishing_y",
        "witness_forbidden",
        "message",
    ];
    let forbidden_text = |f: &[crate::joinings::TrackWord]| {
        f.iter()
            .map(|t| format!("{}/{}", t.x, t.y))
            .collect::<Vec<_>>()
            .join(" ")
    };
    match p.mode {
        JoiningMode::Search { window } => {
            let fp = fiber_product(&x, &y, &z, &pi_x, &pi_y)?;
            let s = proper_joining_search(&fp, window, c.budget.search_budget, exec)?;
            let verdict = to_json_value(&s.verdict)?;
            let report = s.report.as_ref();
            let dw = report.and_then(|r| r.distinguishing_word.clone());
            let wf = report
                .map(|r| r.witness_forbidden.clone())
                .unwrap_or_default();
            let mut t = Table::new(&columns);
            t.push(vec![
                verdict.as_str().unwrap_or_default().into(),
                s.window.into(),
                s.examined.into(),
                dw.as_ref().map(|d| d.x.clone()).into(),
                dw.as_ref().map(|d| d.y.clone()).into(),
                forbidden_text(&wf).into(),
                s.message.clone().into(),
            ]);
            let mut out = Outcome::new(
                t,
                json!({
                    "verdict": verdict,
                    "window": s.window,
                    "examined": s.examined,
                    "witness_forbidden": to_json_value(&wf)?,
                    "distinguishing_word": to_json_value(&dw)?,
                    "report": to_json_value(&s.report)?,
                    "frontier": to_json_value(&s.frontier)?,
                    "message": s.message,
                }),
            );
            if s.verdict == SearchVerdict::Partial {
                out.degrade("search budget exhausted; see frontier");
            }
            Ok(out)
        }
        JoiningMode::Check { window, forbidden } => {
            let fp = fiber_product(&x, &y, &z, &pi_x, &pi_y)?;
            let words = forbidden
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    track_word(f, x.alphabet()).map_err(|e| {
                        Error::config(format!("/params/mode/forbidden/{i}"), e.to_string())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let r = joining_check(&JoiningCandidate::new(fp, window, words)?)?;
            let verdict = match (r.is_joining, r.is_proper) {
                (true, true) => "proper_joining",
                (true, false) => "fiber_product",
                (false, _) => "not_a_joining",
            };
            let mut t = Table::new(&columns);
            t.push(vec![
                verdict.into(),
                r.window.into(),
                Cell::from(1usize),
                r.distinguishing_word.as_ref().map(|d| d.x.clone()).into(),
                r.distinguishing_word.as_ref().map(|d| d.y.clone()).into(),
                forbidden_text(&r.witness_forbidden).into(),
                format!("is_joining={} is_proper={}", r.is_joining, r.is_proper).into(),
            ]);
            let mut v = to_json_value(&r)?;
            v["verdict"] = Value::from(verdict);
            Ok(Outcome::new(t, v))
        }
        JoiningMode::Probe { probe, window } => {
            let map = FactorMap::new(x, z, pi_x)?;
            let r = factor_probe(&map, probe, window, c.budget.search_budget)?;
            let mut t = Table::new(&[
                "kind",
                "window",
                "violation",
                "verdict",
                "detail",
                "checked",
            ]);
            t.push(vec![
                to_json_value(&r.kind)?.as_str().unwrap_or_default().into(),
                r.window.into(),
                r.violation.into(),
                r.verdict.clone().into(),
                r.detail.clone().into(),
                r.checked.into(),
            ]);
            let mut out = Outcome::new(t, to_json_value(&r)?);
            if !r.violation && r.checked >= c.budget.search_budget {
                out.degrade("probe budget exhausted before the window was covered");
            }
            Ok(out)
        }
    }
}

fn run_folner(c: &ExperimentConfig) -> Result<Outcome> {
    let p: FolnerParams = c.params()?;
    let folner = p.folner.build(p.dim, p.n_max)?;
    let k = p.k.build(p.dim)?;
    let mut t = Table::new(&["n", "folner_size", "defect", "defect_value"]);
    let mut rows = Vec::new();
    for n in 0..=p.n_max {
        let f = folner.shape(n)?;
        let d = invariance_defect(&k, &f)?;
        let value = *d.numer() as f64 / *d.denom() as f64;
        t.push(vec![
            n.into(),
            f.len().into(),
            d.to_string().into(),
            value.into(),
        ]);
        rows.push(json!({ "n": n, "folner_size": f.len(), "defect": d.to_string(), "defect_value": value }));
    }
    Ok(Outcome::new(
        t,
        json!({ "k": k.iter().map(|g| g.coords(p.dim)).collect::<Vec<_>>(), "rows": rows }),
    ))
}
