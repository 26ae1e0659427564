//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use endim::cli::{preset, run, RunOptions};
use endim::cover::{
    complexity_absolute, complexity_relative, min_subcover, ClopenCover, ClopenSet,
    ComplexityOptions, CoverKind,
};
use endim::dimension::{
    construct_thm_genset, cover_dimension, critical_exponent, GrowthSeries, ThmParams,
};
use endim::independence::{independent_along, max_shattered, sauer_bound, IndependencePair};
use endim::joinings::{fiber_product, joining_check, proper_joining_search, SearchVerdict};
use endim::lattice::{FolnerSequence, IndexSet, Shape};
use endim::par::Exec;
use endim::subshift::{BlockCode, FactorMap, LanguageOptions, LanguageSource};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn opts() -> ComplexityOptions {
    ComplexityOptions::default()
}

fn lopts() -> LanguageOptions {
    LanguageOptions::default()
}

fn full() -> LanguageSource {
    LanguageSource::full_shift(1, 2).unwrap()
}

fn boxes(n_max: usize) -> FolnerSequence {
    FolnerSequence::boxes(1, n_max + 1).unwrap()
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn words(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1u32 << n).map(move |m| (0..n).map(|i| (m >> (n - 1 - i) & 1) as u8).collect())
}

fn fibonacci(k: usize) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}

fn c1_full_and_golden_mean() -> Outcome {
    let start = Instant::now();
    let u = ClopenCover::symbols(1, 2);
    for n in 1..=16usize {
        let c =
            complexity_absolute(&full(), &u, &Shape::interval(0, n as i64), &opts()).map_err(e)?;
        ensure!(
            c.count.is_exact() && c.count.lower == 1u128 << n,
            "full shift n={n}: {:?}",
            c.count
        );
    }
    let gm = LanguageSource::golden_mean();
    for n in 1..=20usize {
        let expected = if n <= 12 {
            words(n)
                .filter(|w| w.windows(2).all(|p| p != [1, 1]))
                .count() as u128
        } else {
            fibonacci(n + 2)
        };
        let c = complexity_absolute(&gm, &u, &Shape::interval(0, n as i64), &opts()).map_err(e)?;
        ensure!(
            c.count.is_exact() && c.count.lower == expected,
            "golden mean n={n}: {:?} vs {expected}",
            c.count
        );
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(format!(
        "2^n for n<=16, F(n+2) for n<=20 in {:.2}s",
        t.as_secs_f64()
    ))
}

fn c2_critical_exponent() -> Outcome {
    let mut worst = 0.0f64;
    for beta in [0.25, 0.5, 0.75, 1.0] {
        let s = GrowthSeries::from_fn((1..=512).map(|n| (n, n)), |x| x.powf(beta));
        let est = critical_exponent(&s).map_err(e)?;
        let err = (est.upper - beta).abs().max((est.lower - beta).abs());
        ensure!(
            err <= 0.05,
            "beta {beta}: upper {} lower {}",
            est.upper,
            est.lower
        );
        worst = worst.max(err);
    }
    Ok(format!("max error {worst:.4}"))
}

fn c3_xor_relative() -> Outcome {
    let map = FactorMap::new(full(), full(), BlockCode::xor()).map_err(e)?;
    let u = ClopenCover::symbols(1, 2);
    for n in 1..=16i64 {
        let c = complexity_relative(&map, &u, &Shape::interval(0, n), &opts()).map_err(e)?;
        ensure!(
            c.count.is_exact() && c.count.lower == 2,
            "n={n}: {:?}",
            c.count
        );
    }
    let rel = cover_dimension(&map, &u, &boxes(16), 16, &opts())
        .map_err(e)?
        .estimate;
    let abs = cover_dimension(&FactorMap::trivial(full()), &u, &boxes(16), 16, &opts())
        .map_err(e)?
        .estimate;
    ensure!(rel.upper <= 0.05, "relative upper {}", rel.upper);
    ensure!(
        (abs.upper - 1.0).abs() <= 0.05 && (abs.lower - 1.0).abs() <= 0.05,
        "absolute {} / {}",
        abs.upper,
        abs.lower
    );
    Ok(format!(
        "relative {:.4}, absolute {:.4}",
        rel.upper, abs.upper
    ))
}

fn squares_in(lo: i64, hi: i64) -> usize {
    (0..)
        .map(|k: i64| k * k)
        .take_while(|&s| s < hi)
        .filter(|&s| s >= lo)
        .count()
}

fn c4_free_bits_squares() -> Outcome {
    let x = LanguageSource::free_bits(IndexSet::power(2.0));
    let u = ClopenCover::symbols(1, 2);
    let mut notes = Vec::new();
    for n in [16i64, 64] {
        let c = complexity_absolute(&x, &u, &Shape::interval(0, n), &opts()).map_err(e)?;
        let log2 = (c.count.lower as f64).log2();
        let lo = squares_in(0, n) as f64;
        let max_t = (-n..=n * n).map(|t| squares_in(t, t + n)).max().unwrap() as f64;
        let hi = max_t + ((n + 1) as f64).log2();
        ensure!(
            c.count.is_exact() && log2 >= lo - 1e-9 && log2 <= hi + 1e-9,
            "n={n}: log2 N {log2} not in [{lo}, {hi}]"
        );
        notes.push(format!("n={n} log2N={log2:.1}"));
    }
    let est = cover_dimension(&FactorMap::trivial(x), &u, &boxes(64), 64, &opts())
        .map_err(e)?
        .estimate;
    ensure!((0.4..=0.6).contains(&est.upper), "estimate {}", est.upper);
    Ok(format!("{}, estimate {:.3}", notes.join(", "), est.upper))
}

fn exhaustive_subcover(universe: usize, sets: &[Vec<usize>]) -> Option<u32> {
    let full = (1u32 << universe) - 1;
    let masks: Vec<u32> = sets
        .iter()
        .map(|s| s.iter().fold(0, |m, &x| m | 1 << x))
        .collect();
    let mut dist = vec![u32::MAX; 1 << universe];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(m) = queue.pop_front() {
        for &s in &masks {
            let next = m | s;
            if dist[next as usize] == u32::MAX {
                dist[next as usize] = dist[m as usize] + 1;
                queue.push_back(next);
            }
        }
    }
    (dist[full as usize] != u32::MAX).then_some(dist[full as usize])
}

fn c5_min_subcover() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 200 {
        let universe = rng.gen_range(1..=12);
        let count = rng.gen_range(1..=30);
        let density = rng.gen_range(0.1..0.6);
        let sets: Vec<Vec<usize>> = (0..count)
            .map(|_| (0..universe).filter(|_| rng.gen_bool(density)).collect())
            .collect();
        let Some(expected) = exhaustive_subcover(universe, &sets) else {
            continue;
        };
        let got = min_subcover(universe, &sets, u64::MAX).map_err(e)?;
        ensure!(
            got.is_exact() && got.lower == expected as u128,
            "instance {done}: {got:?} vs {expected}"
        );
        done += 1;
    }
    Ok("200 instances agree".into())
}

fn random_sft(rng: &mut ChaCha8Rng) -> LanguageSource {
    loop {
        let k = rng.gen_range(0..=3);
        let len = rng.gen_range(2..=3);
        let forbidden: Vec<String> = (0..k)
            .map(|_| {
                (0..len)
                    .map(|_| if rng.gen_bool(0.5) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        let refs: Vec<&str> = forbidden.iter().map(String::as_str).collect();
        let x = LanguageSource::sft_words(2, &refs).unwrap();
        if x.count(&Shape::interval(0, 16), &lopts())
            .map(|c| c.0 > 0)
            .unwrap_or(false)
        {
            return x;
        }
    }
}

fn exhaustive_shattered(patterns: &[u32], b: usize) -> usize {
    let distinct: BTreeSet<u32> = patterns.iter().copied().collect();
    let cap = (distinct.len() as f64).log2().floor() as u32;
    let mut best = 0;
    for w in 0u32..1 << b {
        let k = w.count_ones();
        if k <= best as u32 || k > cap {
            continue;
        }
        let seen: BTreeSet<u32> = distinct.iter().map(|p| p & w).collect();
        if seen.len() == 1 << k {
            best = k as usize;
        }
    }
    best
}

fn c6_max_shattered() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pair = IndependencePair::from_words("0", "1").map_err(e)?;
    for i in 0..200 {
        let x = random_sft(&mut rng);
        let size = rng.gen_range(1..=12);
        let mut pts: BTreeSet<i64> = BTreeSet::new();
        while pts.len() < size {
            pts.insert(rng.gen_range(0..16));
        }
        let b = Shape::from_1d(pts.iter().copied());
        let table = x.language(&b, &lopts()).map_err(e)?;
        let patterns: Vec<u32> = table
            .rows()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold(0u32, |m, (j, &s)| m | (s as u32) << j)
            })
            .collect();
        let expected = exhaustive_shattered(&patterns, size);
        let map = FactorMap::trivial(x);
        let r = max_shattered(&map, &pair, &b, &opts()).map_err(e)?;
        ensure!(
            r.w.len() == expected,
            "instance {i}: |W| {} vs {expected}",
            r.w.len()
        );
        ensure!(
            r.w.len() >= sauer_bound(patterns.len() as u128, size),
            "instance {i}: below Sauer bound"
        );
        ensure!(r.w.is_subset(&b), "instance {i}: W not inside B");
        let again = independent_along(&map, &pair, &r.w, &opts()).map_err(e)?;
        ensure!(again.is_shattered(), "instance {i}: re-verification failed");
    }
    Ok("200 instances agree and re-verify".into())
}

fn random_cover(rng: &mut ChaCha8Rng) -> ClopenCover {
    let base = Shape::interval(0, 2);
    let all: Vec<Vec<u8>> = words(2).collect();
    loop {
        let k = rng.gen_range(2..=4);
        let elems: Vec<Vec<Vec<u8>>> = (0..k)
            .map(|_| all.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
            .collect();
        let covered: BTreeSet<&Vec<u8>> = elems.iter().flatten().collect();
        if covered.len() == all.len() && elems.iter().all(|e| !e.is_empty()) {
            let sets = elems
                .into_iter()
                .map(|rows| ClopenSet::cylinders(base.clone(), rows).unwrap())
                .collect();
            return ClopenCover::new(sets, CoverKind::General).unwrap();
        }
    }
}

fn c7_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let x = random_sft(&mut rng);
        let map = if i % 2 == 0 {
            FactorMap::trivial(x.clone())
        } else {
            FactorMap::new(x.clone(), full(), BlockCode::xor()).map_err(e)?
        };
        let (u, v) = (random_cover(&mut rng), random_cover(&mut rng));
        let uv = u.join(&v, &x, &lopts()).map_err(e)?;
        let n = rng.gen_range(1..=7);
        let f = Shape::interval(0, n);
        let sub = Shape::from_1d((0..n).filter(|_| rng.gen_bool(0.6)));
        let count = |c: &ClopenCover, s: &Shape| {
            complexity_relative(&map, c, s, &opts()).map(|r| r.count.lower)
        };
        let (nu, nv, nuv) = (
            count(&u, &f).map_err(e)?,
            count(&v, &f).map_err(e)?,
            count(&uv, &f).map_err(e)?,
        );
        ensure!(
            nuv >= nu.max(nv),
            "instance {i}: refinement {nuv} < max({nu}, {nv})"
        );
        ensure!(nuv <= nu * nv, "instance {i}: join {nuv} > {nu}·{nv}");
        let nsub = count(&u, &sub).map_err(e)?;
        ensure!(nsub <= nu, "instance {i}: restriction {nsub} > {nu}");
    }
    Ok("100 instances".into())
}

fn c8_pullback() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let xor = BlockCode::xor();
    let trivial = FactorMap::trivial(full());
    let mut checked = 0;
    for n in 1..=12i64 {
        for v in [ClopenCover::symbols(1, 2), random_cover(&mut rng)] {
            let pulled = v.pullback(&xor, &full(), &lopts()).map_err(e)?;
            let f = Shape::interval(0, n);
            let on_x = complexity_relative(&trivial, &pulled, &f, &opts())
                .map_err(e)?
                .count;
            let on_y = complexity_relative(&trivial, &v, &f, &opts())
                .map_err(e)?
                .count;
            ensure!(on_x == on_y, "n={n}: {on_x:?} vs {on_y:?}");
            checked += 1;
        }
    }
    Ok(format!("{checked} cover/shape pairs"))
}

fn c9_thm_construction() -> Outcome {
    let start = Instant::now();
    let u = ClopenCover::standard_from_words("0", "1").map_err(e)?;
    let map = FactorMap::trivial(full());
    let r = construct_thm_genset(&map, &u, &ThmParams::default(), &boxes(14), 14, &opts())
        .map_err(e)?;
    ensure!(!r.annuli.is_empty(), "no annuli: {}", r.stop_reason);
    let pair = IndependencePair::from_standard(&u).map_err(e)?;
    for a in &r.annuli {
        ensure!(a.certificate_ok, "annulus {} certificate", a.j);
        let w = Shape::from_1d(a.w.iter().map(|p| p[0]));
        ensure!(
            independent_along(&map, &pair, &w, &opts())
                .map_err(e)?
                .is_shattered(),
            "annulus {} not shattered",
            a.j
        );
    }
    let report = r.report.as_ref().ok_or("no generating-set report")?;
    let bound = 0.25 * std::f64::consts::LN_2;
    ensure!(
        report.liminf_est >= bound,
        "tail minimum {} < {bound}",
        report.liminf_est
    );
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!(
        "{} annuli, tail min {:.4}, {:.2}s",
        r.annuli.len(),
        report.liminf_est,
        t.as_secs_f64()
    ))
}

fn c10_folner_dependence_preset() -> Outcome {
    let cfg = preset("folner-dependence").ok_or("missing preset")?;
    let report = run(&cfg, None, &RunOptions::default()).map_err(e)?;
    let full = report.result["estimate_full"]["upper"]
        .as_f64()
        .ok_or("no full estimate")?;
    let sub = report.result["estimate_sub"]["upper"]
        .as_f64()
        .ok_or("no subsequence estimate")?;
    ensure!(
        (full - sub).abs() >= 0.2,
        "upper exponents {full} and {sub}"
    );
    Ok(format!("full {full:.3}, subsequence {sub:.3}"))
}

fn c11_joinings() -> Outcome {
    let start = Instant::now();
    let p = LanguageSource::fixed_point(1).map_err(e)?;
    let (cx, cp) = (BlockCode::trivial(1, 2), BlockCode::trivial(1, 1));
    let fp = fiber_product(&full(), &p, &p, &cx, &cp).map_err(e)?;
    let s = proper_joining_search(&fp, 2, 1 << 20, Exec::Parallel).map_err(e)?;
    ensure!(
        s.verdict == SearchVerdict::Exhausted,
        "full vs fixed point: {:?}",
        s.verdict
    );
    let fp = fiber_product(&full(), &full(), &p, &cx, &cx).map_err(e)?;
    let s = proper_joining_search(&fp, 1, 1 << 20, Exec::Parallel).map_err(e)?;
    ensure!(
        s.verdict == SearchVerdict::Witness,
        "full vs full: {:?}",
        s.verdict
    );
    let w = s.witness.as_ref().ok_or("no witness")?;
    let check = joining_check(w).map_err(e)?;
    ensure!(
        check.is_joining && check.is_proper,
        "witness fails re-check: {check:?}"
    );
    let forbidden: Vec<String> = check
        .witness_forbidden
        .iter()
        .map(|t| format!("{}/{}", t.x, t.y))
        .collect();
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!(
        "exhausted at w=2; witness forbids {} at w=1; {:.2}s",
        forbidden.join(" "),
        t.as_secs_f64()
    ))
}

fn c12_thread_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_endim");
    let dir = std::env::temp_dir().join(format!("endim-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(e)?;
    let names: Vec<&str> = endim::cli::presets().iter().map(|(n, _)| *n).collect();
    for name in &names {
        for format in ["csv", "json"] {
            let mut outputs = Vec::new();
            for threads in ["1", "8"] {
                let path = dir.join(format!("{name}-{threads}.{format}"));
                let status = Command::new(bin)
                    .args([
                        "run",
                        "--preset",
                        name,
                        "--format",
                        format,
                        "--threads",
                        threads,
                        "--out",
                    ])
                    .arg(&path)
                    .output()
                    .map_err(e)?
                    .status;
                ensure!(
                    matches!(status.code(), Some(0) | Some(3)),
                    "{name} exited with {status}"
                );
                outputs.push(std::fs::read(&path).map_err(e)?);
            }
            ensure!(
                outputs[0] == outputs[1],
                "{name} ({format}) differs between 1 and 8 threads"
            );
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "{} presets byte-identical in csv and json",
        names.len()
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("full shift and golden mean counts", c1_full_and_golden_mean),
        ("critical exponent recovery", c2_critical_exponent),
        ("xor factor relative dimension", c3_xor_relative),
        ("free bits on squares", c4_free_bits_squares),
        ("minimum subcover vs exhaustive", c5_min_subcover),
        ("maximum shattered set vs exhaustive", c6_max_shattered),
        (
            "refinement, join and restriction monotonicity",
            c7_monotonicity,
        ),
        ("pullback identity on the xor chain", c8_pullback),
        (
            "generating set construction on the full shift",
            c9_thm_construction,
        ),
        ("Folner dependence preset", c10_folner_dependence_preset),
        ("proper joining search", c11_joinings),
        (
            "thread-count determinism of presets",
            c12_thread_determinism,
        ),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
