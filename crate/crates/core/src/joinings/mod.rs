//! Fiber products over a common factor, joinings and bounded probes of factor-map hypotheses,
//! plus relative dimensions of tuples.

pub mod automaton;
pub mod block;
pub mod tuples;

use std::collections::BTreeSet;

use serde::Serialize;

pub use block::BlockSft;
pub use tuples::{
    dimension_set_sample, tuple_dimension, DimensionSetSample, TupleDimension, TupleSpec,
};

use crate::error::{Error, Result};
use crate::joinings::automaton::distinguishing_word;
use crate::joinings::block::{apply_code, code_span};
use crate::par::Exec;
use crate::subshift::pattern::word_string;
use crate::subshift::{BlockCode, FactorMap, LanguageSource};

/// Default cap on automaton states during subset construction.
pub const MAX_DFA_STATES: usize = 1 << 16;

/// `X ×_Z Y` as a shift of finite type over the pair alphabet (`x + |A_X|·y`).
#[derive(Debug, Clone)]
pub struct FiberProduct {
    pub x: LanguageSource,
    pub y: LanguageSource,
    pub z: LanguageSource,
    pub pi_x: BlockCode,
    pub pi_y: BlockCode,
    pub sft: BlockSft,
    x_sft: BlockSft,
    y_sft: BlockSft,
}

fn check_code(
    code: &BlockCode,
    from: &LanguageSource,
    to: &LanguageSource,
    name: &str,
) -> Result<()> {
    if code.domain_alphabet() != from.alphabet() || code.codomain_alphabet() > to.alphabet() {
        return Err(Error::InvalidArgument(format!(
            "{name} maps {} symbols to {}, but the systems have alphabets {} and {}",
            code.domain_alphabet(),
            code.codomain_alphabet(),
            from.alphabet(),
            to.alphabet()
        )));
    }
    Ok(())
}

pub fn fiber_product(
    x: &LanguageSource,
    y: &LanguageSource,
    z: &LanguageSource,
    pi_x: &BlockCode,
    pi_y: &BlockCode,
) -> Result<FiberProduct> {
    for d in [x.dim(), y.dim(), z.dim(), pi_x.dim(), pi_y.dim()] {
        if d != 1 {
            return Err(Error::UnsupportedDimension(d));
        }
    }
    check_code(pi_x, x, z, "π_X")?;
    check_code(pi_y, y, z, "π_Y")?;
    let (a, b) = (x.alphabet(), y.alphabet());
    if a * b > 255 {
        return Err(Error::InvalidArgument(format!(
            "pair alphabet {a}×{b} exceeds 255 symbols"
        )));
    }
    let xs = BlockSft::from_source(x)?;
    let ys = BlockSft::from_source(y)?;
    let (lo_x, span_x, _) = code_span(pi_x)?;
    let (lo_y, span_y, _) = code_span(pi_y)?;
    let lo = lo_x.min(lo_y);
    let hi = (lo_x + span_x as i64).max(lo_y + span_y as i64);
    let span = (hi - lo) as usize;
    let len = xs.len().max(ys.len()).max(span);
    let xw = xs.extend(len)?;
    let yw = ys.extend(len)?;
    if xw.allowed().len().saturating_mul(yw.allowed().len()) > 1 << 22 {
        return Err(Error::Capacity(
            "fiber product has too many candidate words".into(),
        ));
    }
    let mut allowed = Vec::new();
    for p in xw.allowed() {
        let ip = &apply_code(pi_x, &p[(lo_x - lo) as usize..])?;
        for q in yw.allowed() {
            let iq = &apply_code(pi_y, &q[(lo_y - lo) as usize..])?;
            let m = ip.len().min(iq.len());
            if ip[..m] == iq[..m] {
                allowed.push(
                    p.iter()
                        .zip(q)
                        .map(|(&s, &t)| (s as usize + a * t as usize) as u8)
                        .collect(),
                );
            }
        }
    }
    let sft = BlockSft::new(a * b, len, allowed)?.trim();
    Ok(FiberProduct {
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        pi_x: pi_x.clone(),
        pi_y: pi_y.clone(),
        sft,
        x_sft: xs,
        y_sft: ys,
    })
}

impl FiberProduct {
    /// Splits a pair word into its two tracks.
    pub fn tracks(&self, word: &[u8]) -> TrackWord {
        let a = self.x.alphabet() as u8;
        TrackWord {
            x: word_string(&word.iter().map(|s| s % a).collect::<Vec<_>>()),
            y: word_string(&word.iter().map(|s| s / a).collect::<Vec<_>>()),
        }
    }

    pub fn projection(&self, which: usize) -> BlockCode {
        BlockCode::projection(1, &[self.x.alphabet(), self.y.alphabet()], which)
            .expect("valid projection")
    }
}

/// A pair word written track by track.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TrackWord {
    pub x: String,
    pub y: String,
}

/// Sub-shift of a fiber product cut out by extra forbidden pair words of length `window`.
#[derive(Debug, Clone)]
pub struct JoiningCandidate {
    pub product: FiberProduct,
    pub window: usize,
    pub forbidden: Vec<Vec<u8>>,
}

impl JoiningCandidate {
    pub fn new(product: FiberProduct, window: usize, forbidden: Vec<Vec<u8>>) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidArgument(
                "joining window must be at least 1".into(),
            ));
        }
        let size = product.sft.alphabet();
        for f in &forbidden {
            if f.len() != window {
                return Err(Error::InvalidArgument(format!(
                    "forbidden word of length {} at window {window}",
                    f.len()
                )));
            }
            if let Some(&s) = f.iter().find(|&&s| s as usize >= size) {
                return Err(Error::Symbol {
                    symbol: s as u32,
                    size,
                });
            }
        }
        Ok(JoiningCandidate {
            product,
            window,
            forbidden,
        })
    }

    /// The candidate equal to the whole fiber product.
    pub fn whole(product: FiberProduct) -> Self {
        JoiningCandidate {
            product,
            window: 1,
            forbidden: Vec::new(),
        }
    }

    pub fn sft(&self) -> Result<BlockSft> {
        let ext = self
            .product
            .sft
            .extend(self.product.sft.len().max(self.window))?;
        let banned: BTreeSet<&[u8]> = self.forbidden.iter().map(|f| f.as_slice()).collect();
        Ok(ext
            .filter(|v| v.windows(self.window).all(|s| !banned.contains(s)))
            .trim())
    }

    pub fn forbidden_tracks(&self) -> Vec<TrackWord> {
        self.forbidden
            .iter()
            .map(|f| self.product.tracks(f))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JoiningReport {
    pub is_joining: bool,
    pub is_proper: bool,
    /// Shortest word of `X` (resp. `Y`) missing from the first (second) projection.
    pub x_gap: Option<String>,
    pub y_gap: Option<String>,
    /// Shortest pair word separating the candidate from the fiber product.
    pub distinguishing_word: Option<TrackWord>,
    pub window: usize,
    pub witness_forbidden: Vec<TrackWord>,
}

/// Projections compared with `X` and `Y`, and the candidate with the fiber product, by minimal
/// automaton equivalence.
pub fn joining_check(j: &JoiningCandidate) -> Result<JoiningReport> {
    let fp = &j.product;
    let sft = j.sft()?;
    let gap = |which: usize, target: &BlockSft| -> Result<Option<String>> {
        let img = sft.image_dfa(&fp.projection(which), MAX_DFA_STATES)?;
        Ok(distinguishing_word(&img, &target.dfa(MAX_DFA_STATES)?).map(|w| word_string(&w)))
    };
    let x_gap = gap(0, &fp.x_sft)?;
    let y_gap = gap(1, &fp.y_sft)?;
    let diff = distinguishing_word(&sft.dfa(MAX_DFA_STATES)?, &fp.sft.dfa(MAX_DFA_STATES)?);
    Ok(JoiningReport {
        is_joining: x_gap.is_none() && y_gap.is_none(),
        is_proper: diff.is_some(),
        x_gap,
        y_gap,
        distinguishing_word: diff.map(|w| fp.tracks(&w)),
        window: j.window,
        witness_forbidden: j.forbidden_tracks(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchVerdict {
    Witness,
    Exhausted,
    Partial,
}

/// Where a budget-limited search stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frontier {
    pub window: usize,
    pub subset_size: usize,
    /// Indices (into the window's pair words) of the next unexamined allowed set.
    pub next: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JoiningSearch {
    pub verdict: SearchVerdict,
    pub window: usize,
    pub examined: u64,
    pub report: Option<JoiningReport>,
    #[serde(skip)]
    pub witness: Option<JoiningCandidate>,
    pub frontier: Option<Frontier>,
    pub message: String,
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

const BATCH: usize = 64;

/// Searches sub-shifts of `X ×_Z Y` given by allowed pair words of length `1..=w`, smallest
/// allowed sets first and lexicographic within a size, for the first proper joining.
pub fn proper_joining_search(
    fp: &FiberProduct,
    w: usize,
    budget: u64,
    exec: Exec,
) -> Result<JoiningSearch> {
    if w == 0 {
        return Err(Error::InvalidArgument(
            "search window must be at least 1".into(),
        ));
    }
    let a = fp.x.alphabet() as u8;
    let mut examined = 0u64;
    for win in 1..=w {
        let pairs: Vec<Vec<u8>> = fp.sft.words(win)?.into_iter().collect();
        let xw = fp.x_sft.words(win)?;
        let yw = fp.y_sft.words(win)?;
        let m = pairs.len();
        let covers = |c: &[usize]| {
            let px: BTreeSet<Vec<u8>> = c
                .iter()
                .map(|&i| pairs[i].iter().map(|s| s % a).collect())
                .collect();
            let py: BTreeSet<Vec<u8>> = c
                .iter()
                .map(|&i| pairs[i].iter().map(|s| s / a).collect())
                .collect();
            px.len() == xw.len() && py.len() == yw.len()
        };
        for size in 1..m {
            let mut comb: Vec<usize> = (0..size).collect();
            let mut more = true;
            while more {
                let mut batch = Vec::with_capacity(BATCH);
                while more && batch.len() < BATCH {
                    if examined >= budget {
                        return Ok(JoiningSearch {
                            verdict: SearchVerdict::Partial,
                            window: win,
                            examined,
                            report: None,
                            witness: None,
                            frontier: Some(Frontier { window: win, subset_size: size, next: comb.clone() }),
                            message: format!("budget of {budget} candidates exhausted before window {win} was complete"),
                        });
                    }
                    examined += 1;
                    if covers(&comb) {
                        batch.push(comb.clone());
                    }
                    more = next_combination(&mut comb, m);
                }
                let results = crate::par::map(
                    exec,
                    &batch,
                    |c| -> Result<(JoiningCandidate, JoiningReport)> {
                        let keep: BTreeSet<usize> = c.iter().copied().collect();
                        let forbidden = (0..m)
                            .filter(|i| !keep.contains(i))
                            .map(|i| pairs[i].clone())
                            .collect();
                        let cand = JoiningCandidate::new(fp.clone(), win, forbidden)?;
                        let report = joining_check(&cand)?;
                        Ok((cand, report))
                    },
                );
                for r in results {
                    let (cand, report) = r?;
                    if report.is_joining && report.is_proper {
                        return Ok(JoiningSearch {
                            verdict: SearchVerdict::Witness,
                            window: win,
                            examined,
                            report: Some(report),
                            witness: Some(cand),
                            frontier: None,
                            message: format!("proper joining with window {win}"),
                        });
                    }
                }
            }
        }
    }
    Ok(JoiningSearch {
        verdict: SearchVerdict::Exhausted,
        window: w,
        examined,
        report: None,
        witness: None,
        frontier: None,
        message: format!("no proper joining with window ≤ {w}"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Open,
    Minimal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub kind: ProbeKind,
    pub window: usize,
    /// A violation refutes the hypothesis; its absence proves nothing.
    pub violation: bool,
    pub verdict: String,
    pub detail: Option<String>,
    pub checked: u64,
}

/// Window-bounded refutation attempts for openness or minimality of a 1-d factor map.
pub fn factor_probe(
    map: &FactorMap,
    kind: ProbeKind,
    w: usize,
    budget: u64,
) -> Result<ProbeReport> {
    if map.dim() != 1 {
        return Err(Error::UnsupportedDimension(map.dim()));
    }
    if w == 0 {
        return Err(Error::InvalidArgument(
            "probe window must be at least 1".into(),
        ));
    }
    let xs = BlockSft::from_source(&map.domain)?.trim();
    let ys = BlockSft::from_source(&map.codomain)?.trim();
    let (found, checked) = match kind {
        ProbeKind::Open => open_probe(&xs, &ys, &map.code, w, budget)?,
        ProbeKind::Minimal => minimal_probe(&xs, &ys, &map.code, w, budget)?,
    };
    let verdict = match &found {
        Some(_) => "violation found".to_string(),
        None => format!("no violation up to {w}"),
    };
    Ok(ProbeReport {
        kind,
        window: w,
        violation: found.is_some(),
        verdict,
        detail: found,
        checked,
    })
}

/// Images on `[y0, y0 + ylen)` of the points with `u` at `[0, |u|)`.
fn cylinder_images(
    xs: &BlockSft,
    code: &BlockCode,
    u: &[u8],
    y0: i64,
    ylen: usize,
) -> Result<BTreeSet<Vec<u8>>> {
    let (lo, span, _) = code_span(code)?;
    let x0 = y0 + lo;
    let off = (-x0) as usize;
    let mut out = BTreeSet::new();
    for x in xs.words(ylen + span - 1)? {
        if &x[off..off + u.len()] == u {
            out.insert(apply_code(code, &x)?);
        }
    }
    Ok(out)
}

fn open_probe(
    xs: &BlockSft,
    ys: &BlockSft,
    code: &BlockCode,
    w: usize,
    budget: u64,
) -> Result<(Option<String>, u64)> {
    let (_, k, _) = code_span(code)?;
    let k = k as i64;
    let mut checked = 0;
    for r in 1..=w {
        for u in xs.words(r)? {
            let ri = r as i64;
            let base = cylinder_images(xs, code, &u, -k, (ri + 2 * k) as usize)?;
            for e in 1..=w as i64 {
                let len = (ri + 2 * k + 2 * e) as usize;
                let wide = cylinder_images(xs, code, &u, -k - e, len)?;
                for v in ys.words(len)? {
                    checked += 1;
                    if checked > budget {
                        return Ok((None, checked - 1));
                    }
                    let core = &v[e as usize..len - e as usize];
                    if base.contains(core) && !wide.contains(&v) {
                        return Ok((
                            Some(format!(
                                "image of [{}] meets the cylinder [{}] at {} but misses its extension [{}] at {}",
                                word_string(&u),
                                word_string(core),
                                -k,
                                word_string(&v),
                                -k - e
                            )),
                            checked,
                        ));
                    }
                }
            }
        }
    }
    Ok((None, checked))
}

fn minimal_probe(
    xs: &BlockSft,
    ys: &BlockSft,
    code: &BlockCode,
    w: usize,
    budget: u64,
) -> Result<(Option<String>, u64)> {
    let target = ys.dfa(MAX_DFA_STATES)?;
    let mut checked = 0;
    for win in 1..=w {
        let words: Vec<Vec<u8>> = xs.words(win)?.into_iter().collect();
        let m = words.len();
        for size in 1..m {
            let mut comb: Vec<usize> = (0..size).collect();
            loop {
                if checked >= budget {
                    return Ok((None, checked));
                }
                checked += 1;
                let keep: BTreeSet<Vec<u8>> = comb.iter().map(|&i| words[i].clone()).collect();
                let sub = xs.restrict_words(win, &keep)?;
                if !sub.allowed().is_empty()
                    && distinguishing_word(&sub.image_dfa(code, MAX_DFA_STATES)?, &target).is_none()
                {
                    let list: Vec<String> = keep.iter().map(|w| word_string(w)).collect();
                    return Ok((
                        Some(format!("the proper sub-shift with allowed {win}-words {{{}}} already maps onto Y", list.join(","))),
                        checked,
                    ));
                }
                if !next_combination(&mut comb, m) {
                    break;
                }
            }
        }
    }
    Ok((None, checked))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full() -> LanguageSource {
        LanguageSource::full_shift(1, 2).unwrap()
    }

    fn trivial_fp(x: &LanguageSource, y: &LanguageSource) -> FiberProduct {
        let z = LanguageSource::fixed_point(1).unwrap();
        fiber_product(
            x,
            y,
            &z,
            &BlockCode::trivial(1, x.alphabet()),
            &BlockCode::trivial(1, y.alphabet()),
        )
        .unwrap()
    }

    /// Pairs `(p, q)` of admissible words with equal images, by direct filtering.
    fn oracle(fp: &FiberProduct, n: usize) -> BTreeSet<Vec<u8>> {
        let a = fp.x.alphabet();
        let xw = fp.x_sft.words(n).unwrap();
        let yw = fp.y_sft.words(n).unwrap();
        let mut out = BTreeSet::new();
        for p in &xw {
            for q in &yw {
                let (ip, iq) = (
                    apply_code(&fp.pi_x, p).unwrap(),
                    apply_code(&fp.pi_y, q).unwrap(),
                );
                let (lx, _, _) = code_span(&fp.pi_x).unwrap();
                let (ly, _, _) = code_span(&fp.pi_y).unwrap();
                assert_eq!((lx, ly), (0, 0));
                let m = ip.len().min(iq.len());
                if ip[..m] == iq[..m] {
                    out.insert(
                        p.iter()
                            .zip(q)
                            .map(|(&s, &t)| (s as usize + a * t as usize) as u8)
                            .collect(),
                    );
                }
            }
        }
        out
    }

    #[test]
    fn fiber_products() {
        let fp = trivial_fp(&full(), &full());
        assert_eq!(fp.sft.words(3).unwrap().len(), 64);
        let id = BlockCode::identity(1, 2);
        let diag = fiber_product(&full(), &full(), &full(), &id, &id).unwrap();
        assert_eq!(diag.sft.words(4).unwrap().len(), 16);
        assert!(diag
            .sft
            .words(4)
            .unwrap()
            .iter()
            .all(|w| w.iter().all(|&s| s == 0 || s == 3)));
        let xor = fiber_product(&full(), &full(), &full(), &id, &BlockCode::xor()).unwrap();
        for w in xor.sft.words(5).unwrap() {
            let t = xor.tracks(&w);
            let (x, y) = (t.x.as_bytes(), t.y.as_bytes());
            for i in 0..4 {
                assert_eq!(x[i] - b'0', (y[i] - b'0') ^ (y[i + 1] - b'0'));
            }
        }
    }

    #[test]
    fn fiber_product_language_matches_filtering() {
        let id = BlockCode::identity(1, 2);
        let g = LanguageSource::golden_mean();
        for fp in [
            fiber_product(&full(), &full(), &full(), &id, &BlockCode::xor()).unwrap(),
            fiber_product(&g, &full(), &full(), &id, &BlockCode::xor()).unwrap(),
            trivial_fp(&g, &full()),
        ] {
            for n in 2..=6 {
                assert_eq!(fp.sft.words(n).unwrap(), oracle(&fp, n), "n = {n}");
            }
        }
    }

    #[test]
    fn joining_checks() {
        let fp = trivial_fp(&full(), &full());
        let r = joining_check(&JoiningCandidate::whole(fp.clone())).unwrap();
        assert!(r.is_joining && !r.is_proper && r.distinguishing_word.is_none());
        let diag = JoiningCandidate::new(fp.clone(), 1, vec![vec![1], vec![2]]).unwrap();
        let r = joining_check(&diag).unwrap();
        assert!(r.is_joining && r.is_proper);
        assert_eq!(
            r.distinguishing_word,
            Some(TrackWord {
                x: "1".into(),
                y: "0".into()
            })
        );
        let r =
            joining_check(&JoiningCandidate::new(fp.clone(), 1, vec![vec![0]]).unwrap()).unwrap();
        assert!(r.is_joining && r.is_proper);
        let r =
            joining_check(&JoiningCandidate::new(fp, 1, vec![vec![0], vec![2]]).unwrap()).unwrap();
        assert!(!r.is_joining && r.x_gap == Some("0".into()));
    }

    #[test]
    fn searches() {
        let fixed = LanguageSource::fixed_point(1).unwrap();
        let s = proper_joining_search(&trivial_fp(&full(), &fixed), 2, 1 << 20, Exec::default())
            .unwrap();
        assert_eq!(s.verdict, SearchVerdict::Exhausted);
        let s = proper_joining_search(&trivial_fp(&full(), &full()), 1, 1 << 20, Exec::default())
            .unwrap();
        assert_eq!(s.verdict, SearchVerdict::Witness);
        let r = s.report.unwrap();
        assert_eq!(
            r.witness_forbidden,
            vec![
                TrackWord {
                    x: "1".into(),
                    y: "0".into()
                },
                TrackWord {
                    x: "0".into(),
                    y: "1".into()
                }
            ]
        );
        assert!(
            joining_check(s.witness.as_ref().unwrap())
                .unwrap()
                .is_proper
        );
        let s = proper_joining_search(
            &trivial_fp(&full(), &LanguageSource::golden_mean()),
            2,
            1 << 20,
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(s.verdict, SearchVerdict::Witness);
        let again = joining_check(s.witness.as_ref().unwrap()).unwrap();
        assert!(again.is_joining && again.is_proper);
        let s =
            proper_joining_search(&trivial_fp(&full(), &full()), 2, 3, Exec::default()).unwrap();
        assert_eq!(s.verdict, SearchVerdict::Partial);
        assert_eq!(
            s.frontier.unwrap(),
            Frontier {
                window: 1,
                subset_size: 1,
                next: vec![3]
            }
        );
    }

    #[test]
    fn probes() {
        let id = FactorMap::identity(full());
        for kind in [ProbeKind::Open, ProbeKind::Minimal] {
            let r = factor_probe(&id, kind, 2, 1 << 20).unwrap();
            assert!(!r.violation && r.verdict == "no violation up to 2", "{r:?}");
        }
        let prod =
            LanguageSource::product(vec![full(), LanguageSource::fixed_point(1).unwrap()]).unwrap();
        let proj = FactorMap::new(
            prod,
            LanguageSource::fixed_point(1).unwrap(),
            BlockCode::projection(1, &[2, 1], 1).unwrap(),
        )
        .unwrap();
        let r = factor_probe(&proj, ProbeKind::Minimal, 1, 1 << 20).unwrap();
        assert!(r.violation && r.verdict == "violation found");
        let xor = FactorMap::new(full(), full(), BlockCode::xor()).unwrap();
        assert!(
            !factor_probe(&xor, ProbeKind::Open, 2, 1 << 20)
                .unwrap()
                .violation
        );
        let g = LanguageSource::golden_mean();
        let collapse = FactorMap::new(
            g,
            LanguageSource::fixed_point(1).unwrap(),
            BlockCode::trivial(1, 2),
        )
        .unwrap();
        assert!(
            factor_probe(&collapse, ProbeKind::Minimal, 1, 1 << 20)
                .unwrap()
                .violation
        );
    }
}
