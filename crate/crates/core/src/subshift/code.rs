use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{GroupPoint, Shape};
use crate::subshift::pattern::{
    parse_word, positions_in, word_string, Pattern, PatternTable, TableMode,
};
use crate::subshift::source::{LanguageOptions, LanguageSource};

const UNDEFINED: u8 = u8::MAX;

/// Sliding block code: a local rule read through a finite window containing the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCode {
    window: Shape,
    domain: usize,
    codomain: usize,
    table: Vec<u8>,
}

impl BlockCode {
    /// Builds a code from an explicit rule table (window word in sorted window order → symbol).
    pub fn new(
        window: Shape,
        domain: usize,
        codomain: usize,
        rule: &[(Vec<u8>, u8)],
    ) -> Result<Self> {
        let mut code = BlockCode::undefined(window, domain, codomain)?;
        for (w, s) in rule {
            if w.len() != code.window.len() {
                return Err(Error::InvalidArgument(format!(
                    "rule entry {} does not match window of {} points",
                    word_string(w),
                    code.window.len()
                )));
            }
            if let Some(bad) = w.iter().find(|&&a| a as usize >= domain) {
                return Err(Error::Symbol {
                    symbol: *bad as u32,
                    size: domain,
                });
            }
            if *s as usize >= codomain {
                return Err(Error::Symbol {
                    symbol: *s as u32,
                    size: codomain,
                });
            }
            let i = code.index(w);
            code.table[i] = *s;
        }
        Ok(code)
    }

    /// Builds a total code from a function of the window word.
    pub fn from_fn(
        window: Shape,
        domain: usize,
        codomain: usize,
        f: impl Fn(&[u8]) -> u8,
    ) -> Result<Self> {
        let mut code = BlockCode::undefined(window, domain, codomain)?;
        let m = code.window.len();
        let mut w = vec![0u8; m];
        for i in 0..code.table.len() {
            let mut r = i;
            for j in (0..m).rev() {
                w[j] = (r % domain) as u8;
                r /= domain;
            }
            let s = f(&w);
            if s as usize >= codomain {
                return Err(Error::Symbol {
                    symbol: s as u32,
                    size: codomain,
                });
            }
            code.table[i] = s;
        }
        Ok(code)
    }

    fn undefined(window: Shape, domain: usize, codomain: usize) -> Result<Self> {
        if !window.contains(&GroupPoint::ORIGIN) {
            return Err(Error::InvalidArgument(
                "code window must contain the origin".into(),
            ));
        }
        if domain == 0 || codomain == 0 || codomain > 254 || domain > 255 {
            return Err(Error::InvalidArgument(
                "alphabet sizes must be in 1..=254".into(),
            ));
        }
        let size = (domain as u128)
            .checked_pow(window.len() as u32)
            .filter(|s| *s <= 1 << 24);
        let size = size
            .ok_or_else(|| Error::Capacity("block code table larger than 2^24 entries".into()))?;
        Ok(BlockCode {
            window,
            domain,
            codomain,
            table: vec![UNDEFINED; size as usize],
        })
    }

    /// Parses a 1-d rule given as word → symbol strings.
    pub fn from_words(
        window: Shape,
        domain: usize,
        codomain: usize,
        rule: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rule.len());
        for (k, v) in rule {
            let out = parse_word(v)?;
            if out.len() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "rule output {v:?} must be one symbol"
                )));
            }
            entries.push((parse_word(k)?, out[0]));
        }
        BlockCode::new(window, domain, codomain, &entries)
    }

    pub fn identity(dim: usize, alphabet: usize) -> Self {
        BlockCode::from_fn(
            Shape::singleton(dim, GroupPoint::ORIGIN),
            alphabet,
            alphabet,
            |w| w[0],
        )
        .expect("valid")
    }

    pub fn constant(dim: usize, alphabet: usize, symbol: u8) -> Self {
        BlockCode::from_fn(
            Shape::singleton(dim, GroupPoint::ORIGIN),
            alphabet,
            symbol as usize + 1,
            |_| symbol,
        )
        .expect("valid")
    }

    /// The map to the one-point system.
    pub fn trivial(dim: usize, alphabet: usize) -> Self {
        BlockCode::constant(dim, alphabet, 0)
    }

    /// `y_i = x_i ⊕ x_{i+1}` on binary 1-d sequences.
    pub fn xor() -> Self {
        BlockCode::from_fn(Shape::interval(0, 2), 2, 2, |w| w[0] ^ w[1]).expect("valid")
    }

    /// `y_i = x_i ⊕ x_{i+gap}`.
    pub fn xor_gap(gap: i64) -> Self {
        BlockCode::from_fn(Shape::interval(0, gap + 1), 2, 2, |w| {
            w[0] ^ w[gap as usize]
        })
        .expect("valid")
    }

    /// Projection of a product alphabet (mixed radix, first factor least significant) onto one factor.
    pub fn projection(dim: usize, radices: &[usize], which: usize) -> Result<Self> {
        let total: usize = radices.iter().product();
        let below: usize = radices[..which].iter().product();
        let k = *radices
            .get(which)
            .ok_or_else(|| Error::InvalidArgument("projection index out of range".into()))?;
        BlockCode::from_fn(Shape::singleton(dim, GroupPoint::ORIGIN), total, k, |w| {
            ((w[0] as usize / below) % k) as u8
        })
    }

    pub fn window(&self) -> &Shape {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn domain_alphabet(&self) -> usize {
        self.domain
    }

    pub fn codomain_alphabet(&self) -> usize {
        self.codomain
    }

    pub fn is_total(&self) -> bool {
        !self.table.contains(&UNDEFINED)
    }

    fn index(&self, w: &[u8]) -> usize {
        w.iter()
            .fold(0usize, |acc, &s| acc * self.domain + s as usize)
    }

    /// Rule value on a window word, `None` when the rule leaves it undefined.
    pub fn lookup(&self, w: &[u8]) -> Option<u8> {
        let s = self.table[self.index(w)];
        (s != UNDEFINED).then_some(s)
    }

    /// Precomputed reader from `input` rows to `output` rows.
    pub fn applier(&self, input: &Shape, output: &Shape) -> Result<Applier<'_>> {
        let mut offsets = Vec::with_capacity(output.len() * self.window.len());
        let mut missing = Vec::new();
        for u in output.iter() {
            let mut ok = true;
            for w in self.window.iter() {
                match input.index_of(&u.add(*w)) {
                    Some(i) => offsets.push(i),
                    None => ok = false,
                }
            }
            if !ok {
                missing.push(u.coords(output.dim()));
            }
        }
        if !missing.is_empty() {
            return Err(Error::Margin { missing });
        }
        Ok(Applier {
            code: self,
            offsets,
            out_len: output.len(),
        })
    }

    /// Applies the code to `p` on its erosion by the window.
    pub fn apply(&self, p: &Pattern) -> Result<Pattern> {
        let out = p.shape().erode(&self.window)?;
        self.apply_to(p, &out)
    }

    /// Applies the code on a requested output shape.
    pub fn apply_to(&self, p: &Pattern, output: &Shape) -> Result<Pattern> {
        let a = self.applier(p.shape(), output)?;
        let mut buf = vec![0u8; output.len()];
        a.apply_row(p.symbols(), &mut buf)?;
        Pattern::new(output.clone(), buf)
    }

    /// `other ∘ self`: first apply `self`, then `other`. The window is `W_self ⊕ W_other`.
    pub fn then(&self, other: &BlockCode) -> Result<BlockCode> {
        if self.codomain > other.domain {
            return Err(Error::InvalidArgument(
                "codomain of the first code exceeds the domain of the second".into(),
            ));
        }
        let window = self.window.product(&other.window)?;
        let mid = other.window.clone();
        let inner = self.applier(&window, &mid)?;
        let outer = other.applier(&mid, &Shape::singleton(window.dim(), GroupPoint::ORIGIN))?;
        let mut tmp = vec![0u8; mid.len()];
        let mut out = [0u8];
        let mut code = BlockCode::undefined(window, self.domain, other.codomain)?;
        let m = code.window.len();
        let mut w = vec![0u8; m];
        for i in 0..code.table.len() {
            let mut r = i;
            for j in (0..m).rev() {
                w[j] = (r % self.domain) as u8;
                r /= self.domain;
            }
            if inner.apply_row(&w, &mut tmp).is_ok() && outer.apply_row(&tmp, &mut out).is_ok() {
                code.table[i] = out[0];
            }
        }
        Ok(code)
    }
}

/// A block code bound to fixed input and output shapes.
pub struct Applier<'a> {
    code: &'a BlockCode,
    offsets: Vec<usize>,
    out_len: usize,
}

impl Applier<'_> {
    pub fn apply_row(&self, input: &[u8], out: &mut [u8]) -> Result<()> {
        let m = self.code.window.len();
        let mut w = [0u8; 64];
        for (u, slot) in out.iter_mut().enumerate().take(self.out_len) {
            let idx = &self.offsets[u * m..(u + 1) * m];
            let s = if m <= 64 {
                for (j, &i) in idx.iter().enumerate() {
                    w[j] = input[i];
                }
                self.code.lookup(&w[..m])
            } else {
                let v: Vec<u8> = idx.iter().map(|&i| input[i]).collect();
                self.code.lookup(&v)
            };
            *slot = s.ok_or_else(|| {
                Error::FactorViolation(format!(
                    "rule undefined on window word {}",
                    word_string(&w[..m.min(64)])
                ))
            })?;
        }
        Ok(())
    }

    pub fn output_len(&self) -> usize {
        self.out_len
    }
}

/// A block code declared as a factor map between two sources.
#[derive(Debug, Clone)]
pub struct FactorMap {
    pub domain: LanguageSource,
    pub codomain: LanguageSource,
    pub code: BlockCode,
}

impl FactorMap {
    pub fn new(domain: LanguageSource, codomain: LanguageSource, code: BlockCode) -> Result<Self> {
        if domain.dim() != codomain.dim() || code.dim() != domain.dim() {
            return Err(Error::DimensionMismatch {
                left: domain.dim(),
                right: code.dim(),
            });
        }
        if code.domain_alphabet() != domain.alphabet() {
            return Err(Error::FactorViolation(format!(
                "code reads {} symbols, domain has {}",
                code.domain_alphabet(),
                domain.alphabet()
            )));
        }
        if code.codomain_alphabet() > codomain.alphabet() {
            return Err(Error::FactorViolation(format!(
                "code writes {} symbols, codomain has {}",
                code.codomain_alphabet(),
                codomain.alphabet()
            )));
        }
        Ok(FactorMap {
            domain,
            codomain,
            code,
        })
    }

    /// The map from `x` to the one-point system.
    pub fn trivial(x: LanguageSource) -> Self {
        let code = BlockCode::trivial(x.dim(), x.alphabet());
        let z = LanguageSource::fixed_point(x.dim()).expect("valid dim");
        FactorMap {
            domain: x,
            codomain: z,
            code,
        }
    }

    pub fn identity(x: LanguageSource) -> Self {
        let code = BlockCode::identity(x.dim(), x.alphabet());
        FactorMap {
            domain: x.clone(),
            codomain: x,
            code,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Whether the codomain is the one-point system (every fiber is everything).
    pub fn is_trivial(&self) -> bool {
        self.code.codomain_alphabet() == 1 || self.codomain.alphabet() == 1
    }

    /// Soundness on one shape: the image of `L_X(shape ⊕ W)` lies in `L_Y(shape)`.
    pub fn check_sound(&self, shape: &Shape, opts: &LanguageOptions) -> Result<()> {
        let input = shape.product(self.code.window())?;
        let xs = self.domain.language(&input, opts)?;
        let ys = self.codomain.language(shape, opts)?;
        if !xs.is_materialized() || !ys.is_materialized() {
            return Err(Error::Capacity(
                "soundness check needs materialised languages".into(),
            ));
        }
        let a = self.code.applier(&input, shape)?;
        let mut buf = vec![0u8; shape.len()];
        for row in xs.rows() {
            a.apply_row(row, &mut buf)?;
            if !ys.contains(&buf) {
                return Err(Error::FactorViolation(format!(
                    "image {} of admissible pattern {} is not in the codomain language",
                    word_string(&buf),
                    word_string(row)
                )));
            }
        }
        Ok(())
    }
}

/// Commuting diagram `π: X → Y`, `π_X: X → Z`, `π_Y: Y → Z`.
#[derive(Debug, Clone)]
pub struct FactorTriple {
    pub x: LanguageSource,
    pub y: LanguageSource,
    pub z: LanguageSource,
    pub pi: Option<BlockCode>,
    pub pi_x: BlockCode,
    pub pi_y: Option<BlockCode>,
}

impl FactorTriple {
    /// Validates alphabets and, when both `pi` and `pi_y` are present, checks `π_X = π_Y ∘ π`
    /// on every admissible window pattern of `X`.
    pub fn new(
        x: LanguageSource,
        y: LanguageSource,
        z: LanguageSource,
        pi: Option<BlockCode>,
        pi_x: BlockCode,
        pi_y: Option<BlockCode>,
    ) -> Result<Self> {
        FactorMap::new(x.clone(), z.clone(), pi_x.clone())?;
        if let Some(p) = &pi {
            FactorMap::new(x.clone(), y.clone(), p.clone())?;
        }
        if let Some(q) = &pi_y {
            FactorMap::new(y.clone(), z.clone(), q.clone())?;
        }
        let t = FactorTriple {
            x,
            y,
            z,
            pi,
            pi_x,
            pi_y,
        };
        t.check_commutes(&LanguageOptions::default())?;
        Ok(t)
    }

    /// `X → Y` with `Y = Z` and `π_Y = id`.
    pub fn from_map(map: FactorMap) -> Self {
        let y = map.codomain.clone();
        FactorTriple {
            x: map.domain,
            z: y.clone(),
            pi: Some(map.code.clone()),
            pi_x: map.code,
            pi_y: Some(BlockCode::identity(y.dim(), y.alphabet())),
            y,
        }
    }

    pub fn check_commutes(&self, opts: &LanguageOptions) -> Result<()> {
        let (Some(pi), Some(pi_y)) = (&self.pi, &self.pi_y) else {
            return Ok(());
        };
        let composed = pi.then(pi_y)?;
        let window = composed.window().union(self.pi_x.window())?;
        let origin = Shape::singleton(window.dim(), GroupPoint::ORIGIN);
        let lang = self.x.language(&window, opts)?;
        if !lang.is_materialized() {
            return Err(Error::Capacity(
                "commutation check needs a materialised language".into(),
            ));
        }
        let a = composed.applier(&window, &origin)?;
        let b = self.pi_x.applier(&window, &origin)?;
        let (mut u, mut v) = ([0u8], [0u8]);
        for row in lang.rows() {
            a.apply_row(row, &mut u)?;
            b.apply_row(row, &mut v)?;
            if u != v {
                return Err(Error::FactorViolation(format!(
                    "diagram does not commute on {}: π_Y∘π gives {}, π_X gives {}",
                    word_string(row),
                    u[0],
                    v[0]
                )));
            }
        }
        Ok(())
    }

    pub fn pi_map(&self) -> Result<FactorMap> {
        let code = self
            .pi
            .clone()
            .ok_or_else(|| Error::InvalidArgument("triple has no map π".into()))?;
        FactorMap::new(self.x.clone(), self.y.clone(), code)
    }

    pub fn pi_x_map(&self) -> FactorMap {
        FactorMap {
            domain: self.x.clone(),
            codomain: self.z.clone(),
            code: self.pi_x.clone(),
        }
    }

    pub fn pi_y_map(&self) -> Result<FactorMap> {
        let code = self
            .pi_y
            .clone()
            .ok_or_else(|| Error::InvalidArgument("triple has no map π_Y".into()))?;
        FactorMap::new(self.y.clone(), self.z.clone(), code)
    }
}

/// Patterns of `x` on `shape` whose image under `code` is `y_pat` (on the erosion of `shape`).
pub fn fiber_patterns(
    x: &LanguageSource,
    code: &BlockCode,
    y_pat: &Pattern,
    shape: &Shape,
    opts: &LanguageOptions,
) -> Result<PatternTable> {
    let eroded = shape.erode(code.window())?;
    if y_pat.shape() != &eroded {
        return Err(Error::InvalidArgument(format!(
            "y pattern must live on the eroded shape {eroded}"
        )));
    }
    let lang = x.language(shape, opts)?;
    if !lang.is_materialized() {
        return Err(Error::Capacity(
            "fiber needs a materialised language".into(),
        ));
    }
    let a = code.applier(shape, &eroded)?;
    let mut buf = vec![0u8; eroded.len()];
    let mut rows = Vec::new();
    for row in lang.rows() {
        a.apply_row(row, &mut buf)?;
        if buf == y_pat.symbols() {
            rows.push(row.to_vec());
        }
    }
    let empty = rows.is_empty();
    let mut t = PatternTable::from_rows(shape.clone(), rows, lang.mode().clone());
    t.unreachable = empty;
    Ok(t)
}

/// All admissible patterns of a table grouped by their image under an applier, as
/// `(image, row indices)` in sorted image order.
pub(crate) fn group_by_image(
    table: &PatternTable,
    applier: &Applier<'_>,
) -> Result<Vec<(Vec<u8>, Vec<usize>)>> {
    let mut groups: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    let mut buf = vec![0u8; applier.output_len()];
    for (i, row) in table.rows().enumerate() {
        applier.apply_row(row, &mut buf)?;
        groups.entry(buf.clone()).or_default().push(i);
    }
    Ok(groups.into_iter().collect())
}

/// Domain patterns on a query shape, split into the fibers of a factor map.
///
/// When the map is non-trivial, its window has more than one point and the query shape is not a
/// box, patterns are enumerated on the hull (so that images are defined) and then projected.
pub struct FiberUniverse {
    pub shape: Shape,
    table: PatternTable,
    projection: Option<Vec<usize>>,
    yshape: Shape,
    groups: Vec<(Vec<u8>, Vec<usize>)>,
}

impl FiberUniverse {
    /// `None` when the language could not be materialised; its count bounds are returned instead.
    pub fn new(
        map: &FactorMap,
        shape: &Shape,
        opts: &LanguageOptions,
    ) -> Result<std::result::Result<Self, (u128, u128)>> {
        let trivial = map.is_trivial();
        let window = map.code.window();
        let xshape = if !trivial && window.len() > 1 && !shape.is_box() {
            shape.hull()
        } else {
            shape.clone()
        };
        let table = map.domain.language(&xshape, opts)?;
        if !table.is_materialized() {
            return Ok(Err(table.count_bounds()));
        }
        let projection = (xshape != *shape)
            .then(|| positions_in(&xshape, shape))
            .transpose()?;
        let (yshape, groups) = if trivial {
            (
                Shape::empty(shape.dim()),
                vec![(Vec::new(), (0..table.len()).collect())],
            )
        } else {
            let yshape = xshape.erode(window)?;
            let applier = map.code.applier(&xshape, &yshape)?;
            let groups = group_by_image(&table, &applier)?;
            (yshape, groups)
        };
        Ok(Ok(FiberUniverse {
            shape: shape.clone(),
            table,
            projection,
            yshape,
            groups,
        }))
    }

    pub fn mode(&self) -> &TableMode {
        self.table.mode()
    }

    pub fn is_empty(&self) -> bool {
        self.table.len() == 0
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn yshape(&self) -> &Shape {
        &self.yshape
    }

    pub fn image(&self, i: usize) -> &[u8] {
        &self.groups[i].0
    }

    pub fn witness(&self, i: usize) -> Result<Pattern> {
        Pattern::new(self.yshape.clone(), self.groups[i].0.clone())
    }

    /// Distinct rows of fiber `i` on the query shape, in sorted order.
    pub fn rows(&self, i: usize) -> Vec<Vec<u8>> {
        let idx = &self.groups[i].1;
        match &self.projection {
            None => idx.iter().map(|&r| self.table.row(r).to_vec()).collect(),
            Some(p) => {
                let mut v: Vec<Vec<u8>> = idx
                    .iter()
                    .map(|&r| p.iter().map(|&j| self.table.row(r)[j]).collect())
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }

    /// Row indices into the underlying table (only meaningful without projection).
    pub(crate) fn raw(&self, i: usize) -> Option<(&PatternTable, &[usize])> {
        self.projection
            .is_none()
            .then(|| (&self.table, self.groups[i].1.as_slice()))
    }
}

impl TableMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, TableMode::Exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> LanguageOptions {
        LanguageOptions::default()
    }

    #[test]
    fn xor_code_on_a_word() {
        let p = Pattern::word("0110").unwrap();
        let out = BlockCode::xor().apply(&p).unwrap();
        assert_eq!(out, Pattern::word("101").unwrap());
        let id = BlockCode::identity(1, 2);
        assert_eq!(id.apply(&p).unwrap(), p);
        let c = BlockCode::constant(1, 2, 0).apply(&p).unwrap();
        assert_eq!(c, Pattern::word("0000").unwrap());
    }

    #[test]
    fn missing_margin_is_reported() {
        let p = Pattern::word("01").unwrap();
        let err = BlockCode::xor()
            .apply_to(&p, &Shape::interval(0, 2))
            .unwrap_err();
        assert_eq!(
            err,
            Error::Margin {
                missing: vec![vec![1]]
            }
        );
    }

    #[test]
    fn xor_fibers_have_two_preimages() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        for n in 1..8 {
            let shape = Shape::interval(0, n + 1);
            let lang = full.language(&Shape::interval(0, n), &opts()).unwrap();
            for y in lang.rows() {
                let yp = Pattern::new(Shape::interval(0, n), y.to_vec()).unwrap();
                let f = fiber_patterns(&full, &BlockCode::xor(), &yp, &shape, &opts()).unwrap();
                assert_eq!(f.len(), 2);
            }
        }
        let zero = Pattern::word("00").unwrap();
        let f = fiber_patterns(
            &full,
            &BlockCode::constant(1, 2, 0),
            &zero,
            &Shape::interval(0, 2),
            &opts(),
        )
        .unwrap();
        assert_eq!(f.len(), 4);
        let wide = Shape::interval(0, 3);
        let f = fiber_patterns(&full, &BlockCode::xor(), &zero, &wide, &opts()).unwrap();
        assert_eq!(f.len(), 2);
        let one = Pattern::word("1").unwrap();
        let gm = LanguageSource::golden_mean();
        let f = fiber_patterns(
            &gm,
            &BlockCode::constant(1, 2, 0),
            &one,
            &Shape::interval(0, 1),
            &opts(),
        );
        assert!(f.is_err() || f.unwrap().unreachable);
    }

    #[test]
    fn composition_and_commuting_triangles() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let xx = BlockCode::xor().then(&BlockCode::xor()).unwrap();
        assert_eq!(xx, BlockCode::xor_gap(2));
        let t = FactorTriple::new(
            full.clone(),
            full.clone(),
            full.clone(),
            Some(BlockCode::xor()),
            BlockCode::xor_gap(2),
            Some(BlockCode::xor()),
        );
        assert!(t.is_ok());
        let bad = FactorTriple::new(
            full.clone(),
            full.clone(),
            full.clone(),
            Some(BlockCode::xor()),
            BlockCode::identity(1, 2),
            Some(BlockCode::xor()),
        );
        assert!(matches!(bad, Err(Error::FactorViolation(_))));
    }

    #[test]
    fn soundness_detects_bad_codomain() {
        let full = LanguageSource::full_shift(1, 2).unwrap();
        let gm = LanguageSource::golden_mean();
        let m = FactorMap::new(full.clone(), gm.clone(), BlockCode::identity(1, 2)).unwrap();
        assert!(matches!(
            m.check_sound(&Shape::interval(0, 3), &opts()),
            Err(Error::FactorViolation(_))
        ));
        let ok = FactorMap::new(gm, full, BlockCode::identity(1, 2)).unwrap();
        assert!(ok.check_sound(&Shape::interval(0, 5), &opts()).is_ok());
    }

    #[test]
    fn projections_of_products() {
        let p = BlockCode::projection(1, &[2, 3], 1).unwrap();
        assert_eq!(p.lookup(&[5]), Some(2));
        assert_eq!(p.lookup(&[1]), Some(0));
        let q = BlockCode::projection(1, &[2, 3], 0).unwrap();
        assert_eq!(q.lookup(&[5]), Some(1));
    }
}
