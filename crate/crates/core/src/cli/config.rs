//! Experiment configuration: named systems, codes and covers plus one task with its parameters.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cover::{ClopenCover, ClopenSet, CoverKind};
use crate::dimension::ThmParams;
use crate::error::{Error, Result};
use crate::joinings::ProbeKind;
use crate::lattice::{FolnerSequence, GroupPoint, IndexRule, IndexSet, Shape};
use crate::subshift::pattern::parse_word;
use crate::subshift::{BlockCode, FactorMap, LanguageSource, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Complexity,
    Dimension,
    SubsetDim,
    Genset,
    Construct,
    Independence,
    TupleDim,
    Joining,
    Folner,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Complexity => "complexity",
            Task::Dimension => "dimension",
            Task::SubsetDim => "subset-dim",
            Task::Genset => "genset",
            Task::Construct => "construct",
            Task::Independence => "independence",
            Task::TupleDim => "tuple-dim",
            Task::Joining => "joining",
            Task::Folner => "folner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub systems: BTreeMap<String, SystemSpec>,
    #[serde(default)]
    pub codes: BTreeMap<String, CodeSpec>,
    #[serde(default)]
    pub covers: BTreeMap<String, CoverSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub budget: BudgetSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Full {
        #[serde(default = "one")]
        dim: usize,
        alphabet: usize,
    },
    GoldenMean,
    FixedPoint {
        #[serde(default = "one")]
        dim: usize,
    },
    Sft {
        #[serde(default = "one")]
        dim: usize,
        alphabet: usize,
        forbidden: Vec<PatternSpec>,
    },
    FreeBits {
        support: SetSpec,
    },
    Product {
        factors: Vec<String>,
    },
}

/// A 1-d word, or a 2-d block given as rows (first row at `y = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternSpec {
    Word(String),
    Block(Vec<String>),
}

impl PatternSpec {
    pub fn pattern(&self) -> Result<Pattern> {
        match self {
            PatternSpec::Word(w) => Pattern::word(w),
            PatternSpec::Block(rows) => {
                Pattern::block(&rows.iter().map(String::as_str).collect::<Vec<_>>())
            }
        }
    }
}

/// An index set: a membership rule plus an optional label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    #[serde(flatten)]
    pub rule: IndexRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SetSpec {
    pub fn build(&self) -> Result<IndexSet> {
        let label = self
            .label
            .clone()
            .unwrap_or_else(|| format!("{:?}", self.rule));
        IndexSet::new(self.rule.clone(), label)
    }
}

/// `[a, b)` in ℤ, `{x: [a, b), y: [c, d)}` in ℤ², or an explicit point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeSpec {
    Interval([i64; 2]),
    Rect { x: [i64; 2], y: [i64; 2] },
    Points(Vec<Vec<i64>>),
}

impl ShapeSpec {
    pub fn build(&self, dim: usize) -> Result<Shape> {
        match self {
            ShapeSpec::Interval([a, b]) if dim == 1 => Ok(Shape::interval(*a, *b)),
            ShapeSpec::Interval(_) => Err(Error::DimensionMismatch {
                left: dim,
                right: 1,
            }),
            ShapeSpec::Rect { x, y } if dim == 2 => Ok(Shape::rect(x[0], x[1], y[0], y[1])),
            ShapeSpec::Rect { .. } => Err(Error::DimensionMismatch {
                left: dim,
                right: 2,
            }),
            ShapeSpec::Points(ps) => {
                let pts = ps
                    .iter()
                    .map(|c| match (c.as_slice(), dim) {
                        ([x], 1) => Ok(GroupPoint::d1(*x)),
                        ([x, y], 2) => Ok(GroupPoint::d2(*x, *y)),
                        _ => Err(Error::DimensionMismatch {
                            left: dim,
                            right: c.len(),
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Shape::new(dim, pts)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeSpec {
    Identity,
    /// Map to the one-point system.
    Trivial,
    Xor,
    XorGap {
        gap: i64,
    },
    /// Projection of a product system onto one factor.
    Projection {
        which: usize,
    },
    /// 1-d local rule: window word → output symbol.
    Table {
        window: ShapeSpec,
        codomain: usize,
        rule: BTreeMap<String, String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    #[serde(default)]
    pub complement: bool,
    pub patterns: Vec<PatternSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoverSpec {
    /// One-symbol cylinders at the origin.
    Symbols,
    /// Cylinders of all admissible patterns on `window`.
    Partition {
        window: ShapeSpec,
    },
    /// `{X ∖ A₁, X ∖ A₂}`.
    Standard {
        a1: Vec<PatternSpec>,
        a2: Vec<PatternSpec>,
    },
    General {
        elements: Vec<ElementSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FolnerSpec {
    /// `F_n = [0, n+1)^d`.
    #[default]
    Boxes,
    /// Listed shapes; `normalize` replaces them with cumulative unions containing the origin.
    Explicit {
        shapes: Vec<ShapeSpec>,
        #[serde(default)]
        normalize: bool,
    },
}

impl FolnerSpec {
    pub fn build(&self, dim: usize, n_max: usize) -> Result<FolnerSequence> {
        match self {
            FolnerSpec::Boxes => FolnerSequence::boxes(dim, n_max + 1),
            FolnerSpec::Explicit { shapes, normalize } => {
                let shapes = shapes
                    .iter()
                    .map(|s| s.build(dim))
                    .collect::<Result<Vec<_>>>()?;
                if shapes.len() <= n_max {
                    return Err(Error::InvalidArgument(format!(
                        "n_max = {n_max} needs {} shapes, got {}",
                        n_max + 1,
                        shapes.len()
                    )));
                }
                if *normalize {
                    FolnerSequence::normalized(&shapes)
                } else {
                    let monotone = shapes
                        .windows(2)
                        .all(|w| w[0].is_subset(&w[1]) && w[0].len() < w[1].len())
                        && shapes[0].contains(&GroupPoint::ORIGIN);
                    FolnerSequence::explicit(shapes, monotone)
                }
            }
        }
    }
}

/// Limits that trade exactness for time; rows that hit them are reported as bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSpec {
    /// Branch-and-bound nodes per set-cover instance.
    pub node_budget: u64,
    /// Largest pattern table materialised before switching to bounds.
    pub max_patterns: usize,
    /// Candidates examined by joining searches and factor probes.
    pub search_budget: u64,
    /// Margin for locally admissible 2-d patterns.
    pub margin: usize,
}

impl Default for BudgetSpec {
    fn default() -> Self {
        BudgetSpec {
            node_budget: 1_000_000,
            max_patterns: 1 << 21,
            search_budget: 1 << 20,
            margin: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// A factor map `system → codomain` through a named code; absent means the trivial factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRef {
    pub code: String,
    pub codomain: String,
}

fn default_n_max() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    pub system: String,
    #[serde(default)]
    pub factor: Option<MapRef>,
    #[serde(default)]
    pub cover: Option<String>,
    /// Use the standard covers on central cubes of radius `1..=r` instead of `cover`.
    #[serde(default)]
    pub standard_radius: Option<usize>,
    #[serde(default)]
    pub folner: FolnerSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetParams {
    pub set: SetSpec,
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default)]
    pub folner: FolnerSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GensetParams {
    pub set: SetSpec,
    pub system: String,
    #[serde(default)]
    pub factor: Option<MapRef>,
    pub cover: String,
    #[serde(default)]
    pub folner: FolnerSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstructParams {
    Interpolated {
        set: SetSpec,
        alpha: f64,
        #[serde(default = "one")]
        dim: usize,
        #[serde(default)]
        folner: FolnerSpec,
        #[serde(default = "default_n_max")]
        n_max: usize,
    },
    PosUpper {
        set: SetSpec,
        system: String,
        #[serde(default)]
        factor: Option<MapRef>,
        cover: String,
        #[serde(default)]
        folner: FolnerSpec,
        #[serde(default = "default_n_max")]
        n_max: usize,
    },
    Thm {
        system: String,
        #[serde(default)]
        factor: Option<MapRef>,
        cover: String,
        #[serde(default)]
        folner: FolnerSpec,
        #[serde(default = "default_n_max")]
        n_max: usize,
        #[serde(default)]
        schedule: ThmParams,
    },
    MinimizingSubsequence {
        system: String,
        #[serde(default)]
        factor: Option<MapRef>,
        cover: String,
        #[serde(default)]
        folner: FolnerSpec,
        #[serde(default = "default_n_max")]
        n_max: usize,
        alpha: f64,
        #[serde(default = "one")]
        start: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependenceParams {
    pub system: String,
    #[serde(default)]
    pub factor: Option<MapRef>,
    /// A standard cover naming the pair `(A₁, A₂)`.
    pub cover: String,
    /// Test this set for independence.
    #[serde(default)]
    pub w: Option<ShapeSpec>,
    /// Find a largest independence set inside this one.
    #[serde(default)]
    pub b: Option<ShapeSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomTuples {
    pub n: usize,
    pub count: usize,
    pub period: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleParams {
    pub system: String,
    #[serde(default)]
    pub factor: Option<MapRef>,
    /// Tuples of periodic words.
    #[serde(default)]
    pub tuples: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub random: Option<RandomTuples>,
    pub ks: Vec<u64>,
    #[serde(default)]
    pub folner: FolnerSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSpec {
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JoiningMode {
    Search {
        window: usize,
    },
    Check {
        window: usize,
        forbidden: Vec<TrackSpec>,
    },
    /// Probe of `π_X : X → Z`.
    Probe {
        probe: ProbeKind,
        window: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoiningParams {
    pub x: String,
    pub y: String,
    pub z: String,
    pub pi_x: String,
    pub pi_y: String,
    pub mode: JoiningMode,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FolnerParams {
    #[serde(default)]
    pub folner: FolnerSpec,
    #[serde(default = "one")]
    pub dim: usize,
    pub k: ShapeSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn pointer(path: &serde_path_to_error::Path, prefix: &str) -> String {
    let mut out = prefix.to_string();
    for seg in path.iter() {
        match seg {
            serde_path_to_error::Segment::Seq { index } => out.push_str(&format!("/{index}")),
            serde_path_to_error::Segment::Map { key } => out.push_str(&format!("/{key}")),
            serde_path_to_error::Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            serde_path_to_error::Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        "/".into()
    } else {
        out
    }
}

/// Deserialises `value`, reporting failures with a JSON pointer under `prefix`.
pub fn from_value<T: DeserializeOwned>(value: &Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let p = pointer(e.path(), prefix);
        Error::config(p, e.inner().to_string())
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::config("/", e.to_string()))?;
        from_value(&value, "")
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        from_value(&self.params, "/params")
    }

    pub fn system(&self, name: &str) -> Result<LanguageSource> {
        self.system_depth(name, 0)
    }

    fn system_depth(&self, name: &str, depth: usize) -> Result<LanguageSource> {
        let at = format!("/systems/{name}");
        if depth > 8 {
            return Err(Error::config(at, "product nesting too deep"));
        }
        let spec = self
            .systems
            .get(name)
            .ok_or_else(|| Error::config(at.clone(), format!("unknown system {name:?}")))?;
        let ctx = |e: Error| match e {
            Error::Config { .. } => e,
            other => Error::config(at.clone(), other.to_string()),
        };
        match spec {
            SystemSpec::Full { dim, alphabet } => {
                LanguageSource::full_shift(*dim, *alphabet).map_err(ctx)
            }
            SystemSpec::GoldenMean => Ok(LanguageSource::golden_mean()),
            SystemSpec::FixedPoint { dim } => LanguageSource::fixed_point(*dim).map_err(ctx),
            SystemSpec::Sft {
                dim,
                alphabet,
                forbidden,
            } => {
                let pats = forbidden
                    .iter()
                    .map(PatternSpec::pattern)
                    .collect::<Result<Vec<_>>>()
                    .map_err(ctx)?;
                LanguageSource::sft(*dim, *alphabet, pats).map_err(ctx)
            }
            SystemSpec::FreeBits { support } => {
                Ok(LanguageSource::free_bits(support.build().map_err(ctx)?))
            }
            SystemSpec::Product { factors } => {
                let fs = factors
                    .iter()
                    .map(|f| self.system_depth(f, depth + 1))
                    .collect::<Result<Vec<_>>>()?;
                LanguageSource::product(fs).map_err(ctx)
            }
        }
    }

    /// Builds the named code reading symbols of `domain` and writing symbols of `codomain`.
    pub fn code(
        &self,
        name: &str,
        domain: &LanguageSource,
        codomain: &LanguageSource,
    ) -> Result<BlockCode> {
        let at = format!("/codes/{name}");
        let spec = self
            .codes
            .get(name)
            .ok_or_else(|| Error::config(at.clone(), format!("unknown code {name:?}")))?;
        let ctx = |e: Error| Error::config(at.clone(), e.to_string());
        let (dim, a) = (domain.dim(), domain.alphabet());
        match spec {
            CodeSpec::Identity => Ok(BlockCode::identity(dim, a)),
            CodeSpec::Trivial => Ok(BlockCode::trivial(dim, a)),
            CodeSpec::Xor => Ok(BlockCode::xor()),
            CodeSpec::XorGap { gap } => {
                if *gap < 1 {
                    return Err(Error::config(format!("{at}/gap"), "gap must be positive"));
                }
                Ok(BlockCode::xor_gap(*gap))
            }
            CodeSpec::Projection { which } => {
                BlockCode::projection(dim, &domain.factor_alphabets(), *which).map_err(ctx)
            }
            CodeSpec::Table {
                window,
                codomain: k,
                rule,
            } => {
                if *k != codomain.alphabet() {
                    return Err(Error::config(
                        format!("{at}/codomain"),
                        format!("codomain system has {} symbols", codomain.alphabet()),
                    ));
                }
                BlockCode::from_words(window.build(dim).map_err(ctx)?, a, *k, rule).map_err(ctx)
            }
        }
    }

    pub fn factor(&self, system: &str, factor: &Option<MapRef>) -> Result<FactorMap> {
        let x = self.system(system)?;
        match factor {
            None => Ok(FactorMap::trivial(x)),
            Some(m) => {
                let y = self.system(&m.codomain)?;
                let code = self.code(&m.code, &x, &y)?;
                let map = FactorMap::new(x, y, code)
                    .map_err(|e| Error::config(format!("/codes/{}", m.code), e.to_string()))?;
                let probe = match map.dim() {
                    1 => Shape::interval(0, 8),
                    _ => Shape::rect(0, 3, 0, 3),
                };
                match map.check_sound(&probe, &crate::subshift::LanguageOptions::default()) {
                    Ok(()) | Err(Error::Capacity(_)) => Ok(map),
                    Err(e) => Err(e),
                }
            }
        }
    }

    pub fn cover(
        &self,
        name: &str,
        x: &LanguageSource,
        opts: &crate::subshift::LanguageOptions,
    ) -> Result<ClopenCover> {
        let at = format!("/covers/{name}");
        let spec = self
            .covers
            .get(name)
            .ok_or_else(|| Error::config(at.clone(), format!("unknown cover {name:?}")))?;
        let ctx = |e: Error| Error::config(at.clone(), e.to_string());
        let rows_on = |pats: &[PatternSpec]| -> Result<(Shape, Vec<Vec<u8>>)> {
            let pats = pats
                .iter()
                .map(PatternSpec::pattern)
                .collect::<Result<Vec<_>>>()
                .map_err(ctx)?;
            let base = pats
                .first()
                .map(|p| p.shape().clone())
                .ok_or_else(|| Error::config(at.clone(), "empty pattern list"))?;
            if pats.iter().any(|p| p.shape() != &base) {
                return Err(Error::config(
                    at.clone(),
                    "patterns of one element must share a shape",
                ));
            }
            Ok((
                base,
                pats.into_iter().map(|p| p.symbols().to_vec()).collect(),
            ))
        };
        match spec {
            CoverSpec::Symbols => Ok(ClopenCover::symbols(x.dim(), x.alphabet())),
            CoverSpec::Partition { window } => {
                ClopenCover::partition(x, &window.build(x.dim()).map_err(ctx)?, opts).map_err(ctx)
            }
            CoverSpec::Standard { a1, a2 } => {
                let (b1, r1) = rows_on(a1)?;
                let (b2, r2) = rows_on(a2)?;
                if b1 != b2 {
                    return Err(Error::config(at.clone(), "a1 and a2 must share a shape"));
                }
                ClopenCover::standard(b1, r1, r2).map_err(ctx)
            }
            CoverSpec::General { elements } => {
                let els = elements
                    .iter()
                    .map(|e| {
                        let (b, r) = rows_on(&e.patterns)?;
                        if e.complement {
                            ClopenSet::complement_of(b, r).map_err(ctx)
                        } else {
                            ClopenSet::cylinders(b, r).map_err(ctx)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                ClopenCover::new(els, CoverKind::General).map_err(ctx)
            }
        }
    }
}

pub(crate) fn track_word(t: &TrackSpec, x_alphabet: usize) -> Result<Vec<u8>> {
    let x = parse_word(&t.x)?;
    let y = parse_word(&t.y)?;
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "tracks {:?} and {:?} differ in length",
            t.x, t.y
        )));
    }
    Ok(x.iter()
        .zip(&y)
        .map(|(&a, &b)| (a as usize + x_alphabet * b as usize) as u8)
        .collect())
}
