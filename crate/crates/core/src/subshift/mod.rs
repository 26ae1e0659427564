//! Symbolic systems: languages, sliding block codes, factor maps and points.

pub mod code;
pub mod graph;
pub mod pattern;
pub mod point;
pub mod source;

pub use code::{fiber_patterns, BlockCode, FactorMap, FactorTriple};
pub use pattern::{Pattern, PatternTable, TableMode};
pub use point::{ball_cylinder, point_pattern, PointSpec};
pub use source::{product_system, LanguageOptions, LanguageSource};
