//! Clopen covers, exact minimum subcovers and relative cover complexity.

pub mod clopen;
pub mod complexity;
pub mod setcover;

pub use clopen::{cover_validate, ClopenCover, ClopenSet, CoverKind, CoverReport};
pub use complexity::{
    complexity_absolute, complexity_along, complexity_curve, complexity_relative, Complexity,
    ComplexityCurve, ComplexityOptions, CurveRow, RowMode,
};
pub use setcover::{min_groups, min_subcover, Count};
