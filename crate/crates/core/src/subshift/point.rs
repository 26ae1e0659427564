use crate::error::{Error, Result};
use crate::lattice::{GroupPoint, Shape};
use crate::subshift::pattern::{parse_word, Pattern};
use crate::subshift::source::{LanguageOptions, LanguageSource};

/// A bi-infinite point given finitely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointSpec {
    /// `x_i = tile[i mod period]`; the tile lives on a box anchored at the origin.
    Periodic { tile: Pattern },
    /// Constant background with finitely many exceptions.
    FiniteSupport {
        dim: usize,
        background: u8,
        exceptions: Vec<(GroupPoint, u8)>,
    },
}

impl PointSpec {
    /// 1-d periodic point repeating `word`.
    pub fn periodic(word: &str) -> Result<Self> {
        let symbols = parse_word(word)?;
        if symbols.is_empty() {
            return Err(Error::InvalidArgument(
                "periodic word must be non-empty".into(),
            ));
        }
        Ok(PointSpec::Periodic {
            tile: Pattern::new(Shape::interval(0, symbols.len() as i64), symbols)?,
        })
    }

    pub fn periodic_block(tile: Pattern) -> Result<Self> {
        let s = tile.shape();
        if s.is_empty() || !s.is_box() || s.min_point() != Some(GroupPoint::ORIGIN) {
            return Err(Error::InvalidArgument(
                "periodic tile must be a box anchored at the origin".into(),
            ));
        }
        Ok(PointSpec::Periodic { tile })
    }

    pub fn finite_support(dim: usize, background: u8, exceptions: Vec<(GroupPoint, u8)>) -> Self {
        PointSpec::FiniteSupport {
            dim,
            background,
            exceptions,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PointSpec::Periodic { tile } => tile.shape().dim(),
            PointSpec::FiniteSupport { dim, .. } => *dim,
        }
    }

    pub fn symbol_at(&self, g: &GroupPoint) -> u8 {
        match self {
            PointSpec::Periodic { tile } => {
                let last = *tile.shape().points().last().expect("non-empty tile");
                let px = last.x() + 1;
                let py = last.y() + 1;
                let q = GroupPoint([g.x().rem_euclid(px), g.y().rem_euclid(py)]);
                tile.get(&q).expect("inside tile")
            }
            PointSpec::FiniteSupport {
                background,
                exceptions,
                ..
            } => exceptions
                .iter()
                .rev()
                .find(|(p, _)| p == g)
                .map(|(_, s)| *s)
                .unwrap_or(*background),
        }
    }

    pub fn max_symbol(&self) -> u8 {
        match self {
            PointSpec::Periodic { tile } => tile.max_symbol().unwrap_or(0),
            PointSpec::FiniteSupport {
                background,
                exceptions,
                ..
            } => exceptions
                .iter()
                .map(|e| e.1)
                .chain([*background])
                .max()
                .unwrap_or(0),
        }
    }
}

/// Restriction of the point to `shape`.
pub fn point_pattern(x: &PointSpec, shape: &Shape) -> Pattern {
    let symbols = shape.iter().map(|g| x.symbol_at(g)).collect();
    Pattern::new(shape.clone(), symbols).expect("one symbol per point")
}

/// Radius `R = ⌈log₂ k⌉` for which the closed ball of radius `1/k` is the cylinder on `‖i‖∞ < R`.
pub fn ball_radius(k: u64) -> usize {
    if k <= 1 {
        0
    } else {
        (64 - (k - 1).leading_zeros()) as usize
    }
}

/// The central cube `{‖i‖∞ < r}`.
pub fn central_cube(dim: usize, r: usize) -> Shape {
    if r == 0 {
        return Shape::empty(dim);
    }
    let r = r as i64;
    if dim == 1 {
        Shape::interval(-(r - 1), r)
    } else {
        Shape::rect(-(r - 1), r, -(r - 1), r)
    }
}

/// The cylinder pattern describing the closed ball `B̄(x, 1/k)`.
pub fn ball_cylinder(x: &PointSpec, k: u64) -> Pattern {
    point_pattern(x, &central_cube(x.dim(), ball_radius(k)))
}

/// Checks that the point's patterns on `window` and all its translates within one period are
/// admissible (only the window itself for finite-support points).
pub fn check_point(
    source: &LanguageSource,
    x: &PointSpec,
    window: &Shape,
    opts: &LanguageOptions,
) -> Result<bool> {
    if x.max_symbol() as usize >= source.alphabet() {
        return Err(Error::Symbol {
            symbol: x.max_symbol() as u32,
            size: source.alphabet(),
        });
    }
    let lang = source.language(window, opts)?;
    if !lang.is_materialized() {
        return Err(Error::Capacity(
            "admissibility check needs a materialised language".into(),
        ));
    }
    let shifts: Vec<GroupPoint> = match x {
        PointSpec::Periodic { tile } => tile.shape().points().to_vec(),
        PointSpec::FiniteSupport { exceptions, .. } => {
            let mut v: Vec<GroupPoint> = exceptions.iter().map(|e| e.0).collect();
            v.push(GroupPoint::ORIGIN);
            v
        }
    };
    for g in shifts {
        let p = point_pattern(x, &window.translate(g));
        if !lang.contains(p.symbols()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_and_finite_support_points() {
        let zero = PointSpec::periodic("0").unwrap();
        assert_eq!(
            point_pattern(&zero, &Shape::interval(0, 5)).to_string(),
            "00000"
        );
        let alt = PointSpec::periodic("01").unwrap();
        assert_eq!(
            point_pattern(&alt, &Shape::interval(0, 4)).to_string(),
            "0101"
        );
        assert_eq!(
            point_pattern(&alt, &Shape::interval(-3, 0)).to_string(),
            "101"
        );
        let spike = PointSpec::finite_support(1, 0, vec![(GroupPoint::d1(0), 1)]);
        assert_eq!(
            point_pattern(&spike, &Shape::interval(-1, 2)).to_string(),
            "010"
        );
    }

    #[test]
    fn balls_are_central_cylinders() {
        assert_eq!(ball_radius(1), 0);
        assert_eq!(ball_radius(2), 1);
        assert_eq!(ball_radius(3), 2);
        assert_eq!(ball_radius(4), 2);
        assert_eq!(ball_radius(5), 3);
        assert_eq!(central_cube(1, 2), Shape::interval(-1, 2));
        let x = PointSpec::periodic("01").unwrap();
        assert_eq!(ball_cylinder(&x, 4).to_string(), "101");
    }

    #[test]
    fn admissibility_of_points() {
        let gm = LanguageSource::golden_mean();
        let o = LanguageOptions::default();
        let w = Shape::interval(0, 3);
        assert!(check_point(&gm, &PointSpec::periodic("01").unwrap(), &w, &o).unwrap());
        assert!(!check_point(&gm, &PointSpec::periodic("011").unwrap(), &w, &o).unwrap());
    }
}
