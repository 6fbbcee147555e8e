//! Integer grid, rectangular graphs, strips and tentacles.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCoord {
    pub x: i64,
    pub y: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_sum(s: i64) -> Parity {
        if s.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Unit steps in the grid. `Up` increases `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    Left,
    Right,
    Down,
    Up,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Left, Dir::Right, Dir::Down, Dir::Up];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Dir::Left => (-1, 0),
            Dir::Right => (1, 0),
            Dir::Down => (0, -1),
            Dir::Up => (0, 1),
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Dir::Left | Dir::Right)
    }

    /// Quarter turn counter-clockwise.
    pub fn rotate_ccw(self) -> Dir {
        match self {
            Dir::Left => Dir::Down,
            Dir::Down => Dir::Right,
            Dir::Right => Dir::Up,
            Dir::Up => Dir::Left,
        }
    }

    pub fn between(a: GridCoord, b: GridCoord) -> Option<Dir> {
        match (b.x - a.x, b.y - a.y) {
            (-1, 0) => Some(Dir::Left),
            (1, 0) => Some(Dir::Right),
            (0, -1) => Some(Dir::Down),
            (0, 1) => Some(Dir::Up),
            _ => None,
        }
    }
}

impl GridCoord {
    pub const fn new(x: i64, y: i64) -> Self {
        GridCoord { x, y }
    }

    pub fn parity(self) -> Parity {
        Parity::of_sum(self.x + self.y)
    }

    pub fn step(self, d: Dir) -> GridCoord {
        let (dx, dy) = d.delta();
        GridCoord::new(self.x + dx, self.y + dy)
    }

    pub fn l1(self, other: GridCoord) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn neighbors(self) -> [GridCoord; 4] {
        Dir::ALL.map(|d| self.step(d))
    }
}

impl fmt::Display for GridCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Axis-aligned rectangle of grid vertices given by two opposite corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RectangularGraph {
    pub corner_a: GridCoord,
    pub corner_b: GridCoord,
}

impl RectangularGraph {
    pub fn new(corner_a: GridCoord, corner_b: GridCoord) -> Self {
        RectangularGraph { corner_a, corner_b }
    }

    pub fn min(&self) -> GridCoord {
        GridCoord::new(self.corner_a.x.min(self.corner_b.x), self.corner_a.y.min(self.corner_b.y))
    }

    pub fn max(&self) -> GridCoord {
        GridCoord::new(self.corner_a.x.max(self.corner_b.x), self.corner_a.y.max(self.corner_b.y))
    }

    pub fn width(&self) -> i64 {
        (self.corner_a.x - self.corner_b.x).abs() + 1
    }

    pub fn height(&self) -> i64 {
        (self.corner_a.y - self.corner_b.y).abs() + 1
    }

    pub fn contains(&self, p: GridCoord) -> bool {
        let (lo, hi) = (self.min(), self.max());
        (lo.x..=hi.x).contains(&p.x) && (lo.y..=hi.y).contains(&p.y)
    }

    pub fn coords(&self) -> Vec<GridCoord> {
        let (lo, hi) = (self.min(), self.max());
        let mut out = Vec::new();
        for y in lo.y..=hi.y {
            for x in lo.x..=hi.x {
                out.push(GridCoord::new(x, y));
            }
        }
        out
    }

    /// Smallest rectangle containing all points; `None` for an empty input.
    pub fn bounding(points: impl IntoIterator<Item = GridCoord>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            lo = GridCoord::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = GridCoord::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        Some(RectangularGraph::new(lo, hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StripOrientation {
    Vertical,
    Horizontal,
}

/// Width-2 rectangle. A horizontal strip is 2 vertices tall and extends along x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridStrip {
    pub rect: RectangularGraph,
    pub orientation: StripOrientation,
}

impl GridStrip {
    pub fn new(rect: RectangularGraph, orientation: StripOrientation) -> Self {
        GridStrip { rect, orientation }
    }

    /// Number of vertices along the strip.
    pub fn length(&self) -> i64 {
        match self.orientation {
            StripOrientation::Horizontal => self.rect.width(),
            StripOrientation::Vertical => self.rect.height(),
        }
    }

    fn cross_width(&self) -> i64 {
        match self.orientation {
            StripOrientation::Horizontal => self.rect.height(),
            StripOrientation::Vertical => self.rect.width(),
        }
    }

    /// Width exactly 2 and length at least `min_length`.
    pub fn is_valid(&self, min_length: i64) -> bool {
        self.cross_width() == 2 && self.length() >= min_length
    }

    pub fn coords(&self) -> BTreeSet<GridCoord> {
        self.rect.coords().into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTentacle {
    pub strips: Vec<GridStrip>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TentacleViolation {
    Empty,
    BadStrip(usize),
    SameOrientation(usize),
    OverlapSize(usize, usize),
    OverlapPlacement(usize),
}

impl GridTentacle {
    /// Checks the strip chain. Every strip must be width 2 and at least
    /// `min_length` long; consecutive strips alternate orientation and meet in
    /// exactly two vertices that form an end rung of the later strip and lie on
    /// a long side of the earlier one.
    pub fn validate(&self, min_length: i64) -> Vec<TentacleViolation> {
        let mut out = Vec::new();
        if self.strips.is_empty() {
            out.push(TentacleViolation::Empty);
            return out;
        }
        for (i, s) in self.strips.iter().enumerate() {
            if !s.is_valid(min_length) {
                out.push(TentacleViolation::BadStrip(i));
            }
        }
        for i in 1..self.strips.len() {
            let (a, b) = (&self.strips[i - 1], &self.strips[i]);
            if a.orientation == b.orientation {
                out.push(TentacleViolation::SameOrientation(i));
                continue;
            }
            let overlap: Vec<GridCoord> = a.coords().intersection(&b.coords()).copied().collect();
            if overlap.len() != 2 {
                out.push(TentacleViolation::OverlapSize(i, overlap.len()));
                continue;
            }
            if !overlap_is_attachment(a, b, &overlap) {
                out.push(TentacleViolation::OverlapPlacement(i));
            }
        }
        out
    }

    pub fn coords(&self) -> BTreeSet<GridCoord> {
        self.strips.iter().flat_map(|s| s.coords()).collect()
    }
}

fn overlap_is_attachment(a: &GridStrip, b: &GridStrip, overlap: &[GridCoord]) -> bool {
    let (p, q) = (overlap[0], overlap[1]);
    if p.l1(q) != 1 {
        return false;
    }
    // The shared pair must be an end rung of `b`.
    let (blo, bhi) = (b.rect.min(), b.rect.max());
    let rung_of_b = match b.orientation {
        StripOrientation::Horizontal => p.x == q.x && (p.x == blo.x || p.x == bhi.x),
        StripOrientation::Vertical => p.y == q.y && (p.y == blo.y || p.y == bhi.y),
    };
    // ...and lie along one long side of `a`.
    let (alo, ahi) = (a.rect.min(), a.rect.max());
    let side_of_a = match a.orientation {
        StripOrientation::Horizontal => p.y == q.y && (p.y == alo.y || p.y == ahi.y),
        StripOrientation::Vertical => p.x == q.x && (p.x == alo.x || p.x == ahi.x),
    };
    rung_of_b && side_of_a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> RectangularGraph {
        RectangularGraph::new(GridCoord::new(x0, y0), GridCoord::new(x1, y1))
    }

    #[test]
    fn parity_and_rect_size() {
        assert_eq!(GridCoord::new(3, 5).parity(), Parity::Even);
        assert_eq!(GridCoord::new(-1, 0).parity(), Parity::Odd);
        let r = rect(4, 1, 0, 2);
        assert_eq!((r.width(), r.height()), (5, 2));
        assert_eq!(r.coords().len(), 10);
    }

    #[test]
    fn l_shaped_tentacle_is_valid() {
        let t = GridTentacle {
            strips: vec![
                GridStrip::new(rect(0, 0, 4, 1), StripOrientation::Horizontal),
                GridStrip::new(rect(3, 1, 4, 5), StripOrientation::Vertical),
            ],
        };
        assert_eq!(t.validate(2), vec![]);
        assert_eq!(t.coords().len(), 10 + 10 - 2);
    }

    #[test]
    fn overlap_must_be_two_vertices_on_a_rung() {
        let t = GridTentacle {
            strips: vec![
                GridStrip::new(rect(0, 0, 4, 1), StripOrientation::Horizontal),
                GridStrip::new(rect(3, 0, 4, 5), StripOrientation::Vertical),
            ],
        };
        assert_eq!(t.validate(2), vec![TentacleViolation::OverlapSize(1, 4)]);
        let mid = GridTentacle {
            strips: vec![
                GridStrip::new(rect(0, 0, 4, 1), StripOrientation::Horizontal),
                GridStrip::new(rect(1, 1, 2, 5), StripOrientation::Vertical),
            ],
        };
        assert_eq!(mid.validate(2), vec![]);
    }

    #[test]
    fn rotation_cycles_through_all_directions() {
        let mut d = Dir::Left;
        for _ in 0..4 {
            d = d.rotate_ccw();
        }
        assert_eq!(d, Dir::Left);
        assert_eq!(Dir::Right.rotate_ccw(), Dir::Up);
    }
}
