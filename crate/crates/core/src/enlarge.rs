//! The enlarged representation: tripled routes, 2x2 extension, odd-side edge
//! removal, and its decomposition into vertex blocks and edge tentacles.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Dir, GridCoord, GridStrip, GridTentacle, RectangularGraph, StripOrientation};
use crate::instance::{validate_rect_rep, InstanceGraph, RectangularRepresentation};

pub type GridEdge = (GridCoord, GridCoord);

fn grid_edge(a: GridCoord, b: GridCoord) -> GridEdge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn triple(p: GridCoord) -> GridCoord {
    GridCoord::new(3 * p.x, 3 * p.y)
}

fn square(p: GridCoord) -> [GridCoord; 4] {
    [p, GridCoord::new(p.x + 1, p.y), GridCoord::new(p.x, p.y + 1), GridCoord::new(p.x + 1, p.y + 1)]
}

fn square_edges(p: GridCoord) -> [GridEdge; 4] {
    let [a, b, c, d] = square(p);
    [grid_edge(a, b), grid_edge(a, c), grid_edge(b, d), grid_edge(c, d)]
}

/// The four block-to-corridor edges dropped around an odd vertex at `psi = (x, y)`.
pub fn odd_removed_edges(p: GridCoord) -> [GridEdge; 4] {
    let (x, y) = (3 * p.x, 3 * p.y);
    let g = GridCoord::new;
    [
        grid_edge(g(x - 1, y), g(x, y)),
        grid_edge(g(x + 1, y), g(x + 1, y - 1)),
        grid_edge(g(x + 1, y + 1), g(x + 2, y + 1)),
        grid_edge(g(x, y + 1), g(x, y + 2)),
    ]
}

/// Cells of a tentacle grouped into pieces from the even end: the first and
/// last pieces are the 2-cell rungs touching the blocks; 2x2 route-point blocks
/// and further rungs alternate in between.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TentacleLayout {
    pub even: usize,
    pub odd: usize,
    pub pieces: Vec<Vec<GridCoord>>,
    pub strips: GridTentacle,
    /// Direction from the first rung into the even vertex block.
    pub even_dir: Dir,
    /// Direction from the last rung into the odd vertex block.
    pub odd_dir: Dir,
}

impl TentacleLayout {
    pub fn cells(&self) -> Vec<GridCoord> {
        self.pieces.iter().flatten().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnlargedRepresentation {
    pub vertices: BTreeSet<GridCoord>,
    pub edges: BTreeSet<GridEdge>,
    /// `S_v` per input vertex.
    pub blocks: Vec<GridStrip>,
    /// `T_e` per input edge, keyed `(a, b)` with `a < b`.
    pub tentacles: BTreeMap<(usize, usize), TentacleLayout>,
    /// Grid edges joining `T_e` to the blocks of its even and odd endpoints.
    pub bridges: BTreeMap<(usize, usize), (Vec<GridEdge>, Vec<GridEdge>)>,
}

impl EnlargedRepresentation {
    pub fn bounding_box(&self) -> Option<RectangularGraph> {
        RectangularGraph::bounding(self.vertices.iter().copied())
    }

    pub fn side(&self) -> i64 {
        self.bounding_box().map_or(0, |r| r.width().max(r.height()))
    }
}

fn block_of(p: GridCoord) -> GridStrip {
    let o = triple(p);
    GridStrip::new(RectangularGraph::new(o, GridCoord::new(o.x + 1, o.y + 1)), StripOrientation::Horizontal)
}

/// The two corridor cells between route points `p` and `p + d`.
fn connector(p: GridCoord, d: Dir) -> Vec<GridCoord> {
    let o = triple(p);
    match d {
        Dir::Right => vec![GridCoord::new(o.x + 2, o.y), GridCoord::new(o.x + 2, o.y + 1)],
        Dir::Left => vec![GridCoord::new(o.x - 1, o.y), GridCoord::new(o.x - 1, o.y + 1)],
        Dir::Up => vec![GridCoord::new(o.x, o.y + 2), GridCoord::new(o.x + 1, o.y + 2)],
        Dir::Down => vec![GridCoord::new(o.x, o.y - 1), GridCoord::new(o.x + 1, o.y - 1)],
    }
}

/// Builds the grid graph of the enlarged representation and decomposes it.
pub fn triple_and_extend(r: &RectangularRepresentation, b: &InstanceGraph) -> Result<EnlargedRepresentation> {
    let violations = validate_rect_rep(b, r);
    if !violations.is_empty() {
        return Err(Error::BadRepresentation(format!("{violations:?}")));
    }
    let mut tripled: BTreeSet<GridCoord> = BTreeSet::new();
    let mut edges: BTreeSet<GridEdge> = BTreeSet::new();
    for route in r.routes.values() {
        for w in route.windows(2) {
            let (a, c) = (triple(w[0]), triple(w[1]));
            let d = Dir::between(w[0], w[1]).expect("validated route steps");
            let mut prev = a;
            tripled.insert(a);
            for _ in 0..3 {
                let next = prev.step(d);
                edges.insert(grid_edge(prev, next));
                tripled.insert(next);
                prev = next;
            }
            debug_assert_eq!(prev, c);
        }
    }
    for p in &r.psi {
        tripled.insert(triple(*p));
    }
    let mut vertices = BTreeSet::new();
    for &p in &tripled {
        vertices.extend(square(p));
        edges.extend(square_edges(p));
    }
    for v in 0..b.vertex_count() {
        if !b.is_even(v) {
            for e in odd_removed_edges(r.psi[v]) {
                edges.remove(&e);
            }
        }
    }
    let mut out = EnlargedRepresentation {
        vertices,
        edges,
        blocks: r.psi.iter().map(|&p| block_of(p)).collect(),
        tentacles: BTreeMap::new(),
        bridges: BTreeMap::new(),
    };
    decompose_elements(&mut out, r, b)?;
    Ok(out)
}

fn strip_from(cells: &[GridCoord], orientation: StripOrientation) -> GridStrip {
    let rect = RectangularGraph::bounding(cells.iter().copied()).expect("strip has cells");
    GridStrip::new(rect, orientation)
}

fn axis_orientation(d: Dir) -> StripOrientation {
    if d.is_horizontal() {
        StripOrientation::Horizontal
    } else {
        StripOrientation::Vertical
    }
}

/// Cells of the corner block at route point `q` on the side facing `d`.
fn block_rung(q: GridCoord, d: Dir) -> Vec<GridCoord> {
    let o = triple(q);
    match d {
        Dir::Right => vec![GridCoord::new(o.x + 1, o.y), GridCoord::new(o.x + 1, o.y + 1)],
        Dir::Left => vec![o, GridCoord::new(o.x, o.y + 1)],
        Dir::Up => vec![GridCoord::new(o.x, o.y + 1), GridCoord::new(o.x + 1, o.y + 1)],
        Dir::Down => vec![o, GridCoord::new(o.x + 1, o.y)],
    }
}

/// Tentacle of an edge whose route runs from the even endpoint to the odd one.
pub fn tentacle_from_route(route: &[GridCoord], even: usize, odd: usize) -> TentacleLayout {
    let dirs: Vec<Dir> = route.windows(2).map(|w| Dir::between(w[0], w[1]).expect("unit steps")).collect();
    let mut pieces = Vec::new();
    for i in 0..dirs.len() {
        if i > 0 {
            pieces.push(square(triple(route[i])).to_vec());
        }
        pieces.push(connector(route[i], dirs[i]));
    }
    // maximal straight runs; a corner block belongs to the incoming run, the
    // outgoing run starts at that block's rung on its own side
    let mut strips = Vec::new();
    let mut current: Vec<GridCoord> = Vec::new();
    for i in 0..dirs.len() {
        if i > 0 {
            let q = route[i];
            if dirs[i] == dirs[i - 1] {
                current.extend(square(triple(q)));
            } else {
                current.extend(square(triple(q)));
                strips.push(strip_from(&current, axis_orientation(dirs[i - 1])));
                current = block_rung(q, dirs[i]);
            }
        }
        current.extend(connector(route[i], dirs[i]));
    }
    strips.push(strip_from(&current, axis_orientation(*dirs.last().unwrap())));
    TentacleLayout {
        even,
        odd,
        pieces,
        strips: GridTentacle { strips },
        even_dir: dirs[0].opposite(),
        odd_dir: *dirs.last().unwrap(),
    }
}

/// Assigns every grid vertex to a block or tentacle and records bridge edges.
pub fn decompose_elements(
    l: &mut EnlargedRepresentation,
    r: &RectangularRepresentation,
    b: &InstanceGraph,
) -> Result<()> {
    let mut owner: BTreeMap<GridCoord, String> = BTreeMap::new();
    let mut claim = |p: GridCoord, who: String| -> Result<()> {
        if let Some(prev) = owner.insert(p, who.clone()) {
            return Err(Error::DecompositionFailed {
                region: p.to_string(),
                reason: format!("claimed by both {prev} and {who}"),
            });
        }
        Ok(())
    };
    for (v, block) in l.blocks.iter().enumerate() {
        for p in block.coords() {
            claim(p, format!("S_{}", b.id(v)))?;
        }
    }
    for (&(a, c), _) in &r.routes {
        let (even, odd) = b.even_odd(a, c);
        let route = r.route(even, odd).unwrap();
        let t = tentacle_from_route(&route, even, odd);
        let bad = t.strips.validate(1);
        if !bad.is_empty() {
            return Err(Error::DecompositionFailed {
                region: format!("tentacle {}-{}", b.id(a), b.id(c)),
                reason: format!("{bad:?}"),
            });
        }
        for p in t.cells() {
            claim(p, format!("T_{}-{}", b.id(a), b.id(c)))?;
        }
        let cells: BTreeSet<GridCoord> = t.cells().into_iter().collect();
        let touching = |block: &GridStrip| -> Vec<GridEdge> {
            let bc = block.coords();
            l.edges
                .iter()
                .filter(|(x, y)| (bc.contains(x) && cells.contains(y)) || (bc.contains(y) && cells.contains(x)))
                .copied()
                .collect()
        };
        let bridges = (touching(&l.blocks[even]), touching(&l.blocks[odd]));
        if bridges.0.len() != 2 || bridges.1.len() != 1 {
            return Err(Error::DecompositionFailed {
                region: format!("tentacle {}-{}", b.id(a), b.id(c)),
                reason: format!("bridge counts {} / {}", bridges.0.len(), bridges.1.len()),
            });
        }
        l.bridges.insert((a, c), bridges);
        l.tentacles.insert((a, c), t);
    }
    let covered: BTreeSet<GridCoord> = owner.keys().copied().collect();
    if covered != l.vertices {
        let stray = l.vertices.symmetric_difference(&covered).next().copied().unwrap();
        return Err(Error::DecompositionFailed {
            region: stray.to_string(),
            reason: "grid vertex not covered exactly once".into(),
        });
    }
    Ok(())
}

/// Direction in which the route of edge `{v, w}` leaves `psi(v)`.
pub fn leaving_direction(r: &RectangularRepresentation, v: usize, w: usize) -> Option<Dir> {
    let route = r.route(v, w)?;
    Dir::between(route[0], route[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use crate::instance::validate_instance;

    fn c4_unit_square() -> (InstanceGraph, RectangularRepresentation) {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let b = validate_instance(g, None).unwrap();
        let psi = vec![GridCoord::new(0, 0), GridCoord::new(1, 0), GridCoord::new(1, 1), GridCoord::new(0, 1)];
        let routes = b.graph.edges().into_iter().map(|(a, c)| ((a, c), vec![psi[a], psi[c]])).collect();
        (b, RectangularRepresentation { psi, routes })
    }

    #[test]
    fn blocks_sit_at_tripled_coordinates() {
        assert_eq!(block_of(GridCoord::new(2, 1)).rect, RectangularGraph::new(GridCoord::new(6, 3), GridCoord::new(7, 4)));
    }

    #[test]
    fn odd_vertex_loses_its_left_lower_edge() {
        let removed = odd_removed_edges(GridCoord::new(1, 1));
        assert!(removed.contains(&grid_edge(GridCoord::new(2, 3), GridCoord::new(3, 3))));
    }

    #[test]
    fn c4_decomposes_with_single_rung_tentacles() {
        let (b, r) = c4_unit_square();
        let l = triple_and_extend(&r, &b).unwrap();
        assert_eq!(l.vertices.len(), 4 * 4 + 4 * 2);
        assert!(l.side() <= 3 * r.side() - 1);
        for t in l.tentacles.values() {
            assert_eq!(t.pieces.len(), 1);
            assert_eq!(t.strips.strips.len(), 1);
        }
        for (even, odd) in l.bridges.values() {
            assert_eq!((even.len(), odd.len()), (2, 1));
        }
    }

    #[test]
    fn straight_corridor_is_one_strip() {
        let route: Vec<_> = (0..5).map(|x| GridCoord::new(x, 0)).collect();
        let t = tentacle_from_route(&route, 0, 1);
        assert_eq!(t.strips.strips.len(), 1);
        assert_eq!(t.strips.strips[0].length(), 3 * 4 - 2);
        assert_eq!(t.cells().len(), 2 * (3 * 4 - 2));
    }

    #[test]
    fn one_corner_gives_two_strips_sharing_a_rung() {
        let route = vec![GridCoord::new(0, 0), GridCoord::new(1, 0), GridCoord::new(1, 1)];
        let t = tentacle_from_route(&route, 0, 1);
        assert_eq!(t.strips.strips.len(), 2);
        assert!(t.strips.validate(1).is_empty());
        let shared: Vec<_> = t.strips.strips[0].coords().intersection(&t.strips.strips[1].coords()).copied().collect();
        assert_eq!(shared, vec![GridCoord::new(3, 1), GridCoord::new(4, 1)]);
        assert_eq!((t.even_dir, t.odd_dir), (Dir::Left, Dir::Up));
    }
}
