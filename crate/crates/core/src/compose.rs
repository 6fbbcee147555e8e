//! Composition of vertex gadgets and modified tentacles into the broken
//! Chimera graph C(B), plus its Pegasus-style augmentation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chimera::{ChimeraNode, ChimeraTopology, MaterializedChimera};
use crate::enlarge::{leaving_direction, EnlargedRepresentation};
use crate::error::{Error, Result};
use crate::gadget::{rotate_node, VertexGadget};
use crate::grid::{Dir, GridCoord, RectangularGraph};
use crate::instance::{InstanceGraph, RectangularRepresentation};
use crate::tentacle::{modify_tentacle, ChimeraTentacle, TentaclePatterns};

/// Owner of a node of C(B): a vertex gadget or an edge tentacle `(a, b)`, `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Vertex(usize),
    Tentacle(usize, usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vertex(v) => write!(f, "S{v}"),
            Element::Tentacle(a, b) => write!(f, "T{a}-{b}"),
        }
    }
}

/// Where and how a gadget sits: origin cell, quarter turns, and which
/// neighbor each port serves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetPlacement {
    pub vertex: usize,
    pub origin: (i64, i64),
    pub rotation: u8,
    pub port_neighbor: [Option<usize>; 3],
}

impl GadgetPlacement {
    pub fn place(&self, local: &ChimeraNode) -> ChimeraNode {
        rotate_node(local, self.rotation).shifted(self.origin.0, self.origin.1)
    }

    pub fn port_of(&self, neighbor: usize) -> Option<usize> {
        self.port_neighbor.iter().position(|&n| n == Some(neighbor))
    }
}

/// Bridge edges of one tentacle as `(tentacle node, gadget node)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bridges {
    pub even: Vec<(ChimeraNode, ChimeraNode)>,
    pub odd: Vec<(ChimeraNode, ChimeraNode)>,
}

#[derive(Clone, Debug)]
pub struct BrokenChimera {
    pub topology: ChimeraTopology,
    pub ownership: BTreeMap<ChimeraNode, Element>,
    pub bridges: BTreeMap<(usize, usize), Bridges>,
    pub gadgets: Vec<GadgetPlacement>,
    pub tentacles: BTreeMap<(usize, usize), ChimeraTentacle>,
    pub gadget: VertexGadget,
    /// Parity of each input vertex, copied so the composition stands alone.
    pub even: Vec<bool>,
}

/// Smallest rotation whose ports cover the directions in which routes leave `v`.
pub fn choose_rotation(
    gadget: &VertexGadget,
    b: &InstanceGraph,
    r: &RectangularRepresentation,
    v: usize,
) -> Result<(u8, [Option<usize>; 3])> {
    let mut needed: Vec<(Dir, usize)> = Vec::new();
    for &w in b.graph.neighbors(v) {
        let d = leaving_direction(r, v, w)
            .ok_or_else(|| Error::BadRepresentation(format!("no route for edge {}-{}", b.id(v), b.id(w))))?;
        needed.push((d, w));
    }
    for q in 0..4u8 {
        let dirs = gadget.directions(q);
        let mut ports = [None; 3];
        let ok = needed.iter().all(|&(d, w)| match dirs.iter().position(|&p| p == d) {
            Some(i) if ports[i].is_none() => {
                ports[i] = Some(w);
                true
            }
            _ => false,
        });
        if ok {
            return Ok((q, ports));
        }
    }
    let dirs: Vec<Dir> = needed.iter().map(|p| p.0).collect();
    Err(Error::RotationUnderdetermined(b.id(v), format!("incident directions {dirs:?} fit no rotation")))
}

/// Replaces every block by a rotated gadget and every tentacle by its
/// modified Chimera tentacle, then checks the bridge structure.
pub fn compose(
    b: &InstanceGraph,
    r: &RectangularRepresentation,
    l: &EnlargedRepresentation,
    gadget: &VertexGadget,
    patterns: &TentaclePatterns,
) -> Result<BrokenChimera> {
    gadget.check_structure()?;
    if l.vertices.iter().any(|p| p.x < 0 || p.y < 0) {
        return Err(Error::BadRepresentation("enlarged representation has negative coordinates".into()));
    }
    let mut ownership: BTreeMap<ChimeraNode, Element> = BTreeMap::new();
    let mut own = |n: ChimeraNode, e: Element| -> Result<()> {
        if let Some(prev) = ownership.insert(n, e) {
            return Err(Error::InvariantViolation(format!("node {n} owned by {prev} and {e}")));
        }
        Ok(())
    };
    let mut gadgets = Vec::new();
    for v in 0..b.vertex_count() {
        let (rotation, port_neighbor) = choose_rotation(gadget, b, r, v)?;
        let o = l.blocks[v].rect.min();
        let placement = GadgetPlacement { vertex: v, origin: (o.x, o.y), rotation, port_neighbor };
        for n in gadget.nodes() {
            own(placement.place(&n), Element::Vertex(v))?;
        }
        gadgets.push(placement);
    }
    let mut tentacles = BTreeMap::new();
    for (&(a, c), layout) in &l.tentacles {
        let pieces = layout.pieces.iter().map(|p| p.iter().map(|g| (g.x, g.y)).collect()).collect();
        let t = modify_tentacle(pieces, layout.even_dir, layout.odd_dir, patterns)?;
        for n in t.nodes() {
            own(n, Element::Tentacle(a, c))?;
        }
        tentacles.insert((a, c), t);
    }
    let cols = ownership.keys().map(|n| n.col + 1).max().unwrap_or(0) as usize;
    let rows = ownership.keys().map(|n| n.row + 1).max().unwrap_or(0) as usize;
    let mut topology = ChimeraTopology::ideal(cols, rows);
    topology.broken = topology.nodes().into_iter().filter(|n| !ownership.contains_key(n)).collect();
    let mut out = BrokenChimera {
        topology,
        ownership,
        bridges: BTreeMap::new(),
        gadgets,
        tentacles,
        gadget: gadget.clone(),
        even: (0..b.vertex_count()).map(|v| b.is_even(v)).collect(),
    };
    out.bridges = out.collect_bridges()?;
    out.check_bridges()?;
    Ok(out)
}

impl BrokenChimera {
    pub fn materialize(&self) -> MaterializedChimera {
        self.topology.materialize()
    }

    pub fn node_count(&self) -> usize {
        self.ownership.len()
    }

    /// Bounding box of the cells holding at least one node.
    pub fn cell_bounding_box(&self) -> Option<RectangularGraph> {
        RectangularGraph::bounding(self.ownership.keys().map(|n| GridCoord::new(n.col, n.row)))
    }

    pub fn is_even(&self, v: usize) -> bool {
        self.even[v]
    }

    /// Same node set with the intra-cell pair edges added.
    pub fn pegasus_augment(&self) -> BrokenChimera {
        let mut c = self.clone();
        c.topology.augmented = true;
        c
    }

    /// Every edge between two elements, grouped by tentacle. Fails on an
    /// edge joining elements that should not touch.
    fn collect_bridges(&self) -> Result<BTreeMap<(usize, usize), Bridges>> {
        let mut out: BTreeMap<(usize, usize), Bridges> = self.tentacles.keys().map(|&k| (k, Bridges::default())).collect();
        for (&n, &e) in &self.ownership {
            for m in self.topology.neighbors(&n)? {
                let f = self.ownership[&m];
                if e == f || m < n {
                    continue;
                }
                let (t, u, key, v) = match (e, f) {
                    (Element::Tentacle(a, c), Element::Vertex(v)) => (n, m, (a, c), v),
                    (Element::Vertex(v), Element::Tentacle(a, c)) => (m, n, (a, c), v),
                    _ => return Err(Error::InvariantViolation(format!("stray edge {n}-{m} between {e} and {f}"))),
                };
                if v != key.0 && v != key.1 {
                    return Err(Error::InvariantViolation(format!("tentacle {key:?} touches vertex {v}")));
                }
                let side = out.get_mut(&key).expect("tentacle keys cover ownership");
                if self.even[v] {
                    side.even.push((t, u));
                } else {
                    side.odd.push((t, u));
                }
            }
        }
        Ok(out)
    }

    /// Bridges must be exactly the port stubs: entry and partner on the even
    /// side, the entry alone on the odd side.
    fn check_bridges(&self) -> Result<()> {
        for (&(a, c), br) in &self.bridges {
            let t = &self.tentacles[&(a, c)];
            let (even, odd) = if self.even[a] { (a, c) } else { (c, a) };
            let ge = &self.gadgets[even];
            let go = &self.gadgets[odd];
            let pe = &self.gadget.ports[ge.port_of(odd).ok_or_else(|| Error::InvariantViolation(format!("vertex {even} has no port toward {odd}")))?];
            let po = &self.gadget.ports[go.port_of(even).ok_or_else(|| Error::InvariantViolation(format!("vertex {odd} has no port toward {even}")))?];
            let mut want_even = vec![(t.even_entry, ge.place(&pe.entry)), (t.even_partner, ge.place(&pe.partner))];
            let want_odd = vec![(t.odd_entry, go.place(&po.entry))];
            let mut got_even = br.even.clone();
            want_even.sort();
            got_even.sort();
            if got_even != want_even || br.odd != want_odd {
                return Err(Error::InvariantViolation(format!(
                    "tentacle {a}-{c} bridges {} / {} do not match its ports",
                    br.even.len(),
                    br.odd.len()
                )));
            }
        }
        Ok(())
    }

    /// Checks the graph against the union of element graphs plus bridges.
    pub fn check_induced(&self) -> Result<()> {
        let m = self.materialize();
        let mut expected: BTreeSet<(ChimeraNode, ChimeraNode)> = BTreeSet::new();
        let mut by_element: BTreeMap<Element, Vec<ChimeraNode>> = BTreeMap::new();
        for (&n, &e) in &self.ownership {
            by_element.entry(e).or_default().push(n);
        }
        for nodes in by_element.values() {
            let part = MaterializedChimera::from_nodes(nodes.clone(), self.topology.augmented);
            for (i, j) in part.graph.edges() {
                expected.insert(ordered(part.node(i), part.node(j)));
            }
        }
        for br in self.bridges.values() {
            for &(t, u) in br.even.iter().chain(&br.odd) {
                expected.insert(ordered(t, u));
            }
        }
        let actual: BTreeSet<(ChimeraNode, ChimeraNode)> =
            m.graph.edges().into_iter().map(|(i, j)| ordered(m.node(i), m.node(j))).collect();
        if actual != expected {
            return Err(Error::InvariantViolation(format!(
                "composed graph has {} edges, elements and bridges account for {}",
                actual.len(),
                expected.len()
            )));
        }
        if m.nodes.len() != self.ownership.len() {
            return Err(Error::InvariantViolation("ownership does not partition the nodes".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "topology": self.topology,
            "ownership": self.ownership.iter().map(|(n, e)| (n.name(), *e)).collect::<BTreeMap<_, _>>(),
            "bridges": self.bridges.iter().map(|(&(a, c), br)| {
                let names = |v: &Vec<(ChimeraNode, ChimeraNode)>| v.iter().map(|(t, u)| [t.name(), u.name()]).collect::<Vec<_>>();
                (format!("{a}-{c}"), serde_json::json!({"even": names(&br.even), "odd": names(&br.odd)}))
            }).collect::<BTreeMap<_, _>>(),
            "gadgets": self.gadgets,
        })
    }
}

fn ordered(a: ChimeraNode, b: ChimeraNode) -> (ChimeraNode, ChimeraNode) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Gadget and pattern data exist for depth 4 only.
pub fn require_depth(depth: usize) -> Result<()> {
    if depth == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDepth(depth))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enlarge::triple_and_extend;
    use crate::graph::SimpleGraph;
    use crate::instance::validate_instance;

    fn c4() -> (InstanceGraph, RectangularRepresentation) {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let b = validate_instance(g, None).unwrap();
        let psi = vec![GridCoord::new(0, 0), GridCoord::new(1, 0), GridCoord::new(1, 1), GridCoord::new(0, 1)];
        let routes = b.graph.edges().into_iter().map(|(a, c)| ((a, c), vec![psi[a], psi[c]])).collect();
        (b, RectangularRepresentation { psi, routes })
    }

    fn composed() -> BrokenChimera {
        let (b, r) = c4();
        let l = triple_and_extend(&r, &b).unwrap();
        compose(&b, &r, &l, &VertexGadget::shipped(), &TentaclePatterns::shipped()).unwrap()
    }

    #[test]
    fn c4_composes_with_valid_bridges() {
        let c = composed();
        c.check_induced().unwrap();
        assert!(c.bridges.values().all(|br| br.even.len() == 2 && br.odd.len() == 1));
        let bb = c.cell_bounding_box().unwrap();
        assert!(bb.width() <= 5 && bb.height() <= 5);
        let sizes: usize = c.gadgets.len() * VertexGadget::shipped().nodes().len()
            + c.tentacles.values().map(|t| t.nodes().len()).sum::<usize>();
        assert_eq!(c.node_count(), sizes);
        assert_eq!(c.materialize().graph.vertex_count(), sizes);
    }

    #[test]
    fn augmentation_keeps_nodes_and_bridges() {
        let c = composed();
        let p = c.pegasus_augment();
        p.check_induced().unwrap();
        assert_eq!(p.collect_bridges().unwrap(), c.bridges);
        assert!(c.materialize().graph.two_coloring().is_some());
        assert!(p.materialize().graph.two_coloring().is_none());
    }

    #[test]
    fn depth_above_four_is_rejected() {
        assert!(require_depth(4).is_ok());
        assert!(matches!(require_depth(6), Err(Error::UnsupportedDepth(6))));
    }
}
