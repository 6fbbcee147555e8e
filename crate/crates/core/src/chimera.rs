//! Chimera unit-cell topology with broken qubits and optional pair couplers.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::grid::Parity;

/// Horizontal nodes couple to the cells above and below, vertical nodes to
/// the cells left and right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "h")]
    Horizontal,
    #[serde(rename = "v")]
    Vertical,
}

impl Orientation {
    pub fn bit(self) -> i64 {
        match self {
            Orientation::Horizontal => 0,
            Orientation::Vertical => 1,
        }
    }

    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Orientation::Horizontal => 'h',
            Orientation::Vertical => 'v',
        }
    }

    /// The orientation whose couplers run along a grid step in direction `d`.
    pub fn coupling(d: crate::grid::Dir) -> Orientation {
        if d.is_horizontal() {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChimeraNode {
    #[serde(rename = "c")]
    pub col: i64,
    #[serde(rename = "r")]
    pub row: i64,
    #[serde(rename = "o")]
    pub orientation: Orientation,
    #[serde(rename = "k")]
    pub index: usize,
}

impl ChimeraNode {
    pub const fn new(col: i64, row: i64, orientation: Orientation, index: usize) -> Self {
        ChimeraNode { col, row, orientation, index }
    }

    pub fn h(col: i64, row: i64, index: usize) -> Self {
        ChimeraNode::new(col, row, Orientation::Horizontal, index)
    }

    pub fn v(col: i64, row: i64, index: usize) -> Self {
        ChimeraNode::new(col, row, Orientation::Vertical, index)
    }

    pub fn cell(&self) -> (i64, i64) {
        (self.col, self.row)
    }

    pub fn shifted(&self, dc: i64, dr: i64) -> Self {
        ChimeraNode { col: self.col + dc, row: self.row + dr, ..*self }
    }

    /// DOT-style name, e.g. `c1r0v3`.
    pub fn name(&self) -> String {
        format!("c{}r{}{}{}", self.col, self.row, self.orientation.letter(), self.index)
    }

    pub fn parse_name(s: &str) -> Option<ChimeraNode> {
        let rest = s.strip_prefix('c')?;
        let rpos = rest.find('r')?;
        let col = rest[..rpos].parse().ok()?;
        let rest = &rest[rpos + 1..];
        let opos = rest.find(['h', 'v'])?;
        let row = rest[..opos].parse().ok()?;
        let orientation = if rest.as_bytes()[opos] == b'h' {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        };
        let index = rest[opos + 1..].parse().ok()?;
        Some(ChimeraNode { col, row, orientation, index })
    }

    /// Ordering key used everywhere nodes are listed: row, column, orientation, index.
    pub fn order_key(&self) -> (i64, i64, i64, usize) {
        (self.row, self.col, self.orientation.bit(), self.index)
    }

    /// Whether the two nodes are joined in the ideal, unbounded, non-augmented topology.
    pub fn ideal_adjacent(&self, other: &ChimeraNode) -> bool {
        if self.cell() == other.cell() {
            return self.orientation != other.orientation;
        }
        if self.orientation != other.orientation || self.index != other.index {
            return false;
        }
        match self.orientation {
            Orientation::Horizontal => self.col == other.col && (self.row - other.row).abs() == 1,
            Orientation::Vertical => self.row == other.row && (self.col - other.col).abs() == 1,
        }
    }

    /// Whether the two nodes form one of the pair couplers added by augmentation.
    pub fn pair_adjacent(&self, other: &ChimeraNode) -> bool {
        self.cell() == other.cell()
            && self.orientation == other.orientation
            && self.index < 4
            && other.index == self.index ^ 1
    }
}

impl PartialOrd for ChimeraNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ChimeraNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for ChimeraNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Bipartition class: `(col + row + orientation bit) mod 2`.
pub fn node_class(node: &ChimeraNode) -> Parity {
    Parity::of_sum(node.col + node.row + node.orientation.bit())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChimeraTopology {
    pub cols: usize,
    pub rows: usize,
    pub depth: usize,
    #[serde(default)]
    pub augmented: bool,
    #[serde(default, with = "broken_list")]
    pub broken: BTreeSet<ChimeraNode>,
}

mod broken_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(set: &BTreeSet<ChimeraNode>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(set.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeSet<ChimeraNode>, D::Error> {
        Ok(Vec::<ChimeraNode>::deserialize(d)?.into_iter().collect())
    }
}

impl ChimeraTopology {
    pub fn ideal(cols: usize, rows: usize) -> Self {
        ChimeraTopology { cols, rows, depth: 4, augmented: false, broken: BTreeSet::new() }
    }

    pub fn in_bounds(&self, n: &ChimeraNode) -> bool {
        n.col >= 0
            && n.row >= 0
            && (n.col as usize) < self.cols
            && (n.row as usize) < self.rows
            && n.index < self.depth
    }

    pub fn is_present(&self, n: &ChimeraNode) -> bool {
        self.in_bounds(n) && !self.broken.contains(n)
    }

    /// All non-broken nodes in the canonical order.
    pub fn nodes(&self) -> Vec<ChimeraNode> {
        let mut out = Vec::new();
        for r in 0..self.rows as i64 {
            for c in 0..self.cols as i64 {
                for o in [Orientation::Horizontal, Orientation::Vertical] {
                    for k in 0..self.depth {
                        let n = ChimeraNode::new(c, r, o, k);
                        if !self.broken.contains(&n) {
                            out.push(n);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn neighbors(&self, node: &ChimeraNode) -> Result<Vec<ChimeraNode>> {
        if !self.in_bounds(node) {
            return Err(Error::OutOfBounds(*node));
        }
        if self.broken.contains(node) {
            return Err(Error::BrokenNode(*node));
        }
        let (c, r) = node.cell();
        let mut cand = Vec::new();
        for k in 0..self.depth {
            cand.push(ChimeraNode::new(c, r, node.orientation.flip(), k));
        }
        match node.orientation {
            Orientation::Horizontal => {
                cand.push(node.shifted(0, -1));
                cand.push(node.shifted(0, 1));
            }
            Orientation::Vertical => {
                cand.push(node.shifted(-1, 0));
                cand.push(node.shifted(1, 0));
            }
        }
        if self.augmented && node.index < 4 {
            cand.push(ChimeraNode { index: node.index ^ 1, ..*node });
        }
        let mut out: Vec<ChimeraNode> = cand.into_iter().filter(|n| self.is_present(n)).collect();
        out.sort();
        Ok(out)
    }

    pub fn materialize(&self) -> MaterializedChimera {
        MaterializedChimera::from_nodes(self.nodes(), self.augmented)
    }
}

/// A Chimera node set turned into a [`SimpleGraph`] with a node index table.
#[derive(Clone, Debug)]
pub struct MaterializedChimera {
    pub graph: SimpleGraph,
    pub nodes: Vec<ChimeraNode>,
    pub index: HashMap<ChimeraNode, usize>,
}

impl MaterializedChimera {
    /// Induced subgraph of the unbounded topology on `nodes` (sorted canonically).
    pub fn from_nodes(mut nodes: Vec<ChimeraNode>, augmented: bool) -> Self {
        nodes.sort();
        nodes.dedup();
        let index: HashMap<ChimeraNode, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let depth = nodes.iter().map(|n| n.index + 1).max().unwrap_or(0);
        let mut edges = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            let mut cand: Vec<ChimeraNode> = match n.orientation {
                Orientation::Horizontal => vec![n.shifted(0, 1)],
                Orientation::Vertical => vec![n.shifted(1, 0)],
            };
            if n.orientation == Orientation::Horizontal {
                cand.extend((0..depth).map(|k| ChimeraNode::v(n.col, n.row, k)));
            }
            if augmented && n.index % 2 == 0 && n.index < 4 {
                cand.push(ChimeraNode { index: n.index + 1, ..*n });
            }
            for m in cand {
                if let Some(&j) = index.get(&m) {
                    edges.push((i, j));
                }
            }
        }
        let graph = SimpleGraph::from_edges(nodes.len(), &edges)
            .expect("chimera edges are simple")
            .with_labels(nodes.iter().map(ChimeraNode::name).collect())
            .expect("one label per node");
        MaterializedChimera { graph, nodes, index }
    }

    pub fn node(&self, i: usize) -> ChimeraNode {
        self.nodes[i]
    }

    pub fn index_of(&self, n: &ChimeraNode) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// Maps a node sequence to vertex indices; `None` if any node is missing.
    pub fn indices(&self, seq: &[ChimeraNode]) -> Option<Vec<usize>> {
        seq.iter().map(|n| self.index_of(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_node_has_six_neighbors() {
        let t = ChimeraTopology::ideal(5, 5);
        assert_eq!(t.neighbors(&ChimeraNode::h(2, 2, 1)).unwrap().len(), 6);
        assert_eq!(t.neighbors(&ChimeraNode::v(2, 2, 3)).unwrap().len(), 6);
    }

    #[test]
    fn single_cell_degrees() {
        let mut t = ChimeraTopology::ideal(1, 1);
        assert_eq!(t.neighbors(&ChimeraNode::h(0, 0, 0)).unwrap().len(), 4);
        t.augmented = true;
        assert_eq!(t.neighbors(&ChimeraNode::h(0, 0, 0)).unwrap().len(), 5);
    }

    #[test]
    fn neighbors_reject_bad_nodes() {
        let mut t = ChimeraTopology::ideal(2, 2);
        assert!(matches!(t.neighbors(&ChimeraNode::h(2, 0, 0)), Err(Error::OutOfBounds(_))));
        t.broken.insert(ChimeraNode::h(0, 0, 0));
        assert!(matches!(t.neighbors(&ChimeraNode::h(0, 0, 0)), Err(Error::BrokenNode(_))));
    }

    #[test]
    fn class_examples() {
        assert_eq!(node_class(&ChimeraNode::h(0, 0, 0)), Parity::Even);
        assert_eq!(node_class(&ChimeraNode::v(0, 0, 0)), Parity::Odd);
        assert_ne!(node_class(&ChimeraNode::h(0, 0, 0)), node_class(&ChimeraNode::h(0, 1, 0)));
    }

    #[test]
    fn materialize_small_counts() {
        let g = ChimeraTopology::ideal(1, 1).materialize();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (8, 16));
        let mut t = ChimeraTopology::ideal(1, 1);
        t.broken.insert(ChimeraNode::h(0, 0, 2));
        let g = t.materialize();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (7, 12));
    }

    #[test]
    fn names_round_trip() {
        let n = ChimeraNode::v(12, 3, 2);
        assert_eq!(n.name(), "c12r3v2");
        assert_eq!(ChimeraNode::parse_name("c12r3v2"), Some(n));
        assert_eq!(ChimeraNode::parse_name("c1x3v2"), None);
    }

    #[test]
    fn topology_json_shape() {
        let mut t = ChimeraTopology::ideal(1, 2);
        t.broken.insert(ChimeraNode::v(0, 1, 3));
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"cols":1,"rows":2,"depth":4,"augmented":false,"broken":[{"c":0,"r":1,"o":"v","k":3}]}"#);
        let back: ChimeraTopology = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
