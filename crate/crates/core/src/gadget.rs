//! The 2x2-cell vertex gadget: broken pattern, T-shaped ports and the six
//! Hamiltonian path cases, plus the search that discovers it.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chimera::{node_class, ChimeraNode, MaterializedChimera, Orientation};
use crate::error::{Error, Result};
use crate::grid::Dir;
use crate::oracle::{find_hamiltonian_path_with, SearchBudget, SearchOutcome};

pub const SHIPPED_GADGET_JSON: &str = include_str!("../fixtures/gadget.json");

/// One of the six path requirements. Entries are numbered 0..3 after the
/// ports they sit on; a ported case must route through that port's loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetCase {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl GadgetCase {
    pub const ALL: [GadgetCase; 6] =
        [GadgetCase::A, GadgetCase::B, GadgetCase::C, GadgetCase::D, GadgetCase::E, GadgetCase::F];

    /// `(from entry, to entry, port whose loop is used)`.
    pub fn spec(self) -> (usize, usize, Option<usize>) {
        match self {
            GadgetCase::A => (0, 1, None),
            GadgetCase::B => (0, 1, Some(2)),
            GadgetCase::C => (0, 2, None),
            GadgetCase::D => (0, 2, Some(1)),
            GadgetCase::E => (1, 2, None),
            GadgetCase::F => (1, 2, Some(0)),
        }
    }

    /// The case joining entries `x` and `y`, with or without the remaining port.
    pub fn between(x: usize, y: usize, ported: bool) -> Option<(GadgetCase, bool)> {
        let reversed = x > y;
        let (lo, hi) = (x.min(y), x.max(y));
        GadgetCase::ALL
            .into_iter()
            .find(|c| {
                let (a, b, p) = c.spec();
                (a, b) == (lo, hi) && p.is_some() == ported
            })
            .map(|c| (c, reversed))
    }
}

/// A port: the entry node `entry` and its loop partner `partner`, both
/// coupling out of the block in `direction`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub entry: ChimeraNode,
    pub partner: ChimeraNode,
    pub direction: Dir,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexGadget {
    pub broken: BTreeSet<ChimeraNode>,
    pub ports: [Port; 3],
    pub witnesses: BTreeMap<GadgetCase, Vec<ChimeraNode>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct GadgetFile {
    broken_offsets: Vec<ChimeraNode>,
    entries: Vec<String>,
    ports: Vec<Port>,
    witnesses: BTreeMap<GadgetCase, Vec<String>>,
}

/// Quarter turns counter-clockwise of a node inside the 2x2 block.
pub fn rotate_node(n: &ChimeraNode, quarter_turns: u8) -> ChimeraNode {
    let mut m = *n;
    for _ in 0..quarter_turns % 4 {
        m = ChimeraNode::new(1 - m.row, m.col, m.orientation.flip(), m.index);
    }
    m
}

pub fn rotate_dir(d: Dir, quarter_turns: u8) -> Dir {
    (0..quarter_turns % 4).fold(d, |d, _| d.rotate_ccw())
}

fn block_nodes() -> Vec<ChimeraNode> {
    let mut out = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            for o in [Orientation::Horizontal, Orientation::Vertical] {
                for k in 0..4 {
                    out.push(ChimeraNode::new(c, r, o, k));
                }
            }
        }
    }
    out
}

impl VertexGadget {
    pub fn shipped() -> Self {
        VertexGadget::from_json(SHIPPED_GADGET_JSON).expect("shipped gadget fixture parses")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GadgetFile = serde_json::from_str(s)?;
        let parse = |name: &String| {
            ChimeraNode::parse_name(name).ok_or_else(|| Error::InvalidGadget(format!("bad node name {name}")))
        };
        let ports: [Port; 3] =
            file.ports.try_into().map_err(|_| Error::InvalidGadget("exactly three ports required".into()))?;
        let entries: Vec<ChimeraNode> = file.entries.iter().map(parse).collect::<Result<_>>()?;
        if entries.len() != 3 || entries.iter().zip(&ports).any(|(e, p)| *e != p.entry) {
            return Err(Error::InvalidGadget("entries must match port entries".into()));
        }
        let mut witnesses = BTreeMap::new();
        for (case, path) in &file.witnesses {
            witnesses.insert(*case, path.iter().map(parse).collect::<Result<Vec<_>>>()?);
        }
        Ok(VertexGadget { broken: file.broken_offsets.into_iter().collect(), ports, witnesses })
    }

    pub fn to_json(&self) -> String {
        let file = GadgetFile {
            broken_offsets: self.broken.iter().copied().collect(),
            entries: self.ports.iter().map(|p| p.entry.name()).collect(),
            ports: self.ports.to_vec(),
            witnesses: self.witnesses.iter().map(|(c, p)| (*c, p.iter().map(ChimeraNode::name).collect())).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("gadget serializes");
        s.push('\n');
        s
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// Non-broken nodes in local block coordinates.
    pub fn nodes(&self) -> Vec<ChimeraNode> {
        block_nodes().into_iter().filter(|n| !self.broken.contains(n)).collect()
    }

    pub fn entries(&self) -> [ChimeraNode; 3] {
        self.ports.map(|p| p.entry)
    }

    /// Port directions, in port order.
    pub fn directions(&self, quarter_turns: u8) -> [Dir; 3] {
        self.ports.map(|p| rotate_dir(p.direction, quarter_turns))
    }

    /// Gadget graph, optionally with the loop edge of one port added.
    pub fn graph_with_loop(&self, port: Option<usize>) -> (MaterializedChimera, Vec<(usize, usize)>) {
        let m = MaterializedChimera::from_nodes(self.nodes(), false);
        let mut extra = Vec::new();
        if let Some(p) = port {
            let (a, b) = (self.ports[p].entry, self.ports[p].partner);
            if let (Some(ia), Some(ib)) = (m.index_of(&a), m.index_of(&b)) {
                extra.push((ia, ib));
            }
        }
        if extra.is_empty() {
            return (m, extra);
        }
        let mut m2 = m.clone();
        for &(a, b) in &extra {
            m2.graph.add_edge(a, b).expect("loop edge joins two gadget nodes");
        }
        (m2, extra)
    }

    /// Structural checks that do not need path search.
    pub fn check_structure(&self) -> Result<()> {
        let nodes: BTreeSet<ChimeraNode> = self.nodes().into_iter().collect();
        if self.broken.iter().any(|n| n.col < 0 || n.col > 1 || n.row < 0 || n.row > 1 || n.index > 3) {
            return Err(Error::InvalidGadget("broken offset outside the 2x2 block".into()));
        }
        for (i, p) in self.ports.iter().enumerate() {
            if !nodes.contains(&p.entry) || !nodes.contains(&p.partner) {
                return Err(Error::InvalidGadget(format!("port {i} uses a broken node")));
            }
            let o = Orientation::coupling(p.direction);
            if p.entry.orientation != o || p.partner.orientation != o {
                return Err(Error::InvalidGadget(format!("port {i} nodes do not couple toward {:?}", p.direction)));
            }
            if node_class(&p.entry) == node_class(&p.partner) {
                return Err(Error::InvalidGadget(format!("port {i} loop joins equal classes")));
            }
        }
        let dirs: BTreeSet<Dir> = self.ports.iter().map(|p| p.direction).collect();
        let collinear = self.ports[0].direction == self.ports[1].direction.opposite();
        if dirs.len() != 3 || !collinear {
            return Err(Error::InvalidGadget("ports must form a T with ports 1 and 2 collinear".into()));
        }
        Ok(())
    }

    /// Re-verifies every stored witness edge by edge.
    pub fn verify_witnesses(&self) -> Result<()> {
        self.check_structure()?;
        for case in GadgetCase::ALL {
            let path = self
                .witnesses
                .get(&case)
                .ok_or_else(|| Error::InvalidGadget(format!("missing witness for case {case:?}")))?;
            if !self.witness_ok(case, path) {
                return Err(Error::InvalidGadget(format!("witness for case {case:?} does not verify")));
            }
        }
        Ok(())
    }

    fn witness_ok(&self, case: GadgetCase, path: &[ChimeraNode]) -> bool {
        let (from, to, port) = case.spec();
        let (m, extra) = self.graph_with_loop(port);
        let Some(idx) = m.indices(path) else {
            return false;
        };
        if idx.first() != m.index_of(&self.ports[from].entry).as_ref()
            || idx.last() != m.index_of(&self.ports[to].entry).as_ref()
            || !crate::oracle::verify_hamiltonian_path(&m.graph, &idx)
        {
            return false;
        }
        extra.iter().all(|&(a, b)| idx.windows(2).any(|w| (w[0], w[1]) == (a, b) || (w[0], w[1]) == (b, a)))
    }

    /// Decides all six cases by exhaustive search, returning fresh witnesses.
    pub fn solve_cases(&self, budget: SearchBudget) -> Result<Option<BTreeMap<GadgetCase, Vec<ChimeraNode>>>> {
        self.check_structure()?;
        let mut out = BTreeMap::new();
        for case in GadgetCase::ALL {
            let (from, to, port) = case.spec();
            let (m, extra) = self.graph_with_loop(port);
            let s = m.index_of(&self.ports[from].entry).unwrap();
            let t = m.index_of(&self.ports[to].entry).unwrap();
            match find_hamiltonian_path_with(&m.graph, s, t, &extra, budget) {
                SearchOutcome::Found(p) => {
                    out.insert(case, p.iter().map(|&i| m.node(i)).collect());
                }
                SearchOutcome::NotFound => return Ok(None),
                SearchOutcome::Timeout => {
                    return Err(Error::InvalidGadget(format!("path search for case {case:?} ran out of budget")))
                }
            }
        }
        Ok(Some(out))
    }

    /// Witness path for traversing from entry `x` to entry `y`, in that order.
    pub fn path_between(&self, x: usize, y: usize, ported: bool) -> Result<Vec<ChimeraNode>> {
        let (case, reversed) = GadgetCase::between(x, y, ported)
            .ok_or_else(|| Error::InvalidGadget(format!("no case joins entries {x} and {y}")))?;
        let mut p = self.witnesses[&case].clone();
        if reversed {
            p.reverse();
        }
        Ok(p)
    }

    /// Number of non-broken nodes of each orientation per cell, `(h, v)`.
    pub fn cell_counts(&self) -> BTreeMap<(i64, i64), (usize, usize)> {
        let mut out = BTreeMap::new();
        for n in self.nodes() {
            let e = out.entry(n.cell()).or_insert((0, 0));
            match n.orientation {
                Orientation::Horizontal => e.0 += 1,
                Orientation::Vertical => e.1 += 1,
            }
        }
        out
    }
}

/// Port layout used by the search: left, right and down ports. Each port's
/// entry couples through index 2 and its partner through index 3.
fn search_ports() -> [Port; 3] {
    [
        Port { entry: ChimeraNode::v(0, 1, 2), partner: ChimeraNode::v(0, 0, 3), direction: Dir::Left },
        Port { entry: ChimeraNode::v(1, 0, 2), partner: ChimeraNode::v(1, 1, 3), direction: Dir::Right },
        Port { entry: ChimeraNode::h(0, 0, 2), partner: ChimeraNode::h(1, 0, 3), direction: Dir::Down },
    ]
}

#[derive(Clone, Copy, Debug)]
pub struct GadgetSearchBudget {
    pub max_broken: usize,
    pub max_candidates: usize,
    pub path_budget: SearchBudget,
}

impl Default for GadgetSearchBudget {
    fn default() -> Self {
        GadgetSearchBudget { max_broken: 8, max_candidates: 2_000_000, path_budget: SearchBudget::default() }
    }
}

#[derive(Clone, Debug)]
pub struct GadgetSearchReport {
    pub gadget: VertexGadget,
    pub candidates_examined: usize,
    pub balanced_candidates: usize,
    pub elapsed_ms: u128,
}

/// Candidate patterns: the six port-facing (cell, orientation) slots keep
/// their coupling index (2 for an entry, 3 for a partner) plus any subset of
/// {0, 1}; the two upper horizontal slots, which face no port, keep any subset.
const CANDIDATE_COUNT: usize = 4usize.pow(6) * 256;

fn decode_candidate(code: usize) -> Vec<ChimeraNode> {
    let mut broken = Vec::new();
    let mut rest = code;
    for p in search_ports() {
        for (slot, keep) in [(p.entry, 2), (p.partner, 3)] {
            let s = rest % 4;
            rest /= 4;
            broken.push(ChimeraNode { index: 5 - keep, ..slot });
            for k in 0..2 {
                if s & (1 << k) == 0 {
                    broken.push(ChimeraNode { index: k, ..slot });
                }
            }
        }
    }
    for slot in [ChimeraNode::h(0, 1, 0), ChimeraNode::h(1, 1, 0)] {
        let s = rest % 16;
        rest /= 16;
        for k in 0..4 {
            if s & (1 << k) == 0 {
                broken.push(ChimeraNode { index: k, ..slot });
            }
        }
    }
    broken
}

fn broken_count(code: usize) -> usize {
    let port_side = code % 4usize.pow(6);
    let free = code / 4usize.pow(6);
    6 + 12 - port_side_kept(port_side) + 8 - (free as u32).count_ones() as usize
}

fn port_side_kept(mut s: usize) -> usize {
    let mut kept = 0;
    for _ in 0..6 {
        kept += (s % 4).count_ones() as usize;
        s /= 4;
    }
    kept
}

/// Candidate codes ordered by broken count, then by code.
fn candidate_order(max_broken: usize) -> Vec<usize> {
    let mut codes: Vec<usize> = (0..CANDIDATE_COUNT).filter(|&c| broken_count(c) <= max_broken).collect();
    codes.sort_by_key(|&c| (broken_count(c), c));
    codes
}

/// Searches the candidate family in order of increasing broken count and
/// returns the first pattern satisfying all six cases.
pub fn gadget_search(budget: GadgetSearchBudget) -> Result<GadgetSearchReport> {
    let started = Instant::now();
    let ports = search_ports();
    let mut examined = 0;
    let mut balanced = 0;
    for code in candidate_order(budget.max_broken) {
        if examined >= budget.max_candidates {
            break;
        }
        examined += 1;
        let broken = decode_candidate(code);
        debug_assert_eq!(broken.len(), broken_count(code));
        let mut g = VertexGadget { broken: broken.into_iter().collect(), ports, witnesses: BTreeMap::new() };
        let entry_class = node_class(&ports[0].entry);
        let nodes = g.nodes();
        let same = nodes.iter().filter(|n| node_class(n) == entry_class).count();
        if same != nodes.len() - same + 1 {
            continue;
        }
        balanced += 1;
        if let Some(w) = g.solve_cases(budget.path_budget)? {
            g.witnesses = w;
            return Ok(GadgetSearchReport {
                gadget: g,
                candidates_examined: examined,
                balanced_candidates: balanced,
                elapsed_ms: started.elapsed().as_millis(),
            });
        }
    }
    Err(Error::SearchExhausted(examined))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_preserves_class_and_has_order_four() {
        for n in block_nodes() {
            assert_eq!(rotate_node(&n, 4), n);
            assert_eq!(node_class(&rotate_node(&n, 1)), node_class(&n));
        }
        assert_eq!(rotate_node(&ChimeraNode::v(0, 1, 2), 1), ChimeraNode::h(0, 0, 2));
    }

    #[test]
    fn case_lookup_handles_direction() {
        assert_eq!(GadgetCase::between(2, 0, true), Some((GadgetCase::D, true)));
        assert_eq!(GadgetCase::between(1, 2, false), Some((GadgetCase::E, false)));
    }

    #[test]
    fn empty_pattern_fails_some_case() {
        let g = VertexGadget { broken: BTreeSet::new(), ports: search_ports(), witnesses: BTreeMap::new() };
        assert_eq!(g.solve_cases(SearchBudget::default()).unwrap(), None);
    }

    #[test]
    fn shipped_fixture_reverifies() {
        let g = VertexGadget::shipped();
        g.verify_witnesses().unwrap();
        assert_eq!(VertexGadget::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let mut g = VertexGadget::shipped();
        g.witnesses.get_mut(&GadgetCase::C).unwrap().swap(3, 4);
        assert!(g.verify_witnesses().is_err());
    }
}
