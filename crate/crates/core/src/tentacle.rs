//! Chimera tentacles: unit cells along an edge corridor, the end patterns that
//! fix the bridge counts, and constructive cross and return paths.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chimera::{node_class, ChimeraNode, MaterializedChimera, Orientation};
use crate::error::{Error, Result};
use crate::grid::{Dir, Parity};
use crate::oracle::verify_hamiltonian_path;

pub type Cell = (i64, i64);

pub const SHIPPED_PATTERNS_JSON: &str = include_str!("../fixtures/patterns.json");

/// Index through which a port entry and its tentacle neighbor couple.
pub const ENTRY_INDEX: usize = 2;
/// Index through which a port partner and its tentacle neighbor couple.
pub const PARTNER_INDEX: usize = 3;

/// Indices kept (in both orientations) in the two cells of an end rung. The
/// entry cell is the one holding the tentacle's bridge node of index 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EndPattern {
    pub entry_cell_keeps: BTreeSet<usize>,
    pub other_cell_keeps: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TentaclePatterns {
    pub even_end: EndPattern,
    pub odd_end: EndPattern,
}

impl TentaclePatterns {
    pub fn shipped() -> Self {
        TentaclePatterns::from_json(SHIPPED_PATTERNS_JSON).expect("shipped pattern fixture parses")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: TentaclePatterns = serde_json::from_str(s)?;
        for e in [&p.even_end, &p.odd_end] {
            if e.entry_cell_keeps.iter().chain(&e.other_cell_keeps).any(|&k| k > 3) {
                return Err(Error::Malformed("pattern index above 3".into()));
            }
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("patterns serialize");
        s.push('\n');
        s
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// All nodes of the given unit cells at depth 4.
pub fn build_tentacle(cells: &[Cell]) -> Vec<ChimeraNode> {
    let set: BTreeSet<Cell> = cells.iter().copied().collect();
    let mut out = Vec::new();
    for (c, r) in set {
        for o in [Orientation::Horizontal, Orientation::Vertical] {
            for k in 0..4 {
                out.push(ChimeraNode::new(c, r, o, k));
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChimeraTentacle {
    /// Cells grouped into rungs and blocks, from the even end.
    pub pieces: Vec<Vec<Cell>>,
    pub even_dir: Dir,
    pub odd_dir: Dir,
    pub kept: BTreeMap<Cell, BTreeSet<usize>>,
    /// Node bridging to the even vertex's port entry.
    pub even_entry: ChimeraNode,
    /// Node bridging to the even vertex's port partner.
    pub even_partner: ChimeraNode,
    /// Node bridging to the odd vertex's port entry.
    pub odd_entry: ChimeraNode,
}

fn step(cell: Cell, d: Dir) -> Cell {
    let (dx, dy) = d.delta();
    (cell.0 + dx, cell.1 + dy)
}

fn coupling_node(cell: Cell, d: Dir, index: usize) -> ChimeraNode {
    ChimeraNode::new(cell.0, cell.1, Orientation::coupling(d), index)
}

/// Splits a rung into (entry cell, other cell), the entry cell being the one
/// whose index-2 coupling node toward `d` has class `class`.
fn split_rung(rung: &[Cell], d: Dir, class: Parity) -> Result<(Cell, Cell)> {
    if rung.len() != 2 {
        return Err(Error::PatternOverlap(format!("end rung has {} cells", rung.len())));
    }
    if node_class(&coupling_node(rung[0], d, ENTRY_INDEX)) == class {
        Ok((rung[0], rung[1]))
    } else {
        Ok((rung[1], rung[0]))
    }
}

/// Applies the end patterns. A single-rung tentacle only receives the odd pattern.
pub fn modify_tentacle(
    pieces: Vec<Vec<Cell>>,
    even_dir: Dir,
    odd_dir: Dir,
    patterns: &TentaclePatterns,
) -> Result<ChimeraTentacle> {
    if pieces.is_empty() {
        return Err(Error::PatternOverlap("tentacle without cells".into()));
    }
    let mut kept: BTreeMap<Cell, BTreeSet<usize>> = BTreeMap::new();
    for &c in pieces.iter().flatten() {
        if kept.insert(c, (0..4).collect()).is_some() {
            return Err(Error::PatternOverlap(format!("cell {c:?} appears twice")));
        }
    }
    let odd_rung = pieces.last().unwrap();
    let even_rung = &pieces[0];
    let (p, q) = split_rung(odd_rung, odd_dir, Parity::Even)?;
    kept.insert(p, patterns.odd_end.entry_cell_keeps.clone());
    kept.insert(q, patterns.odd_end.other_cell_keeps.clone());
    if pieces.len() > 1 {
        if even_rung.iter().any(|c| odd_rung.contains(c)) {
            return Err(Error::PatternOverlap("both end patterns claim one cell".into()));
        }
        let (e, f) = split_rung(even_rung, even_dir, Parity::Odd)?;
        kept.insert(e, patterns.even_end.entry_cell_keeps.clone());
        kept.insert(f, patterns.even_end.other_cell_keeps.clone());
    }
    let (e, f) = split_rung(even_rung, even_dir, Parity::Odd)?;
    let t = ChimeraTentacle {
        even_entry: coupling_node(e, even_dir, ENTRY_INDEX),
        even_partner: coupling_node(f, even_dir, PARTNER_INDEX),
        odd_entry: coupling_node(p, odd_dir, ENTRY_INDEX),
        pieces,
        even_dir,
        odd_dir,
        kept,
    };
    for n in [t.even_entry, t.even_partner, t.odd_entry] {
        if !t.contains(&n) {
            return Err(Error::PatternOverlap(format!("bridge node {n} is broken by the patterns")));
        }
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Cross,
    Return,
}

impl ChimeraTentacle {
    pub fn cells(&self) -> Vec<Cell> {
        self.pieces.iter().flatten().copied().collect()
    }

    pub fn contains(&self, n: &ChimeraNode) -> bool {
        self.kept.get(&n.cell()).is_some_and(|k| k.contains(&n.index))
    }

    pub fn nodes(&self) -> Vec<ChimeraNode> {
        let mut out = Vec::new();
        for (&(c, r), ks) in &self.kept {
            for o in [Orientation::Horizontal, Orientation::Vertical] {
                for &k in ks {
                    out.push(ChimeraNode::new(c, r, o, k));
                }
            }
        }
        out.sort();
        out
    }

    /// Broken nodes relative to the full unit cells.
    pub fn broken(&self) -> Vec<ChimeraNode> {
        let keep: BTreeSet<ChimeraNode> = self.nodes().into_iter().collect();
        build_tentacle(&self.cells()).into_iter().filter(|n| !keep.contains(n)).collect()
    }

    pub fn is_single_rung(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn graph(&self) -> MaterializedChimera {
        MaterializedChimera::from_nodes(self.nodes(), false)
    }

    /// Hamiltonian path from the odd-side bridge node to the even-side entry bridge node.
    pub fn cross_path(&self) -> Result<Vec<ChimeraNode>> {
        self.construct(Mode::Cross)
    }

    /// Hamiltonian path from the even-side entry bridge node to the even-side partner node.
    pub fn return_path(&self) -> Result<Vec<ChimeraNode>> {
        self.construct(Mode::Return)
    }

    fn construct(&self, mode: Mode) -> Result<Vec<ChimeraNode>> {
        let (start, start_dir, end, end_dir) = match mode {
            Mode::Cross => (self.odd_entry, self.odd_dir, self.even_entry, self.even_dir),
            Mode::Return => (self.even_entry, self.even_dir, self.even_partner, self.even_dir),
        };
        let order: Vec<Vec<Cell>> = match mode {
            Mode::Cross => self.pieces.iter().rev().cloned().collect(),
            Mode::Return => self.pieces.clone(),
        };
        let mut search = WalkSearch::new(self, &order, mode, start, start_dir, end, end_dir);
        let path = search.run().ok_or_else(|| {
            Error::ConstructionFailed(format!(
                "no L-turn walk for {:?} path from {start} to {end} ({} expansions)",
                mode, search.expanded
            ))
        })?;
        let g = self.graph();
        let idx = g.indices(&path).ok_or_else(|| Error::ConstructionFailed("path leaves the tentacle".into()))?;
        if !verify_hamiltonian_path(&g.graph, &idx) {
            return Err(Error::ConstructionFailed(format!("{mode:?} path does not verify")));
        }
        Ok(path)
    }
}

/// Search for a cell-level walk whose steps alternate between the two axes
/// (every cell visit is an L-turn), followed by coupler index assignment.
struct WalkSearch<'a> {
    t: &'a ChimeraTentacle,
    mode: Mode,
    cells: Vec<Cell>,
    at: HashMap<Cell, usize>,
    piece_of: Vec<usize>,
    piece_size: Vec<usize>,
    cap: Vec<usize>,
    start: ChimeraNode,
    start_axis_h: bool,
    end: ChimeraNode,
    end_axis_h: bool,
    visits: Vec<usize>,
    covered_in_piece: Vec<usize>,
    covered: usize,
    walk: Vec<usize>,
    expanded: u64,
    limit: u64,
    result: Option<Vec<ChimeraNode>>,
    strict: bool,
    attempts: u64,
    dead: HashSet<(usize, bool, Vec<u8>)>,
}

impl<'a> WalkSearch<'a> {
    fn new(
        t: &'a ChimeraTentacle,
        order: &[Vec<Cell>],
        mode: Mode,
        start: ChimeraNode,
        start_dir: Dir,
        end: ChimeraNode,
        end_dir: Dir,
    ) -> Self {
        let mut cells = Vec::new();
        let mut piece_of = Vec::new();
        for (i, piece) in order.iter().enumerate() {
            for &c in piece {
                cells.push(c);
                piece_of.push(i);
            }
        }
        let at = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let cap = cells.iter().map(|c| t.kept[c].len()).collect();
        let n = cells.len();
        WalkSearch {
            t,
            mode,
            at,
            piece_of,
            piece_size: order.iter().map(Vec::len).collect(),
            cap,
            start,
            start_axis_h: start_dir.is_horizontal(),
            end,
            end_axis_h: end_dir.is_horizontal(),
            visits: vec![0; n],
            covered_in_piece: vec![0; order.len()],
            covered: 0,
            walk: Vec::new(),
            expanded: 0,
            limit: 200_000,
            cells,
            result: None,
            strict: true,
            attempts: 0,
            dead: HashSet::new(),
        }
    }

    fn first_uncovered_piece(&self) -> usize {
        (0..self.piece_size.len())
            .find(|&j| self.covered_in_piece[j] < self.piece_size[j])
            .unwrap_or(self.piece_size.len())
    }

    fn enter(&mut self, c: usize) {
        if self.visits[c] == 0 {
            self.covered += 1;
            self.covered_in_piece[self.piece_of[c]] += 1;
        }
        self.visits[c] += 1;
        self.walk.push(c);
    }

    fn leave(&mut self) {
        let c = self.walk.pop().unwrap();
        self.visits[c] -= 1;
        if self.visits[c] == 0 {
            self.covered -= 1;
            self.covered_in_piece[self.piece_of[c]] -= 1;
        }
    }

    /// Tries piece-monotone walks first, then walks that may step back into
    /// already covered pieces.
    fn run(&mut self) -> Option<Vec<ChimeraNode>> {
        let s = *self.at.get(&self.start.cell())?;
        self.at.get(&self.end.cell())?;
        for strict in [true, false] {
            self.strict = strict;
            self.dead.clear();
            self.enter(s);
            self.dfs(self.start_axis_h);
            self.leave();
            if self.result.is_some() {
                break;
            }
        }
        self.result.take()
    }

    /// Returns true once a complete path has been assembled.
    fn dfs(&mut self, entered_h: bool) -> bool {
        self.expanded += 1;
        if self.expanded > self.limit {
            return true;
        }
        let cur = *self.walk.last().unwrap();
        let all = self.covered == self.cells.len();
        if all && self.cells[cur] == self.end.cell() && entered_h != self.end_axis_h {
            self.attempts += 1;
            if let Some(p) = self.assemble() {
                self.result = Some(p);
                return true;
            }
        }
        let key = (cur, entered_h, self.visits.iter().map(|&v| v as u8).collect::<Vec<u8>>());
        if self.dead.contains(&key) {
            return false;
        }
        let attempts_before = self.attempts;
        let step_h = !entered_h;
        let dirs = if step_h { [Dir::Left, Dir::Right] } else { [Dir::Down, Dir::Up] };
        let frontier = self.first_uncovered_piece();
        let back = all && self.mode == Mode::Return;
        let mut moves: Vec<usize> = Vec::new();
        for d in dirs {
            let Some(&next) = self.at.get(&step(self.cells[cur], d)) else {
                continue;
            };
            if self.visits[next] >= self.cap[next] {
                continue;
            }
            let (p, q) = (self.piece_of[next], self.piece_of[cur]);
            let allowed = if back {
                p <= q
            } else {
                p <= frontier && (!self.strict || p >= q)
            };
            if allowed {
                moves.push(next);
            }
        }
        // head outward first, homeward once everything is covered
        moves.sort_by_key(|&m| if back { self.piece_of[m] as i64 } else { -(self.piece_of[m] as i64) });
        for next in moves {
            self.enter(next);
            let done = self.dfs(step_h);
            self.leave();
            if done {
                return true;
            }
        }
        if self.attempts == attempts_before {
            self.dead.insert(key);
        }
        false
    }

    /// Chooses coupler indices for the current walk and expands it into nodes.
    fn assemble(&self) -> Option<Vec<ChimeraNode>> {
        let walk = &self.walk;
        let steps: Vec<(usize, usize, Orientation)> = walk
            .windows(2)
            .map(|w| {
                let (a, b) = (self.cells[w[0]], self.cells[w[1]]);
                let o = if a.1 == b.1 { Orientation::Vertical } else { Orientation::Horizontal };
                (w[0], w[1], o)
            })
            .collect();
        let mut used: BTreeSet<(usize, Orientation, usize)> = BTreeSet::new();
        used.insert((walk[0], self.start.orientation, self.start.index));
        let last = *walk.last().unwrap();
        if !used.insert((last, self.end.orientation, self.end.index)) {
            return None;
        }
        let mut chosen = vec![0usize; steps.len()];
        if !self.assign(&steps, 0, &mut used, &mut chosen) {
            return None;
        }
        // entry/exit node per visit
        let mut nodes_per_visit: Vec<(ChimeraNode, ChimeraNode)> = Vec::new();
        for (i, &c) in walk.iter().enumerate() {
            let (col, row) = self.cells[c];
            let entry = if i == 0 {
                self.start
            } else {
                ChimeraNode::new(col, row, steps[i - 1].2, chosen[i - 1])
            };
            let exit = if i == walk.len() - 1 { self.end } else { ChimeraNode::new(col, row, steps[i].2, chosen[i]) };
            nodes_per_visit.push((entry, exit));
        }
        let mut leftovers: HashMap<usize, (Vec<ChimeraNode>, Vec<ChimeraNode>)> = HashMap::new();
        for c in 0..self.cells.len() {
            let (col, row) = self.cells[c];
            let mut h = Vec::new();
            let mut v = Vec::new();
            for &k in &self.t.kept[&self.cells[c]] {
                if !used.contains(&(c, Orientation::Horizontal, k)) {
                    h.push(ChimeraNode::h(col, row, k));
                }
                if !used.contains(&(c, Orientation::Vertical, k)) {
                    v.push(ChimeraNode::v(col, row, k));
                }
            }
            if h.len() != v.len() {
                return None;
            }
            leftovers.insert(c, (h, v));
        }
        let mut path = Vec::new();
        let mut seen_cell = vec![false; self.cells.len()];
        for (i, &c) in walk.iter().enumerate() {
            let (entry, exit) = nodes_per_visit[i];
            path.push(entry);
            if !seen_cell[c] {
                seen_cell[c] = true;
                let (h, v) = &leftovers[&c];
                for j in 0..h.len() {
                    // alternate orientations starting opposite to the entry
                    if entry.orientation == Orientation::Horizontal {
                        path.push(v[j]);
                        path.push(h[j]);
                    } else {
                        path.push(h[j]);
                        path.push(v[j]);
                    }
                }
            }
            path.push(exit);
        }
        Some(path)
    }

    fn assign(
        &self,
        steps: &[(usize, usize, Orientation)],
        i: usize,
        used: &mut BTreeSet<(usize, Orientation, usize)>,
        chosen: &mut [usize],
    ) -> bool {
        if i == steps.len() {
            return true;
        }
        let (a, b, o) = steps[i];
        let ka = &self.t.kept[&self.cells[a]];
        let kb = &self.t.kept[&self.cells[b]];
        for &k in ka.intersection(kb) {
            if used.contains(&(a, o, k)) || used.contains(&(b, o, k)) {
                continue;
            }
            used.insert((a, o, k));
            used.insert((b, o, k));
            chosen[i] = k;
            if self.assign(steps, i + 1, used, chosen) {
                return true;
            }
            used.remove(&(a, o, k));
            used.remove(&(b, o, k));
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{find_hamiltonian_path, SearchBudget};

    fn rung_h(x: i64, y: i64) -> Vec<Cell> {
        vec![(x, y), (x, y + 1)]
    }

    #[test]
    fn single_rung_tentacle_paths() {
        let t = modify_tentacle(vec![rung_h(2, 0)], Dir::Left, Dir::Right, &TentaclePatterns::shipped()).unwrap();
        assert_eq!(t.nodes().len(), 6);
        let cross = t.cross_path().unwrap();
        assert_eq!((cross[0], *cross.last().unwrap()), (t.odd_entry, t.even_entry));
        assert_ne!(node_class(&t.odd_entry), node_class(&t.even_entry));
        let ret = t.return_path().unwrap();
        assert_eq!((ret[0], *ret.last().unwrap()), (t.even_entry, t.even_partner));
    }

    #[test]
    fn build_counts_cells_once() {
        assert_eq!(build_tentacle(&[(0, 0), (0, 1)]).len(), 16);
        assert_eq!(build_tentacle(&[(0, 0), (0, 1), (0, 0)]).len(), 16);
    }

    #[test]
    fn straight_two_rung_tentacle_matches_exhaustive_search() {
        let t = modify_tentacle(vec![rung_h(2, 0), rung_h(3, 0)], Dir::Left, Dir::Right, &TentaclePatterns::shipped())
            .unwrap();
        let g = t.graph();
        let s = g.index_of(&t.odd_entry).unwrap();
        let e = g.index_of(&t.even_entry).unwrap();
        let exhaustive = find_hamiltonian_path(&g.graph, s, e, SearchBudget::default());
        assert_eq!(exhaustive.is_found(), t.cross_path().is_ok());
        assert!(t.cross_path().is_ok());
    }
}
