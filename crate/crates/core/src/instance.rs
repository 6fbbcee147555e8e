//! Input graphs of the restricted class and their parity-preserving grid representations.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::grid::{GridCoord, Parity, RectangularGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceViolation {
    Empty,
    NotBipartite,
    ImproperLabels,
    BadDegree(usize),
    HasDegreeOne(usize),
    ParityImbalance { even: usize, odd: usize },
    Disconnected,
}

/// Validated input graph with its even/odd labelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceGraph {
    pub graph: SimpleGraph,
    pub parity: Vec<Parity>,
}

impl InstanceGraph {
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn id(&self, v: usize) -> String {
        self.graph.label(v)
    }

    pub fn vertex_of(&self, id: &str) -> Option<usize> {
        (0..self.vertex_count()).find(|&v| self.id(v) == id)
    }

    pub fn is_even(&self, v: usize) -> bool {
        self.parity[v] == Parity::Even
    }

    /// Orients an edge as `(even endpoint, odd endpoint)`.
    pub fn even_odd(&self, a: usize, b: usize) -> (usize, usize) {
        if self.is_even(a) {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Checks membership in the restricted class except planarity. Without
/// labels, the side containing vertex 0 is taken as even.
pub fn validate_instance(
    g: SimpleGraph,
    labels: Option<Vec<Parity>>,
) -> std::result::Result<InstanceGraph, Vec<InstanceViolation>> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(vec![InstanceViolation::Empty, InstanceViolation::Disconnected]);
    }
    let mut out = Vec::new();
    for v in 0..n {
        match g.degree(v) {
            2 | 3 => {}
            1 => out.push(InstanceViolation::HasDegreeOne(v)),
            _ => out.push(InstanceViolation::BadDegree(v)),
        }
    }
    if !g.is_connected() {
        out.push(InstanceViolation::Disconnected);
    }
    let parity = match (g.two_coloring(), labels) {
        (None, _) => {
            out.push(InstanceViolation::NotBipartite);
            None
        }
        (Some(_), Some(l)) => {
            let as_bool: Vec<bool> = l.iter().map(|&p| p == Parity::Odd).collect();
            if l.len() != n || !g.is_proper_coloring(&as_bool) {
                out.push(InstanceViolation::ImproperLabels);
                None
            } else {
                Some(l)
            }
        }
        (Some(c), None) => {
            // per component, flip so the lowest vertex is even
            let mut parity = vec![Parity::Even; n];
            let mut done = vec![false; n];
            for s in 0..n {
                if done[s] {
                    continue;
                }
                let flip = c[s];
                for v in g.bfs_order(s) {
                    done[v] = true;
                    parity[v] = if c[v] != flip { Parity::Odd } else { Parity::Even };
                }
            }
            Some(parity)
        }
    };
    if let Some(p) = &parity {
        let even = p.iter().filter(|&&x| x == Parity::Even).count();
        if even != n - even {
            out.push(InstanceViolation::ParityImbalance { even, odd: n - even });
        }
    }
    if out.is_empty() {
        Ok(InstanceGraph { graph: g, parity: parity.unwrap() })
    } else {
        Err(out)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceVertexJson {
    pub id: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Parity>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceJson {
    pub vertices: Vec<InstanceVertexJson>,
    pub edges: Vec<(Value, Value)>,
}

fn id_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl InstanceJson {
    /// Graph with string ids as labels, plus the parity labels if every vertex has one.
    pub fn to_graph(&self) -> Result<(SimpleGraph, Option<Vec<Parity>>)> {
        let ids: Vec<String> = self.vertices.iter().map(|v| id_string(&v.id)).collect();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != ids.len() {
            return Err(Error::Malformed("duplicate vertex id".into()));
        }
        let mut edges = Vec::new();
        for (a, b) in &self.edges {
            let (sa, sb) = (id_string(a), id_string(b));
            let ia = *index.get(sa.as_str()).ok_or_else(|| Error::Malformed(format!("unknown vertex {sa}")))?;
            let ib = *index.get(sb.as_str()).ok_or_else(|| Error::Malformed(format!("unknown vertex {sb}")))?;
            edges.push((ia, ib));
        }
        let g = SimpleGraph::from_edges(ids.len(), &edges)?.with_labels(ids)?;
        let labels: Option<Vec<Parity>> = self.vertices.iter().map(|v| v.label).collect();
        Ok((g, labels))
    }

    pub fn from_instance(b: &InstanceGraph) -> Self {
        InstanceJson {
            vertices: (0..b.vertex_count())
                .map(|v| InstanceVertexJson { id: Value::String(b.id(v)), label: Some(b.parity[v]) })
                .collect(),
            edges: b.graph.edges().into_iter().map(|(a, c)| (Value::String(b.id(a)), Value::String(b.id(c)))).collect(),
        }
    }
}

/// Parses and validates instance JSON; violations are folded into one error.
pub fn parse_instance(s: &str) -> Result<InstanceGraph> {
    let j: InstanceJson = serde_json::from_str(s)?;
    let (g, labels) = j.to_graph()?;
    validate_instance(g, labels).map_err(|v| Error::Malformed(format!("instance violations: {v:?}")))
}

/// Placement `psi` of the vertices in the grid plus one route per edge. Routes
/// are keyed by `(a, b)` with `a < b` and run from `psi[a]` to `psi[b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectangularRepresentation {
    pub psi: Vec<GridCoord>,
    pub routes: BTreeMap<(usize, usize), Vec<GridCoord>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepViolation {
    WrongVertexCount,
    ParityMismatch(usize),
    NotInjective(usize, usize),
    MissingRoute(usize, usize),
    ExtraRoute(usize, usize),
    RouteEndpoints(usize, usize),
    RouteNotGridPath(usize, usize),
    RouteHitsVertex((usize, usize), usize),
    RoutesIntersect((usize, usize), (usize, usize), GridCoord),
}

impl RectangularRepresentation {
    pub fn all_coords(&self) -> impl Iterator<Item = GridCoord> + '_ {
        self.psi.iter().copied().chain(self.routes.values().flatten().copied())
    }

    pub fn bounding_box(&self) -> Option<RectangularGraph> {
        RectangularGraph::bounding(self.all_coords())
    }

    /// Side length, in grid vertices, of the smallest square holding the bounding box.
    pub fn side(&self) -> i64 {
        self.bounding_box().map_or(0, |r| r.width().max(r.height()))
    }

    /// Route of edge `{a, b}` oriented from `psi[a]`.
    pub fn route(&self, a: usize, b: usize) -> Option<Vec<GridCoord>> {
        if a < b {
            self.routes.get(&(a, b)).cloned()
        } else {
            self.routes.get(&(b, a)).map(|r| r.iter().rev().copied().collect())
        }
    }

    /// Translates by an even vector so the bounding box starts at (0,0) or (1,0).
    pub fn normalized(&self) -> Self {
        let Some(bb) = self.bounding_box() else {
            return self.clone();
        };
        let lo = bb.min();
        let (mut dx, dy) = (-lo.x, -lo.y);
        if (dx + dy).rem_euclid(2) != 0 {
            dx += 1;
        }
        let shift = |p: &GridCoord| GridCoord::new(p.x + dx, p.y + dy);
        RectangularRepresentation {
            psi: self.psi.iter().map(shift).collect(),
            routes: self.routes.iter().map(|(k, r)| (*k, r.iter().map(shift).collect())).collect(),
        }
    }

    pub fn to_json(&self, b: &InstanceGraph) -> RepresentationJson {
        RepresentationJson {
            psi: (0..b.vertex_count()).map(|v| (b.id(v), [self.psi[v].x, self.psi[v].y])).collect(),
            routes: self
                .routes
                .iter()
                .map(|(&(a, c), r)| (format!("{}-{}", b.id(a), b.id(c)), r.iter().map(|p| [p.x, p.y]).collect()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub psi: BTreeMap<String, [i64; 2]>,
    pub routes: BTreeMap<String, Vec<[i64; 2]>>,
}

impl RepresentationJson {
    pub fn to_representation(&self, b: &InstanceGraph) -> Result<RectangularRepresentation> {
        let mut psi = Vec::with_capacity(b.vertex_count());
        for v in 0..b.vertex_count() {
            let p = self.psi.get(&b.id(v)).ok_or_else(|| Error::BadRepresentation(format!("no psi for {}", b.id(v))))?;
            psi.push(GridCoord::new(p[0], p[1]));
        }
        let mut routes = BTreeMap::new();
        for (key, pts) in &self.routes {
            let (sa, sb) = key
                .split_once('-')
                .ok_or_else(|| Error::BadRepresentation(format!("route key {key} is not of the form u-v")))?;
            let a = b.vertex_of(sa).ok_or_else(|| Error::BadRepresentation(format!("unknown vertex {sa}")))?;
            let c = b.vertex_of(sb).ok_or_else(|| Error::BadRepresentation(format!("unknown vertex {sb}")))?;
            let mut r: Vec<GridCoord> = pts.iter().map(|p| GridCoord::new(p[0], p[1])).collect();
            if a > c {
                r.reverse();
            }
            routes.insert((a.min(c), a.max(c)), r);
        }
        Ok(RectangularRepresentation { psi, routes })
    }
}

pub fn validate_rect_rep(b: &InstanceGraph, r: &RectangularRepresentation) -> Vec<RepViolation> {
    let mut out = Vec::new();
    let n = b.vertex_count();
    if r.psi.len() != n {
        out.push(RepViolation::WrongVertexCount);
        return out;
    }
    let mut at: HashMap<GridCoord, usize> = HashMap::new();
    for v in 0..n {
        if r.psi[v].parity() != b.parity[v] {
            out.push(RepViolation::ParityMismatch(v));
        }
        if let Some(&u) = at.get(&r.psi[v]) {
            out.push(RepViolation::NotInjective(u, v));
        } else {
            at.insert(r.psi[v], v);
        }
    }
    let edges: BTreeSet<(usize, usize)> = b.graph.edges().into_iter().collect();
    for &(a, c) in r.routes.keys() {
        if !edges.contains(&(a, c)) {
            out.push(RepViolation::ExtraRoute(a, c));
        }
    }
    let mut interior_owner: HashMap<GridCoord, (usize, usize)> = HashMap::new();
    for &(a, c) in &edges {
        let Some(route) = r.routes.get(&(a, c)) else {
            out.push(RepViolation::MissingRoute(a, c));
            continue;
        };
        if route.len() < 2 || route[0] != r.psi[a] || *route.last().unwrap() != r.psi[c] {
            out.push(RepViolation::RouteEndpoints(a, c));
            continue;
        }
        let distinct: HashSet<GridCoord> = route.iter().copied().collect();
        if distinct.len() != route.len() || route.windows(2).any(|w| w[0].l1(w[1]) != 1) {
            out.push(RepViolation::RouteNotGridPath(a, c));
        }
        for p in &route[1..route.len() - 1] {
            if let Some(&v) = at.get(p) {
                out.push(RepViolation::RouteHitsVertex((a, c), v));
            }
            match interior_owner.get(p) {
                Some(&other) if other != (a, c) => out.push(RepViolation::RoutesIntersect(other, (a, c), *p)),
                _ => {
                    interior_owner.insert(*p, (a, c));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbedOutcome {
    Found(RectangularRepresentation),
    NotFound,
    Timeout,
}

#[derive(Clone, Copy, Debug)]
pub struct EmbedBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
    /// Placement candidates tried per vertex, nearest first.
    pub candidates_per_vertex: usize,
}

impl Default for EmbedBudget {
    fn default() -> Self {
        EmbedBudget { node_limit: 2_000_000, time_limit: Duration::from_secs(30), candidates_per_vertex: 12 }
    }
}

pub fn default_side_bound(b: &InstanceGraph) -> usize {
    3 * b.vertex_count()
}

struct Embedder<'a> {
    b: &'a InstanceGraph,
    side: i64,
    order: Vec<usize>,
    psi: Vec<Option<GridCoord>>,
    used: HashMap<GridCoord, Option<usize>>,
    routes: BTreeMap<(usize, usize), Vec<GridCoord>>,
    rng: ChaCha8Rng,
    budget: EmbedBudget,
    expanded: u64,
    started: Instant,
    out_of_budget: bool,
}

impl Embedder<'_> {
    fn in_box(&self, p: GridCoord) -> bool {
        (0..self.side).contains(&p.x) && (0..self.side).contains(&p.y)
    }

    fn free(&self, p: GridCoord) -> bool {
        self.in_box(p) && !self.used.contains_key(&p)
    }

    /// Shortest route from `from` to `to` through free grid points.
    fn route(&self, from: GridCoord, to: GridCoord) -> Option<Vec<GridCoord>> {
        let mut prev: HashMap<GridCoord, GridCoord> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        prev.insert(from, from);
        while let Some(p) = queue.pop_front() {
            for q in p.neighbors() {
                if q == to {
                    let mut path = vec![to, p];
                    let mut cur = p;
                    while cur != from {
                        cur = prev[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if self.free(q) && !prev.contains_key(&q) {
                    prev.insert(q, p);
                    queue.push_back(q);
                }
            }
        }
        None
    }

    fn unrouted_degree(&self, v: usize) -> usize {
        self.b
            .graph
            .neighbors(v)
            .iter()
            .filter(|&&w| !self.routes.contains_key(&(v.min(w), v.max(w))))
            .count()
    }

    /// Every placed vertex keeps enough free grid neighbors for its pending edges.
    fn reservations_hold(&self) -> bool {
        (0..self.b.vertex_count()).all(|v| match self.psi[v] {
            None => true,
            Some(p) => {
                let pending = self.unrouted_degree(v);
                let free = p.neighbors().iter().filter(|&&q| self.free(q) || self.adjacent_pending(v, q)).count();
                free >= pending
            }
        })
    }

    /// Whether `q` holds an already placed neighbor of `v` whose edge is still unrouted.
    fn adjacent_pending(&self, v: usize, q: GridCoord) -> bool {
        matches!(self.used.get(&q), Some(Some(w)) if self.b.graph.has_edge(v, *w) && !self.routes.contains_key(&(v.min(*w), v.max(*w))))
    }

    fn candidates(&mut self, v: usize) -> Vec<GridCoord> {
        let parity = self.b.parity[v];
        let anchors: Vec<GridCoord> = self.b.graph.neighbors(v).iter().filter_map(|&w| self.psi[w]).collect();
        let center = GridCoord::new(self.side / 2, self.side / 2);
        let mut scored: Vec<(i64, u32, GridCoord)> = Vec::new();
        for y in 0..self.side {
            for x in 0..self.side {
                let p = GridCoord::new(x, y);
                if p.parity() != parity || !self.free(p) {
                    continue;
                }
                let cost = if anchors.is_empty() { p.l1(center) } else { anchors.iter().map(|a| a.l1(p)).sum() };
                scored.push((cost, self.rng.gen(), p));
            }
        }
        scored.sort();
        scored.truncate(self.budget.candidates_per_vertex);
        scored.into_iter().map(|(_, _, p)| p).collect()
    }

    fn place(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        self.expanded += 1;
        if self.expanded > self.budget.node_limit || self.started.elapsed() > self.budget.time_limit {
            self.out_of_budget = true;
            return false;
        }
        let v = self.order[depth];
        let mut placed_nbrs: Vec<usize> = self.b.graph.neighbors(v).iter().copied().filter(|&w| self.psi[w].is_some()).collect();
        placed_nbrs.shuffle(&mut self.rng);
        for p in self.candidates(v) {
            self.psi[v] = Some(p);
            self.used.insert(p, Some(v));
            let mut added: Vec<(usize, usize)> = Vec::new();
            let mut ok = true;
            for &w in &placed_nbrs {
                let Some(path) = self.route(p, self.psi[w].unwrap()) else {
                    ok = false;
                    break;
                };
                for q in &path[1..path.len() - 1] {
                    self.used.insert(*q, None);
                }
                let key = (v.min(w), v.max(w));
                let oriented = if v < w { path } else { path.into_iter().rev().collect() };
                self.routes.insert(key, oriented);
                added.push(key);
            }
            if ok && self.reservations_hold() && self.place(depth + 1) {
                return true;
            }
            for key in added.into_iter().rev() {
                let path = self.routes.remove(&key).unwrap();
                for q in &path[1..path.len() - 1] {
                    self.used.remove(q);
                }
            }
            self.used.remove(&p);
            self.psi[v] = None;
            if self.out_of_budget {
                return false;
            }
        }
        false
    }
}

/// Searches for a parity-preserving representation inside a `side_bound`
/// square. `NotFound` means the placement tree explored by this embedder
/// (nearest candidates first, shortest free routes) was exhausted.
pub fn embed_grid(b: &InstanceGraph, side_bound: usize, budget: EmbedBudget, seed: u64) -> EmbedOutcome {
    if side_bound < 2 {
        return EmbedOutcome::NotFound;
    }
    let start = (0..b.vertex_count()).max_by_key(|&v| (b.graph.degree(v), std::cmp::Reverse(v))).unwrap_or(0);
    let mut e = Embedder {
        b,
        side: side_bound as i64,
        order: b.graph.bfs_order(start),
        psi: vec![None; b.vertex_count()],
        used: HashMap::new(),
        routes: BTreeMap::new(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        budget,
        expanded: 0,
        started: Instant::now(),
        out_of_budget: false,
    };
    if e.order.len() != b.vertex_count() {
        return EmbedOutcome::NotFound;
    }
    if e.place(0) {
        let rep = RectangularRepresentation { psi: e.psi.into_iter().map(Option::unwrap).collect(), routes: e.routes };
        let rep = rep.normalized();
        debug_assert!(validate_rect_rep(b, &rep).is_empty());
        EmbedOutcome::Found(rep)
    } else if e.out_of_budget {
        EmbedOutcome::Timeout
    } else {
        EmbedOutcome::NotFound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn c4() -> InstanceGraph {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        validate_instance(g, None).unwrap()
    }

    #[test]
    fn instance_examples() {
        assert_eq!(c4().parity, vec![Parity::Even, Parity::Odd, Parity::Even, Parity::Odd]);
        let k23 = SimpleGraph::from_edges(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        let err = validate_instance(k23, None).unwrap_err();
        assert!(err.iter().any(|v| matches!(v, InstanceViolation::ParityImbalance { .. })));
        let path = SimpleGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(validate_instance(path, None).unwrap_err().contains(&InstanceViolation::HasDegreeOne(0)));
        assert!(validate_instance(SimpleGraph::new(0), None).unwrap_err().contains(&InstanceViolation::Disconnected));
    }

    #[test]
    fn unit_square_representation() {
        let b = c4();
        let psi = vec![GridCoord::new(0, 0), GridCoord::new(1, 0), GridCoord::new(1, 1), GridCoord::new(0, 1)];
        let routes: BTreeMap<_, _> =
            b.graph.edges().into_iter().map(|(a, c)| ((a, c), vec![psi[a], psi[c]])).collect();
        let mut r = RectangularRepresentation { psi, routes };
        assert!(validate_rect_rep(&b, &r).is_empty());
        r.psi[0] = GridCoord::new(1, 0);
        assert!(validate_rect_rep(&b, &r).contains(&RepViolation::ParityMismatch(0)));
    }

    #[test]
    fn crossing_routes_are_reported() {
        let b = c4();
        let psi = vec![GridCoord::new(0, 0), GridCoord::new(1, 1), GridCoord::new(2, 2), GridCoord::new(3, 1)];
        let mut routes = BTreeMap::new();
        routes.insert((0, 1), vec![psi[0], GridCoord::new(1, 0), psi[1]]);
        routes.insert((1, 2), vec![psi[1], GridCoord::new(1, 2), psi[2]]);
        routes.insert((2, 3), vec![psi[2], GridCoord::new(3, 2), psi[3]]);
        routes.insert((0, 3), vec![psi[0], GridCoord::new(1, 0), GridCoord::new(2, 0), GridCoord::new(3, 0), psi[3]]);
        let r = RectangularRepresentation { psi, routes };
        let v = validate_rect_rep(&b, &r);
        assert!(v.iter().any(|x| matches!(x, RepViolation::RoutesIntersect(..))), "{v:?}");
    }

    #[test]
    fn embedder_handles_c4_and_is_deterministic() {
        let b = c4();
        let EmbedOutcome::Found(r) = embed_grid(&b, 3, EmbedBudget::default(), 7) else { panic!() };
        assert!(validate_rect_rep(&b, &r).is_empty());
        assert!(r.side() <= 3);
        let EmbedOutcome::Found(again) = embed_grid(&b, 3, EmbedBudget::default(), 7) else { panic!() };
        assert_eq!(r, again);
    }

    #[test]
    fn json_round_trip() {
        let b = c4();
        let EmbedOutcome::Found(r) = embed_grid(&b, 12, EmbedBudget::default(), 0) else { panic!() };
        let j = serde_json::to_string(&r.to_json(&b)).unwrap();
        let back: RepresentationJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_representation(&b).unwrap(), r);
        let ij = serde_json::to_string(&InstanceJson::from_instance(&b)).unwrap();
        let parsed = parse_instance(&ij).unwrap();
        assert_eq!((parsed.graph.edges(), parsed.parity), (b.graph.edges(), b.parity));
    }
}
