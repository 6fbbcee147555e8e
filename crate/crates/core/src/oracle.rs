//! Exact Hamiltonian path and cycle search, cycle verification and minor-embedding checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::graph::SimpleGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl SearchBudget {
    pub fn new(node_limit: u64, time_limit: Duration) -> Self {
        assert!(node_limit > 0 && !time_limit.is_zero(), "budget must be positive");
        SearchBudget { node_limit, time_limit }
    }

    pub fn unlimited() -> Self {
        SearchBudget { node_limit: u64::MAX, time_limit: Duration::from_secs(u64::MAX / 4) }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(50_000_000, Duration::from_secs(60))
    }
}

/// Result of an exact search. `NotFound` is only reported after exhausting the space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    NotFound,
    Timeout,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

enum Flow {
    Continue,
    Stop,
    OutOfBudget,
}

/// Depth-first Hamiltonian path search from `start` to `end` with pruning on
/// residual degrees, forced moves, residual connectivity and required edges.
struct PathSearch<'a> {
    g: &'a SimpleGraph,
    end: usize,
    required: Vec<Vec<usize>>,
    visited: Vec<bool>,
    path: Vec<usize>,
    expanded: u64,
    budget: SearchBudget,
    started: Instant,
    mark: Vec<u32>,
    stamp: u32,
    stack: Vec<usize>,
}

impl<'a> PathSearch<'a> {
    fn new(g: &'a SimpleGraph, end: usize, required: &[(usize, usize)], budget: SearchBudget) -> Self {
        let n = g.vertex_count();
        let mut req = vec![Vec::new(); n];
        for &(a, b) in required {
            req[a].push(b);
            req[b].push(a);
        }
        PathSearch {
            g,
            end,
            required: req,
            visited: vec![false; n],
            path: Vec::with_capacity(n),
            expanded: 0,
            budget,
            started: Instant::now(),
            mark: vec![0; n],
            stamp: 0,
            stack: Vec::new(),
        }
    }

    fn available(&self, w: usize, head: usize) -> usize {
        self.g.neighbors(w).iter().filter(|&&x| !self.visited[x] || x == head).count()
    }

    /// Returns the candidate moves from `head`, or `None` if the state is dead.
    fn moves(&mut self, head: usize) -> Option<Vec<usize>> {
        let n = self.g.vertex_count();
        let remaining = n - self.path.len();
        // required edges out of the head
        let prev = if self.path.len() >= 2 { Some(self.path[self.path.len() - 2]) } else { None };
        let pending: Vec<usize> =
            self.required[head].iter().copied().filter(|&x| Some(x) != prev && !self.visited[x]).collect();
        if pending.len() > 1 {
            return None;
        }
        // residual degree conditions
        let mut forced: Option<usize> = pending.first().copied();
        for w in 0..n {
            if self.visited[w] {
                continue;
            }
            let avail = self.available(w, head);
            if w == self.end {
                if avail == 0 {
                    return None;
                }
                if remaining > 1 && avail == 1 && self.g.has_edge(w, head) {
                    return None;
                }
                continue;
            }
            if avail < 2 {
                return None;
            }
            if avail == 2 && self.g.has_edge(w, head) {
                match forced {
                    Some(f) if f != w => return None,
                    _ => forced = Some(w),
                }
            }
        }
        // residual connectivity from the head through unvisited vertices
        self.stamp += 1;
        let stamp = self.stamp;
        self.stack.clear();
        self.stack.push(head);
        self.mark[head] = stamp;
        let mut reached = 0;
        while let Some(v) = self.stack.pop() {
            for &w in self.g.neighbors(v) {
                if !self.visited[w] && self.mark[w] != stamp {
                    self.mark[w] = stamp;
                    reached += 1;
                    self.stack.push(w);
                }
            }
        }
        if reached != remaining {
            return None;
        }
        let mut out: Vec<usize> = match forced {
            Some(f) => {
                if self.visited[f] || !self.g.has_edge(head, f) {
                    return None;
                }
                vec![f]
            }
            None => self.g.neighbors(head).iter().copied().filter(|&w| !self.visited[w]).collect(),
        };
        // fewest onward options first; the end vertex last unless it completes the path
        out.sort_by_key(|&w| (w == self.end, self.available(w, head), w));
        Some(out)
    }

    fn legal_step(&self, head: usize, x: usize) -> bool {
        self.required[x].iter().all(|&y| !self.visited[y] || y == head)
    }

    fn run(&mut self, start: usize, on_path: &mut dyn FnMut(&[usize]) -> bool) -> Flow {
        self.visited[start] = true;
        self.path.push(start);
        let flow = self.descend(on_path);
        self.path.pop();
        self.visited[start] = false;
        flow
    }

    fn descend(&mut self, on_path: &mut dyn FnMut(&[usize]) -> bool) -> Flow {
        let head = *self.path.last().unwrap();
        if self.path.len() == self.g.vertex_count() {
            if head == self.end && on_path(&self.path) {
                return Flow::Stop;
            }
            return Flow::Continue;
        }
        if head == self.end {
            return Flow::Continue;
        }
        self.expanded += 1;
        if self.expanded > self.budget.node_limit {
            return Flow::OutOfBudget;
        }
        if self.expanded % 1024 == 0 && self.started.elapsed() > self.budget.time_limit {
            return Flow::OutOfBudget;
        }
        let Some(moves) = self.moves(head) else {
            return Flow::Continue;
        };
        for x in moves {
            if !self.legal_step(head, x) {
                continue;
            }
            self.visited[x] = true;
            self.path.push(x);
            let flow = self.descend(on_path);
            self.path.pop();
            self.visited[x] = false;
            match flow {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }
}

/// Class-count obstruction for Hamiltonian paths in bipartite graphs.
fn bipartite_path_possible(g: &SimpleGraph, start: usize, end: usize) -> bool {
    let Some(color) = g.two_coloring() else {
        return true;
    };
    if !g.is_connected() {
        return true;
    }
    let ones = color.iter().filter(|&&c| c).count();
    let zeros = color.len() - ones;
    if color[start] != color[end] {
        ones == zeros
    } else {
        let (same, other) = if color[start] { (ones, zeros) } else { (zeros, ones) };
        same == other + 1
    }
}

/// Hamiltonian path from `start` to `end` that uses every edge in `required`.
pub fn find_hamiltonian_path_with(
    g: &SimpleGraph,
    start: usize,
    end: usize,
    required: &[(usize, usize)],
    budget: SearchBudget,
) -> SearchOutcome<Vec<usize>> {
    let n = g.vertex_count();
    if start >= n || end >= n {
        return SearchOutcome::NotFound;
    }
    if n == 1 {
        return if start == end && required.is_empty() {
            SearchOutcome::Found(vec![start])
        } else {
            SearchOutcome::NotFound
        };
    }
    if start == end || !g.is_connected() || !bipartite_path_possible(g, start, end) {
        return SearchOutcome::NotFound;
    }
    if required.iter().any(|&(a, b)| !g.has_edge(a, b)) {
        return SearchOutcome::NotFound;
    }
    let mut search = PathSearch::new(g, end, required, budget);
    let mut found = None;
    let flow = search.run(start, &mut |p| {
        found = Some(p.to_vec());
        true
    });
    match (found, flow) {
        (Some(p), _) => SearchOutcome::Found(p),
        (None, Flow::OutOfBudget) => SearchOutcome::Timeout,
        _ => SearchOutcome::NotFound,
    }
}

pub fn find_hamiltonian_path(g: &SimpleGraph, start: usize, end: usize, budget: SearchBudget) -> SearchOutcome<Vec<usize>> {
    find_hamiltonian_path_with(g, start, end, &[], budget)
}

/// Structural reasons a graph cannot carry a Hamiltonian cycle, checked before searching.
pub fn cycle_obstruction(g: &SimpleGraph) -> Option<String> {
    let n = g.vertex_count();
    if n < 3 {
        return Some(format!("only {n} vertices"));
    }
    if let Some(v) = (0..n).find(|&v| g.degree(v) < 2) {
        return Some(format!("vertex {} has degree {}", g.label(v), g.degree(v)));
    }
    if !g.is_connected() {
        return Some("disconnected".into());
    }
    if let Some(&(a, b)) = g.bridges().first() {
        return Some(format!("cut edge {}-{}", g.label(a), g.label(b)));
    }
    if let Some(&v) = g.articulation_points().first() {
        return Some(format!("cut vertex {}", g.label(v)));
    }
    if let Some(color) = g.two_coloring() {
        let ones = color.iter().filter(|&&c| c).count();
        if 2 * ones != n {
            return Some(format!("bipartition sides {} and {}", ones, n - ones));
        }
    }
    None
}

/// Calls `visit` with Hamiltonian cycles of `g` (each starting at the
/// lowest-degree vertex, both directions may appear) until it returns `true`.
fn search_cycles(g: &SimpleGraph, budget: SearchBudget, visit: &mut dyn FnMut(&[usize]) -> bool) -> Option<Flow> {
    if cycle_obstruction(g).is_some() {
        return None;
    }
    let n = g.vertex_count();
    let start = (0..n).min_by_key(|&v| (g.degree(v), v)).unwrap();
    let started = Instant::now();
    let mut spent = 0u64;
    for &end in g.neighbors(start) {
        let remaining = SearchBudget {
            node_limit: budget.node_limit.saturating_sub(spent).max(1),
            time_limit: budget.time_limit.saturating_sub(started.elapsed()),
        };
        if remaining.time_limit.is_zero() {
            return Some(Flow::OutOfBudget);
        }
        let mut search = PathSearch::new(g, end, &[], remaining);
        let flow = search.run(start, visit);
        spent += search.expanded;
        match flow {
            Flow::Continue => {}
            other => return Some(other),
        }
    }
    Some(Flow::Continue)
}

pub fn find_hamiltonian_cycle(g: &SimpleGraph, budget: SearchBudget) -> SearchOutcome<Vec<usize>> {
    let mut found = None;
    let flow = search_cycles(g, budget, &mut |p| {
        found = Some(p.to_vec());
        true
    });
    match (found, flow) {
        (Some(c), _) => SearchOutcome::Found(c),
        (None, Some(Flow::OutOfBudget)) => SearchOutcome::Timeout,
        _ => SearchOutcome::NotFound,
    }
}

/// Up to `limit` distinct Hamiltonian cycles in canonical form, plus whether
/// the search ran to completion (no budget exhaustion, limit not hit).
pub fn enumerate_hamiltonian_cycles(g: &SimpleGraph, limit: usize, budget: SearchBudget) -> (Vec<Vec<usize>>, bool) {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let flow = search_cycles(g, budget, &mut |p| {
        let c = canonical_cycle(p);
        if seen.insert(c.clone()) {
            out.push(c);
        }
        out.len() >= limit
    });
    let complete = matches!(flow, None | Some(Flow::Continue));
    (out, complete)
}

pub fn verify_hamiltonian_cycle(g: &SimpleGraph, seq: &[usize]) -> bool {
    let n = g.vertex_count();
    if n < 3 || seq.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in seq {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..n).all(|i| g.has_edge(seq[i], seq[(i + 1) % n]))
}

pub fn verify_hamiltonian_path(g: &SimpleGraph, seq: &[usize]) -> bool {
    let n = g.vertex_count();
    if seq.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in seq {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    seq.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

/// Lexicographically smallest rotation or reflection of a cyclic sequence.
pub fn canonical_cycle<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    let n = seq.len();
    let mut best: Option<Vec<T>> = None;
    let rev: Vec<T> = seq.iter().rev().cloned().collect();
    for base in [seq.to_vec(), rev] {
        for r in 0..n {
            let cand: Vec<T> = base[r..].iter().chain(&base[..r]).cloned().collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Logical vertex of `G` to a set of vertices of `H`.
pub type EmbeddingMap = BTreeMap<usize, BTreeSet<usize>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbeddingViolation {
    MissingImage(usize),
    EmptyImage(usize),
    InvalidVertex(usize, usize),
    Overlap(usize, usize),
    Disconnected(usize),
    MissingEdge(usize, usize),
}

pub fn verify_minor_embedding(guest: &SimpleGraph, host: &SimpleGraph, phi: &EmbeddingMap) -> Vec<EmbeddingViolation> {
    let mut out = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; host.vertex_count()];
    for v in 0..guest.vertex_count() {
        let Some(image) = phi.get(&v) else {
            out.push(EmbeddingViolation::MissingImage(v));
            continue;
        };
        if image.is_empty() {
            out.push(EmbeddingViolation::EmptyImage(v));
            continue;
        }
        for &h in image {
            if h >= host.vertex_count() {
                out.push(EmbeddingViolation::InvalidVertex(v, h));
                continue;
            }
            match owner[h] {
                Some(o) => out.push(EmbeddingViolation::Overlap(o, v)),
                None => owner[h] = Some(v),
            }
        }
        let members: Vec<usize> = image.iter().copied().filter(|&h| h < host.vertex_count()).collect();
        if !members.is_empty() && !host.induced_subgraph(&members).is_connected() {
            out.push(EmbeddingViolation::Disconnected(v));
        }
    }
    for (a, b) in guest.edges() {
        let (Some(ia), Some(ib)) = (phi.get(&a), phi.get(&b)) else {
            continue;
        };
        let linked = ia.iter().any(|&x| x < host.vertex_count() && host.neighbors(x).iter().any(|y| ib.contains(y)));
        if !linked {
            out.push(EmbeddingViolation::MissingEdge(a, b));
        }
    }
    out
}

/// Whether the cycle graph on `|V(H)|` vertices is a minor of `H`, decided
/// through Hamiltonicity; returns the singleton embedding on success.
pub fn minor_test_via_cycle(host: &SimpleGraph, budget: SearchBudget) -> SearchOutcome<EmbeddingMap> {
    match find_hamiltonian_cycle(host, budget) {
        SearchOutcome::Found(c) => SearchOutcome::Found(c.iter().enumerate().map(|(i, &h)| (i, BTreeSet::from([h]))).collect()),
        SearchOutcome::NotFound => SearchOutcome::NotFound,
        SearchOutcome::Timeout => SearchOutcome::Timeout,
    }
}

pub fn cycle_graph(n: usize) -> SimpleGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    SimpleGraph::from_edges(n, &edges).expect("cycle edges are simple")
}

/// Every Hamiltonian cycle by brute force over permutations; for tiny graphs only.
pub fn naive_hamiltonian_cycles(g: &SimpleGraph) -> HashSet<Vec<usize>> {
    let n = g.vertex_count();
    let mut out = HashSet::new();
    if n < 3 {
        return out;
    }
    let mut rest: Vec<usize> = (1..n).collect();
    permute(&mut rest, 0, &mut |p| {
        let seq: Vec<usize> = std::iter::once(0).chain(p.iter().copied()).collect();
        if verify_hamiltonian_cycle(g, &seq) {
            out.insert(canonical_cycle(&seq));
        }
    });
    out
}

fn permute(items: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_bipartite(a: usize, b: usize) -> SimpleGraph {
        let mut edges = Vec::new();
        for i in 0..a {
            for j in 0..b {
                edges.push((i, a + j));
            }
        }
        SimpleGraph::from_edges(a + b, &edges).unwrap()
    }

    fn two_squares_with_bridge() -> SimpleGraph {
        let mut edges: Vec<_> = (0..4).map(|i| (i, (i + 1) % 4)).collect();
        edges.extend((0..4).map(|i| (4 + i, 4 + (i + 1) % 4)));
        edges.push((0, 4));
        SimpleGraph::from_edges(8, &edges).unwrap()
    }

    #[test]
    fn solver_examples() {
        let b = SearchBudget::default();
        let c = find_hamiltonian_cycle(&cycle_graph(4), b).found().unwrap();
        assert!(verify_hamiltonian_cycle(&cycle_graph(4), &c));
        assert_eq!(find_hamiltonian_cycle(&two_squares_with_bridge(), b), SearchOutcome::NotFound);
        let k44 = complete_bipartite(4, 4);
        assert!(verify_hamiltonian_cycle(&k44, &find_hamiltonian_cycle(&k44, b).found().unwrap()));
    }

    #[test]
    fn enumeration_matches_brute_force_on_k33_and_k44() {
        for g in [complete_bipartite(3, 3), complete_bipartite(4, 4)] {
            let (found, complete) = enumerate_hamiltonian_cycles(&g, usize::MAX, SearchBudget::default());
            assert!(complete);
            let naive = naive_hamiltonian_cycles(&g);
            assert_eq!(found.into_iter().collect::<HashSet<_>>(), naive);
        }
        // K_{3,3} has 6 Hamiltonian cycles, K_{4,4} has 72
        assert_eq!(naive_hamiltonian_cycles(&complete_bipartite(3, 3)).len(), 6);
        assert_eq!(naive_hamiltonian_cycles(&complete_bipartite(4, 4)).len(), 72);
    }

    #[test]
    fn tiny_budget_times_out_instead_of_guessing() {
        let g = complete_bipartite(4, 4);
        let tiny = SearchBudget::new(1, Duration::from_secs(5));
        assert_eq!(find_hamiltonian_path(&g, 0, 4, tiny), SearchOutcome::Timeout);
    }

    #[test]
    fn required_edges_are_used() {
        let g = complete_bipartite(3, 3);
        let p = find_hamiltonian_path_with(&g, 0, 3, &[(1, 5)], SearchBudget::default()).found().unwrap();
        assert!(verify_hamiltonian_path(&g, &p));
        assert!(p.windows(2).any(|w| (w[0], w[1]) == (1, 5) || (w[0], w[1]) == (5, 1)));
    }

    #[test]
    fn verifier_rejects_repeats() {
        let g = cycle_graph(4);
        assert!(verify_hamiltonian_cycle(&g, &[0, 1, 2, 3]));
        assert!(!verify_hamiltonian_cycle(&g, &[0, 1, 2, 1]));
        assert!(!verify_hamiltonian_cycle(&g, &[0, 2, 1, 3]));
    }

    #[test]
    fn canonical_form_ignores_rotation_and_direction() {
        assert_eq!(canonical_cycle(&[2, 0, 1, 3]), vec![0, 1, 3, 2]);
        assert_eq!(canonical_cycle(&[3, 1, 0, 2]), vec![0, 1, 3, 2]);
    }

    #[test]
    fn embedding_checks() {
        let g = cycle_graph(5);
        let id: EmbeddingMap = (0..5).map(|v| (v, BTreeSet::from([v]))).collect();
        assert!(verify_minor_embedding(&g, &g, &id).is_empty());
        let host = cycle_graph(6);
        let mut chain = id.clone();
        chain.insert(0, BTreeSet::from([0, 2]));
        let v = verify_minor_embedding(&g, &host, &chain);
        assert!(v.contains(&EmbeddingViolation::Disconnected(0)));
        assert!(v.contains(&EmbeddingViolation::Overlap(0, 2)));
    }

    #[test]
    fn minor_via_cycle() {
        let c6 = cycle_graph(6);
        let phi = minor_test_via_cycle(&c6, SearchBudget::default()).found().unwrap();
        assert!(verify_minor_embedding(&cycle_graph(6), &c6, &phi).is_empty());
        let star = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(minor_test_via_cycle(&star, SearchBudget::default()), SearchOutcome::NotFound);
    }
}
