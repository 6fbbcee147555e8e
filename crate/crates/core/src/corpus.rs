//! Small test instances: every connected planar balanced bipartite graph with
//! degrees 2 and 3 on at most 8 vertices, up to isomorphism, plus fixtures.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::SimpleGraph;
use crate::instance::{validate_instance, InstanceGraph};

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub instance: InstanceGraph,
}

fn entry(name: &str, n: usize, edges: &[(usize, usize)]) -> CorpusEntry {
    let g = SimpleGraph::from_edges(n, edges).expect("fixture edges are simple");
    let instance = validate_instance(g, None).expect("fixture is a valid instance");
    CorpusEntry { name: name.to_string(), instance }
}

fn cycle_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

/// The named fixtures: C4, C6, C8 and two squares joined by a single edge.
pub fn fixtures() -> Vec<CorpusEntry> {
    let mut bridge = cycle_edges(4);
    bridge.extend(cycle_edges(4).into_iter().map(|(a, b)| (a + 4, b + 4)));
    // vertex 0 is even, vertex 5 is odd in the second square
    bridge.push((0, 5));
    vec![
        entry("c4", 4, &cycle_edges(4)),
        entry("c6", 6, &cycle_edges(6)),
        entry("c8", 8, &cycle_edges(8)),
        entry("bridge", 8, &bridge),
    ]
}

/// Bipartite graph with rows as even vertices `0..k` and columns as odd
/// vertices `k..2k`; bit `i * k + j` joins row `i` and column `j`.
fn from_matrix(k: usize, mask: u32) -> SimpleGraph {
    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if mask >> (i * k + j) & 1 == 1 {
                edges.push((i, k + j));
            }
        }
    }
    SimpleGraph::from_edges(2 * k, &edges).expect("matrix edges are simple")
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest mask over row and column permutations and transposition.
fn canonical_mask(k: usize, mask: u32, perms: &[Vec<usize>]) -> u32 {
    let bit = |m: u32, i: usize, j: usize| m >> (i * k + j) & 1;
    let mut best = u32::MAX;
    for transpose in [false, true] {
        for rp in perms {
            for cp in perms {
                let mut m = 0;
                for i in 0..k {
                    for j in 0..k {
                        let b = if transpose { bit(mask, cp[j], rp[i]) } else { bit(mask, rp[i], cp[j]) };
                        m |= b << (i * k + j);
                    }
                }
                best = best.min(m);
            }
        }
    }
    best
}

/// Whether `g` contains a subdivision of K3,3, by trying every edge subset.
/// For maximum degree 3 this decides non-planarity, since K5 needs degree 4.
pub fn contains_k33_subdivision(g: &SimpleGraph) -> bool {
    let edges = g.edges();
    if edges.len() > 20 {
        panic!("brute-force K3,3 test is meant for tiny graphs");
    }
    (0u32..1 << edges.len())
        .filter(|s| s.count_ones() >= 9)
        .any(|s| is_k33_subdivision(g.vertex_count(), &edges, s))
}

fn is_k33_subdivision(n: usize, edges: &[(usize, usize)], subset: u32) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        if subset >> i & 1 == 1 {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    if adj.iter().any(|a| a.len() == 1 || a.len() > 3) {
        return false;
    }
    let branch: Vec<usize> = (0..n).filter(|&v| adj[v].len() == 3).collect();
    if branch.len() != 6 {
        return false;
    }
    let mut seen_inner = BTreeSet::new();
    let mut traced: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &s in &branch {
        for &first in &adj[s] {
            let (mut prev, mut cur) = (s, first);
            while adj[cur].len() == 2 {
                seen_inner.insert(cur);
                let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
                prev = cur;
                cur = next;
            }
            if cur == s {
                return false;
            }
            *traced.entry((s.min(cur), s.max(cur))).or_default() += 1;
        }
    }
    let inner = (0..n).filter(|&v| adj[v].len() == 2).count();
    // each branch path is traced once from either end
    if traced.len() != 9 || traced.values().any(|&c| c != 2) || seen_inner.len() != inner {
        return false;
    }
    let pairs: Vec<(usize, usize)> = traced.into_keys().collect();
    let h = SimpleGraph::from_edges(n, &pairs).expect("branch pairs are simple");
    let Some(color) = h.two_coloring() else {
        return false;
    };
    branch.iter().filter(|&&v| color[v]).count() == 3
}

/// All connected, planar, balanced bipartite graphs with degrees 2 and 3 on
/// at most `max_vertices` vertices (at most 8), one per isomorphism class.
pub fn generated(max_vertices: usize) -> Vec<CorpusEntry> {
    assert!(max_vertices <= 8, "the generator enumerates 4x4 matrices at most");
    let mut out = Vec::new();
    for k in 2..=max_vertices / 2 {
        let perms = permutations(k);
        for mask in 0u32..1 << (k * k) {
            let g = from_matrix(k, mask);
            if (0..2 * k).any(|v| !(2..=3).contains(&g.degree(v))) || !g.is_connected() {
                continue;
            }
            let canon = canonical_mask(k, mask, &perms);
            // classes are first met at their smallest mask
            if canon != mask {
                continue;
            }
            if contains_k33_subdivision(&g) {
                continue;
            }
            let instance = validate_instance(g, None).expect("generated graph is in the class");
            out.push(CorpusEntry { name: format!("g{}-{:x}", 2 * k, mask), instance });
        }
    }
    out
}

/// Generated graphs followed by the named fixtures.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut out = generated(8);
    out.extend(fixtures());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_hamiltonian_cycles;

    #[test]
    fn k33_is_detected_and_cube_is_planar() {
        let k33 = from_matrix(3, 0b111_111_111);
        assert!(contains_k33_subdivision(&k33));
        let cube = SimpleGraph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
        )
        .unwrap();
        assert!(!contains_k33_subdivision(&cube));
    }

    #[test]
    fn corpus_members_are_valid_and_distinct() {
        let c = generated(8);
        assert!(c.iter().any(|e| e.instance.vertex_count() == 4));
        assert!(c.iter().any(|e| e.instance.vertex_count() == 8));
        for e in &c {
            assert!(!contains_k33_subdivision(&e.instance.graph), "{}", e.name);
        }
        let names: BTreeSet<&String> = c.iter().map(|e| &e.name).collect();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn bridge_fixture_has_no_hamiltonian_cycle() {
        let f = fixtures();
        let bridge = &f.iter().find(|e| e.name == "bridge").unwrap().instance;
        assert!(naive_hamiltonian_cycles(&bridge.graph).is_empty());
    }
}
