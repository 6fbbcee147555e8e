//! Lifting a Hamiltonian cycle of B to C(B) and extracting one back.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chimera::ChimeraNode;
use crate::compose::{BrokenChimera, Element};
use crate::error::{Error, Result};
use crate::gadget::{GadgetCase, VertexGadget};
use crate::graph::SimpleGraph;
use crate::oracle::{canonical_cycle, verify_hamiltonian_cycle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Designation {
    Cross,
    Return,
}

/// How a cycle of B is realized: edges on the cycle are crossed, the others
/// are looped into from their even endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraversalPlan {
    pub cycle: Vec<usize>,
    pub edges: BTreeMap<(usize, usize), Designation>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl TraversalPlan {
    pub fn new(g: &SimpleGraph, cycle: &[usize]) -> Result<Self> {
        if !verify_hamiltonian_cycle(g, cycle) {
            return Err(Error::PlanInfeasible("input is not a Hamiltonian cycle of B".into()));
        }
        let n = cycle.len();
        let on: BTreeSet<(usize, usize)> = (0..n).map(|i| key(cycle[i], cycle[(i + 1) % n])).collect();
        let edges = g
            .edges()
            .into_iter()
            .map(|(a, b)| ((a, b), if on.contains(&(a, b)) { Designation::Cross } else { Designation::Return }))
            .collect();
        Ok(TraversalPlan { cycle: cycle.to_vec(), edges })
    }

    pub fn return_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().filter(|(_, d)| **d == Designation::Return).map(|(e, _)| *e).collect()
    }
}

/// Stored witness for one of the six gadget cases.
pub fn vertex_path(gadget: &VertexGadget, case: GadgetCase) -> Vec<ChimeraNode> {
    gadget.witnesses[&case].clone()
}

/// Gadget traversal of `v` from the port toward `from` to the port toward
/// `to`, detouring through the return loop of `extra` when given.
fn gadget_segment(c: &BrokenChimera, v: usize, from: usize, to: usize, extra: Option<usize>) -> Result<Vec<ChimeraNode>> {
    let place = &c.gadgets[v];
    let port = |w: usize| {
        place.port_of(w).ok_or_else(|| Error::PlanInfeasible(format!("vertex {v} has no port toward {w}")))
    };
    let (x, y) = (port(from)?, port(to)?);
    let local = c.gadget.path_between(x, y, extra.is_some())?;
    let path: Vec<ChimeraNode> = local.iter().map(|n| place.place(n)).collect();
    let Some(z) = extra else {
        return Ok(path);
    };
    let p = &c.gadget.ports[port(z)?];
    let (entry, partner) = (place.place(&p.entry), place.place(&p.partner));
    let t = &c.tentacles[&key(v, z)];
    let mut loop_path = t.return_path()?;
    let i = path
        .windows(2)
        .position(|w| (w[0] == entry && w[1] == partner) || (w[0] == partner && w[1] == entry))
        .ok_or_else(|| Error::PlanInfeasible(format!("ported witness at vertex {v} skips its loop")))?;
    if path[i] == partner {
        loop_path.reverse();
    }
    let mut out = path[..=i].to_vec();
    out.extend(loop_path);
    out.extend_from_slice(&path[i + 1..]);
    Ok(out)
}

/// Builds the Hamiltonian cycle of C(B) induced by the cycle `h` of B.
pub fn lift_cycle(b: &SimpleGraph, h: &[usize], c: &BrokenChimera) -> Result<Vec<ChimeraNode>> {
    let plan = TraversalPlan::new(b, h)?;
    let n = h.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (u, v, w) = (h[(i + n - 1) % n], h[i], h[(i + 1) % n]);
        let extra = if c.is_even(v) {
            b.neighbors(v).iter().copied().find(|&z| z != u && z != w)
        } else {
            None
        };
        out.extend(gadget_segment(c, v, u, w, extra)?);
        let mut cross = c.tentacles[&key(v, w)].cross_path()?;
        if c.is_even(v) {
            cross.reverse();
        }
        out.extend(cross);
    }
    debug_assert_eq!(plan.return_edges().len(), b.edge_count() - n);
    let m = c.materialize();
    let idx = m.indices(&out).ok_or_else(|| Error::PlanInfeasible("lifted cycle leaves the composed graph".into()))?;
    if !verify_hamiltonian_cycle(&m.graph, &idx) {
        return Err(Error::PlanInfeasible("lifted sequence is not a Hamiltonian cycle".into()));
    }
    Ok(out)
}

fn verified_indices(c: &BrokenChimera, cycle: &[ChimeraNode]) -> Result<()> {
    let m = c.materialize();
    match m.indices(cycle) {
        Some(idx) if verify_hamiltonian_cycle(&m.graph, &idx) => Ok(()),
        _ => Err(Error::InconsistentUsage("not a Hamiltonian cycle of C(B)".into())),
    }
}

/// Use of each tentacle in a Hamiltonian cycle of C(B), read off its bridges.
pub fn classify_tentacles(c: &BrokenChimera, cycle: &[ChimeraNode]) -> Result<BTreeMap<(usize, usize), Designation>> {
    let n = cycle.len();
    let used: BTreeSet<(ChimeraNode, ChimeraNode)> = (0..n)
        .flat_map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % n]);
            [(a, b), (b, a)]
        })
        .collect();
    let mut out = BTreeMap::new();
    for (&e, br) in &c.bridges {
        let even = br.even.iter().filter(|p| used.contains(p)).count();
        let odd = br.odd.iter().filter(|p| used.contains(p)).count();
        let d = match (even, odd) {
            (1, 1) => Designation::Cross,
            (2, 0) => Designation::Return,
            _ => {
                return Err(Error::InconsistentUsage(format!("tentacle {e:?} uses {even} even and {odd} odd bridges")))
            }
        };
        out.insert(e, d);
    }
    Ok(out)
}

fn cycle_from_edges(b: &SimpleGraph, edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let n = b.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for &(a, c) in edges {
        adj[a].push(c);
        adj[c].push(a);
    }
    if n == 0 || adj.iter().any(|a| a.len() != 2) {
        return Err(Error::InconsistentUsage("crossed tentacles do not give every vertex degree 2".into()));
    }
    let mut cycle = vec![0];
    let mut prev = usize::MAX;
    let mut cur = 0;
    loop {
        let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
        if next == 0 {
            break;
        }
        if cycle.len() >= n {
            return Err(Error::InconsistentUsage("crossed tentacles do not close up".into()));
        }
        cycle.push(next);
        prev = cur;
        cur = next;
    }
    if cycle.len() != n || !verify_hamiltonian_cycle(b, &cycle) {
        return Err(Error::InconsistentUsage("crossed tentacles form several cycles".into()));
    }
    Ok(canonical_cycle(&cycle))
}

/// Hamiltonian cycle of B from one of C(B): the crossed tentacles are its edges.
pub fn extract_cycle(b: &SimpleGraph, c: &BrokenChimera, cycle: &[ChimeraNode]) -> Result<Vec<usize>> {
    verified_indices(c, cycle)?;
    let cls = classify_tentacles(c, cycle)?;
    let crossed: Vec<(usize, usize)> = cls.iter().filter(|(_, d)| **d == Designation::Cross).map(|(e, _)| *e).collect();
    cycle_from_edges(b, &crossed)
}

/// Contracts the path `p` into its first vertex, merging parallel edges and
/// dropping loops. Vertices keep their relative order; the returned map sends
/// old indices to new ones. Contracting the edges of `p` one by one gives the
/// same graph.
pub fn contract_along(g: &SimpleGraph, cycle: &[usize], p: &[usize]) -> Result<(SimpleGraph, Vec<usize>, Vec<usize>)> {
    let n = g.vertex_count();
    if n <= 3 {
        return Err(Error::TriangleCollapse(n));
    }
    if p.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
        return Err(Error::Malformed("contraction path is not a path of the graph".into()));
    }
    let merged: BTreeSet<usize> = p.iter().skip(1).copied().collect();
    let mut map = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        if !merged.contains(&v) {
            map[v] = next;
            next += 1;
        }
    }
    for &v in &merged {
        map[v] = map[p[0]];
    }
    let mut edges = BTreeSet::new();
    for (a, b) in g.edges() {
        let (x, y) = (map[a], map[b]);
        if x != y {
            edges.insert(key(x, y));
        }
    }
    let h = SimpleGraph::from_edges(next, &edges.into_iter().collect::<Vec<_>>())?;
    let mut cyc: Vec<usize> = Vec::new();
    for &v in cycle {
        let m = map[v];
        if cyc.last() != Some(&m) {
            cyc.push(m);
        }
    }
    while cyc.len() > 1 && cyc.first() == cyc.last() {
        cyc.pop();
    }
    Ok((h, cyc, map))
}

/// Independent extraction: contracts each gadget together with its return
/// loops and the crossings that leave it, then reads the cycle of B off the
/// contracted graph.
pub fn extract_by_contraction(b: &SimpleGraph, c: &BrokenChimera, cycle: &[ChimeraNode]) -> Result<Vec<usize>> {
    verified_indices(c, cycle)?;
    let m = c.materialize();
    let idx = m.indices(cycle).expect("verified above");
    let owner: Vec<Element> = cycle.iter().map(|n| c.ownership[n]).collect();
    // rotate so the cycle starts at the first node of a gadget visit
    let n = cycle.len();
    let start = (0..n)
        .find(|&i| matches!(owner[i], Element::Vertex(_)) && owner[(i + n - 1) % n] != owner[i])
        .ok_or_else(|| Error::InconsistentUsage("cycle never enters a gadget".into()))?;
    let seq: Vec<usize> = (0..n).map(|i| (start + i) % n).collect();
    // group: a gadget, the tentacles entered from it and left back into it, and
    // the crossing that follows, up to the next different gadget
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for &i in &seq {
        if let Element::Vertex(v) = owner[i] {
            if groups.last().map(|g| g.0) != Some(v) {
                groups.push((v, Vec::new()));
            }
        }
        groups.last_mut().expect("starts at a gadget").1.push(idx[i]);
    }
    let order: Vec<usize> = groups.iter().map(|g| g.0).collect();
    if order.iter().collect::<BTreeSet<_>>().len() != order.len() || order.len() != b.vertex_count() {
        return Err(Error::InconsistentUsage("a gadget is visited more than once".into()));
    }
    let mut g = m.graph.clone();
    let mut cyc = idx.clone();
    let mut label: Vec<usize> = (0..g.vertex_count()).collect();
    for (_, group) in &groups {
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        for (new_i, &old) in label.iter().enumerate() {
            pos.insert(old, new_i);
        }
        let path: Vec<usize> = group.iter().map(|o| pos[o]).collect();
        if path.len() < 2 {
            continue;
        }
        let (h, c2, map) = contract_along(&g, &cyc, &path)?;
        let mut new_label = vec![0; h.vertex_count()];
        for (old_i, &new_i) in map.iter().enumerate() {
            if !path[1..].contains(&old_i) {
                new_label[new_i] = label[old_i];
            }
        }
        g = h;
        cyc = c2;
        label = new_label;
    }
    // each surviving vertex is the first node of a group
    let first: BTreeMap<usize, usize> = groups.iter().map(|(v, grp)| (grp[0], *v)).collect();
    let vertices: Vec<usize> = cyc.iter().map(|&i| first[&label[i]]).collect();
    for (a, x) in (0..g.vertex_count()).map(|i| (i, first[&label[i]])) {
        for &nb in g.neighbors(a) {
            if !b.has_edge(x, first[&label[nb]]) {
                return Err(Error::InconsistentUsage("contracted graph is not B".into()));
            }
        }
    }
    if !verify_hamiltonian_cycle(b, &vertices) {
        return Err(Error::InconsistentUsage("contracted cycle is not Hamiltonian in B".into()));
    }
    Ok(canonical_cycle(&vertices))
}
