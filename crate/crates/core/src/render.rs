//! Deterministic SVG, ASCII and DOT renderings of Chimera graphs.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::chimera::{ChimeraNode, ChimeraTopology, Orientation};
use crate::compose::Element;

const CELL: i64 = 72;
const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Copy, Debug, Default)]
pub struct SvgOptions<'a> {
    /// Closed node sequence drawn on top of the graph.
    pub cycle: Option<&'a [ChimeraNode]>,
    /// Colors overlay segments by the element owning their first node.
    pub ownership: Option<&'a BTreeMap<ChimeraNode, Element>>,
}

fn position(topo: &ChimeraTopology, n: &ChimeraNode) -> (i64, i64) {
    let x0 = n.col * CELL;
    let y0 = (topo.rows as i64 - 1 - n.row) * CELL;
    let step = (CELL - 36) / (topo.depth.max(2) as i64 - 1);
    let k = n.index as i64;
    match n.orientation {
        // horizontal nodes sit in a column, vertical nodes in a row
        Orientation::Horizontal => (x0 + 12, y0 + 12 + step * k),
        Orientation::Vertical => (x0 + 24 + step * k, y0 + CELL - 12),
    }
}

fn all_nodes(topo: &ChimeraTopology) -> Vec<ChimeraNode> {
    let mut out = Vec::new();
    for r in 0..topo.rows as i64 {
        for c in 0..topo.cols as i64 {
            for o in [Orientation::Horizontal, Orientation::Vertical] {
                for k in 0..topo.depth {
                    out.push(ChimeraNode::new(c, r, o, k));
                }
            }
        }
    }
    out
}

pub fn render_svg(topo: &ChimeraTopology, opts: SvgOptions<'_>) -> String {
    let (w, h) = (topo.cols as i64 * CELL, topo.rows as i64 * CELL);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    let m = topo.materialize();
    writeln!(s, r##"<g stroke="#bbbbbb" stroke-width="0.6">"##).unwrap();
    for (i, j) in m.graph.edges() {
        let (a, b) = (position(topo, &m.node(i)), position(topo, &m.node(j)));
        writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, a.0, a.1, b.0, b.1).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    if let Some(cycle) = opts.cycle {
        let mut colors: BTreeMap<Element, &str> = BTreeMap::new();
        if let Some(own) = opts.ownership {
            for e in own.values() {
                let k = colors.len();
                colors.entry(*e).or_insert(PALETTE[k % PALETTE.len()]);
            }
        }
        writeln!(s, r#"<g stroke-width="2.4" stroke-linecap="round">"#).unwrap();
        for i in 0..cycle.len() {
            let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let color = opts.ownership.and_then(|o| o.get(&u)).and_then(|e| colors.get(e)).copied().unwrap_or("#000000");
            let (a, b) = (position(topo, &u), position(topo, &v));
            writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}"/>"#, a.0, a.1, b.0, b.1).unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }
    for n in all_nodes(topo) {
        let (x, y) = position(topo, &n);
        if topo.broken.contains(&n) {
            writeln!(s, r##"<circle cx="{x}" cy="{y}" r="4" fill="none" stroke="#999999" stroke-dasharray="2,2"/>"##).unwrap();
        } else {
            writeln!(s, r##"<circle cx="{x}" cy="{y}" r="4" fill="#333333"/>"##).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

/// One text row per cell row, top row first. Each cell shows its horizontal
/// then vertical nodes, `#` for present and `.` for broken.
pub fn render_ascii(topo: &ChimeraTopology) -> String {
    let mut s = String::new();
    for r in (0..topo.rows as i64).rev() {
        let cells: Vec<String> = (0..topo.cols as i64)
            .map(|c| {
                let mark = |o| {
                    (0..topo.depth)
                        .map(|k| if topo.broken.contains(&ChimeraNode::new(c, r, o, k)) { '.' } else { '#' })
                        .collect::<String>()
                };
                format!("{}|{}", mark(Orientation::Horizontal), mark(Orientation::Vertical))
            })
            .collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

/// DOT graph with node names; broken nodes appear dashed and unconnected.
pub fn render_dot(topo: &ChimeraTopology) -> String {
    let m = topo.materialize();
    let mut s = String::from("graph chimera {\n  node [shape=circle, width=0.2, label=\"\"];\n");
    for n in all_nodes(topo) {
        let (x, y) = position(topo, &n);
        let style = if topo.broken.contains(&n) { ", style=dashed, color=gray" } else { "" };
        writeln!(s, "  \"{}\" [pos=\"{},{}!\"{style}];", n.name(), x, -y).unwrap();
    }
    for (i, j) in m.graph.edges() {
        writeln!(s, "  \"{}\" -- \"{}\";", m.node(i).name(), m.node(j).name()).unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn broken5() -> ChimeraTopology {
        let mut t = ChimeraTopology::ideal(3, 3);
        for k in 0..3 {
            t.broken.insert(ChimeraNode::h(1, 1, k));
        }
        t.broken.insert(ChimeraNode::v(0, 2, 3));
        t.broken.insert(ChimeraNode::v(2, 0, 0));
        t
    }

    #[test]
    fn glyph_counts() {
        let s = render_svg(&ChimeraTopology::ideal(3, 3), SvgOptions::default());
        assert_eq!(s.matches("<circle").count(), 72);
        let s = render_svg(&broken5(), SvgOptions::default());
        assert_eq!(s.matches("<circle").count(), 72);
        assert_eq!(s.matches("stroke-dasharray").count(), 5);
    }

    #[test]
    fn output_is_deterministic() {
        assert_eq!(render_svg(&broken5(), SvgOptions::default()), render_svg(&broken5(), SvgOptions::default()));
        assert_eq!(render_dot(&broken5()), render_dot(&broken5()));
        let a = render_ascii(&broken5());
        assert_eq!(a.lines().count(), 3);
        assert_eq!(a.matches('.').count(), 5);
    }

    #[test]
    fn overlay_draws_one_segment_per_cycle_edge() {
        let t = ChimeraTopology::ideal(1, 1);
        let cycle: Vec<ChimeraNode> =
            (0..4).flat_map(|k| [ChimeraNode::h(0, 0, k), ChimeraNode::v(0, 0, k)]).collect();
        let s = render_svg(&t, SvgOptions { cycle: Some(&cycle), ownership: None });
        assert_eq!(s.matches(r##"stroke="#000000""##).count(), cycle.len());
    }
}
