use chimera_core::gadget::{rotate_dir, rotate_node};
use chimera_core::hamiltonicity::contract_along;
use chimera_core::oracle::{canonical_cycle, cycle_graph, verify_hamiltonian_cycle};
use chimera_core::render::{render_svg, SvgOptions};
use chimera_core::{node_class, ChimeraNode, ChimeraTopology, Dir, Orientation, SimpleGraph};
use proptest::prelude::*;

fn node() -> impl Strategy<Value = ChimeraNode> {
    (0i64..2, 0i64..2, any::<bool>(), 0usize..4).prop_map(|(c, r, h, k)| {
        ChimeraNode::new(c, r, if h { Orientation::Horizontal } else { Orientation::Vertical }, k)
    })
}

proptest! {
    #[test]
    fn rotation_has_order_four_and_keeps_class(n in node(), q in 0u8..4) {
        prop_assert_eq!(rotate_node(&rotate_node(&n, q), 4 - q), n);
        prop_assert_eq!(node_class(&rotate_node(&n, q)), node_class(&n));
        let d = Dir::ALL[q as usize];
        prop_assert_eq!(Orientation::coupling(rotate_dir(d, 1)), Orientation::coupling(d).flip());
    }

    #[test]
    fn node_names_round_trip(c in 0i64..40, r in 0i64..40, h in any::<bool>(), k in 0usize..8) {
        let n = ChimeraNode::new(c, r, if h { Orientation::Horizontal } else { Orientation::Vertical }, k);
        prop_assert_eq!(ChimeraNode::parse_name(&n.name()), Some(n));
    }

    #[test]
    fn canonical_cycle_ignores_rotation_and_direction(n in 3usize..12, shift in 0usize..12, rev in any::<bool>()) {
        let base: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % 101).collect();
        let mut moved: Vec<usize> = (0..n).map(|i| base[(i + shift) % n]).collect();
        if rev {
            moved.reverse();
        }
        prop_assert_eq!(canonical_cycle(&moved), canonical_cycle(&base));
    }

    #[test]
    fn contracting_cycle_paths_keeps_a_hamiltonian_cycle(n in 5usize..14, start in 0usize..14, len in 1usize..4) {
        let g = cycle_graph(n);
        let cycle: Vec<usize> = (0..n).collect();
        let path: Vec<usize> = (0..=len).map(|i| (start + i) % n).collect();
        prop_assume!(n - len >= 3);
        let (h, c, _) = contract_along(&g, &cycle, &path).unwrap();
        prop_assert_eq!(h.vertex_count(), n - len);
        prop_assert!(verify_hamiltonian_cycle(&h, &c));
    }

    #[test]
    fn contraction_never_creates_loops(edges in proptest::collection::vec((0usize..8, 0usize..8), 4..20)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        let g = SimpleGraph::from_edges(8, &edges).unwrap();
        prop_assume!(!g.neighbors(0).is_empty());
        let path = vec![0, g.neighbors(0)[0]];
        let (h, _, map) = contract_along(&g, &[], &path).unwrap();
        prop_assert_eq!(h.vertex_count(), 7);
        prop_assert!((0..7).all(|v| !h.has_edge(v, v)));
        prop_assert_eq!(map[path[0]], map[path[1]]);
    }

    #[test]
    fn svg_draws_every_node_once(cols in 1usize..4, rows in 1usize..4, broken in proptest::collection::btree_set((0i64..3, 0i64..3, 0usize..4), 0..6)) {
        let mut t = ChimeraTopology::ideal(cols, rows);
        for (c, r, k) in broken {
            let n = ChimeraNode::h(c, r, k);
            if t.in_bounds(&n) {
                t.broken.insert(n);
            }
        }
        let s = render_svg(&t, SvgOptions::default());
        prop_assert_eq!(s.matches("<circle").count(), cols * rows * 8);
        prop_assert_eq!(s.matches("stroke-dasharray").count(), t.broken.len());
    }
}
