mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::*;
use groupoid_retract::graph::{
    components, euler_ranks, graph_pushout, spanning_forest, spanning_forest_containing, DirectedGraph, EdgeId,
    TieBreak, VertexId,
};
use rand::Rng;

/// Reachability in the underlying undirected graph (Floyd–Warshall).
fn closure(g: &DirectedGraph) -> Vec<Vec<bool>> {
    let vs: Vec<&VertexId> = g.vertices().iter().collect();
    let idx = |v: &VertexId| vs.iter().position(|w| *w == v).unwrap();
    let n = vs.len();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for (_, ends) in g.edges() {
        let (s, t) = (idx(&ends.src), idx(&ends.tgt));
        r[s][t] = true;
        r[t][s] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Acyclic iff repeatedly deleting edges with a degree-one endpoint
/// removes every edge.
fn acyclic(g: &DirectedGraph) -> bool {
    let mut edges: Vec<(VertexId, VertexId)> = g.edges().map(|(_, e)| (e.src.clone(), e.tgt.clone())).collect();
    loop {
        let before = edges.len();
        let degree = |v: &VertexId, es: &[(VertexId, VertexId)]| {
            es.iter().map(|(s, t)| (s == v) as usize + (t == v) as usize).sum::<usize>()
        };
        if let Some(i) = (0..edges.len()).find(|&i| {
            let (s, t) = &edges[i];
            s != t && (degree(s, &edges) == 1 || degree(t, &edges) == 1)
        }) {
            edges.remove(i);
        }
        if edges.is_empty() {
            return true;
        }
        if edges.len() == before {
            return false;
        }
    }
}

#[test]
fn components_match_transitive_closure() {
    let mut rng = rng(11);
    for _ in 0..300 {
        let n = rng.gen_range(1..=8);
        let vs = vertex_names(n);
        let m = rng.gen_range(0..=10);
        let g = random_graph(&mut rng, &vs, m, "e");
        let part = components(&g);
        let r = closure(&g);
        for (i, u) in vs.iter().enumerate() {
            for (j, v) in vs.iter().enumerate() {
                assert_eq!(part.same_block(u, v), r[i][j], "{u} ~ {v}");
            }
        }
    }
}

#[test]
fn spanning_forest_is_acyclic_spanning_and_sized() {
    let mut rng = rng(12);
    for _ in 0..300 {
        let n = rng.gen_range(1..=12);
        let vs = vertex_names(n);
        let m = rng.gen_range(0..=20);
        let g = Arc::new(random_graph(&mut rng, &vs, m, "e"));
        let f = spanning_forest(&g, &TieBreak::Lexicographic);
        let fg = f.as_graph();
        assert!(acyclic(&fg));
        let (pg, pf) = (components(&g), components(&fg));
        assert_eq!(pg.blocks(), pf.blocks());
        assert_eq!(f.edge_count(), n - pg.block_count());
        assert!(euler_ranks(&fg).iter().all(|&(_, r)| r == 0));
    }
}

#[test]
fn spanning_forest_is_deterministic_and_honours_tie_break() {
    let mut rng = rng(13);
    for _ in 0..100 {
        let vs = vertex_names(rng.gen_range(2..=8));
        let m = rng.gen_range(0..=12);
        let g = Arc::new(random_graph(&mut rng, &vs, m, "e"));
        let f1 = spanning_forest(&g, &TieBreak::Lexicographic);
        let f2 = spanning_forest(&g, &TieBreak::Lexicographic);
        assert_eq!(f1, f2);
        // listing the edges in reverse order still yields a spanning forest
        let rev: Vec<EdgeId> = g.edge_ids().cloned().collect::<Vec<_>>().into_iter().rev().collect();
        let f3 = spanning_forest(&g, &TieBreak::Explicit(rev.clone()));
        assert_eq!(f3.edge_count(), f1.edge_count());
        // the first listed non-loop edge is always chosen
        if let Some(first) = rev.iter().find(|e| {
            let ends = g.endpoints(e).unwrap();
            ends.src != ends.tgt
        }) {
            assert!(f3.contains(first));
        }
    }
}

#[test]
fn required_edges_are_kept() {
    let mut rng = rng(14);
    for _ in 0..100 {
        let vs = vertex_names(rng.gen_range(2..=8));
        let m = rng.gen_range(1..=12);
        let g = Arc::new(random_graph(&mut rng, &vs, m, "e"));
        let base = spanning_forest(&g, &TieBreak::Lexicographic);
        // any subset of a forest is acyclic and must be extendable
        let required: BTreeSet<EdgeId> = base.tree_edges().iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let f = spanning_forest_containing(
            &g,
            &required,
            &TieBreak::Explicit(g.edge_ids().cloned().collect::<Vec<_>>().into_iter().rev().collect()),
        )
        .unwrap();
        assert!(required.iter().all(|e| f.contains(e)));
        assert_eq!(f.edge_count(), base.edge_count());
    }
}

#[test]
fn adding_an_edge_to_a_forest_raises_one_rank_by_one() {
    let mut rng = rng(15);
    for _ in 0..200 {
        let vs = vertex_names(rng.gen_range(1..=10));
        let m = rng.gen_range(0..=15);
        let g = Arc::new(random_graph(&mut rng, &vs, m, "e"));
        let f = spanning_forest(&g, &TieBreak::Lexicographic);
        let mut fg = f.as_graph();
        let before: usize = euler_ranks(&fg).iter().map(|r| r.1).sum();
        assert_eq!(before, 0);
        let s = vs[rng.gen_range(0..vs.len())].clone();
        let part = components(&fg);
        let same: Vec<&VertexId> = vs.iter().filter(|v| part.same_block(v, &s)).collect();
        let t = same[rng.gen_range(0..same.len())].clone();
        fg.add_edge("extra", s, t).unwrap();
        let ranks = euler_ranks(&fg);
        assert_eq!(ranks.iter().map(|r| r.1).sum::<usize>(), 1);
        assert_eq!(ranks.len(), part.block_count());
    }
}

#[test]
fn graph_pushout_is_disjoint_union_of_edges() {
    let mut rng = rng(16);
    for _ in 0..200 {
        let vs = vertex_names(rng.gen_range(1..=8));
        // shared prefix forces id collisions
        let (mx, my) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
        let x = random_graph(&mut rng, &vs, mx, "e");
        let y = random_graph(&mut rng, &vs, my, "e");
        let shared: BTreeSet<VertexId> = vs.iter().cloned().collect();
        let p = graph_pushout(&x, &y, &shared).unwrap();
        assert_eq!(p.graph.vertex_count(), vs.len());
        assert_eq!(p.graph.edge_count(), x.edge_count() + y.edge_count());
        for (e, ends) in p.graph.edges() {
            let (side, orig) = p.origin(e).unwrap();
            let src = match side {
                groupoid_retract::graph::PushoutSide::Left => &x,
                groupoid_retract::graph::PushoutSide::Right => &y,
            };
            assert_eq!(src.endpoints(orig), Some(ends));
            assert_eq!(p.image(side, orig), Some(e));
        }
        let (cx, cy) = (components(&x), components(&y));
        let cw = components(&p.graph);
        for u in &vs {
            for v in &vs {
                if cx.same_block(u, v) || cy.same_block(u, v) {
                    assert!(cw.same_block(u, v));
                }
            }
        }
    }
}

#[test]
fn tree_paths_have_depth_length() {
    use groupoid_retract::free_groupoid::tree_path;
    let mut rng = rng(17);
    for _ in 0..100 {
        let (n, extra) = (rng.gen_range(1..=10), rng.gen_range(0..=5));
        let g = random_connected_space(&mut rng, n, extra);
        let f = spanning_forest(&g, &TieBreak::Lexicographic);
        for u in g.vertices() {
            let root = f.root_of(u).unwrap();
            let p = tree_path(&f, root, u).unwrap();
            assert_eq!(p.len(), f.depth(u).unwrap());
            assert!(p.letters().iter().all(|l| f.contains(&l.edge)));
        }
    }
}
