mod common;

use std::collections::BTreeSet;

use common::*;
use groupoid_retract::free_groupoid::{loop_coordinates, Letter, Word};
use groupoid_retract::graph::{DirectedGraph, VertexId};
use groupoid_retract::pushout::{GLetter, GWord, Side};
use groupoid_retract::TieBreak;
use rand::seq::SliceRandom;
use rand::Rng;

/// Number of weak components by depth-first search.
fn count_components(g: &DirectedGraph) -> usize {
    let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
    let mut count = 0;
    for start in g.vertices() {
        if !seen.insert(start) {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for (_, ends) in g.edges() {
                for (a, b) in [(&ends.src, &ends.tgt), (&ends.tgt, &ends.src)] {
                    if a == v && seen.insert(b) {
                        stack.push(b);
                    }
                }
            }
        }
    }
    count
}

#[test]
fn counts_and_rank_match_independent_count() {
    let mut rng = rng(21);
    for _ in 0..300 {
        let inst = random_instance(&mut rng, 10, 14);
        let counts = inst.component_counts();
        assert_eq!(counts.n_a, count_components(inst.graph_a()));
        assert_eq!(counts.n_b, count_components(inst.graph_b()));
        assert_eq!(counts.n_c, inst.objects().len());
        let report = lex_report(&inst);
        let w = report.w();
        assert_eq!(w.edge_count(), 2 * inst.objects().len() - counts.n_a - counts.n_b);
        let union_connected = count_components(&inst.union_graph().graph) == 1;
        assert_eq!(union_connected, inst.check_connected());
        assert_eq!(count_components(w) == 1, union_connected);
        if union_connected {
            let k = report.k().unwrap();
            assert_eq!(k + w.vertex_count(), w.edge_count() + 1);
            assert_eq!(report.per_component_ranks(), &[(0, k)]);
            assert_eq!(inst.theorem_rank().unwrap(), k);
        } else {
            assert_eq!(report.k(), None);
            assert!(inst.theorem_rank().is_err());
        }
    }
}

#[test]
fn rank_is_bounded_by_the_generators() {
    let mut rng = rng(22);
    for _ in 0..200 {
        let inst = random_connected_instance(&mut rng, 10, 14);
        let k = lex_report(&inst).k().unwrap();
        assert!(k <= betti_one(&inst.union_graph().graph));
    }
}

#[test]
fn retraction_splits_the_inclusion() {
    let mut rng = rng(23);
    for _ in 0..100 {
        let inst = random_connected_instance(&mut rng, 10, 14);
        let report = lex_report(&inst);
        for _ in 0..10 {
            let len = rng.gen_range(0..=12);
            let w = random_reduced_word(&mut rng, report.w(), len);
            let g = report.include_f(&w).unwrap();
            assert_eq!(g.len(), w.len());
            assert_eq!(report.rho(&g).unwrap(), w);
        }
    }
}

#[test]
fn retraction_is_a_functor() {
    let mut rng = rng(24);
    for _ in 0..100 {
        let inst = random_connected_instance(&mut rng, 10, 14);
        let report = lex_report(&inst);
        let objects: Vec<VertexId> = inst.objects().iter().cloned().collect();
        for _ in 0..10 {
            let start = objects.choose(&mut rng).unwrap();
            let (l1, l2) = (rng.gen_range(0..=10), rng.gen_range(0..=10));
            let g = random_gword(&mut rng, &inst, start, l1);
            let h = random_gword(&mut rng, &inst, g.target(), l2);
            let gh = g.concat(&h).unwrap();
            let (rg, rh) = (report.rho(&g).unwrap(), report.rho(&h).unwrap());
            assert_eq!(report.rho(&gh).unwrap(), rg.compose(&rh).unwrap());
            assert_eq!(report.rho(&g.invert()).unwrap(), rg.invert());
            assert_eq!(rg.source(), g.source());
            assert_eq!(rg.target(), g.target());
            let id = GWord::identity(g.source());
            assert!(report.rho(&id).unwrap().is_identity());
        }
    }
}

#[test]
fn loops_of_c_are_invisible() {
    let mut rng = rng(25);
    let mut checked = 0;
    for _ in 0..200 {
        let inst = random_connected_instance(&mut rng, 8, 10);
        let report = lex_report(&inst);
        for (v, loops) in inst.c_loops() {
            let len = rng.gen_range(1..=6);
            let letters: Vec<GLetter> = (0..len)
                .map(|_| {
                    let e = loops.choose(&mut rng).unwrap().clone();
                    let l = if rng.gen_bool(0.5) { Letter::pos(e) } else { Letter::neg(e) };
                    GLetter::new(Side::C, l)
                })
                .collect();
            let g = inst.gword(v, letters).unwrap();
            assert!(report.rho(&g).unwrap().is_identity());
            // sandwiching C loops into a word leaves its image unchanged
            let l = rng.gen_range(0..=6);
            let before = random_gword(&mut rng, &inst, v, l).invert();
            let sandwiched = before.concat(&g).unwrap();
            assert_eq!(report.rho(&sandwiched).unwrap(), report.rho(&before).unwrap());
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn forest_generators_map_to_themselves() {
    let mut rng = rng(26);
    for _ in 0..100 {
        let inst = random_connected_instance(&mut rng, 10, 14);
        let report = lex_report(&inst);
        for (side, forest) in [(Side::A, report.forest_x()), (Side::B, report.forest_y())] {
            for e in forest.tree_edges() {
                let ends = forest.host().endpoints(e).unwrap();
                let g = inst.gword(&ends.src, vec![GLetter::new(side, Letter::pos(e.clone()))]).unwrap();
                let w = report.rho(&g).unwrap();
                assert_eq!(w.letters(), &[Letter::pos(report.w_edge(side, e).unwrap().clone())]);
            }
        }
    }
}

#[test]
fn witnesses_are_nontrivial_loops() {
    let mut rng = rng(27);
    let mut checked = 0;
    for _ in 0..200 {
        let inst = random_connected_instance(&mut rng, 10, 14);
        let report = lex_report(&inst);
        let objects: Vec<&VertexId> = inst.objects().iter().collect();
        for _ in 0..5 {
            let (a, b) = (*objects.choose(&mut rng).unwrap(), *objects.choose(&mut rng).unwrap());
            let Ok(w) = report.witness(a, b) else {
                let joined = a != b
                    && report.forest_x().root_of(a) == report.forest_x().root_of(b)
                    && report.forest_y().root_of(a) == report.forest_y().root_of(b);
                assert!(!joined);
                continue;
            };
            assert!(w.is_loop() && w.source() == a);
            assert!(w.len() >= 2);
            let reduced = Word::reduce(report.w(), a, w.letters().to_vec()).unwrap();
            assert_eq!(reduced, w);
            // X letters first, then Y letters
            let sides: Vec<bool> = w.letters().iter().map(|l| report.is_x_letter(l).unwrap()).collect();
            assert!(sides.first() == Some(&true) && sides.last() == Some(&false));
            assert!(sides.windows(2).all(|p| p[0] || !p[1]));
            let coords = loop_coordinates(report.forest_w(), a, &w).unwrap();
            assert!(!coords.is_empty());
            assert_eq!(coords.evaluate(report.forest_w(), a).unwrap(), w);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn explicit_tie_break_changes_forests_not_rank() {
    let mut rng = rng(28);
    for _ in 0..100 {
        let inst = random_connected_instance(&mut rng, 10, 14);
        let lex = lex_report(&inst);
        let mut order: Vec<_> = inst.graph_a().edge_ids().chain(inst.graph_b().edge_ids()).cloned().collect();
        order.shuffle(&mut rng);
        let shuffled = inst.build_retract(&TieBreak::Explicit(order), &BTreeSet::new(), &BTreeSet::new()).unwrap();
        assert_eq!(lex.k(), shuffled.k());
        assert_eq!(lex.forest_x().edge_count(), shuffled.forest_x().edge_count());
    }
}
