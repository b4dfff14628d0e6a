//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use groupoid_retract::free_groupoid::{Letter, Sign, Word};
use groupoid_retract::graph::{components, euler_ranks, DirectedGraph, EdgeId, VertexId};
use groupoid_retract::pushout::{GLetter, GWord, PushoutInstance, RetractReport, Side};
use groupoid_retract::van_kampen::{decomposition_to_instance, Decomposition};
use groupoid_retract::TieBreak;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vertex_names(n: usize) -> Vec<VertexId> {
    (0..n).map(|i| VertexId::new(format!("v{i:02}"))).collect()
}

/// `n` vertices, `m` uniformly random edges named `{prefix}{i}`; loops and
/// parallel edges allowed.
pub fn random_graph(rng: &mut ChaCha8Rng, vertices: &[VertexId], m: usize, prefix: &str) -> DirectedGraph {
    let mut g = DirectedGraph::discrete(vertices.iter().cloned());
    for i in 0..m {
        let s = vertices.choose(rng).unwrap().clone();
        let t = vertices.choose(rng).unwrap().clone();
        g.add_edge(format!("{prefix}{i}"), s, t).unwrap();
    }
    g
}

/// Random instance with at most `max_objects` objects and `max_edges`
/// generators per side; random C loops.
pub fn random_instance(rng: &mut ChaCha8Rng, max_objects: usize, max_edges: usize) -> Arc<PushoutInstance> {
    let n = rng.gen_range(1..=max_objects);
    let objects = vertex_names(n);
    let (ma, mb) = (rng.gen_range(0..=max_edges), rng.gen_range(0..=max_edges));
    let a = random_graph(rng, &objects, ma, "a");
    let b = random_graph(rng, &objects, mb, "b");
    let mut c_loops: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    for i in 0..rng.gen_range(0..=3) {
        let at = objects.choose(rng).unwrap().clone();
        c_loops.entry(at).or_default().push(EdgeId::new(format!("c{i}")));
    }
    Arc::new(PushoutInstance::new(objects.into_iter().collect(), a, b, c_loops).unwrap())
}

pub fn random_connected_instance(rng: &mut ChaCha8Rng, max_objects: usize, max_edges: usize) -> Arc<PushoutInstance> {
    loop {
        let inst = random_instance(rng, max_objects, max_edges);
        if inst.check_connected() {
            return inst;
        }
    }
}

pub fn lex_report(inst: &Arc<PushoutInstance>) -> RetractReport {
    inst.build_retract(&TieBreak::Lexicographic, &BTreeSet::new(), &BTreeSet::new()).unwrap()
}

/// Every generator letter of the instance leaving `at`.
pub fn moves_from(inst: &PushoutInstance, at: &VertexId) -> Vec<(GLetter, VertexId)> {
    let mut out = Vec::new();
    for (side, g) in [(Side::A, inst.graph_a()), (Side::B, inst.graph_b())] {
        for (e, ends) in g.edges() {
            if &ends.src == at {
                out.push((GLetter::new(side, Letter::pos(e.clone())), ends.tgt.clone()));
            }
            if &ends.tgt == at {
                out.push((GLetter::new(side, Letter::neg(e.clone())), ends.src.clone()));
            }
        }
    }
    for l in inst.c_loops().get(at).into_iter().flatten() {
        out.push((GLetter::new(Side::C, Letter::pos(l.clone())), at.clone()));
        out.push((GLetter::new(Side::C, Letter::neg(l.clone())), at.clone()));
    }
    out
}

/// Random (unreduced) word of `G` of length at most `len` starting at `start`.
pub fn random_gword(rng: &mut ChaCha8Rng, inst: &PushoutInstance, start: &VertexId, len: usize) -> GWord {
    let mut at = start.clone();
    let mut letters = Vec::new();
    for _ in 0..len {
        let moves = moves_from(inst, &at);
        let Some((l, next)) = moves.choose(rng).cloned() else { break };
        letters.push(l);
        at = next;
    }
    inst.gword(start, letters).unwrap()
}

/// Random reduced word of `Fr W` (a non-backtracking walk).
pub fn random_reduced_word(rng: &mut ChaCha8Rng, host: &Arc<DirectedGraph>, len: usize) -> Word {
    let vertices: Vec<&VertexId> = host.vertices().iter().collect();
    let start = (*vertices.choose(rng).unwrap()).clone();
    let mut at = start.clone();
    let mut letters: Vec<Letter> = Vec::new();
    for _ in 0..len {
        let moves: Vec<(Letter, VertexId)> = host
            .edges()
            .flat_map(|(e, ends)| {
                let mut m = Vec::new();
                if ends.src == at {
                    m.push((Letter::pos(e.clone()), ends.tgt.clone()));
                }
                if ends.tgt == at {
                    m.push((Letter::neg(e.clone()), ends.src.clone()));
                }
                m
            })
            .filter(|(l, _)| !letters.last().is_some_and(|p| p.cancels(l)))
            .collect();
        let Some((l, next)) = moves.choose(rng).cloned() else { break };
        letters.push(l);
        at = next;
    }
    let w = Word::reduce(host, &start, letters.clone()).unwrap();
    assert_eq!(w.letters(), &letters[..], "non-backtracking walks are reduced");
    w
}

/// Connected space: random spanning tree plus `extra` random edges.
pub fn random_connected_space(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Arc<DirectedGraph> {
    let vs = vertex_names(n);
    let mut g = DirectedGraph::discrete(vs.iter().cloned());
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (s, t) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
        g.add_edge(format!("t{i}"), vs[s].clone(), vs[t].clone()).unwrap();
    }
    for i in 0..extra {
        let s = vs.choose(rng).unwrap().clone();
        let t = vs.choose(rng).unwrap().clone();
        g.add_edge(format!("x{i}"), s, t).unwrap();
    }
    g.into()
}

/// Random valid decomposition of `space` whose pieces each meet the
/// intersection; `None` if none was found in a bounded number of tries.
pub fn random_decomposition(rng: &mut ChaCha8Rng, space: &Arc<DirectedGraph>) -> Option<Decomposition> {
    for _ in 0..200 {
        // 0 = U only, 1 = V only, 2 = both
        let mut label: BTreeMap<VertexId, u8> =
            space.vertices().iter().map(|v| (v.clone(), rng.gen_range(0..3u8))).collect();
        for (_, ends) in space.edges() {
            let (ls, lt) = (label[&ends.src], label[&ends.tgt]);
            if ls + lt == 1 {
                let fix = if rng.gen_bool(0.5) { &ends.src } else { &ends.tgt };
                label.insert(fix.clone(), 2);
            }
        }
        let u = label.iter().filter(|(_, &l)| l != 1).map(|(v, _)| v.clone()).collect();
        let v = label.iter().filter(|(_, &l)| l != 0).map(|(v, _)| v.clone()).collect();
        let Ok(dec) = Decomposition::new(Arc::clone(space), u, v) else { continue };
        if decomposition_to_instance(&dec, &TieBreak::Lexicographic).is_ok() {
            return Some(dec);
        }
    }
    None
}

/// Cycle rank of a connected graph.
pub fn betti_one(g: &DirectedGraph) -> usize {
    euler_ranks(g).iter().map(|(_, r)| r).sum()
}

pub fn is_forest(g: &DirectedGraph) -> bool {
    euler_ranks(g).iter().all(|&(_, r)| r == 0)
}

pub fn is_connected(g: &DirectedGraph) -> bool {
    components(g).block_count() == 1
}

pub fn sign_of(l: &Letter) -> Sign {
    l.sign
}

/// Cycle `c0 .. c{n-1}` cut into two overlapping arcs meeting in `{ci, cj}`,
/// with random pendant vertices attached; both pieces are forests.
pub fn random_arc_decomposition(rng: &mut ChaCha8Rng) -> Decomposition {
    let n = rng.gen_range(3..=10);
    let name = |i: usize| VertexId::new(format!("c{i}"));
    let mut g = DirectedGraph::discrete((0..n).map(name));
    for i in 0..n {
        let (s, t) = if rng.gen_bool(0.5) { (i, (i + 1) % n) } else { ((i + 1) % n, i) };
        g.add_edge(format!("e{i}"), name(s), name(t)).unwrap();
    }
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    let arc = |from: usize, to: usize| -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        let mut x = from;
        loop {
            out.insert(name(x));
            if x == to {
                return out;
            }
            x = (x + 1) % n;
        }
    };
    let (mut u, mut v) = (arc(i, j), arc(j, i));
    for p in 0..rng.gen_range(0..=4) {
        let leaf = VertexId::new(format!("p{p}"));
        let attach = g.vertices().iter().nth(rng.gen_range(0..g.vertex_count())).unwrap().clone();
        let in_u = u.contains(&attach) && (!v.contains(&attach) || rng.gen_bool(0.5));
        g.add_vertex(leaf.clone()).unwrap();
        g.add_edge(format!("f{p}"), attach, leaf.clone()).unwrap();
        if in_u {
            u.insert(leaf)
        } else {
            v.insert(leaf)
        };
    }
    Decomposition::new(Arc::new(g), u, v).unwrap()
}
