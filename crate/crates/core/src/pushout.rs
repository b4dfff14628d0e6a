//! Free-groupoid retracts of pushouts `A <- C -> B` of groupoids over a
//! common object set.
//!
//! `A` and `B` are given by generating graphs on the objects, `C` (totally
//! disconnected) by optional loop generators. Choosing spanning forests `X`
//! of `graph_a` and `Y` of `graph_b` retracts the span onto
//! `Fr X <- Fr Z -> Fr Y` with `Z` discrete, whose pushout is `Fr W` for the
//! graph pushout `W = X +_Z Y`. In each connected component the vertex groups
//! of `Fr W` are free of rank `e(W) - v(W) + 1`; when the pushout is
//! connected this is `k = n_C - n_A - n_B + 1`.
//!
//! Equality in the pushout `G` itself is never decided. A word of `G` whose
//! image under the retraction [`RetractReport::rho`] is nontrivial is
//! nontrivial in `G`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::free_groupoid::{loop_coordinates, tree_path, FreeGroupElement, Letter, Word, WordError};
use crate::graph::{
    components, euler_ranks, graph_pushout, spanning_forest_containing, DirectedGraph, EdgeId, Forest, GraphError,
    GraphPushout, GraphSpec, PushoutSide, TieBreak, VertexId,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RetractError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("{side} generating graph does not have exactly the instance objects as vertices")]
    VertexSetMismatch { side: Side },
    #[error("unknown object `{0}`")]
    UnknownObject(VertexId),
    #[error("duplicate C loop generator `{0}`")]
    DuplicateLoop(EdgeId),
    #[error("pushout is disconnected; the rank formula does not apply")]
    Disconnected,
    #[error("letters are not composable at position {position}")]
    NotComposable { position: usize },
    #[error("unknown {side} letter `{edge}`")]
    UnknownLetter { side: Side, edge: EdgeId },
    #[error("witness objects must be distinct (got `{0}` twice)")]
    NotDistinct(VertexId),
    #[error("no arrow from `{0}` to `{1}` in A")]
    NoArrowInA(VertexId, VertexId),
    #[error("no arrow from `{0}` to `{1}` in B")]
    NoArrowInB(VertexId, VertexId),
}

impl RetractError {
    pub fn code(&self) -> &'static str {
        match self {
            RetractError::Graph(e) => e.code(),
            RetractError::Word(e) => e.code(),
            RetractError::VertexSetMismatch { .. } => "VertexSetMismatch",
            RetractError::UnknownObject(_) => "UnknownObject",
            RetractError::DuplicateLoop(_) => "DuplicateLoop",
            RetractError::Disconnected => "Disconnected",
            RetractError::NotComposable { .. } => "NotComposable",
            RetractError::UnknownLetter { .. } => "UnknownLetter",
            RetractError::NotDistinct(_) => "NotDistinct",
            RetractError::NoArrowInA(..) => "NoArrowInA",
            RetractError::NoArrowInB(..) => "NoArrowInB",
        }
    }
}

/// Which groupoid of the span a generator belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
    C,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
            Side::C => "C",
        })
    }
}

/// The span `A <- C -> B` in generating-graph form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushoutInstance {
    objects: BTreeSet<VertexId>,
    graph_a: Arc<DirectedGraph>,
    graph_b: Arc<DirectedGraph>,
    c_loops: BTreeMap<VertexId, Vec<EdgeId>>,
    loop_base: BTreeMap<EdgeId, VertexId>,
}

/// Wire form: `{"objects", "graph_a", "graph_b", "c_loops": {"a": ["l1"]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub objects: Vec<VertexId>,
    pub graph_a: GraphSpec,
    pub graph_b: GraphSpec,
    #[serde(default)]
    pub c_loops: BTreeMap<VertexId, Vec<EdgeId>>,
}

impl PushoutInstance {
    pub fn new(
        objects: BTreeSet<VertexId>,
        graph_a: DirectedGraph,
        graph_b: DirectedGraph,
        c_loops: BTreeMap<VertexId, Vec<EdgeId>>,
    ) -> Result<Self, RetractError> {
        if *graph_a.vertices() != objects {
            return Err(RetractError::VertexSetMismatch { side: Side::A });
        }
        if *graph_b.vertices() != objects {
            return Err(RetractError::VertexSetMismatch { side: Side::B });
        }
        let mut loop_base = BTreeMap::new();
        for (v, loops) in &c_loops {
            if !objects.contains(v) {
                return Err(RetractError::UnknownObject(v.clone()));
            }
            for l in loops {
                if loop_base.insert(l.clone(), v.clone()).is_some() {
                    return Err(RetractError::DuplicateLoop(l.clone()));
                }
            }
        }
        Ok(PushoutInstance { objects, graph_a: Arc::new(graph_a), graph_b: Arc::new(graph_b), c_loops, loop_base })
    }

    pub fn from_spec(spec: InstanceSpec) -> Result<Self, RetractError> {
        let objects: BTreeSet<VertexId> = spec.objects.iter().cloned().collect();
        if objects.len() != spec.objects.len() {
            let dup = spec.objects.iter().find(|o| spec.objects.iter().filter(|p| p == o).count() > 1);
            return Err(GraphError::DuplicateId {
                kind: crate::graph::IdKind::Vertex,
                id: dup.map(ToString::to_string).unwrap_or_default(),
            }
            .into());
        }
        let a = DirectedGraph::try_from(spec.graph_a)?;
        let b = DirectedGraph::try_from(spec.graph_b)?;
        Self::new(objects, a, b, spec.c_loops)
    }

    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec {
            objects: self.objects.iter().cloned().collect(),
            graph_a: (*self.graph_a).clone().into(),
            graph_b: (*self.graph_b).clone().into(),
            c_loops: self.c_loops.clone(),
        }
    }

    pub fn objects(&self) -> &BTreeSet<VertexId> {
        &self.objects
    }

    pub fn graph_a(&self) -> &Arc<DirectedGraph> {
        &self.graph_a
    }

    pub fn graph_b(&self) -> &Arc<DirectedGraph> {
        &self.graph_b
    }

    pub fn c_loops(&self) -> &BTreeMap<VertexId, Vec<EdgeId>> {
        &self.c_loops
    }

    /// `(n_A, n_B, n_C)`; `C` is totally disconnected, so `n_C` is the
    /// number of objects.
    pub fn component_counts(&self) -> ComponentCounts {
        ComponentCounts {
            n_a: components(&self.graph_a).block_count(),
            n_b: components(&self.graph_b).block_count(),
            n_c: self.objects.len(),
        }
    }

    /// Objects with the edges of both generating graphs. Its components are
    /// the components of the pushout groupoid.
    pub fn union_graph(&self) -> GraphPushout {
        graph_pushout(&self.graph_a, &self.graph_b, &self.objects).expect("instance graphs share the object set")
    }

    pub fn check_connected(&self) -> bool {
        components(&self.union_graph().graph).block_count() <= 1
    }

    /// `n_C - n_A - n_B + 1`, defined when the pushout is connected.
    pub fn theorem_rank(&self) -> Result<usize, RetractError> {
        if !self.check_connected() {
            return Err(RetractError::Disconnected);
        }
        Ok(self.component_counts().theorem_rank())
    }

    /// Signed endpoints of a generator letter.
    pub fn letter_ends(&self, letter: &GLetter) -> Result<(&VertexId, &VertexId), RetractError> {
        let unknown = || RetractError::UnknownLetter { side: letter.side, edge: letter.letter.edge.clone() };
        match letter.side {
            Side::A => letter.letter.ends(&self.graph_a).ok_or_else(unknown),
            Side::B => letter.letter.ends(&self.graph_b).ok_or_else(unknown),
            Side::C => self.loop_base.get(&letter.letter.edge).map(|v| (v, v)).ok_or_else(unknown),
        }
    }

    /// Checked construction of a word of `G` from a letter chain.
    pub fn gword(&self, source: &VertexId, letters: Vec<GLetter>) -> Result<GWord, RetractError> {
        if !self.objects.contains(source) {
            return Err(RetractError::UnknownObject(source.clone()));
        }
        let mut at = source;
        for (position, l) in letters.iter().enumerate() {
            let (s, t) = self.letter_ends(l)?;
            if s != at {
                return Err(RetractError::NotComposable { position });
            }
            at = t;
        }
        Ok(GWord { source: source.clone(), target: at.clone(), letters })
    }

    pub fn gword_from_spec(&self, spec: &GWordSpec) -> Result<GWord, RetractError> {
        let g = self.gword(&spec.source, spec.letters.clone())?;
        if g.target != spec.target {
            return Err(RetractError::NotComposable { position: spec.letters.len() });
        }
        Ok(g)
    }

    /// Builds `X`, `Y`, `W` and the ranks. Edges in `required_a` /
    /// `required_b` are forced into `X` / `Y`.
    pub fn build_retract(
        self: &Arc<Self>,
        tie_break: &TieBreak,
        required_a: &BTreeSet<EdgeId>,
        required_b: &BTreeSet<EdgeId>,
    ) -> Result<RetractReport, RetractError> {
        let forest_x = spanning_forest_containing(&self.graph_a, required_a, tie_break)?;
        let forest_y = spanning_forest_containing(&self.graph_b, required_b, tie_break)?;
        let glued = graph_pushout(&forest_x.as_graph(), &forest_y.as_graph(), &self.objects)?;
        let per_component_ranks = euler_ranks(&glued.graph);
        let w = Arc::new(glued.graph.clone());
        let x_in_w: BTreeSet<EdgeId> = forest_x
            .tree_edges()
            .iter()
            .map(|e| glued.image(PushoutSide::Left, e).expect("forest edge in pushout").clone())
            .collect();
        // X is acyclic inside W, so this never fails
        let forest_w = spanning_forest_containing(&w, &x_in_w, &TieBreak::Lexicographic)?;
        let counts = self.component_counts();
        let k = (per_component_ranks.len() == 1).then(|| counts.theorem_rank());
        Ok(RetractReport {
            instance: Arc::clone(self),
            forest_x,
            forest_y,
            w,
            glued,
            forest_w,
            counts,
            k,
            per_component_ranks,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub n_a: usize,
    pub n_b: usize,
    pub n_c: usize,
}

impl ComponentCounts {
    /// `n_c - n_a - n_b + 1`. Nonnegative whenever the pushout is connected:
    /// `W` then has `(n_c - n_a) + (n_c - n_b) >= n_c - 1` edges.
    pub fn theorem_rank(&self) -> usize {
        (self.n_c + 1).checked_sub(self.n_a + self.n_b).expect("rank formula is nonnegative for connected pushouts")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GLetter {
    pub side: Side,
    #[serde(flatten)]
    pub letter: Letter,
}

impl GLetter {
    pub fn new(side: Side, letter: Letter) -> Self {
        GLetter { side, letter }
    }

    pub fn inverse(&self) -> Self {
        GLetter { side: self.side, letter: self.letter.inverse() }
    }
}

impl fmt::Display for GLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.letter)
    }
}

/// A word in the generators of `G`. Not reduced: equality in `G` is not
/// decidable in general.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GWord {
    source: VertexId,
    target: VertexId,
    letters: Vec<GLetter>,
}

/// Wire form: a word whose letters carry `"side": "A" | "B" | "C"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GWordSpec {
    pub source: VertexId,
    pub target: VertexId,
    pub letters: Vec<GLetter>,
}

impl GWord {
    pub fn identity(v: &VertexId) -> GWord {
        GWord { source: v.clone(), target: v.clone(), letters: Vec::new() }
    }

    pub fn source(&self) -> &VertexId {
        &self.source
    }

    pub fn target(&self) -> &VertexId {
        &self.target
    }

    pub fn letters(&self) -> &[GLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other`, without reduction.
    pub fn concat(&self, other: &GWord) -> Result<GWord, RetractError> {
        if self.target != other.source {
            return Err(RetractError::NotComposable { position: self.letters.len() });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(GWord { source: self.source.clone(), target: other.target.clone(), letters })
    }

    pub fn invert(&self) -> GWord {
        GWord {
            source: self.target.clone(),
            target: self.source.clone(),
            letters: self.letters.iter().rev().map(GLetter::inverse).collect(),
        }
    }

    pub fn to_spec(&self) -> GWordSpec {
        GWordSpec { source: self.source.clone(), target: self.target.clone(), letters: self.letters.clone() }
    }
}

/// The retract `Fr W` of the pushout together with the data to evaluate
/// the retraction and the inclusion.
#[derive(Clone, Debug)]
pub struct RetractReport {
    instance: Arc<PushoutInstance>,
    forest_x: Forest,
    forest_y: Forest,
    w: Arc<DirectedGraph>,
    glued: GraphPushout,
    forest_w: Forest,
    counts: ComponentCounts,
    k: Option<usize>,
    per_component_ranks: Vec<(usize, usize)>,
}

impl RetractReport {
    pub fn instance(&self) -> &Arc<PushoutInstance> {
        &self.instance
    }

    /// Spanning forest `X` of `graph_a`.
    pub fn forest_x(&self) -> &Forest {
        &self.forest_x
    }

    /// Spanning forest `Y` of `graph_b`.
    pub fn forest_y(&self) -> &Forest {
        &self.forest_y
    }

    /// The pushout graph `W` of `X <- Z -> Y`.
    pub fn w(&self) -> &Arc<DirectedGraph> {
        &self.w
    }

    /// Spanning forest of `W` extending `X`; fixes the free bases of the
    /// vertex groups of `Fr W`.
    pub fn forest_w(&self) -> &Forest {
        &self.forest_w
    }

    pub fn counts(&self) -> ComponentCounts {
        self.counts
    }

    /// The rank formula value, or `None` when the pushout is disconnected.
    pub fn k(&self) -> Option<usize> {
        self.k
    }

    /// `(block, e - v + 1)` for each component of `W`.
    pub fn per_component_ranks(&self) -> &[(usize, usize)] {
        &self.per_component_ranks
    }

    /// Side and generator id of an edge of `W`.
    pub fn origin(&self, e: &EdgeId) -> Option<(Side, &EdgeId)> {
        self.glued.origin(e).map(|(s, id)| (side_of(s), id))
    }

    /// Id in `W` of a forest edge of `X` (side A) or `Y` (side B).
    pub fn w_edge(&self, side: Side, e: &EdgeId) -> Option<&EdgeId> {
        match side {
            Side::A => self.glued.image(PushoutSide::Left, e),
            Side::B => self.glued.image(PushoutSide::Right, e),
            Side::C => None,
        }
    }

    /// Tree path in `X` or `Y`, rewritten in the edge names of `W`.
    fn forest_path(&self, side: Side, u: &VertexId, v: &VertexId) -> Result<Vec<Letter>, RetractError> {
        let forest = match side {
            Side::A => &self.forest_x,
            Side::B => &self.forest_y,
            Side::C => unreachable!("C has no forest edges"),
        };
        let path = tree_path(forest, u, v)?;
        Ok(path
            .letters()
            .iter()
            .map(|l| Letter::new(self.w_edge(side, &l.edge).expect("forest edge").clone(), l.sign))
            .collect())
    }

    /// The retraction `G -> Fr W`: an `A` generator `p -> q` goes to the
    /// `X`-tree path from `p` to `q`, a `B` generator to the `Y`-tree path,
    /// a `C` loop to the identity.
    pub fn rho(&self, g: &GWord) -> Result<Word, RetractError> {
        let mut raw = Vec::new();
        let mut at = &g.source;
        if !self.instance.objects.contains(at) {
            return Err(RetractError::UnknownObject(at.clone()));
        }
        for (position, l) in g.letters.iter().enumerate() {
            let (s, t) = self.instance.letter_ends(l)?;
            if s != at {
                return Err(RetractError::NotComposable { position });
            }
            if l.side != Side::C {
                raw.extend(self.forest_path(l.side, s, t)?);
            }
            at = t;
        }
        Ok(Word::reduce(&self.w, &g.source, raw)?)
    }

    /// The inclusion `Fr W -> G`, relabelling each `W` edge as the `A` or
    /// `B` generator it came from.
    pub fn include_f(&self, w: &Word) -> Result<GWord, RetractError> {
        if !Arc::ptr_eq(w.host(), &self.w) && **w.host() != *self.w {
            return Err(WordError::HostMismatch.into());
        }
        let letters = w
            .letters()
            .iter()
            .map(|l| {
                let (side, id) = self
                    .origin(&l.edge)
                    .ok_or_else(|| RetractError::UnknownLetter { side: Side::A, edge: l.edge.clone() })?;
                Ok(GLetter::new(side, Letter::new(id.clone(), l.sign)))
            })
            .collect::<Result<Vec<_>, RetractError>>()?;
        Ok(GWord { source: w.source().clone(), target: w.target().clone(), letters })
    }

    /// The loop `a -> b` through `X` followed by `b -> a` through `Y`.
    /// Reduced and of length at least 2, since the two halves use disjoint
    /// edge sets of `W`.
    pub fn witness(&self, a: &VertexId, b: &VertexId) -> Result<Word, RetractError> {
        for v in [a, b] {
            if !self.instance.objects.contains(v) {
                return Err(RetractError::UnknownObject(v.clone()));
            }
        }
        if a == b {
            return Err(RetractError::NotDistinct(a.clone()));
        }
        if self.forest_x.root_of(a) != self.forest_x.root_of(b) {
            return Err(RetractError::NoArrowInA(a.clone(), b.clone()));
        }
        if self.forest_y.root_of(a) != self.forest_y.root_of(b) {
            return Err(RetractError::NoArrowInB(b.clone(), a.clone()));
        }
        let there = self.forest_path(Side::A, a, b)?;
        let back = self.forest_path(Side::B, b, a)?;
        Ok(Word::reduce(&self.w, a, there.into_iter().chain(back))?)
    }

    /// Coordinates of [`Self::witness`] in the free vertex group of `Fr W` at `a`.
    pub fn certify_rank_at_least_one(&self, a: &VertexId, b: &VertexId) -> Result<FreeGroupElement, RetractError> {
        let w = self.witness(a, b)?;
        Ok(loop_coordinates(&self.forest_w, a, &w)?)
    }

    /// Whether a letter of `W` comes from `X` (true) or `Y` (false).
    pub fn is_x_letter(&self, l: &Letter) -> Option<bool> {
        self.origin(&l.edge).map(|(s, _)| s == Side::A)
    }
}

fn side_of(s: PushoutSide) -> Side {
    match s {
        PushoutSide::Left => Side::A,
        PushoutSide::Right => Side::B,
    }
}
