//! Finite directed multigraphs: weak components, spanning forests, cycle
//! ranks and pushouts of graphs over a shared discrete vertex set.
//!
//! Ids are compared bytewise on their string form everywhere; every
//! collection that is iterated is ordered by that comparison, so all results
//! are deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(
    /// Vertex label, unique within a graph.
    VertexId
);
string_id!(
    /// Edge label, unique within a graph. Parallel edges and self-loops are
    /// distinguished only by their ids.
    EdgeId
);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: IdKind, id: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),
    #[error("required edges contain a cycle (closed by `{0}`)")]
    RequiredEdgesContainCycle(EdgeId),
    #[error("vertex set of the {side} graph differs from the shared vertex set")]
    VertexSetMismatch { side: &'static str },
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::DanglingEndpoint { .. } => "DanglingEndpoint",
            GraphError::DuplicateId { .. } => "DuplicateId",
            GraphError::UnknownVertex(_) => "UnknownVertex",
            GraphError::UnknownEdge(_) => "UnknownEdge",
            GraphError::RequiredEdgesContainCycle(_) => "RequiredEdgesContainCycle",
            GraphError::VertexSetMismatch { .. } => "VertexSetMismatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdKind {
    Vertex,
    Edge,
}

impl fmt::Display for IdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdKind::Vertex => "vertex",
            IdKind::Edge => "edge",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endpoints {
    pub src: VertexId,
    pub tgt: VertexId,
}

/// Wire form of a graph: `{"vertices": [...], "edges": [{"id", "src", "tgt"}]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: EdgeId,
    pub src: VertexId,
    pub tgt: VertexId,
}

/// Checks a raw graph description: ids are unique and every edge endpoint is
/// a declared vertex.
pub fn validate_graph(spec: &GraphSpec) -> Result<(), GraphError> {
    let mut seen = BTreeSet::new();
    for v in &spec.vertices {
        if !seen.insert(v) {
            return Err(GraphError::DuplicateId { kind: IdKind::Vertex, id: v.to_string() });
        }
    }
    let mut edges = BTreeSet::new();
    for e in &spec.edges {
        if !edges.insert(&e.id) {
            return Err(GraphError::DuplicateId { kind: IdKind::Edge, id: e.id.to_string() });
        }
        for end in [&e.src, &e.tgt] {
            if !seen.contains(end) {
                return Err(GraphError::DanglingEndpoint { edge: e.id.clone(), vertex: end.clone() });
            }
        }
    }
    Ok(())
}

/// A finite directed multigraph. Always valid: the only ways to build one go
/// through [`validate_graph`] or the checked `add_*` methods.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct DirectedGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Endpoints>,
}

impl TryFrom<GraphSpec> for DirectedGraph {
    type Error = GraphError;

    fn try_from(spec: GraphSpec) -> Result<Self, GraphError> {
        validate_graph(&spec)?;
        Ok(DirectedGraph {
            vertices: spec.vertices.into_iter().collect(),
            edges: spec.edges.into_iter().map(|e| (e.id, Endpoints { src: e.src, tgt: e.tgt })).collect(),
        })
    }
}

impl From<DirectedGraph> for GraphSpec {
    fn from(g: DirectedGraph) -> Self {
        GraphSpec {
            vertices: g.vertices.into_iter().collect(),
            edges: g.edges.into_iter().map(|(id, Endpoints { src, tgt })| EdgeSpec { id, src, tgt }).collect(),
        }
    }
}

impl DirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// The edgeless graph on `vertices`; duplicates collapse.
    pub fn discrete<I, V>(vertices: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        DirectedGraph { vertices: vertices.into_iter().map(Into::into).collect(), edges: BTreeMap::new() }
    }

    pub fn add_vertex(&mut self, v: impl Into<VertexId>) -> Result<(), GraphError> {
        let v = v.into();
        if self.vertices.contains(&v) {
            return Err(GraphError::DuplicateId { kind: IdKind::Vertex, id: v.0 });
        }
        self.vertices.insert(v);
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<EdgeId>,
        src: impl Into<VertexId>,
        tgt: impl Into<VertexId>,
    ) -> Result<(), GraphError> {
        let (id, src, tgt) = (id.into(), src.into(), tgt.into());
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateId { kind: IdKind::Edge, id: id.0 });
        }
        for end in [&src, &tgt] {
            if !self.vertices.contains(end) {
                return Err(GraphError::DanglingEndpoint { edge: id, vertex: end.clone() });
            }
        }
        self.edges.insert(id, Endpoints { src, tgt });
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &Endpoints)> + '_ {
        self.edges.iter()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> + '_ {
        self.edges.keys()
    }

    pub fn endpoints(&self, e: &EdgeId) -> Option<&Endpoints> {
        self.edges.get(e)
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn contains_edge(&self, e: &EdgeId) -> bool {
        self.edges.contains_key(e)
    }

    fn vertex_positions(&self) -> BTreeMap<&VertexId, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect()
    }
}

/// Partition of the vertices into weak components. Block `i` is the
/// component whose smallest vertex is the `i`-th smallest among all
/// component minima.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    blocks: Vec<Vec<VertexId>>,
    index: BTreeMap<VertexId, usize>,
}

impl VertexPartition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<VertexId>] {
        &self.blocks
    }

    pub fn block_of(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn same_block(&self, u: &VertexId, v: &VertexId) -> bool {
        matches!((self.block_of(u), self.block_of(v)), (Some(x), Some(y)) if x == y)
    }
}

/// Weak connectivity: edge direction is ignored.
pub fn components(g: &DirectedGraph) -> VertexPartition {
    let pos = g.vertex_positions();
    let mut uf = UnionFind::<usize>::new(pos.len());
    for ends in g.edges.values() {
        uf.union(pos[&ends.src], pos[&ends.tgt]);
    }
    let mut rep_block = BTreeMap::new();
    let mut blocks: Vec<Vec<VertexId>> = Vec::new();
    let mut index = BTreeMap::new();
    // vertices are visited in sorted order, so blocks come out ordered by minimum
    for (v, &i) in &pos {
        let rep = uf.find(i);
        let b = *rep_block.entry(rep).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push((*v).clone());
        index.insert((*v).clone(), b);
    }
    VertexPartition { blocks, index }
}

/// Total order on edge ids used to pick spanning forests greedily.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Bytewise order on edge ids.
    #[default]
    Lexicographic,
    /// Listed edges first, in list order; unlisted edges afterwards in
    /// bytewise order. Ids absent from the graph are skipped.
    Explicit(Vec<EdgeId>),
}

impl TieBreak {
    pub fn order<'g>(&self, g: &'g DirectedGraph) -> Vec<&'g EdgeId> {
        match self {
            TieBreak::Lexicographic => g.edges.keys().collect(),
            TieBreak::Explicit(list) => {
                let mut out = Vec::with_capacity(g.edge_count());
                let mut placed = BTreeSet::new();
                for e in list {
                    if let Some((id, _)) = g.edges.get_key_value(e) {
                        if placed.insert(id) {
                            out.push(id);
                        }
                    }
                }
                out.extend(g.edges.keys().filter(|e| !placed.contains(e)));
                out
            }
        }
    }
}

/// Link from a non-root vertex to its parent in a rooted spanning forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParentLink {
    pub edge: EdgeId,
    pub parent: VertexId,
}

/// A spanning forest of `host`, rooted at the smallest vertex of each tree.
#[derive(Clone, Debug)]
pub struct Forest {
    host: Arc<DirectedGraph>,
    tree_edges: BTreeSet<EdgeId>,
    parent: BTreeMap<VertexId, ParentLink>,
    root: BTreeMap<VertexId, VertexId>,
    depth: BTreeMap<VertexId, usize>,
}

impl PartialEq for Forest {
    fn eq(&self, other: &Self) -> bool {
        self.tree_edges == other.tree_edges && (Arc::ptr_eq(&self.host, &other.host) || self.host == other.host)
    }
}

impl Eq for Forest {}

impl Forest {
    fn rooted(host: Arc<DirectedGraph>, tree_edges: BTreeSet<EdgeId>) -> Self {
        let mut adj: BTreeMap<&VertexId, Vec<(&EdgeId, &VertexId)>> = BTreeMap::new();
        for e in &tree_edges {
            let ends = &host.edges[e];
            adj.entry(&ends.src).or_default().push((e, &ends.tgt));
            adj.entry(&ends.tgt).or_default().push((e, &ends.src));
        }
        let mut parent = BTreeMap::new();
        let mut root = BTreeMap::new();
        let mut depth = BTreeMap::new();
        for r in host.vertices() {
            if root.contains_key(r) {
                continue;
            }
            root.insert(r.clone(), r.clone());
            depth.insert(r.clone(), 0);
            let mut queue = VecDeque::from([r]);
            while let Some(v) = queue.pop_front() {
                let d = depth[v] + 1;
                for &(e, w) in adj.get(v).map(Vec::as_slice).unwrap_or_default() {
                    if root.contains_key(w) {
                        continue;
                    }
                    root.insert(w.clone(), r.clone());
                    depth.insert(w.clone(), d);
                    parent.insert(w.clone(), ParentLink { edge: e.clone(), parent: v.clone() });
                    queue.push_back(w);
                }
            }
        }
        Forest { host, tree_edges, parent, root, depth }
    }

    pub fn host(&self) -> &Arc<DirectedGraph> {
        &self.host
    }

    pub fn tree_edges(&self) -> &BTreeSet<EdgeId> {
        &self.tree_edges
    }

    pub fn edge_count(&self) -> usize {
        self.tree_edges.len()
    }

    pub fn contains(&self, e: &EdgeId) -> bool {
        self.tree_edges.contains(e)
    }

    /// Host edges not in the forest, in id order.
    pub fn non_tree_edges(&self) -> impl Iterator<Item = &EdgeId> + '_ {
        self.host.edge_ids().filter(|e| !self.tree_edges.contains(*e))
    }

    pub fn root_of(&self, v: &VertexId) -> Option<&VertexId> {
        self.root.get(v)
    }

    pub fn parent_link(&self, v: &VertexId) -> Option<&ParentLink> {
        self.parent.get(v)
    }

    pub fn depth(&self, v: &VertexId) -> Option<usize> {
        self.depth.get(v).copied()
    }

    /// The forest as a graph in its own right: every host vertex, tree edges only.
    pub fn as_graph(&self) -> DirectedGraph {
        DirectedGraph {
            vertices: self.host.vertices.clone(),
            edges: self.tree_edges.iter().map(|e| (e.clone(), self.host.edges[e].clone())).collect(),
        }
    }
}

/// Greedy spanning forest scanning edges in `tie_break` order.
pub fn spanning_forest(g: &Arc<DirectedGraph>, tie_break: &TieBreak) -> Forest {
    spanning_forest_containing(g, &BTreeSet::new(), tie_break).expect("an empty required set is always acyclic")
}

/// Spanning forest that contains every edge of `required`, completed
/// greedily in `tie_break` order.
pub fn spanning_forest_containing(
    g: &Arc<DirectedGraph>,
    required: &BTreeSet<EdgeId>,
    tie_break: &TieBreak,
) -> Result<Forest, GraphError> {
    let pos = g.vertex_positions();
    let mut uf = UnionFind::<usize>::new(pos.len());
    let mut tree = BTreeSet::new();
    for e in required {
        let ends = g.endpoints(e).ok_or_else(|| GraphError::UnknownEdge(e.clone()))?;
        if !uf.union(pos[&ends.src], pos[&ends.tgt]) {
            return Err(GraphError::RequiredEdgesContainCycle(e.clone()));
        }
        tree.insert(e.clone());
    }
    for e in tie_break.order(g) {
        let ends = &g.edges[e];
        if uf.union(pos[&ends.src], pos[&ends.tgt]) {
            tree.insert(e.clone());
        }
    }
    Ok(Forest::rooted(Arc::clone(g), tree))
}

/// Which leg of a span an edge of a graph pushout came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PushoutSide {
    Left,
    Right,
}

impl PushoutSide {
    fn tag(self) -> &'static str {
        match self {
            PushoutSide::Left => "A:",
            PushoutSide::Right => "B:",
        }
    }
}

/// Result of [`graph_pushout`]: the glued graph plus the edge renaming.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPushout {
    pub graph: DirectedGraph,
    origin: BTreeMap<EdgeId, (PushoutSide, EdgeId)>,
    left: BTreeMap<EdgeId, EdgeId>,
    right: BTreeMap<EdgeId, EdgeId>,
}

impl GraphPushout {
    /// Side and original id of a pushout edge.
    pub fn origin(&self, e: &EdgeId) -> Option<(PushoutSide, &EdgeId)> {
        self.origin.get(e).map(|(s, id)| (*s, id))
    }

    /// Pushout id of an edge of one of the legs.
    pub fn image(&self, side: PushoutSide, e: &EdgeId) -> Option<&EdgeId> {
        match side {
            PushoutSide::Left => self.left.get(e),
            PushoutSide::Right => self.right.get(e),
        }
    }
}

/// Pushout of `x <- Z -> y` where `Z` is the discrete graph on `shared`:
/// same vertices, disjoint union of edges. Ids present in both inputs are
/// prefixed with `A:` / `B:`; others keep their names.
pub fn graph_pushout(
    x: &DirectedGraph,
    y: &DirectedGraph,
    shared: &BTreeSet<VertexId>,
) -> Result<GraphPushout, GraphError> {
    if x.vertices != *shared {
        return Err(GraphError::VertexSetMismatch { side: "left" });
    }
    if y.vertices != *shared {
        return Err(GraphError::VertexSetMismatch { side: "right" });
    }
    let mut taken: BTreeSet<EdgeId> = x.edges.keys().chain(y.edges.keys()).cloned().collect();
    let mut out = BTreeMap::new();
    let mut origin = BTreeMap::new();
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (side, g, other, map) in [(PushoutSide::Left, x, y, &mut left), (PushoutSide::Right, y, x, &mut right)] {
        for (e, ends) in &g.edges {
            let id = if other.edges.contains_key(e) {
                let mut name = format!("{}{}", side.tag(), e);
                while taken.contains(name.as_str()) {
                    name.insert_str(0, side.tag());
                }
                let id = EdgeId(name);
                taken.insert(id.clone());
                id
            } else {
                e.clone()
            };
            out.insert(id.clone(), ends.clone());
            origin.insert(id.clone(), (side, e.clone()));
            map.insert(e.clone(), id);
        }
    }
    Ok(GraphPushout { graph: DirectedGraph { vertices: shared.clone(), edges: out }, origin, left, right })
}

impl std::borrow::Borrow<str> for EdgeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Cycle rank `e - v + 1` of each weak component, as `(block, rank)` in block order.
pub fn euler_ranks(g: &DirectedGraph) -> Vec<(usize, usize)> {
    let part = components(g);
    let mut edges = vec![0usize; part.block_count()];
    for ends in g.edges.values() {
        edges[part.index[&ends.src]] += 1;
    }
    part.blocks.iter().zip(edges).enumerate().map(|(i, (block, e))| (i, e + 1 - block.len())).collect()
}

/// Subgraph on `vertex_set` keeping every edge with both endpoints inside.
pub fn induced_subgraph(g: &DirectedGraph, vertex_set: &BTreeSet<VertexId>) -> Result<DirectedGraph, GraphError> {
    if let Some(v) = vertex_set.iter().find(|v| !g.contains_vertex(v)) {
        return Err(GraphError::UnknownVertex(v.clone()));
    }
    Ok(DirectedGraph {
        vertices: vertex_set.clone(),
        edges: g
            .edges
            .iter()
            .filter(|(_, ends)| vertex_set.contains(&ends.src) && vertex_set.contains(&ends.tgt))
            .map(|(e, ends)| (e.clone(), ends.clone()))
            .collect(),
    })
}
