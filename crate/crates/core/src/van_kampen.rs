//! Graph models of spaces: two-piece decompositions, fundamental groupoids
//! on a set of basepoints, point separation, and certificates that the
//! fundamental group contains an infinite cyclic retract.
//!
//! A space is a finite 1-complex given as a [`DirectedGraph`]. Open pieces
//! are full induced subgraphs. Every fundamental groupoid here is free, so
//! all claims are checked exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::free_groupoid::{basis_loop, tree_path, Sign, Word, WordError, WordSpec};
use crate::graph::{
    components, induced_subgraph, spanning_forest, DirectedGraph, EdgeId, Forest, GraphError, GraphSpec, TieBreak,
    VertexId, VertexPartition,
};
use crate::pushout::{GWord, PushoutInstance, RetractError, RetractReport, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Retract(#[from] RetractError),
    #[error("point `{0}` lies in the deleted set")]
    PointInDeletedSet(VertexId),
    #[error("the component of `{0}` contains no basepoint")]
    ComponentWithoutBasepoint(VertexId),
    #[error("the component of `{vertex}` in piece {piece} misses the intersection")]
    PieceMissesIntersection { piece: Piece, vertex: VertexId },
    #[error("the pieces do not intersect")]
    EmptyIntersection,
    #[error("vertex `{0}` lies in neither piece")]
    NotCovering(VertexId),
    #[error("edge `{0}` is not contained in either piece")]
    EdgeAcrossPieces(EdgeId),
    #[error("vertex `{0}` lies in both D and E")]
    OverlappingSets(VertexId),
    #[error("edge `{0}` joins D to E; subdivide it by inserting a midpoint vertex")]
    SetsJoinedByEdge(EdgeId),
    #[error("the scenario satisfies the separation property; nothing to certify")]
    PbiHolds,
    #[error("the space is disconnected")]
    SpaceDisconnected,
    #[error("point `{0}` is not in the intersection of the pieces")]
    PointOutsideIntersection(VertexId),
}

impl SpaceError {
    pub fn code(&self) -> &'static str {
        match self {
            SpaceError::Graph(e) => e.code(),
            SpaceError::Word(e) => e.code(),
            SpaceError::Retract(e) => e.code(),
            SpaceError::PointInDeletedSet(_) => "PointInDeletedSet",
            SpaceError::ComponentWithoutBasepoint(_) => "ComponentWithoutBasepoint",
            SpaceError::PieceMissesIntersection { .. } => "PieceMissesIntersection",
            SpaceError::EmptyIntersection => "EmptyIntersection",
            SpaceError::NotCovering(_) => "NotCovering",
            SpaceError::EdgeAcrossPieces(_) => "EdgeAcrossPieces",
            SpaceError::OverlappingSets(_) => "OverlappingSets",
            SpaceError::SetsJoinedByEdge(_) => "SetsJoinedByEdge",
            SpaceError::PbiHolds => "PbiHolds",
            SpaceError::SpaceDisconnected => "SpaceDisconnected",
            SpaceError::PointOutsideIntersection(_) => "PointOutsideIntersection",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    U,
    V,
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Piece::U => "U",
            Piece::V => "V",
        })
    }
}

/// A space modelled as a 1-complex.
pub type SpaceGraph = Arc<DirectedGraph>;

/// Whether deleting `d_set` puts `a` and `b` in different components.
pub fn separates(
    space: &DirectedGraph,
    d_set: &BTreeSet<VertexId>,
    a: &VertexId,
    b: &VertexId,
) -> Result<bool, SpaceError> {
    for p in [a, b] {
        if !space.contains_vertex(p) {
            return Err(GraphError::UnknownVertex(p.clone()).into());
        }
        if d_set.contains(p) {
            return Err(SpaceError::PointInDeletedSet(p.clone()));
        }
    }
    let rest: BTreeSet<VertexId> = space.vertices().difference(d_set).cloned().collect();
    let parts = components(&induced_subgraph(space, &rest)?);
    Ok(!parts.same_block(a, b))
}

/// Cover of a space by two induced pieces `U`, `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    space: SpaceGraph,
    u: BTreeSet<VertexId>,
    v: BTreeSet<VertexId>,
}

/// Wire form: `{"space", "u", "v"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSpec {
    pub space: GraphSpec,
    pub u: Vec<VertexId>,
    pub v: Vec<VertexId>,
}

impl Decomposition {
    /// Requires `U ∪ V` to cover the vertices and every edge to lie in one
    /// of the induced pieces.
    pub fn new(space: SpaceGraph, u: BTreeSet<VertexId>, v: BTreeSet<VertexId>) -> Result<Self, SpaceError> {
        if let Some(x) = u.iter().chain(&v).find(|x| !space.contains_vertex(x)) {
            return Err(GraphError::UnknownVertex(x.clone()).into());
        }
        if let Some(x) = space.vertices().iter().find(|x| !u.contains(*x) && !v.contains(*x)) {
            return Err(SpaceError::NotCovering(x.clone()));
        }
        for (e, ends) in space.edges() {
            let in_u = u.contains(&ends.src) && u.contains(&ends.tgt);
            let in_v = v.contains(&ends.src) && v.contains(&ends.tgt);
            if !in_u && !in_v {
                return Err(SpaceError::EdgeAcrossPieces(e.clone()));
            }
        }
        Ok(Decomposition { space, u, v })
    }

    pub fn from_spec(spec: DecompositionSpec) -> Result<Self, SpaceError> {
        let space = Arc::new(DirectedGraph::try_from(spec.space)?);
        Self::new(space, spec.u.into_iter().collect(), spec.v.into_iter().collect())
    }

    pub fn to_spec(&self) -> DecompositionSpec {
        DecompositionSpec {
            space: (*self.space).clone().into(),
            u: self.u.iter().cloned().collect(),
            v: self.v.iter().cloned().collect(),
        }
    }

    pub fn space(&self) -> &SpaceGraph {
        &self.space
    }

    pub fn u(&self) -> &BTreeSet<VertexId> {
        &self.u
    }

    pub fn v(&self) -> &BTreeSet<VertexId> {
        &self.v
    }

    pub fn intersection(&self) -> BTreeSet<VertexId> {
        self.u.intersection(&self.v).cloned().collect()
    }

    pub fn piece(&self, which: Piece) -> DirectedGraph {
        let set = match which {
            Piece::U => &self.u,
            Piece::V => &self.v,
        };
        induced_subgraph(&self.space, set).expect("pieces are validated")
    }
}

/// Two disjoint vertex sets `D`, `E` and points `a`, `b` outside both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbpScenario {
    space: SpaceGraph,
    d: BTreeSet<VertexId>,
    e: BTreeSet<VertexId>,
    a: VertexId,
    b: VertexId,
}

/// Wire form: `{"space", "d", "e", "a", "b"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub space: GraphSpec,
    pub d: Vec<VertexId>,
    pub e: Vec<VertexId>,
    pub a: VertexId,
    pub b: VertexId,
}

impl PbpScenario {
    /// Rejects overlapping `D`, `E`, points inside `D ∪ E`, and edges from
    /// `D` to `E` (those should be subdivided first).
    pub fn new(
        space: SpaceGraph,
        d: BTreeSet<VertexId>,
        e: BTreeSet<VertexId>,
        a: VertexId,
        b: VertexId,
    ) -> Result<Self, SpaceError> {
        if let Some(x) = d.iter().chain(&e).chain([&a, &b]).find(|x| !space.contains_vertex(x)) {
            return Err(GraphError::UnknownVertex(x.clone()).into());
        }
        if let Some(x) = d.intersection(&e).next() {
            return Err(SpaceError::OverlappingSets(x.clone()));
        }
        for p in [&a, &b] {
            if d.contains(p) || e.contains(p) {
                return Err(SpaceError::PointInDeletedSet(p.clone()));
            }
        }
        for (id, ends) in space.edges() {
            let joins = |x: &BTreeSet<VertexId>, y: &BTreeSet<VertexId>| x.contains(&ends.src) && y.contains(&ends.tgt);
            if joins(&d, &e) || joins(&e, &d) {
                return Err(SpaceError::SetsJoinedByEdge(id.clone()));
            }
        }
        Ok(PbpScenario { space, d, e, a, b })
    }

    pub fn from_spec(spec: ScenarioSpec) -> Result<Self, SpaceError> {
        let space = Arc::new(DirectedGraph::try_from(spec.space)?);
        Self::new(space, spec.d.into_iter().collect(), spec.e.into_iter().collect(), spec.a, spec.b)
    }

    pub fn space(&self) -> &SpaceGraph {
        &self.space
    }

    pub fn d(&self) -> &BTreeSet<VertexId> {
        &self.d
    }

    pub fn e(&self) -> &BTreeSet<VertexId> {
        &self.e
    }

    pub fn a(&self) -> &VertexId {
        &self.a
    }

    pub fn b(&self) -> &VertexId {
        &self.b
    }

    fn sep(&self, set: &BTreeSet<VertexId>) -> bool {
        separates(&self.space, set, &self.a, &self.b).expect("scenario points avoid D and E")
    }
}

/// True iff neither `D` nor `E` separates `a` from `b` but `D ∪ E` does.
pub fn pbi_fails(sc: &PbpScenario) -> bool {
    let both: BTreeSet<VertexId> = sc.d.union(&sc.e).cloned().collect();
    !sc.sep(&sc.d) && !sc.sep(&sc.e) && sc.sep(&both)
}

/// Generating graph of the fundamental groupoid of a piece on a set of
/// basepoints, with the path each generator stands for.
#[derive(Clone, Debug)]
pub struct GroupoidGenerators {
    pub graph: DirectedGraph,
    /// Generator id -> word in the piece.
    pub expansions: BTreeMap<EdgeId, Word>,
    pub forest: Forest,
}

/// Generators of `π(piece, basepoints)`: per component, with root the
/// smallest basepoint, an edge `root -> s` for every other basepoint `s`
/// (id `path:s`) and a loop at the root for every non-forest edge `e`
/// (id `loop:e`).
pub fn groupoid_generators(
    piece: &Arc<DirectedGraph>,
    basepoints: &BTreeSet<VertexId>,
    tie_break: &TieBreak,
) -> Result<GroupoidGenerators, SpaceError> {
    if let Some(s) = basepoints.iter().find(|s| !piece.contains_vertex(s)) {
        return Err(GraphError::UnknownVertex(s.clone()).into());
    }
    let forest = spanning_forest(piece, tie_break);
    let mut root_base: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
    for s in basepoints {
        let r = forest.root_of(s).expect("basepoint in piece");
        root_base.entry(r).or_insert(s);
    }
    for v in piece.vertices() {
        if !root_base.contains_key(forest.root_of(v).expect("vertex in piece")) {
            let block_min = forest.root_of(v).expect("vertex in piece");
            return Err(SpaceError::ComponentWithoutBasepoint(block_min.clone()));
        }
    }
    let mut graph = DirectedGraph::discrete(basepoints.iter().cloned());
    let mut expansions = BTreeMap::new();
    for s in basepoints {
        let root = root_base[forest.root_of(s).expect("basepoint in piece")];
        if root != s {
            let id = EdgeId::new(format!("path:{s}"));
            graph.add_edge(id.clone(), root.clone(), s.clone())?;
            expansions.insert(id, tree_path(&forest, root, s)?);
        }
    }
    for e in forest.non_tree_edges() {
        let src = &piece.endpoints(e).expect("piece edge").src;
        let root = root_base[forest.root_of(src).expect("vertex in piece")];
        let id = EdgeId::new(format!("loop:{e}"));
        graph.add_edge(id.clone(), root.clone(), root.clone())?;
        expansions.insert(id, basis_loop(&forest, root, e)?);
    }
    Ok(GroupoidGenerators { graph, expansions, forest })
}

/// A decomposition turned into a pushout instance, with translation
/// tables from instance generators back to words in the space.
#[derive(Clone, Debug)]
pub struct VkInstance {
    pub instance: Arc<PushoutInstance>,
    /// Basepoint of each component of `U ∩ V`, in block order.
    pub basepoints: Vec<VertexId>,
    pub intersection: VertexPartition,
    pub space: SpaceGraph,
    /// Generator id -> word in the space, for sides A (from `U`), B (from
    /// `V`) and C (loops of `U ∩ V`).
    pub expansions_a: BTreeMap<EdgeId, Word>,
    pub expansions_b: BTreeMap<EdgeId, Word>,
    pub expansions_c: BTreeMap<EdgeId, Word>,
}

impl VkInstance {
    /// Basepoint of the intersection component containing `p`.
    pub fn basepoint_of(&self, p: &VertexId) -> Option<&VertexId> {
        self.intersection.block_of(p).map(|b| &self.basepoints[b])
    }

    /// Reads a word of the pushout as a path in the space.
    pub fn expand(&self, g: &GWord) -> Result<Word, SpaceError> {
        let mut acc = Word::identity(&self.space, g.source())?;
        for l in g.letters() {
            let table = match l.side {
                Side::A => &self.expansions_a,
                Side::B => &self.expansions_b,
                Side::C => &self.expansions_c,
            };
            let w = table
                .get(&l.letter.edge)
                .ok_or_else(|| RetractError::UnknownLetter { side: l.side, edge: l.letter.edge.clone() })?;
            acc = acc.compose(&match l.letter.sign {
                Sign::Pos => w.clone(),
                Sign::Neg => w.invert(),
            })?;
        }
        Ok(acc)
    }
}

fn rehost_all(table: BTreeMap<EdgeId, Word>, host: &SpaceGraph) -> Result<BTreeMap<EdgeId, Word>, SpaceError> {
    table.into_iter().map(|(e, w)| Ok((e, w.rehost(host)?))).collect()
}

/// Pushout instance of the fundamental groupoids of `U`, `V`, `U ∩ V` on
/// one basepoint per component of `U ∩ V` (its smallest vertex).
pub fn decomposition_to_instance(dec: &Decomposition, tie_break: &TieBreak) -> Result<VkInstance, SpaceError> {
    let meet = dec.intersection();
    if meet.is_empty() {
        return Err(SpaceError::EmptyIntersection);
    }
    let meet_graph = Arc::new(induced_subgraph(&dec.space, &meet)?);
    let intersection = components(&meet_graph);
    let basepoints: Vec<VertexId> = intersection.blocks().iter().map(|b| b[0].clone()).collect();
    let base_set: BTreeSet<VertexId> = basepoints.iter().cloned().collect();

    let mut gens = Vec::with_capacity(2);
    for which in [Piece::U, Piece::V] {
        let piece = Arc::new(dec.piece(which));
        let g = groupoid_generators(&piece, &base_set, tie_break).map_err(|e| match e {
            SpaceError::ComponentWithoutBasepoint(vertex) => {
                SpaceError::PieceMissesIntersection { piece: which, vertex }
            }
            other => other,
        })?;
        gens.push(g);
    }
    let gens_v = gens.pop().expect("two pieces");
    let gens_u = gens.pop().expect("two pieces");

    let meet_gens = groupoid_generators(&meet_graph, &base_set, tie_break)?;
    let mut c_loops: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    let mut expansions_c = BTreeMap::new();
    for (id, w) in meet_gens.expansions {
        if id.as_str().starts_with("loop:") {
            c_loops.entry(w.source().clone()).or_default().push(id.clone());
            expansions_c.insert(id, w);
        }
    }

    let instance = Arc::new(PushoutInstance::new(base_set, gens_u.graph, gens_v.graph, c_loops)?);
    Ok(VkInstance {
        instance,
        basepoints,
        intersection,
        expansions_a: rehost_all(gens_u.expansions, &dec.space)?,
        expansions_b: rehost_all(gens_v.expansions, &dec.space)?,
        expansions_c: rehost_all(expansions_c, &dec.space)?,
        space: Arc::clone(&dec.space),
    })
}

/// Certificate that the fundamental group of the space contains an
/// infinite cyclic retract: a loop in the space whose image in the free
/// retract `Fr W` is nontrivial.
#[derive(Clone, Debug)]
pub struct ZRetractCertificate {
    pub report: RetractReport,
    pub basepoints: Vec<VertexId>,
    pub pair: (VertexId, VertexId),
    pub loop_in_space: Word,
    pub retract_image: Word,
}

/// Wire form of a certificate; both words use the word wire format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSpec {
    pub basepoints: Vec<VertexId>,
    pub pair: (VertexId, VertexId),
    pub k: Option<usize>,
    pub loop_in_space: WordSpec,
    pub retract_image: WordSpec,
}

impl ZRetractCertificate {
    pub fn to_spec(&self) -> CertificateSpec {
        CertificateSpec {
            basepoints: self.basepoints.clone(),
            pair: self.pair.clone(),
            k: self.report.k(),
            loop_in_space: self.loop_in_space.to_spec(),
            retract_image: self.retract_image.to_spec(),
        }
    }
}

fn certificate(
    vk: &VkInstance,
    report: RetractReport,
    a: &VertexId,
    b: &VertexId,
) -> Result<ZRetractCertificate, SpaceError> {
    let retract_image = report.witness(a, b)?;
    let loop_in_space = vk.expand(&report.include_f(&retract_image)?)?;
    Ok(ZRetractCertificate {
        report,
        basepoints: vk.basepoints.clone(),
        pair: (a.clone(), b.clone()),
        loop_in_space,
        retract_image,
    })
}

/// Looks for two basepoints joined in both pieces and certifies the
/// resulting witness loop. `None` when no such pair exists.
pub fn detect_z_retract(dec: &Decomposition) -> Result<Option<ZRetractCertificate>, SpaceError> {
    if components(&dec.space).block_count() != 1 {
        return Err(SpaceError::SpaceDisconnected);
    }
    let vk = decomposition_to_instance(dec, &TieBreak::Lexicographic)?;
    let report = vk.instance.build_retract(&TieBreak::Lexicographic, &BTreeSet::new(), &BTreeSet::new())?;
    let (x, y) = (report.forest_x(), report.forest_y());
    for (i, a) in vk.basepoints.iter().enumerate() {
        for b in &vk.basepoints[i + 1..] {
            if x.root_of(a) == x.root_of(b) && y.root_of(a) == y.root_of(b) {
                return certificate(&vk, report, a, b).map(Some);
            }
        }
    }
    Ok(None)
}

/// Certificate for the witness between the intersection components of the
/// points `p` and `q`.
pub fn certify_points(dec: &Decomposition, p: &VertexId, q: &VertexId) -> Result<ZRetractCertificate, SpaceError> {
    let vk = decomposition_to_instance(dec, &TieBreak::Lexicographic)?;
    let a = vk.basepoint_of(p).ok_or_else(|| SpaceError::PointOutsideIntersection(p.clone()))?.clone();
    let b = vk.basepoint_of(q).ok_or_else(|| SpaceError::PointOutsideIntersection(q.clone()))?.clone();
    let report = vk.instance.build_retract(&TieBreak::Lexicographic, &BTreeSet::new(), &BTreeSet::new())?;
    certificate(&vk, report, &a, &b)
}

/// `U = X \ D`, `V = X \ E` for a scenario where the separation property fails.
pub fn pbp_to_decomposition(sc: &PbpScenario) -> Result<Decomposition, SpaceError> {
    if !pbi_fails(sc) {
        return Err(SpaceError::PbiHolds);
    }
    let all = sc.space.vertices();
    let dec = Decomposition::new(
        Arc::clone(&sc.space),
        all.difference(&sc.d).cloned().collect(),
        all.difference(&sc.e).cloned().collect(),
    )?;
    // a, b are split by D ∪ E but by neither D nor E alone
    let meet = components(&induced_subgraph(&sc.space, &dec.intersection())?);
    let (u, v) = (components(&dec.piece(Piece::U)), components(&dec.piece(Piece::V)));
    assert!(
        !meet.same_block(&sc.a, &sc.b) && u.same_block(&sc.a, &sc.b) && v.same_block(&sc.a, &sc.b),
        "separation failure must split a, b only in the intersection"
    );
    Ok(dec)
}

#[derive(Clone, Debug)]
pub struct PbpOutcome {
    pub pbi_fails: bool,
    pub certificate: Option<ZRetractCertificate>,
}

/// Checks the scenario and, when the property fails, certifies the loop
/// through `a` and `b`.
pub fn pbp_check(sc: &PbpScenario) -> Result<PbpOutcome, SpaceError> {
    if !pbi_fails(sc) {
        return Ok(PbpOutcome { pbi_fails: false, certificate: None });
    }
    let dec = pbp_to_decomposition(sc)?;
    let cert = certify_points(&dec, &sc.a, &sc.b)?;
    Ok(PbpOutcome { pbi_fails: true, certificate: Some(cert) })
}
