//! Arrows of the free groupoid on a directed graph, as reduced words of
//! signed edges.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedGraph, EdgeId, Forest, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("letter references unknown edge `{0}`")]
    UnknownLetter(EdgeId),
    #[error("letters are not composable at position {position}")]
    NotComposable { position: usize },
    #[error("words live in different graphs")]
    HostMismatch,
    #[error("`{0}` and `{1}` lie in different trees of the forest")]
    DifferentTrees(VertexId, VertexId),
    #[error("word is not a loop at `{0}`")]
    NotALoop(VertexId),
}

impl WordError {
    pub fn code(&self) -> &'static str {
        match self {
            WordError::UnknownVertex(_) => "UnknownVertex",
            WordError::UnknownLetter(_) => "UnknownLetter",
            WordError::NotComposable { .. } => "NotComposable",
            WordError::HostMismatch => "HostMismatch",
            WordError::DifferentTrees(..) => "DifferentTrees",
            WordError::NotALoop(_) => "NotALoop",
        }
    }
}

/// Orientation of a letter. Serialized as `1` / `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Pos,
    Neg,
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub edge: EdgeId,
    pub sign: Sign,
}

impl Letter {
    pub fn new(edge: impl Into<EdgeId>, sign: Sign) -> Self {
        Letter { edge: edge.into(), sign }
    }

    pub fn pos(edge: impl Into<EdgeId>) -> Self {
        Self::new(edge, Sign::Pos)
    }

    pub fn neg(edge: impl Into<EdgeId>) -> Self {
        Self::new(edge, Sign::Neg)
    }

    pub fn inverse(&self) -> Self {
        Letter { edge: self.edge.clone(), sign: -self.sign }
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.edge == other.edge && self.sign != other.sign
    }

    /// `(signed source, signed target)` in `g`.
    pub fn ends<'g>(&self, g: &'g DirectedGraph) -> Option<(&'g VertexId, &'g VertexId)> {
        let ends = g.endpoints(&self.edge)?;
        Some(match self.sign {
            Sign::Pos => (&ends.src, &ends.tgt),
            Sign::Neg => (&ends.tgt, &ends.src),
        })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "{}+", self.edge),
            Sign::Neg => write!(f, "{}-", self.edge),
        }
    }
}

pub(crate) fn same_host(a: &Arc<DirectedGraph>, b: &Arc<DirectedGraph>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Appends `letter` to a reduced stack, cancelling against the top.
pub(crate) fn push_reduced(stack: &mut Vec<Letter>, letter: Letter) {
    if stack.last().is_some_and(|top| top.cancels(&letter)) {
        stack.pop();
    } else {
        stack.push(letter);
    }
}

/// A reduced arrow `source -> target` of the free groupoid on `host`.
#[derive(Clone, Debug)]
pub struct Word {
    host: Arc<DirectedGraph>,
    source: VertexId,
    target: VertexId,
    letters: Vec<Letter>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.letters == other.letters
            && same_host(&self.host, &other.host)
    }
}

impl Eq for Word {}

impl Word {
    pub fn identity(host: &Arc<DirectedGraph>, v: &VertexId) -> Result<Word, WordError> {
        if !host.contains_vertex(v) {
            return Err(WordError::UnknownVertex(v.clone()));
        }
        Ok(Word { host: Arc::clone(host), source: v.clone(), target: v.clone(), letters: Vec::new() })
    }

    /// Freely reduces a composable letter sequence starting at `source`.
    pub fn reduce<I>(host: &Arc<DirectedGraph>, source: &VertexId, raw: I) -> Result<Word, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut word = Word::identity(host, source)?;
        let mut at = source.clone();
        for (position, letter) in raw.into_iter().enumerate() {
            let (s, t) = letter.ends(host).ok_or_else(|| WordError::UnknownLetter(letter.edge.clone()))?;
            if *s != at {
                return Err(WordError::NotComposable { position });
            }
            at = t.clone();
            push_reduced(&mut word.letters, letter);
        }
        word.target = at;
        Ok(word)
    }

    pub fn host(&self) -> &Arc<DirectedGraph> {
        &self.host
    }

    pub fn source(&self) -> &VertexId {
        &self.source
    }

    pub fn target(&self) -> &VertexId {
        &self.target
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }

    pub fn compose(&self, other: &Word) -> Result<Word, WordError> {
        if !same_host(&self.host, &other.host) {
            return Err(WordError::HostMismatch);
        }
        if self.target != other.source {
            return Err(WordError::NotComposable { position: self.letters.len() });
        }
        let mut letters = self.letters.clone();
        for l in &other.letters {
            push_reduced(&mut letters, l.clone());
        }
        Ok(Word { host: Arc::clone(&self.host), source: self.source.clone(), target: other.target.clone(), letters })
    }

    pub fn invert(&self) -> Word {
        Word {
            host: Arc::clone(&self.host),
            source: self.target.clone(),
            target: self.source.clone(),
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    /// Same letters, read in another graph that carries these edges with the
    /// same endpoints (e.g. a subgraph word moved into the ambient graph).
    pub fn rehost(&self, host: &Arc<DirectedGraph>) -> Result<Word, WordError> {
        Word::reduce(host, &self.source, self.letters.iter().cloned())
    }

    pub fn to_spec(&self) -> WordSpec {
        WordSpec { source: self.source.clone(), target: self.target.clone(), letters: self.letters.clone() }
    }

    /// Parses a wire word. The declared target must match where the letters end.
    pub fn from_spec(host: &Arc<DirectedGraph>, spec: &WordSpec) -> Result<Word, WordError> {
        let w = Word::reduce(host, &spec.source, spec.letters.iter().cloned())?;
        if w.target != spec.target {
            return Err(WordError::NotComposable { position: spec.letters.len() });
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} -> {}: [", self.source, self.target)?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]>")
    }
}

/// Wire form: `{"source", "target", "letters": [{"edge", "sign"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpec {
    pub source: VertexId,
    pub target: VertexId,
    pub letters: Vec<Letter>,
}

fn path_to_root<'a>(forest: &'a Forest, mut v: &'a VertexId) -> Vec<Letter> {
    let host = forest.host();
    let mut out = Vec::new();
    while let Some(link) = forest.parent_link(v) {
        let sign = if host.endpoints(&link.edge).is_some_and(|e| e.src == *v) { Sign::Pos } else { Sign::Neg };
        out.push(Letter::new(link.edge.clone(), sign));
        v = &link.parent;
    }
    out
}

/// The unique reduced word from `u` to `v` through tree edges.
pub fn tree_path(forest: &Forest, u: &VertexId, v: &VertexId) -> Result<Word, WordError> {
    let ru = forest.root_of(u).ok_or_else(|| WordError::UnknownVertex(u.clone()))?;
    let rv = forest.root_of(v).ok_or_else(|| WordError::UnknownVertex(v.clone()))?;
    if ru != rv {
        return Err(WordError::DifferentTrees(u.clone(), v.clone()));
    }
    let up = path_to_root(forest, u);
    let down = path_to_root(forest, v).into_iter().rev().map(|l| l.inverse());
    Word::reduce(forest.host(), u, up.into_iter().chain(down))
}

/// Element of a free group on an ordered basis of edge ids, as a reduced
/// sequence of signed basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeGroupElement {
    pub basis: Vec<EdgeId>,
    pub letters: Vec<Generator>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub generator: usize,
    pub sign: Sign,
}

impl FreeGroupElement {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Substitutes basis loops back in: inverse of [`loop_coordinates`].
    pub fn evaluate(&self, forest: &Forest, base: &VertexId) -> Result<Word, WordError> {
        let mut acc = Word::identity(forest.host(), base)?;
        for g in &self.letters {
            let edge = self.basis.get(g.generator).ok_or(WordError::HostMismatch)?;
            let loop_ = basis_loop(forest, base, edge)?;
            acc = acc.compose(&match g.sign {
                Sign::Pos => loop_,
                Sign::Neg => loop_.invert(),
            })?;
        }
        Ok(acc)
    }
}

impl fmt::Display for FreeGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "g[{}]", self.basis[g.generator])?;
            if g.sign == Sign::Neg {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// Free generator attached to a non-tree edge `e`: the loop
/// `base -> src(e) -> tgt(e) -> base` through tree paths, traversing `e` forwards.
pub fn basis_loop(forest: &Forest, base: &VertexId, edge: &EdgeId) -> Result<Word, WordError> {
    let host = forest.host();
    let ends = host.endpoints(edge).ok_or_else(|| WordError::UnknownLetter(edge.clone()))?;
    let to = tree_path(forest, base, &ends.src)?;
    let back = tree_path(forest, &ends.tgt, base)?;
    to.compose(&Word::reduce(host, &ends.src, [Letter::pos(edge.clone())])?)?.compose(&back)
}

/// Coordinates of a loop at `base` in the free basis of the vertex group
/// indexed by non-tree edges of `base`'s component (sorted by id).
pub fn loop_coordinates(forest: &Forest, base: &VertexId, w: &Word) -> Result<FreeGroupElement, WordError> {
    let host = forest.host();
    if !same_host(host, w.host()) {
        return Err(WordError::HostMismatch);
    }
    let root = forest.root_of(base).ok_or_else(|| WordError::UnknownVertex(base.clone()))?;
    if w.source() != base || w.target() != base {
        return Err(WordError::NotALoop(base.clone()));
    }
    let basis: Vec<EdgeId> = forest
        .non_tree_edges()
        .filter(|e| host.endpoints(e).is_some_and(|ends| forest.root_of(&ends.src) == Some(root)))
        .cloned()
        .collect();
    let index: BTreeMap<&EdgeId, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut letters: Vec<Generator> = Vec::new();
    for l in w.letters() {
        if forest.contains(&l.edge) {
            continue;
        }
        let g = Generator { generator: index[&l.edge], sign: l.sign };
        match letters.last() {
            Some(top) if top.generator == g.generator && top.sign != g.sign => {
                letters.pop();
            }
            _ => letters.push(g),
        }
    }
    Ok(FreeGroupElement { basis, letters })
}
