//! Row-finite k-graphs without sources, presented as a colored skeleton plus
//! commuting squares.
//!
//! A morphism is stored as the unique edge word whose colors never increase
//! from left to right, i.e. all color-0 edges are applied first. Words are
//! written in composition order: the leftmost edge is applied last, so the
//! range of a word is the range of its first edge.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::graph::{
    parse_edge_body, strip_comment, DirectedGraph, EdgeId, GraphError, GraphSpec, VertexId,
};

/// An element of the path category: a vertex (empty word) or a composable
/// edge word in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    degree: Vec<u32>,
    word: Vec<EdgeId>,
    source: VertexId,
    range: VertexId,
}

impl Morphism {
    pub fn identity(v: VertexId, k: usize) -> Self {
        Morphism {
            degree: vec![0; k],
            word: Vec::new(),
            source: v,
            range: v,
        }
    }

    pub(crate) fn from_parts(
        degree: Vec<u32>,
        word: Vec<EdgeId>,
        source: VertexId,
        range: VertexId,
    ) -> Self {
        Morphism {
            degree,
            word,
            source,
            range,
        }
    }

    pub fn degree(&self) -> &[u32] {
        &self.degree
    }

    pub fn word(&self) -> &[EdgeId] {
        &self.word
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    /// Total degree, the sum of the degree coordinates.
    pub fn grading(&self) -> usize {
        self.word.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.word.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KGraphError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("edge `{edge}` has color {color}, outside 1..={k}")]
    BadColor { edge: String, color: usize, k: usize },
    #[error("square mentions unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("square `{square}` is malformed: {reason}")]
    InvalidSquare { square: String, reason: String },
    #[error("square `{square}` pairs paths with different source or range")]
    EndpointMismatch { square: String },
    #[error("path `{path}` is paired by more than one square")]
    NonBijective { path: String },
    #[error("path `{path}` is not paired by any square")]
    IncompleteSquares { path: String },
    #[error("squares are not associative on `{path}`")]
    CubeViolation { path: String },
    #[error("vertex `{vertex}` receives no edge of color {color}")]
    MissingColor { vertex: String, color: usize },
}

impl KGraphError {
    /// Short stable name of the error class, used in reports.
    pub fn class(&self) -> &'static str {
        match self {
            KGraphError::Graph(_) => "graph",
            KGraphError::Syntax { .. } => "syntax",
            KGraphError::BadColor { .. } => "bad-color",
            KGraphError::UnknownEdge(_) => "unknown-edge",
            KGraphError::InvalidSquare { .. } => "invalid-square",
            KGraphError::EndpointMismatch { .. } => "endpoint-mismatch",
            KGraphError::NonBijective { .. } => "non-bijective",
            KGraphError::IncompleteSquares { .. } => "incomplete-squares",
            KGraphError::CubeViolation { .. } => "cube-violation",
            KGraphError::MissingColor { .. } => "missing-color",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("source of the left factor does not match the range of the right factor")]
    NotComposable,
    #[error("degree {requested:?} is not below {available:?}")]
    DegreeOutOfRange {
        requested: Vec<u32>,
        available: Vec<u32>,
    },
    #[error("degree vector has {got} coordinates, expected {k}")]
    WrongRank { got: usize, k: usize },
}

/// A parsed but not yet validated k-graph description.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KGraphSpec {
    pub k: usize,
    pub skeleton: GraphSpec,
    /// One 1-based color per edge of `skeleton`, in the same order.
    pub colors: Vec<usize>,
    /// `(e2, e1, f1, f2)` for each line `square e2.e1 = f1.f2`.
    pub squares: Vec<[String; 4]>,
}

impl KGraphSpec {
    pub fn parse(text: &str) -> Result<Self, KGraphError> {
        let mut spec = KGraphSpec::default();
        let mut header = false;
        let mut colors_given = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let syntax = |message: String| KGraphError::Syntax {
                line: lineno,
                message,
            };
            if !header {
                if line != "kgraph" {
                    return Err(syntax(format!("expected `kgraph` header, found `{line}`")));
                }
                header = true;
            } else if let Some(rest) = line.strip_prefix("colors") {
                let value = rest
                    .trim()
                    .strip_prefix('=')
                    .ok_or_else(|| syntax("expected `colors = <k>`".into()))?;
                spec.k = value
                    .trim()
                    .parse()
                    .map_err(|_| syntax(format!("bad color count `{}`", value.trim())))?;
                if spec.k == 0 {
                    return Err(syntax("need at least one color".into()));
                }
                colors_given = true;
            } else if let Some(rest) = line.strip_prefix("vertices:") {
                spec.skeleton
                    .vertices
                    .extend(rest.split_whitespace().map(str::to_owned));
            } else if let Some(rest) = line.strip_prefix("edge ") {
                let (id, src, (rng, tail)) = parse_edge_body(rest, lineno)?;
                let mut tokens = tail.split_whitespace();
                let color = match (tokens.next(), tokens.next(), tokens.next()) {
                    (Some("color"), Some(c), None) => c
                        .parse::<usize>()
                        .map_err(|_| syntax(format!("bad color `{c}`")))?,
                    _ => return Err(syntax("edge needs a trailing `color <c>`".into())),
                };
                spec.skeleton.edges.push((id, src, rng));
                spec.colors.push(color);
            } else if let Some(rest) = line.strip_prefix("square ") {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax("square needs `=`".into()))?;
                let pair = |side: &str| -> Result<(String, String), KGraphError> {
                    let (a, b) = side
                        .trim()
                        .split_once('.')
                        .ok_or_else(|| syntax(format!("expected `<edge>.<edge>`, got `{}`", side.trim())))?;
                    Ok((a.trim().to_owned(), b.trim().to_owned()))
                };
                let (e2, e1) = pair(lhs)?;
                let (f1, f2) = pair(rhs)?;
                spec.squares.push([e2, e1, f1, f2]);
            } else {
                return Err(syntax(format!("unrecognised line `{line}`")));
            }
        }
        if !header {
            return Err(KGraphError::Syntax {
                line: 0,
                message: "missing `kgraph` header".into(),
            });
        }
        if !colors_given {
            return Err(KGraphError::Syntax {
                line: 0,
                message: "missing `colors = <k>` line".into(),
            });
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGraph {
    k: usize,
    skeleton: DirectedGraph,
    /// 0-based color of each edge.
    colors: Vec<usize>,
    /// Both orientations of every square, keyed on the written pair
    /// `(applied last, applied first)`.
    swaps: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    squares: Vec<[EdgeId; 4]>,
}

impl KGraph {
    pub fn parse(text: &str) -> Result<Self, KGraphError> {
        Self::from_spec(&KGraphSpec::parse(text)?)
    }

    pub fn from_spec(spec: &KGraphSpec) -> Result<Self, KGraphError> {
        let skeleton = DirectedGraph::from_spec(&spec.skeleton)?;
        let k = spec.k;
        let mut colors = Vec::with_capacity(spec.colors.len());
        for (e, &c) in skeleton.edge_ids().zip(&spec.colors) {
            if c == 0 || c > k {
                return Err(KGraphError::BadColor {
                    edge: skeleton.edge_name(e).to_owned(),
                    color: c,
                    k,
                });
            }
            colors.push(c - 1);
        }
        let resolve = |name: &str| {
            skeleton
                .edge_by_name(name)
                .ok_or_else(|| KGraphError::UnknownEdge(name.to_owned()))
        };
        let mut squares = Vec::with_capacity(spec.squares.len());
        for sq in &spec.squares {
            squares.push([
                resolve(&sq[0])?,
                resolve(&sq[1])?,
                resolve(&sq[2])?,
                resolve(&sq[3])?,
            ]);
        }
        let graph = KGraph {
            k,
            skeleton,
            colors,
            swaps: HashMap::new(),
            squares,
        };
        graph.validated()
    }

    /// Views a directed graph as a 1-graph. The graph must have no sources.
    pub fn from_graph(graph: &DirectedGraph) -> Result<Self, KGraphError> {
        let kg = KGraph {
            k: 1,
            colors: vec![0; graph.edge_count()],
            skeleton: graph.clone(),
            swaps: HashMap::new(),
            squares: Vec::new(),
        };
        kg.validated()
    }

    fn square_label(&self, sq: &[EdgeId; 4]) -> String {
        let n = |e: EdgeId| self.skeleton.edge_name(e);
        format!("{}.{} = {}.{}", n(sq[0]), n(sq[1]), n(sq[2]), n(sq[3]))
    }

    fn pair_label(&self, left: EdgeId, right: EdgeId) -> String {
        format!(
            "{}.{}",
            self.skeleton.edge_name(left),
            self.skeleton.edge_name(right)
        )
    }

    fn validated(mut self) -> Result<Self, KGraphError> {
        let g = &self.skeleton;
        // Each square is stored as (lower color applied first) <-> (higher
        // color applied first).
        let mut lower_first: BTreeMap<(EdgeId, EdgeId), usize> = BTreeMap::new();
        let mut higher_first: BTreeMap<(EdgeId, EdgeId), usize> = BTreeMap::new();
        for (idx, sq) in self.squares.iter().enumerate() {
            let [e2, e1, f1, f2] = *sq;
            let invalid = |reason: &str| KGraphError::InvalidSquare {
                square: self.square_label(sq),
                reason: reason.to_owned(),
            };
            if g.source(e2) != g.range(e1) || g.source(f1) != g.range(f2) {
                return Err(invalid("a side is not a composable 2-path"));
            }
            let (c1, c2) = (self.colors[e1.0], self.colors[e2.0]);
            if c1 == c2 {
                return Err(invalid("a side uses a single color"));
            }
            if self.colors[f2.0] != c2 || self.colors[f1.0] != c1 {
                return Err(invalid("the two sides apply the colors in the same order"));
            }
            if g.source(e1) != g.source(f2) || g.range(e2) != g.range(f1) {
                return Err(KGraphError::EndpointMismatch {
                    square: self.square_label(sq),
                });
            }
            let (low, high) = if c1 < c2 {
                ((e2, e1), (f1, f2))
            } else {
                ((f1, f2), (e2, e1))
            };
            if lower_first.insert(low, idx).is_some() {
                return Err(KGraphError::NonBijective {
                    path: self.pair_label(low.0, low.1),
                });
            }
            if higher_first.insert(high, idx).is_some() {
                return Err(KGraphError::NonBijective {
                    path: self.pair_label(high.0, high.1),
                });
            }
        }
        // Completeness: every mixed-color 2-path needs a partner.
        for second in g.edge_ids() {
            for first in g.edge_ids() {
                if g.source(second) != g.range(first) {
                    continue;
                }
                let (c_first, c_second) = (self.colors[first.0], self.colors[second.0]);
                if c_first == c_second {
                    continue;
                }
                let table = if c_first < c_second {
                    &lower_first
                } else {
                    &higher_first
                };
                if !table.contains_key(&(second, first)) {
                    return Err(KGraphError::IncompleteSquares {
                        path: self.pair_label(second, first),
                    });
                }
            }
        }
        let mut swaps = HashMap::new();
        for sq in &self.squares {
            swaps.insert((sq[0], sq[1]), (sq[2], sq[3]));
            swaps.insert((sq[2], sq[3]), (sq[0], sq[1]));
        }
        self.swaps = swaps;
        if self.k >= 3 {
            self.check_cubes()?;
        }
        for v in self.skeleton.vertices() {
            for c in 0..self.k {
                let found = self
                    .skeleton
                    .incoming(v)
                    .iter()
                    .any(|e| self.colors[e.0] == c);
                if !found {
                    return Err(KGraphError::MissingColor {
                        vertex: self.skeleton.vertex_name(v).to_owned(),
                        color: c + 1,
                    });
                }
            }
        }
        Ok(self)
    }

    /// Both hexagons of square moves reversing a three-colored path must agree.
    fn check_cubes(&self) -> Result<(), KGraphError> {
        let g = &self.skeleton;
        for z in g.edge_ids() {
            for y in g.edge_ids().filter(|&y| g.source(y) == g.range(z)) {
                for x in g.edge_ids().filter(|&x| g.source(x) == g.range(y)) {
                    let (cx, cy, cz) = (self.colors[x.0], self.colors[y.0], self.colors[z.0]);
                    if cx == cy || cy == cz || cx == cz {
                        continue;
                    }
                    let mut a = [x, y, z];
                    let mut b = [x, y, z];
                    for p in [0, 1, 0] {
                        self.swap_at(&mut a, p);
                    }
                    for p in [1, 0, 1] {
                        self.swap_at(&mut b, p);
                    }
                    if a != b {
                        let n = |e: EdgeId| g.edge_name(e);
                        return Err(KGraphError::CubeViolation {
                            path: format!("{}.{}.{}", n(x), n(y), n(z)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn swap_at(&self, word: &mut [EdgeId], pos: usize) {
        let (a, b) = self.swaps[&(word[pos], word[pos + 1])];
        word[pos] = a;
        word[pos + 1] = b;
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn skeleton(&self) -> &DirectedGraph {
        &self.skeleton
    }

    /// 0-based color of an edge.
    pub fn color(&self, e: EdgeId) -> usize {
        self.colors[e.0]
    }

    /// Squares as `[e2, e1, f1, f2]` with `e2 e1 = f1 f2`.
    pub fn squares(&self) -> &[[EdgeId; 4]] {
        &self.squares
    }

    pub fn identity(&self, v: VertexId) -> Morphism {
        Morphism::identity(v, self.k)
    }

    pub fn edge_morphism(&self, e: EdgeId) -> Morphism {
        let mut degree = vec![0; self.k];
        degree[self.colors[e.0]] = 1;
        Morphism {
            degree,
            word: vec![e],
            source: self.skeleton.source(e),
            range: self.skeleton.range(e),
        }
    }

    /// Builds the morphism represented by an arbitrary composable edge word.
    pub fn morphism_from_word(&self, word: &[EdgeId]) -> Result<Morphism, MorphismError> {
        let g = &self.skeleton;
        let Some((&last, _)) = word.split_last() else {
            return Err(MorphismError::NotComposable);
        };
        if word.windows(2).any(|w| g.source(w[0]) != g.range(w[1])) {
            return Err(MorphismError::NotComposable);
        }
        let mut degree = vec![0; self.k];
        for e in word {
            degree[self.colors[e.0]] += 1;
        }
        let mut word = word.to_vec();
        self.sort_colors(&mut word);
        Ok(Morphism {
            degree,
            range: g.range(word[0]),
            source: g.source(last),
            word,
        })
    }

    /// Insertion sort into non-increasing colors, one square at a time.
    fn sort_colors(&self, word: &mut [EdgeId]) {
        for i in 1..word.len() {
            let mut j = i;
            while j > 0 && self.colors[word[j - 1].0] < self.colors[word[j].0] {
                self.swap_at(word, j - 1);
                j -= 1;
            }
        }
    }

    /// Rewrites `word` into the unique representative whose color sequence
    /// is `pattern`.
    fn rewrite_to_pattern(&self, word: &mut [EdgeId], pattern: &[usize]) {
        debug_assert_eq!(word.len(), pattern.len());
        for pos in 0..word.len() {
            let j = (pos..word.len())
                .find(|&j| self.colors[word[j].0] == pattern[pos])
                .expect("pattern has the same color counts as the word");
            for t in (pos..j).rev() {
                self.swap_at(word, t);
            }
        }
    }

    /// Color sequence of a normal-form word of degree `degree`.
    fn normal_pattern(&self, degree: &[u32]) -> Vec<usize> {
        (0..self.k)
            .rev()
            .flat_map(|c| std::iter::repeat_n(c, degree[c] as usize))
            .collect()
    }

    /// The composite `left ∘ right` (right applied first).
    pub fn compose(&self, left: &Morphism, right: &Morphism) -> Result<Morphism, MorphismError> {
        if left.source != right.range {
            return Err(MorphismError::NotComposable);
        }
        if right.is_vertex() {
            return Ok(left.clone());
        }
        if left.is_vertex() {
            return Ok(right.clone());
        }
        let mut word = Vec::with_capacity(left.word.len() + right.word.len());
        word.extend_from_slice(&left.word);
        word.extend_from_slice(&right.word);
        self.sort_colors(&mut word);
        let degree = left
            .degree
            .iter()
            .zip(&right.degree)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Morphism {
            degree,
            word,
            source: right.source,
            range: left.range,
        })
    }

    /// The unique `(head, tail)` with `lambda = head ∘ tail` and
    /// `d(head) = m`.
    pub fn factor(
        &self,
        lambda: &Morphism,
        m: &[u32],
    ) -> Result<(Morphism, Morphism), MorphismError> {
        if m.len() != self.k {
            return Err(MorphismError::WrongRank {
                got: m.len(),
                k: self.k,
            });
        }
        if m.iter().zip(&lambda.degree).any(|(a, b)| a > b) {
            return Err(MorphismError::DegreeOutOfRange {
                requested: m.to_vec(),
                available: lambda.degree.clone(),
            });
        }
        let rest: Vec<u32> = lambda.degree.iter().zip(m).map(|(a, b)| a - b).collect();
        let mut pattern = self.normal_pattern(m);
        pattern.extend(self.normal_pattern(&rest));
        let mut word = lambda.word.clone();
        self.rewrite_to_pattern(&mut word, &pattern);
        let split = pattern.len() - rest.iter().sum::<u32>() as usize;
        let (h, t) = word.split_at(split);
        let mid = if h.is_empty() {
            lambda.range
        } else {
            self.skeleton.source(*h.last().unwrap())
        };
        let head = Morphism {
            degree: m.to_vec(),
            word: h.to_vec(),
            source: mid,
            range: lambda.range,
        };
        let tail = Morphism {
            degree: rest,
            word: t.to_vec(),
            source: lambda.source,
            range: mid,
        };
        Ok((head, tail))
    }

    /// All morphisms of degree `n` with range `v`, in lexicographic order of
    /// their normal-form words.
    pub fn enumerate(&self, n: &[u32], v: VertexId) -> Vec<Morphism> {
        assert_eq!(n.len(), self.k, "degree vector has the wrong rank");
        let pattern = self.normal_pattern(n);
        if pattern.is_empty() {
            return vec![self.identity(v)];
        }
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(pattern.len());
        self.extend_words(&pattern, v, &mut word, &mut |w| {
            out.push(Morphism {
                degree: n.to_vec(),
                word: w.to_vec(),
                source: self.skeleton.source(*w.last().unwrap()),
                range: v,
            })
        });
        out
    }

    fn extend_words(
        &self,
        pattern: &[usize],
        at: VertexId,
        word: &mut Vec<EdgeId>,
        emit: &mut dyn FnMut(&[EdgeId]),
    ) {
        if word.len() == pattern.len() {
            emit(word);
            return;
        }
        let color = pattern[word.len()];
        for &e in self.skeleton.incoming(at) {
            if self.colors[e.0] != color {
                continue;
            }
            word.push(e);
            self.extend_words(pattern, self.skeleton.source(e), word, emit);
            word.pop();
        }
    }

    /// Human-readable name of a morphism: edge names joined by `.`, or the
    /// vertex name for identities.
    pub fn label(&self, m: &Morphism) -> String {
        morphism_label(&self.skeleton, m)
    }
}

pub(crate) fn morphism_label(g: &DirectedGraph, m: &Morphism) -> String {
    if m.is_vertex() {
        g.vertex_name(m.range).to_owned()
    } else {
        m.word
            .iter()
            .map(|e| g.edge_name(*e))
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl fmt::Display for KGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kgraph")?;
        writeln!(f, "colors = {}", self.k)?;
        write!(f, "vertices:")?;
        for v in self.skeleton.vertices() {
            write!(f, " {}", self.skeleton.vertex_name(v))?;
        }
        writeln!(f)?;
        for e in self.skeleton.edge_ids() {
            let g = &self.skeleton;
            writeln!(
                f,
                "edge {} : {} -> {} color {}",
                g.edge_name(e),
                g.vertex_name(g.source(e)),
                g.vertex_name(g.range(e)),
                self.colors[e.0] + 1
            )?;
        }
        for sq in &self.squares {
            writeln!(f, "square {}", self.square_label(sq))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TORUS2: &str = "kgraph\ncolors = 2\nvertices: v\n\
        edge b : v -> v color 1\nedge r : v -> v color 2\nsquare r.b = b.r\n";

    fn sq22_text(skip: Option<usize>) -> String {
        let mut s = String::from(
            "kgraph\ncolors = 2\nvertices: v\nedge b1 : v -> v color 1\nedge b2 : v -> v color 1\n\
             edge r1 : v -> v color 2\nedge r2 : v -> v color 2\n",
        );
        let mut idx = 0;
        for i in 1..=2 {
            for j in 1..=2 {
                if Some(idx) != skip {
                    s.push_str(&format!("square b{i}.r{j} = r{j}.b{i}\n"));
                }
                idx += 1;
            }
        }
        s
    }

    fn edge(kg: &KGraph, name: &str) -> Morphism {
        kg.edge_morphism(kg.skeleton().edge_by_name(name).unwrap())
    }

    #[test]
    fn torus_is_valid() {
        let kg = KGraph::parse(TORUS2).unwrap();
        assert_eq!(kg.k(), 2);
        assert_eq!(kg.squares().len(), 1);
    }

    #[test]
    fn sq22_is_valid() {
        KGraph::parse(&sq22_text(None)).unwrap();
    }

    #[test]
    fn sq22_missing_square() {
        let err = KGraph::parse(&sq22_text(Some(2))).unwrap_err();
        assert_eq!(err.class(), "incomplete-squares");
    }

    #[test]
    fn same_order_square_is_rejected() {
        let text = "kgraph\ncolors = 2\nvertices: v\nedge b : v -> v color 1\nedge r : v -> v color 2\nsquare r.b = r.b\n";
        assert_eq!(KGraph::parse(text).unwrap_err().class(), "invalid-square");
    }

    #[test]
    fn missing_color_is_a_source() {
        let text = "kgraph\ncolors = 2\nvertices: v\nedge b : v -> v color 1\n";
        assert_eq!(KGraph::parse(text).unwrap_err().class(), "missing-color");
    }

    #[test]
    fn bad_color_rejected() {
        let text = "kgraph\ncolors = 1\nvertices: v\nedge b : v -> v color 2\n";
        assert_eq!(KGraph::parse(text).unwrap_err().class(), "bad-color");
    }

    #[test]
    fn torus_compose_and_identity() {
        let kg = KGraph::parse(TORUS2).unwrap();
        let (b, r) = (edge(&kg, "b"), edge(&kg, "r"));
        let br = kg.compose(&b, &r).unwrap();
        let rb = kg.compose(&r, &b).unwrap();
        assert_eq!(br, rb);
        assert_eq!(br.degree(), &[1, 1]);
        assert_eq!(kg.label(&br), "r.b");
        let v = kg.identity(VertexId(0));
        assert_eq!(kg.compose(&v, &b).unwrap(), b);
        assert_eq!(kg.compose(&b, &v).unwrap(), b);
    }

    #[test]
    fn torus_factor() {
        let kg = KGraph::parse(TORUS2).unwrap();
        let v = VertexId(0);
        let lam = kg.enumerate(&[2, 1], v).pop().unwrap();
        let (head, tail) = kg.factor(&lam, &[1, 0]).unwrap();
        assert_eq!(head, edge(&kg, "b"));
        assert_eq!(tail, kg.enumerate(&[1, 1], v)[0]);
        assert_eq!(
            kg.factor(&lam, &[3, 0]).unwrap_err(),
            MorphismError::DegreeOutOfRange {
                requested: vec![3, 0],
                available: vec![2, 1]
            }
        );
        let (whole, id) = kg.factor(&lam, &[2, 1]).unwrap();
        assert_eq!(whole, lam);
        assert_eq!(id, kg.identity(v));
    }

    #[test]
    fn sq22_factor_follows_the_square_table() {
        let kg = KGraph::parse(&sq22_text(None)).unwrap();
        let lam = kg.compose(&edge(&kg, "b1"), &edge(&kg, "r2")).unwrap();
        assert_eq!(lam.degree(), &[1, 1]);
        assert_eq!(kg.label(&lam), "r2.b1");
        let (head, tail) = kg.factor(&lam, &[0, 1]).unwrap();
        assert_eq!(head, edge(&kg, "r2"));
        assert_eq!(tail, edge(&kg, "b1"));
    }

    #[test]
    fn not_composable() {
        let g = DirectedGraph::parse("graph\nvertices: x y\nedge a : x -> y\nedge c : y -> x\n").unwrap();
        let kg = KGraph::from_graph(&g).unwrap();
        let a = edge(&kg, "a");
        assert_eq!(kg.compose(&a, &a), Err(MorphismError::NotComposable));
        let c = edge(&kg, "c");
        assert_eq!(kg.label(&kg.compose(&a, &c).unwrap()), "a.c");
    }

    #[test]
    fn enumeration_counts() {
        let kg = KGraph::parse(TORUS2).unwrap();
        assert_eq!(kg.enumerate(&[2, 3], VertexId(0)).len(), 1);
        let sq = KGraph::parse(&sq22_text(None)).unwrap();
        assert_eq!(sq.enumerate(&[1, 1], VertexId(0)).len(), 4);
        assert_eq!(sq.enumerate(&[0, 0], VertexId(0)), vec![sq.identity(VertexId(0))]);
    }

    #[test]
    fn from_graph_rejects_sources() {
        let g = DirectedGraph::parse("graph\nvertices: x y\nedge a : x -> y\n").unwrap();
        assert_eq!(KGraph::from_graph(&g).unwrap_err().class(), "missing-color");
    }

    #[test]
    fn display_round_trips() {
        let kg = KGraph::parse(&sq22_text(None)).unwrap();
        let again = KGraph::parse(&kg.to_string()).unwrap();
        assert_eq!(again, kg);
    }
}
