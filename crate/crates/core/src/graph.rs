//! Finite directed graphs, vertex profiles and the adding-tails construction.
//!
//! Edges point from source to range: an edge `e` is drawn `s(e) -> r(e)`.
//! Vertices and edges keep their declaration order, and every index used
//! elsewhere in the crate is a position in that order.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Position of a vertex in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Position of an edge in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: VertexId,
    pub range: VertexId,
}

/// Where a tail vertex or tail edge came from: the tail hanging off the
/// original source `origin`, at position `index` (1-based), in a tail
/// construction truncated at `depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailTag {
    pub origin: VertexId,
    pub index: usize,
    pub depth: usize,
}

/// Provenance of everything appended by [`DirectedGraph::add_tails`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TailMeta {
    pub depth: usize,
    pub vertices: BTreeMap<VertexId, TailTag>,
    pub edges: BTreeMap<EdgeId, TailTag>,
    /// Number of vertices that belonged to the graph before tails were added.
    pub original_vertices: usize,
    /// Number of edges that belonged to the graph before tails were added.
    pub original_edges: usize,
}

impl TailMeta {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    /// The depth-`depth` tail endpoints; these are sources only because the
    /// tails are cut off.
    pub fn truncation_endpoints(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|(_, tag)| tag.index == tag.depth)
            .map(|(v, _)| *v)
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: BTreeMap<String, VertexId>,
    edge_index: BTreeMap<String, EdgeId>,
    incoming: Vec<Vec<EdgeId>>,
    tail_meta: TailMeta,
}

/// A parsed but not yet validated graph description.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    /// `(id, source, range)` in declaration order.
    pub edges: Vec<(String, String, String)>,
}

impl GraphSpec {
    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// graph
    /// vertices: x y
    /// edge a : x -> y
    /// ```
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut spec = GraphSpec::default();
        let mut seen_header = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            if !seen_header {
                if line != "graph" {
                    return Err(GraphError::Syntax {
                        line: lineno,
                        message: format!("expected `graph` header, found `{line}`"),
                    });
                }
                seen_header = true;
                continue;
            }
            if let Some(rest) = line.strip_prefix("vertices:") {
                spec.vertices.extend(rest.split_whitespace().map(str::to_owned));
            } else if let Some(rest) = line.strip_prefix("edge ") {
                let (id, src, rng) = parse_edge_body(rest, lineno)?;
                if !rng.1.is_empty() {
                    return Err(GraphError::Syntax {
                        line: lineno,
                        message: format!("unexpected trailing tokens `{}`", rng.1),
                    });
                }
                spec.edges.push((id, src, rng.0));
            } else {
                return Err(GraphError::Syntax {
                    line: lineno,
                    message: format!("unrecognised line `{line}`"),
                });
            }
        }
        if !seen_header {
            return Err(GraphError::Syntax {
                line: 0,
                message: "missing `graph` header".into(),
            });
        }
        Ok(spec)
    }
}

pub(crate) fn strip_comment(raw: &str) -> &str {
    match raw.find('#') {
        Some(pos) => raw[..pos].trim(),
        None => raw.trim(),
    }
}

/// Parses `<id> : <src> -> <rng> [rest...]`, returning the id, the source and
/// the range together with whatever follows the range token.
pub(crate) fn parse_edge_body(
    body: &str,
    line: usize,
) -> Result<(String, String, (String, String)), GraphError> {
    let syntax = |message: &str| GraphError::Syntax {
        line,
        message: message.to_owned(),
    };
    let (id, ends) = body
        .split_once(':')
        .ok_or_else(|| syntax("edge needs `<id> : <source> -> <range>`"))?;
    let id = id.trim();
    if id.is_empty() || id.contains(char::is_whitespace) {
        return Err(syntax("edge id must be a single token"));
    }
    let (src, rest) = ends
        .split_once("->")
        .ok_or_else(|| syntax("edge needs `->` between source and range"))?;
    let src = src.trim();
    if src.is_empty() || src.contains(char::is_whitespace) {
        return Err(syntax("edge source must be a single token"));
    }
    let mut tokens = rest.split_whitespace();
    let rng = tokens.next().ok_or_else(|| syntax("edge range missing"))?;
    let tail: Vec<&str> = tokens.collect();
    Ok((
        id.to_owned(),
        src.to_owned(),
        (rng.to_owned(), tail.join(" ")),
    ))
}

/// Per-vertex incoming-edge summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexProfile {
    pub vertex: VertexId,
    pub name: String,
    pub in_degree: usize,
    pub is_source: bool,
    /// The vertex receives at least one (and, at finite scale, finitely
    /// many) edges, so the Cuntz-Krieger equality applies to it.
    pub ck_applicable: bool,
}

impl DirectedGraph {
    /// Validates a parsed description.
    pub fn from_spec(spec: &GraphSpec) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::default();
        for v in &spec.vertices {
            builder.vertex(v)?;
        }
        for (id, src, rng) in &spec.edges {
            builder.edge(id, src, rng)?;
        }
        Ok(builder.finish(TailMeta::default()))
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        Self::from_spec(&GraphSpec::parse(text)?)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].source
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].range
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    /// Edges with range `v`, in declaration order.
    pub fn incoming(&self, v: VertexId) -> &[EdgeId] {
        &self.incoming[v.0]
    }

    pub fn tail_meta(&self) -> &TailMeta {
        &self.tail_meta
    }

    pub fn vertex_profiles(&self) -> Vec<VertexProfile> {
        self.vertices()
            .map(|v| {
                let in_degree = self.incoming[v.0].len();
                VertexProfile {
                    vertex: v,
                    name: self.vertices[v.0].clone(),
                    in_degree,
                    is_source: in_degree == 0,
                    ck_applicable: in_degree >= 1,
                }
            })
            .collect()
    }

    pub fn sources(&self) -> Vec<VertexId> {
        self.vertices()
            .filter(|v| self.incoming[v.0].is_empty())
            .collect()
    }

    pub fn has_sources(&self) -> bool {
        self.incoming.iter().any(Vec::is_empty)
    }

    /// Whether `v` is one of the original vertices (not appended by
    /// [`add_tails`](Self::add_tails)).
    pub fn is_original_vertex(&self, v: VertexId) -> bool {
        !self.tail_meta.vertices.contains_key(&v)
    }

    pub fn is_original_edge(&self, e: EdgeId) -> bool {
        !self.tail_meta.edges.contains_key(&e)
    }

    /// Feeds every source `x` with a chain `x <- x_1 <- ... <- x_depth` of new
    /// edges `e_i : x_i -> x_{i-1}` (with `x_0 = x`), cut off at `depth`.
    ///
    /// A graph without sources comes back unchanged.
    pub fn add_tails(&self, depth: usize) -> DirectedGraph {
        assert!(depth >= 1, "tail depth must be at least 1");
        let sources = self.sources();
        if sources.is_empty() {
            return self.clone();
        }
        let mut builder = GraphBuilder::default();
        for name in &self.vertices {
            builder.vertex(name).expect("existing vertices are distinct");
        }
        for edge in &self.edges {
            builder
                .edge(
                    &edge.name,
                    &self.vertices[edge.source.0],
                    &self.vertices[edge.range.0],
                )
                .expect("existing edges are valid");
        }
        let mut meta = TailMeta {
            depth,
            original_vertices: self.vertex_count(),
            original_edges: self.edge_count(),
            ..TailMeta::default()
        };
        let mut taken: HashSet<String> = self
            .vertices
            .iter()
            .chain(self.edges.iter().map(|e| &e.name))
            .cloned()
            .collect();
        for &x in &sources {
            let base = &self.vertices[x.0];
            let mut previous = base.clone();
            for index in 1..=depth {
                let tag = TailTag {
                    origin: x,
                    index,
                    depth,
                };
                let vname = fresh_name(&mut taken, format!("{base}~{index}"));
                let ename = fresh_name(&mut taken, format!("{base}~e{index}"));
                let v = builder.vertex(&vname).expect("fresh name");
                let e = builder.edge(&ename, &vname, &previous).expect("fresh name");
                meta.vertices.insert(v, tag);
                meta.edges.insert(e, tag);
                previous = vname;
            }
        }
        builder.finish(meta)
    }

    /// Renders the graph in the text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = String::from("graph\nvertices:");
        for v in &self.vertices {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} : {} -> {}\n",
                e.name, self.vertices[e.source.0], self.vertices[e.range.0]
            ));
        }
        out
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn fresh_name(taken: &mut HashSet<String>, mut candidate: String) -> String {
    while taken.contains(&candidate) {
        candidate.push('\'');
    }
    taken.insert(candidate.clone());
    candidate
}

#[derive(Default)]
struct GraphBuilder {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: BTreeMap<String, VertexId>,
    edge_index: BTreeMap<String, EdgeId>,
}

impl GraphBuilder {
    fn is_taken(&self, name: &str) -> bool {
        self.vertex_index.contains_key(name) || self.edge_index.contains_key(name)
    }

    fn vertex(&mut self, name: &str) -> Result<VertexId, GraphError> {
        if self.is_taken(name) {
            return Err(GraphError::DuplicateId(name.to_owned()));
        }
        let id = VertexId(self.vertices.len());
        self.vertices.push(name.to_owned());
        self.vertex_index.insert(name.to_owned(), id);
        Ok(id)
    }

    fn edge(&mut self, name: &str, src: &str, rng: &str) -> Result<EdgeId, GraphError> {
        if self.is_taken(name) {
            return Err(GraphError::DuplicateId(name.to_owned()));
        }
        let lookup = |v: &str| {
            self.vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex {
                    edge: name.to_owned(),
                    vertex: v.to_owned(),
                })
        };
        let source = lookup(src)?;
        let range = lookup(rng)?;
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge {
            name: name.to_owned(),
            source,
            range,
        });
        self.edge_index.insert(name.to_owned(), id);
        Ok(id)
    }

    fn finish(self, tail_meta: TailMeta) -> DirectedGraph {
        let mut incoming = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            incoming[e.range.0].push(EdgeId(i));
        }
        DirectedGraph {
            vertices: self.vertices,
            edges: self.edges,
            vertex_index: self.vertex_index,
            edge_index: self.edge_index,
            incoming,
            tail_meta,
        }
    }
}
