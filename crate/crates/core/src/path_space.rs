//! Truncated path spaces: the Fock basis of all paths up to a length, the
//! chosen tail paths of a k-graph, and the basis of reduced classes
//! `λ μ_{v,i}^{-1}` on which the Cuntz-Krieger family acts.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::carrier::Carrier;
use crate::graph::{DirectedGraph, EdgeId, VertexId};
use crate::kgraph::{KGraph, Morphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathSpaceError {
    #[error("numerator source does not match the source of the tail prefix")]
    SourceMismatch,
    #[error("tail index {index} exceeds the tail depth {depth}")]
    TailTooShort { index: usize, depth: usize },
    #[error("reduced classes need a k-graph carrier")]
    NotAKGraph,
}

/// Orthonormal basis of the path space truncated at total degree `N`.
///
/// Labels are ordered by level, then lexicographically by edge indices;
/// vertices come first in declaration order.
#[derive(Debug, Clone)]
pub struct FockBasis {
    carrier: Arc<Carrier>,
    truncation: usize,
    labels: Vec<Morphism>,
    index: HashMap<Morphism, usize>,
}

impl FockBasis {
    pub fn new(carrier: Arc<Carrier>, truncation: usize) -> Self {
        let g = carrier.skeleton();
        let mut labels: Vec<Morphism> = g.vertices().map(|v| carrier.identity(v)).collect();
        for level in 1..=truncation {
            let mut layer: Vec<Morphism> = g
                .vertices()
                .flat_map(|v| carrier.morphisms_at(level, v))
                .collect();
            layer.sort_by(|a, b| a.word().cmp(b.word()));
            labels.extend(layer);
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        FockBasis {
            carrier,
            truncation,
            labels,
            index,
        }
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Morphism] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Morphism {
        &self.labels[i]
    }

    pub fn level(&self, i: usize) -> usize {
        self.labels[i].grading()
    }

    pub fn index_of(&self, m: &Morphism) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Indices of labels with level at most `N - margin`.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        match self.truncation.checked_sub(margin) {
            Some(cut) => (0..self.dim()).filter(|&i| self.level(i) <= cut).collect(),
            None => Vec::new(),
        }
    }

    pub fn label_names(&self) -> Vec<String> {
        self.labels.iter().map(|m| self.carrier.label(m)).collect()
    }
}

/// All paths of length at most `truncation` in `graph`, vertices included.
pub fn enumerate_paths(graph: &DirectedGraph, truncation: usize) -> FockBasis {
    FockBasis::new(Arc::new(Carrier::Graph(graph.clone())), truncation)
}

/// For each vertex `v`, the edges `e_{v,1}, e_{v,2}, ...` of a tail path
/// ending at `v`, and the morphisms `μ_{v,i} = e_{v,1} ⋯ e_{v,i}`.
///
/// Edge `e_{v,j}` has color `(j - 1) mod k` and is the lowest-numbered edge
/// of that color whose range is the source of `e_{v,j-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailFamily {
    depth: usize,
    edges: Vec<Vec<EdgeId>>,
    prefixes: Vec<Vec<Morphism>>,
}

impl TailFamily {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `e_{v,i}` for `1 <= i <= depth`.
    pub fn edge(&self, v: VertexId, i: usize) -> EdgeId {
        self.edges[v.0][i - 1]
    }

    pub fn edges(&self, v: VertexId) -> &[EdgeId] {
        &self.edges[v.0]
    }

    /// `μ_{v,i}` for `0 <= i <= depth`; `μ_{v,0}` is the vertex itself.
    pub fn prefix(&self, v: VertexId, i: usize) -> &Morphism {
        &self.prefixes[v.0][i]
    }
}

pub fn choose_tails(kg: &KGraph, depth: usize) -> TailFamily {
    let g = kg.skeleton();
    let k = kg.k();
    let mut edges = Vec::with_capacity(g.vertex_count());
    let mut prefixes = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let mut at = v;
        let mut tail = Vec::with_capacity(depth);
        let mut chain = vec![kg.identity(v)];
        for j in 1..=depth {
            let color = (j - 1) % k;
            let e = *g
                .incoming(at)
                .iter()
                .find(|e| kg.color(**e) == color)
                .expect("validated k-graphs have no sources");
            tail.push(e);
            let next = kg
                .compose(chain.last().unwrap(), &kg.edge_morphism(e))
                .expect("tail edges are composable");
            chain.push(next);
            at = g.source(e);
        }
        edges.push(tail);
        prefixes.push(chain);
    }
    TailFamily {
        depth,
        edges,
        prefixes,
    }
}

/// The class of `numerator · μ_{vertex,index}^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaClass {
    pub numerator: Morphism,
    pub vertex: VertexId,
    pub index: usize,
}

/// Cancels trailing tail edges: while the last edge of `numerator` (in the
/// color of `e_{v,i}`) is `e_{v,i}` itself, strip it and step down to
/// `i - 1`.
pub fn reduce_class(
    kg: &KGraph,
    tails: &TailFamily,
    numerator: Morphism,
    vertex: VertexId,
    index: usize,
) -> Result<GammaClass, PathSpaceError> {
    if index > tails.depth() {
        return Err(PathSpaceError::TailTooShort {
            index,
            depth: tails.depth(),
        });
    }
    if numerator.source() != tails.prefix(vertex, index).source() {
        return Err(PathSpaceError::SourceMismatch);
    }
    let mut numerator = numerator;
    let mut index = index;
    while index > 0 {
        let e = tails.edge(vertex, index);
        match strip_trailing(kg, &numerator, e) {
            Some(head) => {
                numerator = head;
                index -= 1;
            }
            None => break,
        }
    }
    Ok(GammaClass {
        numerator,
        vertex,
        index,
    })
}

/// `Some(head)` when `m = head ∘ e`.
fn strip_trailing(kg: &KGraph, m: &Morphism, e: EdgeId) -> Option<Morphism> {
    let c = kg.color(e);
    if m.degree()[c] == 0 {
        return None;
    }
    let mut head_degree = m.degree().to_vec();
    head_degree[c] -= 1;
    let (head, tail) = kg.factor(m, &head_degree).ok()?;
    (tail.word() == [e]).then_some(head)
}

/// Reduced classes `(λ, v, i)` with `δ(λ) <= N` and `i <= M`.
///
/// Classes with `i = 0` come first, in Fock order, so the leading block is a
/// copy of the Fock basis.
#[derive(Debug, Clone)]
pub struct GammaBasis {
    carrier: Arc<Carrier>,
    tails: TailFamily,
    truncation: usize,
    tail_truncation: usize,
    classes: Vec<GammaClass>,
    index: HashMap<GammaClass, usize>,
}

impl GammaBasis {
    pub fn new(
        carrier: Arc<Carrier>,
        tails: TailFamily,
        truncation: usize,
        tail_truncation: usize,
    ) -> Result<Self, PathSpaceError> {
        let Carrier::KGraph(kg) = carrier.as_ref() else {
            return Err(PathSpaceError::NotAKGraph);
        };
        if tail_truncation > tails.depth() {
            return Err(PathSpaceError::TailTooShort {
                index: tail_truncation,
                depth: tails.depth(),
            });
        }
        let fock = FockBasis::new(carrier.clone(), truncation);
        let mut classes = Vec::new();
        for i in 0..=tail_truncation {
            for v in kg.skeleton().vertices() {
                let src = tails.prefix(v, i).source();
                for lambda in fock.labels() {
                    if lambda.source() != src {
                        continue;
                    }
                    if i > 0 && strip_trailing(kg, lambda, tails.edge(v, i)).is_some() {
                        continue;
                    }
                    classes.push(GammaClass {
                        numerator: lambda.clone(),
                        vertex: v,
                        index: i,
                    });
                }
            }
        }
        let index = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        Ok(GammaBasis {
            carrier,
            tails,
            truncation,
            tail_truncation,
            classes,
            index,
        })
    }

    pub fn kgraph(&self) -> &KGraph {
        match self.carrier.as_ref() {
            Carrier::KGraph(kg) => kg,
            Carrier::Graph(_) => unreachable!("checked at construction"),
        }
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn tails(&self) -> &TailFamily {
        &self.tails
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn tail_truncation(&self) -> usize {
        self.tail_truncation
    }

    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[GammaClass] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &GammaClass {
        &self.classes[i]
    }

    pub fn index_of(&self, c: &GammaClass) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn reduce(&self, numerator: Morphism, vertex: VertexId, index: usize) -> Result<GammaClass, PathSpaceError> {
        reduce_class(self.kgraph(), &self.tails, numerator, vertex, index)
    }

    /// Classes with `δ(λ) <= N - numerator_margin` and `i <= M - tail_margin`.
    pub fn interior(&self, numerator_margin: usize, tail_margin: usize) -> Vec<usize> {
        let (Some(n_cut), Some(m_cut)) = (
            self.truncation.checked_sub(numerator_margin),
            self.tail_truncation.checked_sub(tail_margin),
        ) else {
            return Vec::new();
        };
        (0..self.dim())
            .filter(|&i| {
                let c = &self.classes[i];
                c.numerator.grading() <= n_cut && c.index <= m_cut
            })
            .collect()
    }

    /// `(λ, v, i)` extended by `e_{v,i+1} ⋯ e_{v,target}`.
    pub fn extend_to(&self, class: &GammaClass, target: usize) -> GammaClass {
        let kg = self.kgraph();
        let mut numerator = class.numerator.clone();
        for j in class.index + 1..=target {
            let e = kg.edge_morphism(self.tails.edge(class.vertex, j));
            numerator = kg.compose(&numerator, &e).expect("tail extension composes");
        }
        GammaClass {
            numerator,
            vertex: class.vertex,
            index: target.max(class.index),
        }
    }

    pub fn class_name(&self, i: usize) -> String {
        let c = &self.classes[i];
        let num = self.carrier.label(&c.numerator);
        if c.index == 0 {
            num
        } else {
            format!(
                "{num}·mu({},{})^-1",
                self.kgraph().skeleton().vertex_name(c.vertex),
                c.index
            )
        }
    }
}

pub fn gamma_basis(
    kg: &KGraph,
    tails: &TailFamily,
    truncation: usize,
    tail_truncation: usize,
) -> Result<GammaBasis, PathSpaceError> {
    GammaBasis::new(
        Arc::new(Carrier::KGraph(kg.clone())),
        tails.clone(),
        truncation,
        tail_truncation,
    )
}
