//! A directed graph or a k-graph, seen uniformly as a path category.

use crate::graph::{DirectedGraph, EdgeId, VertexId};
use crate::kgraph::{morphism_label, KGraph, Morphism, MorphismError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Carrier {
    Graph(DirectedGraph),
    KGraph(KGraph),
}

impl From<DirectedGraph> for Carrier {
    fn from(g: DirectedGraph) -> Self {
        Carrier::Graph(g)
    }
}

impl From<KGraph> for Carrier {
    fn from(g: KGraph) -> Self {
        Carrier::KGraph(g)
    }
}

impl Carrier {
    pub fn skeleton(&self) -> &DirectedGraph {
        match self {
            Carrier::Graph(g) => g,
            Carrier::KGraph(kg) => kg.skeleton(),
        }
    }

    /// Number of colors; 1 for plain graphs.
    pub fn rank(&self) -> usize {
        match self {
            Carrier::Graph(_) => 1,
            Carrier::KGraph(kg) => kg.k(),
        }
    }

    pub fn color(&self, e: EdgeId) -> usize {
        match self {
            Carrier::Graph(_) => 0,
            Carrier::KGraph(kg) => kg.color(e),
        }
    }

    pub fn identity(&self, v: VertexId) -> Morphism {
        Morphism::identity(v, self.rank())
    }

    pub fn edge(&self, e: EdgeId) -> Morphism {
        match self {
            Carrier::Graph(g) => {
                Morphism::from_parts(vec![1], vec![e], g.source(e), g.range(e))
            }
            Carrier::KGraph(kg) => kg.edge_morphism(e),
        }
    }

    pub fn compose(&self, left: &Morphism, right: &Morphism) -> Result<Morphism, MorphismError> {
        match self {
            Carrier::Graph(_) => {
                if left.source() != right.range() {
                    return Err(MorphismError::NotComposable);
                }
                let mut word = left.word().to_vec();
                word.extend_from_slice(right.word());
                Ok(Morphism::from_parts(
                    vec![word.len() as u32],
                    word,
                    right.source(),
                    left.range(),
                ))
            }
            Carrier::KGraph(kg) => kg.compose(left, right),
        }
    }

    /// Resolves a vertex or edge id to its morphism.
    pub fn resolve(&self, symbol: &str) -> Option<Morphism> {
        let g = self.skeleton();
        if let Some(v) = g.vertex_by_name(symbol) {
            return Some(self.identity(v));
        }
        g.edge_by_name(symbol).map(|e| self.edge(e))
    }

    /// Builds a morphism from edge ids written in composition order.
    pub fn path(&self, edges: &[&str]) -> Option<Morphism> {
        let g = self.skeleton();
        let mut out: Option<Morphism> = None;
        for name in edges.iter().rev() {
            let e = self.edge(g.edge_by_name(name)?);
            out = Some(match out {
                None => e,
                Some(acc) => self.compose(&e, &acc).ok()?,
            });
        }
        out
    }

    pub fn label(&self, m: &Morphism) -> String {
        morphism_label(self.skeleton(), m)
    }

    /// All morphisms of total degree `level` with range `v`.
    pub fn morphisms_at(&self, level: usize, v: VertexId) -> Vec<Morphism> {
        match self {
            Carrier::Graph(g) => {
                let mut out = Vec::new();
                let mut word = Vec::with_capacity(level);
                graph_paths(g, level, v, &mut word, &mut out);
                out
            }
            Carrier::KGraph(kg) => {
                let mut out = Vec::new();
                for degree in degrees_with_sum(kg.k(), level as u32) {
                    out.extend(kg.enumerate(&degree, v));
                }
                out
            }
        }
    }
}

fn graph_paths(
    g: &DirectedGraph,
    level: usize,
    at: VertexId,
    word: &mut Vec<EdgeId>,
    out: &mut Vec<Morphism>,
) {
    if word.len() == level {
        let (source, range) = match (word.last(), word.first()) {
            (Some(&last), Some(&first)) => (g.source(last), g.range(first)),
            _ => (at, at),
        };
        out.push(Morphism::from_parts(
            vec![level as u32],
            word.clone(),
            source,
            range,
        ));
        return;
    }
    for &e in g.incoming(at) {
        word.push(e);
        graph_paths(g, level, g.source(e), word, out);
        word.pop();
    }
}

/// Every vector in `N^k` with coordinate sum `total`, in lexicographic order.
pub fn degrees_with_sum(k: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(k: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == k {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            go(k, left - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, total, &mut Vec::with_capacity(k), &mut out);
    out
}
