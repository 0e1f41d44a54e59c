//! Small graphs and k-graphs used throughout the tests and suites.

use crate::graph::DirectedGraph;
use crate::kgraph::KGraph;

pub const LOOP1: &str = include_str!("../fixtures/loop1.g");
pub const CUNTZ2: &str = include_str!("../fixtures/cuntz2.g");
pub const FLAG: &str = include_str!("../fixtures/flag.g");
pub const ARROW: &str = include_str!("../fixtures/arrow.g");
pub const TORUS2: &str = include_str!("../fixtures/torus2.kg");
pub const SQ22: &str = include_str!("../fixtures/sq22.kg");
pub const CYCLE2_LOOP: &str = include_str!("../fixtures/cycle2_loop.kg");
pub const CUBE3: &str = include_str!("../fixtures/cube3.kg");
pub const CUBE3_SKEW: &str = include_str!("../fixtures/cube3_skew.kg");

pub fn loop1() -> DirectedGraph {
    DirectedGraph::parse(LOOP1).expect("fixture")
}

pub fn cuntz2() -> DirectedGraph {
    DirectedGraph::parse(CUNTZ2).expect("fixture")
}

pub fn flag() -> DirectedGraph {
    DirectedGraph::parse(FLAG).expect("fixture")
}

pub fn arrow() -> DirectedGraph {
    DirectedGraph::parse(ARROW).expect("fixture")
}

pub fn torus2() -> KGraph {
    KGraph::parse(TORUS2).expect("fixture")
}

pub fn sq22() -> KGraph {
    KGraph::parse(SQ22).expect("fixture")
}

pub fn cycle2_loop() -> KGraph {
    KGraph::parse(CYCLE2_LOOP).expect("fixture")
}

pub fn cube3() -> KGraph {
    KGraph::parse(CUBE3).expect("fixture")
}

/// Named 1-graph fixtures.
pub fn graphs() -> Vec<(&'static str, DirectedGraph)> {
    vec![
        ("LOOP1", loop1()),
        ("CUNTZ2", cuntz2()),
        ("FLAG", flag()),
        ("ARROW", arrow()),
    ]
}

/// Named k-graph fixtures.
pub fn kgraphs() -> Vec<(&'static str, KGraph)> {
    vec![("TORUS2", torus2()), ("SQ22", sq22())]
}
