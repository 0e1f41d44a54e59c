//! Truncated Fock representations of graphs and k-graphs, with numerical
//! checks of the Toeplitz and Cuntz-Krieger relations.

pub mod carrier;
pub mod fixtures;
pub mod fock;
pub mod graph;
pub mod kgraph;
pub mod norms;
pub mod path_space;
pub mod poly;
pub mod sparse;
pub mod toeplitz;
pub mod verify;

pub use num_complex::Complex64;
