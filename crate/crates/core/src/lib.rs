//! Symbolic and numeric checks for gauge spectral triples of graph and
//! higher-rank graph algebras.

pub mod algebra;
pub mod clifford;
pub mod conditions;
pub mod corpus;
pub mod document;
pub mod error;
pub mod graph;
pub mod hochschild;
pub mod kgraph;
pub mod linalg;
pub mod presentation;
pub mod scalar;
pub mod spectral;
pub mod trace;

pub use algebra::{Element, Key};
pub use document::Document;
pub use error::{Error, ParseError, Result};
pub use graph::{parse_graph, End, EndKind, GraphClass, GraphPresentation};
pub use presentation::Presentation;
pub use conditions::{evaluate_all, hypothesis_check, ConditionConfig, ConditionReport, Status};
pub use kgraph::{parse_kgraph, KGraph, KGraphPresentation, KPath};
pub use scalar::{GaussianRational, Rational};
