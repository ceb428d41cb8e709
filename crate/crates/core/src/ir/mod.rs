//! Typed graph representation of convolutional architectures.
//!
//! An [`ArchGraph`] is a DAG of [`LayerSpec`] nodes with exactly one Input
//! and one sink. Fan-in only happens through channel-wise Concat.

mod descriptor;
mod graph;
mod infer;
mod layer;
mod lower;
mod shape;
mod validate;

pub use descriptor::ParseError;
pub use graph::{ArchGraph, GraphBuilder, Node};
pub use infer::ShapedGraph;
pub use layer::{
    window_count, BindError, ConvSpec, FullyConnectedSpec, LayerSpec, PoolKind, PoolSpec,
    ShuffleSpec,
};
pub use shape::TensorShape;
pub use validate::{Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IrError {
    #[error("invalid graph: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("descriptor parse error: {0}")]
    Parse(#[from] ParseError),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
