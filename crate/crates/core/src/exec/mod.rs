//! Naive reference forward pass. Slow by construction; it exists to check
//! shapes, grouped convolution, channel shuffles, FC lowering and MAC
//! counts against the analytical model.

mod kernels;
mod run;
mod tensor;

pub use kernels::{
    concat, conv_forward, global_avg_pool, pool_forward, relu, shuffle_forward, shuffle_sources,
};
pub use run::{count_macs_instrumented, run, run_all};
pub use tensor::Tensor3D;

use crate::ir::{BindError, IrError, TensorShape};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Graph(#[from] IrError),
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error("missing weight tensor `{0}`")]
    MissingWeight(String),
    #[error("weight `{name}` has shape {found:?}, expected {expected:?}")]
    WeightShape {
        name: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("weight `{0}` contains NaN")]
    NanWeight(String),
    #[error("kernel expected {expected} weights, got {found}")]
    KernelWeights { expected: usize, found: usize },
    #[error("input has shape {found}, graph expects {expected}")]
    InputShape {
        expected: TensorShape,
        found: TensorShape,
    },
    #[error("tensor of shape {shape} cannot hold {len} values")]
    TensorLength { shape: TensorShape, len: usize },
    #[error("shuffle groups {groups} must divide channels {channels}")]
    Shuffle { channels: usize, groups: usize },
}
