use serde::{Deserialize, Serialize};

use crate::ir::{ArchGraph, ConvSpec, GraphBuilder, LayerSpec, TensorShape};

/// Squeeze (1x1) layer feeding parallel 1x1 and 3x3 expand layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FireSpec {
    pub squeeze_1x1: usize,
    pub expand_1x1: usize,
    pub expand_3x3: usize,
}

impl FireSpec {
    pub const fn new(squeeze_1x1: usize, expand_1x1: usize, expand_3x3: usize) -> Self {
        Self {
            squeeze_1x1,
            expand_1x1,
            expand_3x3,
        }
    }

    /// Fraction of expand filters that are 3x3.
    pub fn p(&self) -> f64 {
        self.expand_3x3 as f64 / self.output_channels() as f64
    }

    pub fn output_channels(&self) -> usize {
        self.expand_1x1 + self.expand_3x3
    }

    pub fn is_valid(&self) -> bool {
        self.squeeze_1x1 >= 1 && self.output_channels() >= 1
    }
}

/// Appends a Fire module fed by `input` and returns the id of its output.
/// A branch with zero filters is omitted, and with it the Concat.
pub fn append_fire(b: &mut GraphBuilder, prefix: &str, input: &str, spec: FireSpec) -> String {
    let squeeze = b.then(
        format!("{prefix}/squeeze1x1"),
        LayerSpec::Conv(ConvSpec::square(1, spec.squeeze_1x1)),
        input,
    );
    let squeeze = b.then(format!("{prefix}/relu_squeeze1x1"), LayerSpec::Relu, &squeeze);

    let mut branches = Vec::with_capacity(2);
    if spec.expand_1x1 > 0 {
        let e = b.then(
            format!("{prefix}/expand1x1"),
            LayerSpec::Conv(ConvSpec::square(1, spec.expand_1x1)),
            &squeeze,
        );
        branches.push(b.then(format!("{prefix}/relu_expand1x1"), LayerSpec::Relu, &e));
    }
    if spec.expand_3x3 > 0 {
        let e = b.then(
            format!("{prefix}/expand3x3"),
            LayerSpec::Conv(ConvSpec::square(3, spec.expand_3x3)),
            &squeeze,
        );
        branches.push(b.then(format!("{prefix}/relu_expand3x3"), LayerSpec::Relu, &e));
    }
    match branches.as_slice() {
        [only] => only.clone(),
        _ => {
            let refs: Vec<&str> = branches.iter().map(String::as_str).collect();
            b.add(format!("{prefix}/concat"), LayerSpec::Concat, &refs)
        }
    }
}

/// A standalone Fire module on an input of the given shape.
pub fn fire_module(spec: FireSpec, input: TensorShape) -> ArchGraph {
    let mut b = GraphBuilder::new("fire");
    let i = b.input("data", input);
    append_fire(&mut b, "fire", &i, spec);
    b.build()
}
