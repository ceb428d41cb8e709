use indexmap::IndexMap;

use super::graph::{ArchGraph, Node};
use super::shape::TensorShape;
use super::validate::bind;
use super::IrError;

/// A validated graph with every node's output shape and a fixed execution
/// order. Everything downstream of the IR works on this.
#[derive(Debug, Clone)]
pub struct ShapedGraph<'g> {
    graph: &'g ArchGraph,
    order: Vec<usize>,
    shapes: Vec<TensorShape>,
    preds: Vec<Vec<usize>>,
}

impl<'g> ShapedGraph<'g> {
    pub fn graph(&self) -> &'g ArchGraph {
        self.graph
    }

    /// Node indices in execution (topological) order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn node(&self, index: usize) -> &'g Node {
        &self.graph.nodes()[index]
    }

    pub fn output_shape(&self, index: usize) -> TensorShape {
        self.shapes[index]
    }

    pub fn predecessors(&self, index: usize) -> &[usize] {
        &self.preds[index]
    }

    pub fn input_shapes(&self, index: usize) -> Vec<TensorShape> {
        self.preds[index].iter().map(|&p| self.shapes[p]).collect()
    }

    /// Index of the unique sink node.
    pub fn sink(&self) -> usize {
        *self.order.last().expect("validated graph is non-empty")
    }
}

impl ArchGraph {
    /// Validates and binds shapes. Fails with every violation found.
    pub fn shaped(&self) -> Result<ShapedGraph<'_>, IrError> {
        let b = bind(self);
        if !b.violations.is_empty() {
            return Err(IrError::Invalid(b.violations));
        }
        let shapes = b
            .shapes
            .into_iter()
            .map(|s| s.expect("bound without violations"))
            .collect();
        // With a unique sink, the last node of any topological order is it.
        let order = b.order;
        Ok(ShapedGraph {
            graph: self,
            order,
            shapes,
            preds: self.predecessor_indices(),
        })
    }

    /// Output shape of every node, in declaration order.
    pub fn infer_shapes(&self) -> Result<IndexMap<String, TensorShape>, IrError> {
        let shaped = self.shaped()?;
        Ok(self
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), shaped.output_shape(i)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use crate::ir::*;

    #[test]
    fn alexnet_stem_shape() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(227, 227, 3));
        let conv = ConvSpec::square(11, 96).with_stride(4).with_pad(0);
        b.then("conv1", LayerSpec::Conv(conv), &i);
        let shapes = b.build().infer_shapes().unwrap();
        assert_eq!(shapes["conv1"], TensorShape::new(55, 55, 96));
    }

    #[test]
    fn pool_halves_and_gap_collapses() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(56, 56, 64));
        let p = b.then("pool", LayerSpec::Pool(PoolSpec::max(2, 2)), &i);
        b.then("gap", LayerSpec::GlobalAvgPool, &p);
        let shapes = b.build().infer_shapes().unwrap();
        assert_eq!(shapes["pool"], TensorShape::new(28, 28, 64));
        assert_eq!(shapes["gap"], TensorShape::new(1, 1, 64));

        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(13, 13, 256));
        b.then("gap", LayerSpec::GlobalAvgPool, &i);
        assert_eq!(
            b.build().infer_shapes().unwrap()["gap"],
            TensorShape::new(1, 1, 256)
        );
    }

    #[test]
    fn concat_sums_channels_and_fc_is_flat() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(6, 6, 4));
        let a = b.then("a", LayerSpec::Conv(ConvSpec::square(1, 3)), &i);
        let c = b.then("c", LayerSpec::Conv(ConvSpec::square(3, 5)), &i);
        let cat = b.add("cat", LayerSpec::Concat, &[&a, &c]);
        let s = b.then("shuf", LayerSpec::Shuffle(ShuffleSpec { groups: 2 }), &cat);
        b.then(
            "fc",
            LayerSpec::FullyConnected(FullyConnectedSpec {
                filters: 10,
                bias: true,
            }),
            &s,
        );
        let shapes = b.build().infer_shapes().unwrap();
        assert_eq!(shapes["cat"], TensorShape::new(6, 6, 8));
        assert_eq!(shapes["shuf"], TensorShape::new(6, 6, 8));
        assert_eq!(shapes["fc"], TensorShape::new(1, 1, 10));
    }

    #[test]
    fn non_positive_dimension_names_node() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(2, 2, 1));
        b.then("big", LayerSpec::Conv(ConvSpec::square(5, 1).with_pad(0)), &i);
        match b.build().infer_shapes() {
            Err(IrError::Invalid(v)) => {
                assert_eq!(v[0].node.as_deref(), Some("big"));
                assert!(v[0].to_string().contains("non-positive"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
