use super::graph::{ArchGraph, Node};
use super::layer::{ConvSpec, LayerSpec};
use super::IrError;

impl ArchGraph {
    /// Rewrites every fully-connected layer on an `H x W x C` input into a
    /// `H x W` convolution with the same filter count. Shapes, parameter and
    /// MAC counts are unchanged.
    pub fn lower_fc(&self) -> Result<ArchGraph, IrError> {
        let shaped = self.shaped()?;
        let nodes = self
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let layer = match n.layer {
                    LayerSpec::FullyConnected(fc) => {
                        let input = shaped.input_shapes(i)[0];
                        LayerSpec::Conv(ConvSpec {
                            kernel_h: input.height,
                            kernel_w: input.width,
                            filters: fc.filters,
                            groups: 1,
                            stride: 1,
                            pad: 0,
                            bias: fc.bias,
                        })
                    }
                    other => other,
                };
                Node {
                    id: n.id.clone(),
                    layer,
                    inputs: n.inputs.clone(),
                }
            })
            .collect();
        Ok(ArchGraph::new(self.name(), nodes))
    }
}
