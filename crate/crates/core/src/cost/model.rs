use crate::ir::{ArchGraph, LayerSpec, ShapedGraph};

use super::layer::{layer_macs, layer_params};
use super::CostError;

/// Per-node parameters and MACs of a validated graph, in declaration order.
pub fn layer_costs(shaped: &ShapedGraph<'_>) -> Vec<(u64, u64)> {
    let graph = shaped.graph();
    (0..graph.nodes().len())
        .map(|i| {
            let layer = &graph.nodes()[i].layer;
            if !layer.has_weights() {
                return (0, 0);
            }
            let input = shaped.input_shapes(i)[0];
            let params = layer_params(layer, input).expect("bound graph");
            let macs = layer_macs(layer, input).expect("bound graph");
            (params, macs)
        })
        .collect()
}

pub fn model_params(graph: &ArchGraph) -> Result<u64, CostError> {
    let shaped = graph.shaped()?;
    Ok(layer_costs(&shaped).iter().map(|c| c.0).sum())
}

pub fn model_macs(graph: &ArchGraph) -> Result<u64, CostError> {
    let shaped = graph.shaped()?;
    Ok(layer_costs(&shaped).iter().map(|c| c.1).sum())
}

/// Parameter storage at `bits_per_param`, rounded up to whole bytes.
pub fn storage_bytes(graph: &ArchGraph, bits_per_param: u32) -> Result<u64, CostError> {
    let params = model_params(graph)?;
    Ok((params * bits_per_param as u64).div_ceil(8))
}

/// Sum over every non-input layer of its input and output activation
/// elements: the traffic if every activation round-trips through DRAM.
pub fn activation_traffic_elements(shaped: &ShapedGraph<'_>) -> u64 {
    shaped
        .order()
        .iter()
        .filter(|&&i| !matches!(shaped.node(i).layer, LayerSpec::Input(_)))
        .map(|&i| {
            let inputs: u64 = shaped.input_shapes(i).iter().map(|s| s.elements()).sum();
            inputs + shaped.output_shape(i).elements()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{ConvSpec, FullyConnectedSpec, GraphBuilder, TensorShape};

    #[test]
    fn input_only_graph_is_free() {
        let mut b = GraphBuilder::new("x");
        b.input("in", TensorShape::new(224, 224, 3));
        let g = b.build();
        assert_eq!(model_params(&g).unwrap(), 0);
        assert_eq!(model_macs(&g).unwrap(), 0);
        assert_eq!(storage_bytes(&g, 32).unwrap(), 0);
    }

    #[test]
    fn storage_rounds_up_and_lowering_preserves_counts() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(6, 6, 256));
        let c = b.then("c", LayerSpec::Conv(ConvSpec::square(1, 3)), &i);
        b.then(
            "fc",
            LayerSpec::FullyConnected(FullyConnectedSpec {
                filters: 4096,
                bias: true,
            }),
            &c,
        );
        let g = b.build();
        let params = model_params(&g).unwrap();
        assert_eq!(params, 256 * 3 + 3 + 6 * 6 * 3 * 4096 + 4096);
        assert_eq!(storage_bytes(&g, 32).unwrap(), 4 * params);
        assert_eq!(storage_bytes(&g, 6).unwrap(), (params * 6).div_ceil(8));

        let lowered = g.lower_fc().unwrap();
        assert_eq!(model_params(&lowered).unwrap(), params);
        assert_eq!(model_macs(&lowered).unwrap(), model_macs(&g).unwrap());
    }

    #[test]
    fn fc_6x6_lowering_keeps_params() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(6, 6, 256));
        b.then(
            "fc6",
            LayerSpec::FullyConnected(FullyConnectedSpec {
                filters: 4096,
                bias: true,
            }),
            &i,
        );
        let g = b.build();
        let before = model_params(&g).unwrap();
        assert_eq!(before, 37_752_832);
        assert_eq!(model_params(&g.lower_fc().unwrap()).unwrap(), before);
    }
}
