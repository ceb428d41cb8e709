use std::collections::HashMap;

use crate::ir::{ArchGraph, LayerSpec};
use crate::weights::{bias_name, expected_weights, weight_name, WeightTensor};

use super::kernels::{
    concat, conv_counted, fc_counted, global_avg_pool, pool_forward, relu, shuffle_forward,
};
use super::tensor::Tensor3D;
use super::ExecError;

fn bind_weights<'w>(
    graph: &ArchGraph,
    weights: &'w [WeightTensor],
) -> Result<HashMap<&'w str, &'w WeightTensor>, ExecError> {
    let by_name: HashMap<&str, &WeightTensor> =
        weights.iter().map(|w| (w.name.as_str(), w)).collect();
    for (name, shape) in expected_weights(graph)? {
        let w = by_name
            .get(name.as_str())
            .ok_or_else(|| ExecError::MissingWeight(name.clone()))?;
        if w.shape != shape {
            return Err(ExecError::WeightShape {
                name,
                expected: shape,
                found: w.shape.clone(),
            });
        }
        if w.values.iter().any(|v| v.is_nan()) {
            return Err(ExecError::NanWeight(name));
        }
    }
    Ok(by_name)
}

/// Every node's output in declaration order, plus the MACs performed.
pub fn run_all(
    graph: &ArchGraph,
    weights: &[WeightTensor],
    input: &Tensor3D,
) -> Result<(Vec<Tensor3D>, u64), ExecError> {
    let shaped = graph.shaped()?;
    let expected_input = graph.input_shape().expect("validated graph has an input");
    if input.shape() != expected_input {
        return Err(ExecError::InputShape {
            expected: expected_input,
            found: input.shape(),
        });
    }
    let by_name = bind_weights(graph, weights)?;
    let params = |id: &str, bias: bool| {
        let w = by_name[weight_name(id).as_str()].values.as_slice();
        let b = bias.then(|| by_name[bias_name(id).as_str()].values.as_slice());
        (w, b)
    };

    let mut outputs: Vec<Option<Tensor3D>> = vec![None; graph.nodes().len()];
    let mut macs = 0u64;
    for &i in shaped.order() {
        let node = shaped.node(i);
        let preds = shaped.predecessors(i);
        let arg = |k: usize| outputs[preds[k]].as_ref().expect("topological order");
        let out = match node.layer {
            LayerSpec::Input(_) => input.clone(),
            LayerSpec::Conv(c) => {
                let (w, b) = params(&node.id, c.bias);
                conv_counted(arg(0), &c, w, b, &mut macs)?
            }
            LayerSpec::FullyConnected(fc) => {
                let (w, b) = params(&node.id, fc.bias);
                fc_counted(arg(0), fc.filters, w, b, &mut macs)?
            }
            LayerSpec::Pool(p) => pool_forward(arg(0), &p)?,
            LayerSpec::GlobalAvgPool => global_avg_pool(arg(0)),
            LayerSpec::Relu => relu(arg(0)),
            LayerSpec::Shuffle(s) => shuffle_forward(arg(0), s.groups)?,
            LayerSpec::Concat => {
                let args: Vec<&Tensor3D> = (0..preds.len()).map(arg).collect();
                concat(&args)?
            }
        };
        outputs[i] = Some(out);
    }
    Ok((
        outputs.into_iter().map(|o| o.expect("every node ran")).collect(),
        macs,
    ))
}

/// Forward pass; returns the sink's output.
pub fn run(
    graph: &ArchGraph,
    weights: &[WeightTensor],
    input: &Tensor3D,
) -> Result<Tensor3D, ExecError> {
    let sink = graph.shaped()?.sink();
    let (mut outputs, _) = run_all(graph, weights, input)?;
    Ok(outputs.swap_remove(sink))
}

/// Executes the graph with zero weights and counts every multiply-accumulate.
pub fn count_macs_instrumented(graph: &ArchGraph, input: &Tensor3D) -> Result<u64, ExecError> {
    let zeros: Vec<WeightTensor> = expected_weights(graph)?
        .into_iter()
        .map(|(name, shape)| {
            let n = shape.iter().product();
            WeightTensor {
                name,
                shape,
                values: vec![0.0; n],
            }
        })
        .collect();
    Ok(run_all(graph, &zeros, input)?.1)
}
