use crate::ir::{BindError, LayerSpec, TensorShape};

/// Weights plus biases of one layer bound to `input`.
///
/// Convolutions hold `kh * kw * (C_in / g) * F` weights; fully-connected
/// layers are convolutions spanning the whole input.
pub fn layer_params(layer: &LayerSpec, input: TensorShape) -> Result<u64, BindError> {
    layer.output_shape(&[input])?;
    Ok(match *layer {
        LayerSpec::Conv(c) => {
            let per_filter = (c.kernel_h * c.kernel_w) as u64 * (input.channels / c.groups) as u64;
            per_filter * c.filters as u64 + if c.bias { c.filters as u64 } else { 0 }
        }
        LayerSpec::FullyConnected(fc) => {
            input.elements() * fc.filters as u64 + if fc.bias { fc.filters as u64 } else { 0 }
        }
        _ => 0,
    })
}

/// Multiply-accumulates of one layer bound to `input`. Bias adds, pooling
/// and every other layer cost nothing in this convention.
pub fn layer_macs(layer: &LayerSpec, input: TensorShape) -> Result<u64, BindError> {
    let out = layer.output_shape(&[input])?;
    Ok(match *layer {
        LayerSpec::Conv(c) => {
            (c.kernel_h * c.kernel_w) as u64
                * (input.channels / c.groups) as u64
                * c.filters as u64
                * out.spatial()
        }
        LayerSpec::FullyConnected(fc) => input.elements() * fc.filters as u64,
        _ => 0,
    })
}
