use crate::ir::{ArchGraph, ConvSpec, FullyConnectedSpec, GraphBuilder, LayerSpec, TensorShape};

use super::ZooError;

/// (stride of the depthwise conv, pointwise filters) for the 13 blocks.
pub const MOBILENET_BLOCKS: [(usize, usize); 13] = [
    (1, 64),
    (2, 128),
    (1, 128),
    (2, 256),
    (1, 256),
    (2, 512),
    (1, 512),
    (1, 512),
    (1, 512),
    (1, 512),
    (1, 512),
    (2, 1024),
    (1, 1024),
];

fn scaled(channels: usize, multiplier: f64) -> usize {
    ((channels as f64 * multiplier).round() as usize).max(1)
}

/// Depthwise-separable network: a strided stem, 13 depthwise (g = C) plus
/// pointwise blocks with strided convs instead of pools, global average
/// pooling and a 1000-way FC head. Convolutions carry no bias.
pub fn mobilenet_like(width_multiplier: f64) -> Result<ArchGraph, ZooError> {
    if !(width_multiplier > 0.0 && width_multiplier <= 1.0) {
        return Err(ZooError::InvalidWidth(width_multiplier));
    }
    let mut b = GraphBuilder::new("mobilenet");
    let mut cur = b.input("data", TensorShape::new(224, 224, 3));
    let mut channels = scaled(32, width_multiplier);
    let stem = ConvSpec::square(3, channels).with_stride(2).with_bias(false);
    cur = b.then("conv0", LayerSpec::Conv(stem), &cur);
    cur = b.then("relu0", LayerSpec::Relu, &cur);

    for (i, (stride, filters)) in MOBILENET_BLOCKS.into_iter().enumerate() {
        let n = i + 1;
        let dw = ConvSpec::square(3, channels)
            .with_stride(stride)
            .with_groups(channels)
            .with_bias(false);
        cur = b.then(format!("conv{n}_dw"), LayerSpec::Conv(dw), &cur);
        cur = b.then(format!("relu{n}_dw"), LayerSpec::Relu, &cur);
        let out = scaled(filters, width_multiplier);
        let pw = ConvSpec::square(1, out).with_bias(false);
        cur = b.then(format!("conv{n}_pw"), LayerSpec::Conv(pw), &cur);
        cur = b.then(format!("relu{n}_pw"), LayerSpec::Relu, &cur);
        channels = out;
    }
    cur = b.then("pool_global", LayerSpec::GlobalAvgPool, &cur);
    b.then(
        "fc",
        LayerSpec::FullyConnected(FullyConnectedSpec {
            filters: 1000,
            bias: true,
        }),
        &cur,
    );
    Ok(b.build())
}
