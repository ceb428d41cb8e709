use crate::ir::{
    ArchGraph, ConvSpec, FullyConnectedSpec, GraphBuilder, LayerSpec, PoolSpec, TensorShape,
};

fn fc(filters: usize) -> LayerSpec {
    LayerSpec::FullyConnected(FullyConnectedSpec {
        filters,
        bias: true,
    })
}

/// AlexNet on a 227x227x3 input with the original two-group conv2/4/5.
/// Local response normalization is left out.
pub fn alexnet() -> ArchGraph {
    let mut b = GraphBuilder::new("alexnet");
    let pool = LayerSpec::Pool(PoolSpec::max(3, 2));
    let mut cur = b.input("data", TensorShape::new(227, 227, 3));

    let convs = [
        ("conv1", ConvSpec::square(11, 96).with_stride(4).with_pad(0), true),
        ("conv2", ConvSpec::square(5, 256).with_groups(2), true),
        ("conv3", ConvSpec::square(3, 384), false),
        ("conv4", ConvSpec::square(3, 384).with_groups(2), false),
        ("conv5", ConvSpec::square(3, 256).with_groups(2), true),
    ];
    for (i, (id, conv, pooled)) in convs.into_iter().enumerate() {
        cur = b.then(id, LayerSpec::Conv(conv), &cur);
        cur = b.then(format!("relu{}", i + 1), LayerSpec::Relu, &cur);
        if pooled {
            cur = b.then(format!("pool{}", i + 1), pool, &cur);
        }
    }
    cur = b.then("fc6", fc(4096), &cur);
    cur = b.then("relu6", LayerSpec::Relu, &cur);
    cur = b.then("fc7", fc(4096), &cur);
    cur = b.then("relu7", LayerSpec::Relu, &cur);
    b.then("fc8", fc(1000), &cur);
    b.build()
}

/// VGG-19: sixteen 3x3 convolutions in five blocks and three FC layers.
pub fn vgg19() -> ArchGraph {
    let mut b = GraphBuilder::new("vgg19");
    let mut cur = b.input("data", TensorShape::new(224, 224, 3));
    let blocks = [(2, 64), (2, 128), (4, 256), (4, 512), (4, 512)];
    for (bi, (depth, filters)) in blocks.into_iter().enumerate() {
        for li in 0..depth {
            let id = format!("conv{}_{}", bi + 1, li + 1);
            cur = b.then(&id, LayerSpec::Conv(ConvSpec::square(3, filters)), &cur);
            cur = b.then(format!("relu{}_{}", bi + 1, li + 1), LayerSpec::Relu, &cur);
        }
        cur = b.then(
            format!("pool{}", bi + 1),
            LayerSpec::Pool(PoolSpec::max(2, 2)),
            &cur,
        );
    }
    cur = b.then("fc6", fc(4096), &cur);
    cur = b.then("relu6", LayerSpec::Relu, &cur);
    cur = b.then("fc7", fc(4096), &cur);
    cur = b.then("relu7", LayerSpec::Relu, &cur);
    b.then("fc8", fc(1000), &cur);
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{layer_params, model_params};

    #[test]
    fn alexnet_layer_by_layer() {
        let g = alexnet();
        let shaped = g.shaped().unwrap();
        let expected = [
            ("conv1", 34_944u64),
            ("conv2", 307_456),
            ("conv3", 885_120),
            ("conv4", 663_936),
            ("conv5", 442_624),
            ("fc6", 37_752_832),
            ("fc7", 16_781_312),
            ("fc8", 4_097_000),
        ];
        for (id, params) in expected {
            let i = g.nodes().iter().position(|n| n.id == id).unwrap();
            let got = layer_params(&g.nodes()[i].layer, shaped.input_shapes(i)[0]).unwrap();
            assert_eq!(got, params, "{id}");
        }
        assert_eq!(model_params(&g).unwrap(), 60_965_224);
        let shapes = g.infer_shapes().unwrap();
        assert_eq!(shapes["pool5"], TensorShape::new(6, 6, 256));
    }

    #[test]
    fn vgg19_structure() {
        let g = vgg19();
        let convs = g
            .nodes()
            .iter()
            .filter(|n| matches!(n.layer, LayerSpec::Conv(_)))
            .count();
        let fcs = g
            .nodes()
            .iter()
            .filter(|n| matches!(n.layer, LayerSpec::FullyConnected(_)))
            .count();
        assert_eq!((convs, fcs), (16, 3));
        assert_eq!(model_params(&g).unwrap(), 143_667_240);
    }
}
