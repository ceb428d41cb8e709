use crate::ir::{ArchGraph, ConvSpec, GraphBuilder, LayerSpec, PoolSpec, TensorShape};

use super::fire::{append_fire, FireSpec};
use super::placement::{place_downsampling, PoolPlacement};
use super::ZooError;

/// (squeeze filters, total expand filters) for fire2..fire9.
pub const FIRE_STAGES: [(usize, usize); 8] = [
    (16, 128),
    (16, 128),
    (32, 256),
    (32, 256),
    (48, 384),
    (48, 384),
    (64, 512),
    (64, 512),
];

/// conv1, fire2..fire9, conv10.
pub const SQUEEZENET_LAYERS: usize = 10;

/// Canonical pooling positions: after conv1, fire4 and fire8.
pub const CANONICAL_POOLS: [usize; 3] = [1, 4, 8];

pub const SQUEEZENET_INPUT: TensorShape = TensorShape::new(227, 227, 3);

/// Splits `total` expand filters so that `round_half_up(p * total)` are 3x3.
pub fn split_expand(p: f64, total: usize) -> (usize, usize) {
    let e3 = ((p * total as f64) + 0.5).floor() as usize;
    let e3 = e3.min(total);
    (total - e3, e3)
}

pub fn fire_stages(p: f64) -> Vec<FireSpec> {
    FIRE_STAGES
        .iter()
        .map(|&(s, e)| {
            let (e1, e3) = split_expand(p, e);
            FireSpec::new(s, e1, e3)
        })
        .collect()
}

fn check_p(p: f64) -> Result<(), ZooError> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(ZooError::InvalidP(p))
    }
}

/// SqueezeNet with a global 3x3 fraction `p` and pools placed by strategy.
pub fn squeezenet(p: f64, pooling: PoolPlacement) -> Result<ArchGraph, ZooError> {
    check_p(p)?;
    let positions = place_downsampling(SQUEEZENET_LAYERS, pooling)?;
    squeezenet_with_pools(p, &positions)
}

/// SqueezeNet with 3x3/2 max pools after the given 1-based layer positions.
pub fn squeezenet_with_pools(p: f64, pool_after: &[usize]) -> Result<ArchGraph, ZooError> {
    check_p(p)?;
    if let Some(&bad) = pool_after
        .iter()
        .find(|&&x| x == 0 || x > SQUEEZENET_LAYERS)
    {
        return Err(ZooError::PoolPosition(bad));
    }
    let pool = LayerSpec::Pool(PoolSpec::max(3, 2).ceil());
    let mut b = GraphBuilder::new("squeezenet");
    let mut cur = b.input("data", SQUEEZENET_INPUT);
    let mut pool_idx = 0;
    let mut maybe_pool = |b: &mut GraphBuilder, cur: String, position: usize| {
        if pool_after.contains(&position) {
            pool_idx += 1;
            b.then(format!("pool{pool_idx}"), pool, &cur)
        } else {
            cur
        }
    };

    let conv1 = ConvSpec::square(7, 96).with_stride(2).with_pad(0);
    cur = b.then("conv1", LayerSpec::Conv(conv1), &cur);
    cur = b.then("relu_conv1", LayerSpec::Relu, &cur);
    cur = maybe_pool(&mut b, cur, 1);

    for (i, spec) in fire_stages(p).into_iter().enumerate() {
        let name = format!("fire{}", i + 2);
        cur = append_fire(&mut b, &name, &cur, spec);
        cur = maybe_pool(&mut b, cur, i + 2);
    }

    cur = b.then("conv10", LayerSpec::Conv(ConvSpec::square(1, 1000)), &cur);
    cur = b.then("relu_conv10", LayerSpec::Relu, &cur);
    cur = maybe_pool(&mut b, cur, SQUEEZENET_LAYERS);
    b.then("pool_global", LayerSpec::GlobalAvgPool, &cur);

    let g = b.build();
    g.validate().map_err(|v| ZooError::Graph(crate::ir::IrError::Invalid(v)))?;
    Ok(g)
}
