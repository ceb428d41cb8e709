//! Random valid architectures for property testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::exec::Tensor3D;
use crate::ir::{
    ArchGraph, ConvSpec, FullyConnectedSpec, GraphBuilder, LayerSpec, PoolKind, PoolSpec,
    ShuffleSpec, TensorShape,
};

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    b: GraphBuilder,
    /// Every produced tensor; later nodes may read any of them.
    tensors: Vec<(String, TensorShape)>,
    next: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn push(&mut self, layer: LayerSpec, inputs: &[usize]) -> usize {
        let shapes: Vec<TensorShape> = inputs.iter().map(|&i| self.tensors[i].1).collect();
        let shape = layer.output_shape(&shapes).expect("generator emits valid layers");
        let ids: Vec<String> = inputs.iter().map(|&i| self.tensors[i].0.clone()).collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let id = format!("{}{}", layer.tag(), self.next);
        self.next += 1;
        self.b.add(id.clone(), layer, &refs);
        self.tensors.push((id, shape));
        self.tensors.len() - 1
    }

    fn conv(&mut self, input: TensorShape) -> LayerSpec {
        let c = input.channels;
        let g = *divisors(c).choose(self.rng).unwrap();
        let filters = g * self.rng.gen_range(1..=(12 / g).max(1));
        let k = *[1usize, 3].choose(self.rng).unwrap();
        let k = k.min(input.height).min(input.width).max(1);
        let stride = if input.height >= 4 && input.width >= 4 { self.rng.gen_range(1..=2) } else { 1 };
        let pad = if k == 3 { self.rng.gen_range(0..=1) } else { 0 };
        LayerSpec::Conv(ConvSpec {
            kernel_h: k,
            kernel_w: k,
            filters,
            groups: g,
            stride,
            pad,
            bias: self.rng.gen_bool(0.5),
        })
    }

    /// One layer reading the current tensor; returns the new current one.
    fn step(&mut self, cur: usize, remaining: usize) -> usize {
        let shape = self.tensors[cur].1;
        let spatial_ok = shape.height >= 2 && shape.width >= 2;
        loop {
            match self.rng.gen_range(0..8) {
                0 | 1 => {
                    let layer = self.conv(shape);
                    return self.push(layer, &[cur]);
                }
                2 => return self.push(LayerSpec::Relu, &[cur]),
                3 if spatial_ok => {
                    let kind = if self.rng.gen_bool(0.5) { PoolKind::Max } else { PoolKind::Avg };
                    let k = self.rng.gen_range(2..=shape.height.min(shape.width).min(3));
                    let layer = LayerSpec::Pool(PoolSpec {
                        kind,
                        kernel: k,
                        stride: self.rng.gen_range(1..=2),
                        ceil_mode: self.rng.gen_bool(0.5),
                    });
                    return self.push(layer, &[cur]);
                }
                4 if shape.channels > 1 => {
                    let gs: Vec<usize> = divisors(shape.channels).into_iter().filter(|&g| g > 1).collect();
                    let g = *gs.choose(self.rng).unwrap();
                    return self.push(LayerSpec::Shuffle(ShuffleSpec { groups: g }), &[cur]);
                }
                5 if remaining >= 3 => {
                    // Two parallel branches joined by a concat.
                    let LayerSpec::Conv(left) = self.conv(shape) else { unreachable!() };
                    let right = ConvSpec {
                        filters: self.rng.gen_range(1..=8),
                        groups: 1,
                        bias: self.rng.gen_bool(0.5),
                        ..left
                    };
                    let a = self.push(LayerSpec::Conv(left), &[cur]);
                    let b = self.push(LayerSpec::Conv(right), &[cur]);
                    return self.push(LayerSpec::Concat, &[a, b]);
                }
                6 => {
                    // Skip connection to an earlier tensor of equal spatial size.
                    let same: Vec<usize> = (0..cur)
                        .filter(|&i| self.tensors[i].1.spatial() == shape.spatial())
                        .collect();
                    if let Some(&other) = same.choose(self.rng) {
                        return self.push(LayerSpec::Concat, &[other, cur]);
                    }
                }
                7 if remaining == 1 => {
                    let layer = if self.rng.gen_bool(0.5) {
                        LayerSpec::GlobalAvgPool
                    } else {
                        LayerSpec::FullyConnected(FullyConnectedSpec {
                            filters: self.rng.gen_range(1..=10),
                            bias: self.rng.gen_bool(0.5),
                        })
                    };
                    return self.push(layer, &[cur]);
                }
                _ => {}
            }
        }
    }
}

/// A random valid graph with about `layers` non-input nodes: a chain with
/// occasional two-branch concats and skip concats. Spatial sizes stay at
/// most 12 and channel counts small so the reference executor stays fast.
pub fn random_graph<R: Rng>(rng: &mut R, layers: usize) -> ArchGraph {
    let shape = TensorShape::new(rng.gen_range(3..=12), rng.gen_range(3..=12), rng.gen_range(1..=8));
    let mut b = GraphBuilder::new("fuzz");
    let id = b.input("data", shape);
    let mut g = Gen {
        rng,
        b,
        tensors: vec![(id, shape)],
        next: 0,
    };
    let mut cur = 0;
    while g.next < layers {
        let remaining = layers - g.next;
        cur = g.step(cur, remaining);
    }
    g.b.build()
}

pub fn random_input<R: Rng>(rng: &mut R, shape: TensorShape) -> Tensor3D {
    Tensor3D::from_fn(shape, |_, _, _| rng.gen_range(-1.0..1.0))
}
