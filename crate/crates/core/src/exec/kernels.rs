//! Direct kernels: no im2col, no tiling, f64 accumulation.

use crate::ir::{ConvSpec, LayerSpec, PoolKind, PoolSpec, TensorShape};

use super::tensor::Tensor3D;
use super::ExecError;

/// Grouped 2-D convolution. Filter `f` belongs to group
/// `f / (F / g)` and reads input channels `[k * C/g, (k + 1) * C/g)`.
/// Weights are `[F][C/g][kh][kw]`.
pub fn conv_forward(
    input: &Tensor3D,
    conv: &ConvSpec,
    weight: &[f32],
    bias: Option<&[f32]>,
) -> Result<Tensor3D, ExecError> {
    let mut macs = 0;
    conv_counted(input, conv, weight, bias, &mut macs)
}

pub(crate) fn conv_counted(
    input: &Tensor3D,
    conv: &ConvSpec,
    weight: &[f32],
    bias: Option<&[f32]>,
    macs: &mut u64,
) -> Result<Tensor3D, ExecError> {
    let in_shape = input.shape();
    let out_shape = LayerSpec::Conv(*conv).output_shape(&[in_shape])?;
    let cpg = in_shape.channels / conv.groups;
    let fpg = conv.filters / conv.groups;
    let (kh, kw) = (conv.kernel_h, conv.kernel_w);
    let expected = conv.filters * cpg * kh * kw;
    if weight.len() != expected {
        return Err(ExecError::KernelWeights {
            expected,
            found: weight.len(),
        });
    }

    let mut out = Tensor3D::zeros(out_shape);
    let (h, w) = (in_shape.height as isize, in_shape.width as isize);
    let pad = conv.pad as isize;
    for f in 0..conv.filters {
        let first_channel = (f / fpg) * cpg;
        for oy in 0..out_shape.height {
            for ox in 0..out_shape.width {
                let mut acc = bias.map_or(0.0, |b| b[f] as f64);
                for ci in 0..cpg {
                    for ky in 0..kh {
                        for kx in 0..kw {
                            let iy = (oy * conv.stride + ky) as isize - pad;
                            let ix = (ox * conv.stride + kx) as isize - pad;
                            // Padded taps still multiply (by zero) so the
                            // count matches the analytical MAC formula.
                            let v = if iy >= 0 && iy < h && ix >= 0 && ix < w {
                                input.get(first_channel + ci, iy as usize, ix as usize) as f64
                            } else {
                                0.0
                            };
                            let wv = weight[((f * cpg + ci) * kh + ky) * kw + kx] as f64;
                            acc += wv * v;
                            *macs += 1;
                        }
                    }
                }
                let i = out.index(f, oy, ox);
                out.values_mut()[i] = acc as f32;
            }
        }
    }
    Ok(out)
}

/// Dense layer over the channel-major flattened input; weights `[F][C*H*W]`.
pub(crate) fn fc_counted(
    input: &Tensor3D,
    filters: usize,
    weight: &[f32],
    bias: Option<&[f32]>,
    macs: &mut u64,
) -> Result<Tensor3D, ExecError> {
    let n = input.values().len();
    if weight.len() != filters * n {
        return Err(ExecError::KernelWeights {
            expected: filters * n,
            found: weight.len(),
        });
    }
    let values = (0..filters)
        .map(|f| {
            let row = &weight[f * n..(f + 1) * n];
            let mut acc = bias.map_or(0.0, |b| b[f] as f64);
            for (wv, x) in row.iter().zip(input.values()) {
                acc += *wv as f64 * *x as f64;
                *macs += 1;
            }
            acc as f32
        })
        .collect();
    Tensor3D::new(TensorShape::new(1, 1, filters), values)
}

/// Max or average pooling without padding. Windows that overhang the
/// border (ceil mode) skip missing taps; average pooling still divides by
/// the full kernel area.
pub fn pool_forward(input: &Tensor3D, pool: &PoolSpec) -> Result<Tensor3D, ExecError> {
    let in_shape = input.shape();
    let out_shape = LayerSpec::Pool(*pool).output_shape(&[in_shape])?;
    let mut out = Tensor3D::zeros(out_shape);
    let area = (pool.kernel * pool.kernel) as f64;
    for c in 0..in_shape.channels {
        for oy in 0..out_shape.height {
            for ox in 0..out_shape.width {
                let mut max = f32::NEG_INFINITY;
                let mut sum = 0.0f64;
                for ky in 0..pool.kernel {
                    for kx in 0..pool.kernel {
                        let iy = oy * pool.stride + ky;
                        let ix = ox * pool.stride + kx;
                        if iy < in_shape.height && ix < in_shape.width {
                            let v = input.get(c, iy, ix);
                            max = max.max(v);
                            sum += v as f64;
                        }
                    }
                }
                let i = out.index(c, oy, ox);
                out.values_mut()[i] = match pool.kind {
                    PoolKind::Max => max,
                    PoolKind::Avg => (sum / area) as f32,
                };
            }
        }
    }
    Ok(out)
}

pub fn global_avg_pool(input: &Tensor3D) -> Tensor3D {
    let s = input.shape();
    let plane = s.spatial() as f64;
    let values = (0..s.channels)
        .map(|c| (input.channel(c).iter().map(|&v| v as f64).sum::<f64>() / plane) as f32)
        .collect();
    Tensor3D::new(TensorShape::new(1, 1, s.channels), values).expect("1x1xC")
}

pub fn relu(input: &Tensor3D) -> Tensor3D {
    let values = input.values().iter().map(|&v| v.max(0.0)).collect();
    Tensor3D::new(input.shape(), values).expect("same shape")
}

/// Source channel of every output channel: with `n = C / g`, output `j`
/// reads input `(j mod g) * n + j / g`.
pub fn shuffle_sources(channels: usize, groups: usize) -> Result<Vec<usize>, ExecError> {
    if groups == 0 || !channels.is_multiple_of(groups) {
        return Err(ExecError::Shuffle { channels, groups });
    }
    let n = channels / groups;
    Ok((0..channels).map(|j| (j % groups) * n + j / groups).collect())
}

pub fn shuffle_forward(input: &Tensor3D, groups: usize) -> Result<Tensor3D, ExecError> {
    let s = input.shape();
    let sources = shuffle_sources(s.channels, groups)?;
    let mut values = Vec::with_capacity(input.values().len());
    for src in sources {
        values.extend_from_slice(input.channel(src));
    }
    Tensor3D::new(s, values)
}

pub fn concat(inputs: &[&Tensor3D]) -> Result<Tensor3D, ExecError> {
    let shapes: Vec<TensorShape> = inputs.iter().map(|t| t.shape()).collect();
    let out_shape = LayerSpec::Concat.output_shape(&shapes)?;
    let mut values = Vec::with_capacity(out_shape.elements() as usize);
    for t in inputs {
        values.extend_from_slice(t.values());
    }
    Tensor3D::new(out_shape, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_zeroes_negatives() {
        let t = Tensor3D::new(TensorShape::new(1, 3, 1), vec![-1.0, 0.0, 2.0]).unwrap();
        assert_eq!(relu(&t).values(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn shuffle_index_map() {
        assert_eq!(shuffle_sources(6, 2).unwrap(), vec![0, 3, 1, 4, 2, 5]);
        assert!(shuffle_sources(6, 4).is_err());
        let t = Tensor3D::from_fn(TensorShape::new(2, 2, 6), |c, y, x| (c * 100 + y * 10 + x) as f32);
        let s = shuffle_forward(&t, 2).unwrap();
        assert_eq!(s.channel(1), t.channel(3));
        assert_eq!(shuffle_forward(&s, 3).unwrap(), t);
    }

    #[test]
    fn identity_permutation_pointwise_conv() {
        // Output channel f copies input channel perm[f].
        let perm = [2usize, 0, 3, 1];
        let mut w = vec![0.0f32; 16];
        for (f, &src) in perm.iter().enumerate() {
            w[f * 4 + src] = 1.0;
        }
        let t = Tensor3D::from_fn(TensorShape::new(3, 3, 4), |c, y, x| (c + 10 * y + 100 * x) as f32);
        let conv = ConvSpec::square(1, 4).with_bias(false);
        let out = conv_forward(&t, &conv, &w, None).unwrap();
        for (f, &src) in perm.iter().enumerate() {
            assert_eq!(out.channel(f), t.channel(src));
        }
    }

    #[test]
    fn grouped_conv_reads_only_its_group() {
        // g=2, C=4, F=4: filters 0-1 see channels 0-1, filters 2-3 see 2-3.
        let conv = ConvSpec::square(1, 4).with_groups(2).with_bias(false);
        let w = vec![1.0f32; 4 * 2];
        let t = Tensor3D::new(TensorShape::new(1, 1, 4), vec![1.0, 2.0, 30.0, 40.0]).unwrap();
        let out = conv_forward(&t, &conv, &w, None).unwrap();
        assert_eq!(out.values(), &[3.0, 3.0, 70.0, 70.0]);
    }

    #[test]
    fn depthwise_ones_on_constant_input() {
        let c = 3;
        let conv = ConvSpec::square(3, c).with_groups(c).with_bias(false);
        let w = vec![1.0f32; c * 9];
        let t = Tensor3D::from_fn(TensorShape::new(5, 5, c), |_, _, _| 2.0);
        let out = conv_forward(&t, &conv, &w, None).unwrap();
        assert_eq!(out.shape(), TensorShape::new(5, 5, c));
        for ch in 0..c {
            assert_eq!(out.get(ch, 2, 2), 18.0);
            assert_eq!(out.get(ch, 0, 2), 12.0);
            assert_eq!(out.get(ch, 0, 0), 8.0);
        }
    }

    #[test]
    fn pooling_conventions() {
        let t = Tensor3D::from_fn(TensorShape::new(3, 3, 1), |_, y, x| (y * 3 + x) as f32);
        let max = pool_forward(&t, &PoolSpec::max(2, 2).ceil()).unwrap();
        assert_eq!(max.values(), &[4.0, 5.0, 7.0, 8.0]);
        let avg = PoolSpec {
            kind: PoolKind::Avg,
            ..PoolSpec::max(2, 2).ceil()
        };
        let avg = pool_forward(&t, &avg).unwrap();
        // Border windows hold fewer taps but still divide by 4.
        assert_eq!(avg.values(), &[2.0, 7.0 / 4.0, 13.0 / 4.0, 2.0]);
        assert_eq!(global_avg_pool(&t).values(), &[4.0]);
    }
}
