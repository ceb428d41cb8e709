//! A second, independently written forward pass (spatial-major nested
//! vectors, scalar loops) checked against the reference executor.

use std::collections::HashMap;

use dnnscope::exec::{run_all, Tensor3D};
use dnnscope::ir::{ArchGraph, LayerSpec, PoolKind};
use dnnscope::verify::{random_graph, random_input};
use dnnscope::weights::random_weights;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `t[y][x][c]`
type Hwc = Vec<Vec<Vec<f64>>>;

fn dims(t: &Hwc) -> (usize, usize, usize) {
    (t.len(), t[0].len(), t[0][0].len())
}

fn to_hwc(t: &Tensor3D) -> Hwc {
    let s = t.shape();
    (0..s.height)
        .map(|y| (0..s.width).map(|x| (0..s.channels).map(|c| t.get(c, y, x) as f64).collect()).collect())
        .collect()
}

fn pool_extent(n: usize, k: usize, s: usize, ceil: bool) -> usize {
    let mut out = if ceil { (n - k).div_ceil(s) + 1 } else { (n - k) / s + 1 };
    if ceil && (out - 1) * s >= n {
        out -= 1;
    }
    out
}

fn oracle(graph: &ArchGraph, weights: &HashMap<String, Vec<f32>>, input: &Hwc) -> HashMap<String, Hwc> {
    let mut vals: HashMap<String, Hwc> = HashMap::new();
    for node in graph.nodes() {
        let arg = |k: usize| &vals[&node.inputs[k]];
        let out: Hwc = match &node.layer {
            LayerSpec::Input(_) => input.clone(),
            LayerSpec::Conv(cv) => {
                let x = arg(0);
                let (h, w, c) = dims(x);
                let oh = (h + 2 * cv.pad - cv.kernel_h) / cv.stride + 1;
                let ow = (w + 2 * cv.pad - cv.kernel_w) / cv.stride + 1;
                let wt = &weights[&format!("{}.weight", node.id)];
                let bias = weights.get(&format!("{}.bias", node.id));
                let cin = c / cv.groups;
                let fper = cv.filters / cv.groups;
                let mut out = vec![vec![vec![0.0; cv.filters]; ow]; oh];
                for oy in 0..oh {
                    for ox in 0..ow {
                        for f in 0..cv.filters {
                            let group = f / fper;
                            let mut acc = bias.map_or(0.0, |b| b[f] as f64);
                            for ky in 0..cv.kernel_h {
                                for kx in 0..cv.kernel_w {
                                    let iy = (oy * cv.stride + ky) as i64 - cv.pad as i64;
                                    let ix = (ox * cv.stride + kx) as i64 - cv.pad as i64;
                                    if iy < 0 || ix < 0 || iy >= h as i64 || ix >= w as i64 {
                                        continue;
                                    }
                                    for ci in 0..cin {
                                        let widx = ((f * cin + ci) * cv.kernel_h + ky) * cv.kernel_w + kx;
                                        acc += wt[widx] as f64 * x[iy as usize][ix as usize][group * cin + ci];
                                    }
                                }
                            }
                            out[oy][ox][f] = acc as f32 as f64;
                        }
                    }
                }
                out
            }
            LayerSpec::FullyConnected(fc) => {
                let x = arg(0);
                let (h, w, c) = dims(x);
                let wt = &weights[&format!("{}.weight", node.id)];
                let bias = weights.get(&format!("{}.bias", node.id));
                let n = h * w * c;
                let mut row = vec![0.0; fc.filters];
                for (f, slot) in row.iter_mut().enumerate() {
                    let mut acc = bias.map_or(0.0, |b| b[f] as f64);
                    for ci in 0..c {
                        for y in 0..h {
                            for xx in 0..w {
                                acc += wt[f * n + (ci * h + y) * w + xx] as f64 * x[y][xx][ci];
                            }
                        }
                    }
                    *slot = acc as f32 as f64;
                }
                vec![vec![row]]
            }
            LayerSpec::Pool(p) => {
                let x = arg(0);
                let (h, w, c) = dims(x);
                let oh = pool_extent(h, p.kernel, p.stride, p.ceil_mode);
                let ow = pool_extent(w, p.kernel, p.stride, p.ceil_mode);
                let mut out = vec![vec![vec![0.0; c]; ow]; oh];
                for oy in 0..oh {
                    for ox in 0..ow {
                        for ch in 0..c {
                            let mut taps = Vec::new();
                            for ky in 0..p.kernel {
                                for kx in 0..p.kernel {
                                    let (iy, ix) = (oy * p.stride + ky, ox * p.stride + kx);
                                    if iy < h && ix < w {
                                        taps.push(x[iy][ix][ch]);
                                    }
                                }
                            }
                            out[oy][ox][ch] = match p.kind {
                                PoolKind::Max => taps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                                PoolKind::Avg => taps.iter().sum::<f64>() / (p.kernel * p.kernel) as f64,
                            } as f32 as f64;
                        }
                    }
                }
                out
            }
            LayerSpec::GlobalAvgPool => {
                let x = arg(0);
                let (h, w, c) = dims(x);
                let row = (0..c)
                    .map(|ch| {
                        let s: f64 = x.iter().flat_map(|r| r.iter().map(|v| v[ch])).sum();
                        (s / (h * w) as f64) as f32 as f64
                    })
                    .collect();
                vec![vec![row]]
            }
            LayerSpec::Relu => arg(0)
                .iter()
                .map(|r| r.iter().map(|v| v.iter().map(|&a| a.max(0.0)).collect()).collect())
                .collect(),
            LayerSpec::Shuffle(s) => {
                let x = arg(0);
                let (_, _, c) = dims(x);
                let n = c / s.groups;
                // Transpose a (groups x n) channel grid.
                x.iter()
                    .map(|r| {
                        r.iter()
                            .map(|v| {
                                let mut o = vec![0.0; c];
                                for gi in 0..s.groups {
                                    for ni in 0..n {
                                        o[ni * s.groups + gi] = v[gi * n + ni];
                                    }
                                }
                                o
                            })
                            .collect()
                    })
                    .collect()
            }
            LayerSpec::Concat => {
                let parts: Vec<&Hwc> = (0..node.inputs.len()).map(arg).collect();
                let (h, w, _) = dims(parts[0]);
                (0..h)
                    .map(|y| (0..w).map(|x| parts.iter().flat_map(|p| p[y][x].iter().copied()).collect()).collect())
                    .collect()
            }
        };
        vals.insert(node.id.clone(), out);
    }
    vals
}

#[test]
fn executor_matches_scalar_oracle_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..40 {
        let g = random_graph(&mut rng, 8);
        let w = random_weights(&g, rng.gen()).unwrap();
        let input = random_input(&mut rng, g.input_shape().unwrap());
        let (outs, _) = run_all(&g, &w, &input).unwrap();
        let by_name: HashMap<String, Vec<f32>> = w.into_iter().map(|t| (t.name, t.values)).collect();
        let expected = oracle(&g, &by_name, &to_hwc(&input));
        for (node, out) in g.nodes().iter().zip(&outs) {
            let got = to_hwc(out);
            let want = &expected[&node.id];
            assert_eq!(dims(&got), dims(want), "case {case} node {}", node.id);
            let flat = |t: &Hwc| -> Vec<f64> { t.iter().flatten().flatten().copied().collect() };
            let (g_, w_) = (flat(&got), flat(want));
            let scale = w_.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            let diff = g_.iter().zip(&w_).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(diff / scale <= 1e-6, "case {case} node {}: rel diff {}", node.id, diff / scale);
        }
    }
}

#[test]
fn depthwise_all_ones_on_constant_input() {
    use dnnscope::exec::conv_forward;
    use dnnscope::ir::{ConvSpec, TensorShape};
    let input = Tensor3D::from_fn(TensorShape::new(5, 5, 3), |_, _, _| 2.0);
    let conv = ConvSpec::square(3, 3).with_groups(3).with_bias(false);
    let out = conv_forward(&input, &conv, &[1.0; 27], None).unwrap();
    assert_eq!(out.get(1, 2, 2), 18.0);
    assert_eq!(out.get(0, 0, 0), 8.0);
    assert_eq!(out.get(2, 0, 2), 12.0);
}
