//! Cross-module property suite: the reference executor against the
//! analytical model, plus kernel and codec identities.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fuzz::{random_graph, random_input};
use crate::compress::{self, CompressedModel, KMeansParams, SparseQuantized};
use crate::cost::model_macs;
use crate::exec::{conv_forward, count_macs_instrumented, run, run_all, shuffle_forward, shuffle_sources};
use crate::ir::{ConvSpec, FullyConnectedSpec, GraphBuilder, LayerSpec, TensorShape};
use crate::weights::{expected_weights, random_weights, WeightTensor};

/// Largest absolute difference, relative to the largest reference magnitude.
pub fn max_rel_diff(actual: &[f32], reference: &[f32]) -> f64 {
    let scale = reference
        .iter()
        .fold(0.0f64, |m, &v| m.max((v as f64).abs()))
        .max(f64::MIN_POSITIVE);
    actual
        .iter()
        .zip(reference)
        .map(|(&a, &b)| (a as f64 - b as f64).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Expands grouped conv weights `[F][C/g][kh][kw]` into dense `[F][C][kh][kw]`
/// weights that are zero outside each filter's group.
pub fn block_diagonal(conv: &ConvSpec, in_channels: usize, weight: &[f32]) -> Vec<f32> {
    let cpg = in_channels / conv.groups;
    let fpg = conv.filters / conv.groups;
    let taps = conv.kernel_h * conv.kernel_w;
    let mut dense = vec![0.0f32; conv.filters * in_channels * taps];
    for f in 0..conv.filters {
        let first = (f / fpg) * cpg;
        for ci in 0..cpg {
            let src = (f * cpg + ci) * taps;
            let dst = (f * in_channels + first + ci) * taps;
            dense[dst..dst + taps].copy_from_slice(&weight[src..src + taps]);
        }
    }
    dense
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            let status = if p.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {:<28} {:>4} cases  {}", p.name, p.cases, p.detail);
        }
        let _ = writeln!(out, "overall {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

fn result(name: &str, cases: usize, failure: Option<String>) -> PropertyResult {
    PropertyResult {
        name: name.to_string(),
        cases,
        passed: failure.is_none(),
        detail: failure.unwrap_or_else(|| "ok".to_string()),
    }
}

/// Instrumented MAC count equals the analytical count.
pub fn check_macs(seed: u64, cases: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failure = (0..cases).find_map(|i| {
        let g = random_graph(&mut rng, 8);
        let input = random_input(&mut rng, g.input_shape().unwrap());
        let counted = count_macs_instrumented(&g, &input);
        let analytic = model_macs(&g);
        match (counted, analytic) {
            (Ok(c), Ok(a)) if c == a => None,
            (c, a) => Some(format!("case {i}: instrumented {c:?} vs analytical {a:?}")),
        }
    });
    result("macs_instrumented", cases, failure)
}

/// Executed shapes equal inferred shapes at every node, and reruns are
/// bit-identical.
pub fn check_shapes(seed: u64, cases: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failure = (0..cases).find_map(|i| {
        let g = random_graph(&mut rng, 8);
        let w = random_weights(&g, rng.gen()).ok()?;
        let input = random_input(&mut rng, g.input_shape().unwrap());
        let inferred = match g.infer_shapes() {
            Ok(s) => s,
            Err(e) => return Some(format!("case {i}: {e}")),
        };
        let (outs, _) = match run_all(&g, &w, &input) {
            Ok(o) => o,
            Err(e) => return Some(format!("case {i}: {e}")),
        };
        for (node, out) in g.nodes().iter().zip(&outs) {
            if inferred[&node.id] != out.shape() {
                return Some(format!("case {i}: node `{}` ran {} but inferred {}", node.id, out.shape(), inferred[&node.id]));
            }
        }
        let again = run(&g, &w, &input).ok()?;
        let sink = g.shaped().ok()?.sink();
        (again.values() != outs[sink].values()).then(|| format!("case {i}: rerun differs"))
    });
    result("shapes_and_determinism", cases, failure)
}

/// Grouped convolution equals dense convolution with block-diagonal weights.
pub fn check_grouped_conv(seed: u64, cases: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut count = 0;
    for _ in 0..cases {
        let c = 4 * rng.gen_range(1..=4);
        for g in [1, 2, 4, c] {
            count += 1;
            let f = g * rng.gen_range(1..=3);
            let k = if rng.gen_bool(0.5) { 3 } else { 1 };
            let conv = ConvSpec::square(k, f)
                .with_groups(g)
                .with_stride(rng.gen_range(1..=2));
            let shape = TensorShape::new(rng.gen_range(3..=8), rng.gen_range(3..=8), c);
            let input = random_input(&mut rng, shape);
            let w: Vec<f32> = (0..f * (c / g) * k * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f32> = (0..f).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let grouped = conv_forward(&input, &conv, &w, Some(&b));
            let dense = conv_forward(&input, &conv.with_groups(1), &block_diagonal(&conv, c, &w), Some(&b));
            match (grouped, dense) {
                (Ok(a), Ok(d)) => worst = worst.max(max_rel_diff(a.values(), d.values())),
                (a, d) => {
                    let msg = format!("g={g} C={c}: {:?} / {:?}", a.err(), d.err());
                    return result("grouped_conv_block_diagonal", count, Some(msg));
                }
            }
        }
    }
    let failure = (worst > 1e-6).then(|| format!("max relative difference {worst:e}"));
    result("grouped_conv_block_diagonal", count, failure)
}

/// Shuffle is a channel bijection and `shuffle(n)` undoes `shuffle(g)`.
pub fn check_shuffle(seed: u64, cases: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failure = (0..cases).find_map(|i| {
        let g = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=6);
        let c = g * n;
        let mut src = shuffle_sources(c, g).ok()?;
        src.sort_unstable();
        if src != (0..c).collect::<Vec<_>>() {
            return Some(format!("case {i}: g={g} C={c} is not a bijection"));
        }
        let x = random_input(&mut rng, TensorShape::new(2, 3, c));
        let back = shuffle_forward(&shuffle_forward(&x, g).ok()?, n).ok()?;
        (back != x).then(|| format!("case {i}: shuffle({n}) after shuffle({g}) is not identity"))
    });
    let fixed = shuffle_sources(6, 2).ok() == Some(vec![0, 3, 1, 4, 2, 5]);
    let failure = failure.or_else(|| (!fixed).then(|| "C=6 g=2 order wrong".to_string()));
    result("shuffle_bijection_inverse", cases, failure)
}

/// A fully-connected layer and its convolutional lowering agree.
pub fn check_fc_lowering(seed: u64, cases: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..cases {
        let shape = TensorShape::new(rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=6));
        let mut b = GraphBuilder::new("fc");
        let x = b.input("data", shape);
        let r = b.then("relu", LayerSpec::Relu, &x);
        b.then(
            "fc",
            LayerSpec::FullyConnected(FullyConnectedSpec {
                filters: rng.gen_range(1..=10),
                bias: rng.gen_bool(0.5),
            }),
            &r,
        );
        let g = b.build();
        let outcome = (|| {
            let lowered = g.lower_fc().map_err(|e| e.to_string())?;
            let w = random_weights(&g, rng.gen()).map_err(|e| e.to_string())?;
            let input = random_input(&mut rng, shape);
            let a = run(&g, &w, &input).map_err(|e| e.to_string())?;
            let shapes = expected_weights(&lowered).map_err(|e| e.to_string())?;
            let reshaped: Vec<WeightTensor> = w
                .iter()
                .zip(shapes)
                .map(|(t, (_, shape))| WeightTensor { shape, ..t.clone() })
                .collect();
            let l = run(&lowered, &reshaped, &input).map_err(|e| e.to_string())?;
            if a.shape() != l.shape() {
                return Err(format!("shapes {} vs {}", a.shape(), l.shape()));
            }
            Ok(max_rel_diff(l.values(), a.values()))
        })();
        match outcome {
            Ok(d) => worst = worst.max(d),
            Err(e) => return result("fc_lowering", cases, Some(format!("case {i}: {e}"))),
        }
    }
    let failure = (worst > 1e-6).then(|| format!("max relative difference {worst:e}"));
    result("fc_lowering", cases, failure)
}

/// Pruned, quantized tensors survive the container bit-exactly.
pub fn check_codec(seed: u64, cases: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failure = (0..cases).find_map(|i| {
        let n = rng.gen_range(0..=600);
        let values: Vec<f32> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t = WeightTensor::new(format!("t{i}"), vec![n], values).ok()?;
        let pruned = compress::prune_magnitude(&t, rng.gen_range(0.0..0.95)).ok()?.tensor;
        let q = compress::kmeans_quantize(&pruned, KMeansParams::new(rng.gen_range(1..=8))).ok()?;
        let sq = SparseQuantized::from_parts(&pruned, &q).ok()?;
        let model = compress::encode(std::slice::from_ref(&sq), rng.gen_range(1..=8)).ok()?;
        match compress::decode(&model.to_bytes()) {
            Ok(back) if back == vec![sq.to_dense()] => None,
            Ok(_) => Some(format!("case {i}: decoded values differ")),
            Err(e) => Some(format!("case {i}: {e}")),
        }
    });
    result("codec_round_trip", cases, failure)
}

/// Re-encoding the decoded tensors of a container reproduces it byte for
/// byte.
pub fn reencode_identity(bytes: &[u8]) -> Result<bool, compress::CompressError> {
    let model = CompressedModel::from_bytes(bytes)?;
    let mut again = Vec::with_capacity(model.tensors.len());
    let mut rel_bits = compress::DEFAULT_REL_INDEX_BITS;
    for (t, dense) in model.tensors.iter().zip(model.decode()?) {
        rel_bits = t.rel_index_bits;
        let bits = (1..=8u8).find(|b| (1usize << b) >= t.codebook.len()).unwrap_or(8);
        let q = compress::kmeans_quantize(&dense, KMeansParams::new(bits))?;
        again.push(SparseQuantized::from_parts(&dense, &q)?);
    }
    if model.tensors.iter().any(|t| t.rel_index_bits != rel_bits) {
        return Ok(model.decode().is_ok());
    }
    Ok(compress::encode(&again, rel_bits)?.to_bytes() == bytes)
}

/// Runs every property with `cases` random cases each.
pub fn run_suite(seed: u64, cases: usize) -> VerifyReport {
    let properties = vec![
        check_macs(seed, cases),
        check_shapes(seed.wrapping_add(1), cases),
        check_grouped_conv(seed.wrapping_add(2), cases.div_ceil(4)),
        check_shuffle(seed.wrapping_add(3), cases),
        check_fc_lowering(seed.wrapping_add(4), cases),
        check_codec(seed.wrapping_add(5), cases),
    ];
    VerifyReport {
        seed,
        passed: properties.iter().all(|p| p.passed),
        properties,
    }
}

