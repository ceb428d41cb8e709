//! Scalar k-means quantization of nonzero weights.
//!
//! Centroids start evenly spaced between the minimum and maximum nonzero
//! value. In one dimension Lloyd iterations keep them sorted, so the
//! nearest centroid is found by binary search. When the tensor has no more
//! distinct nonzero values than centroids, the codebook is exactly those
//! values and quantization is lossless.

use super::prune::check_finite;
use super::CompressError;
use crate::weights::WeightTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct Quantized {
    /// Sorted, distinct, nonzero shared values.
    pub codebook: Vec<f32>,
    /// Codebook index of each nonzero entry, in flat order.
    pub assignments: Vec<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub bits: u8,
    pub max_iters: usize,
    /// Stop once no centroid moves by more than this.
    pub tol: f64,
}

impl KMeansParams {
    pub fn new(bits: u8) -> Self {
        Self {
            bits,
            max_iters: 100,
            tol: 1e-9,
        }
    }
}

/// Index of the nearest centroid in sorted `c`; ties go to the lower index.
fn nearest(c: &[f64], v: f64) -> usize {
    let hi = c.partition_point(|&x| x < v);
    if hi == c.len() {
        let mut i = hi - 1;
        while i > 0 && c[i - 1] == c[i] {
            i -= 1;
        }
        return i;
    }
    if hi == 0 {
        return 0;
    }
    let mut lo = hi - 1;
    while lo > 0 && c[lo - 1] == c[lo] {
        lo -= 1;
    }
    if v - c[lo] <= c[hi] - v {
        lo
    } else {
        hi
    }
}

pub fn kmeans_quantize(t: &WeightTensor, params: KMeansParams) -> Result<Quantized, CompressError> {
    if !(1..=8).contains(&params.bits) {
        return Err(CompressError::Bits(params.bits));
    }
    check_finite(t)?;
    let nonzero: Vec<f64> = t
        .values
        .iter()
        .filter(|&&v| v != 0.0)
        .map(|&v| v as f64)
        .collect();
    if nonzero.is_empty() {
        return Ok(Quantized {
            codebook: Vec::new(),
            assignments: Vec::new(),
        });
    }
    let k = 1usize << params.bits;

    let mut distinct: Vec<f32> = t.values.iter().copied().filter(|&v| v != 0.0).collect();
    distinct.sort_by(f32::total_cmp);
    distinct.dedup();
    let centroids: Vec<f32> = if distinct.len() <= k {
        distinct
    } else {
        lloyd(&nonzero, k, params)
    };
    Ok(finish(&nonzero, &centroids))
}

fn lloyd(values: &[f64], k: usize, params: KMeansParams) -> Vec<f32> {
    // Clusters of sorted scalars are contiguous ranges, so each iteration
    // only needs the range boundaries and prefix sums.
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    prefix.push(0.0f64);
    for &v in &sorted {
        prefix.push(prefix.last().unwrap() + v);
    }
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let mut c: Vec<f64> = (0..k)
        .map(|j| min + (max - min) * j as f64 / (k - 1) as f64)
        .collect();
    for _ in 0..params.max_iters {
        let mut start = 0;
        let mut shift = 0.0f64;
        for j in 0..k {
            let end = if j + 1 == k {
                sorted.len()
            } else {
                let mid = c[j] / 2.0 + c[j + 1] / 2.0;
                start + sorted[start..].partition_point(|&v| v <= mid)
            };
            if end > start {
                let m = (prefix[end] - prefix[start]) / (end - start) as f64;
                let m = m.clamp(sorted[start], sorted[end - 1]);
                shift = shift.max((m - c[j]).abs());
                c[j] = m;
            }
            start = end;
        }
        for j in 1..k {
            if c[j] < c[j - 1] {
                c[j] = c[j - 1];
            }
        }
        if shift <= params.tol {
            break;
        }
    }
    c.into_iter().map(|x| x as f32).collect()
}

/// Assigns against the f32 centroids and drops unused or zero entries.
fn finish(values: &[f64], centroids: &[f32]) -> Quantized {
    let c: Vec<f64> = centroids.iter().map(|&x| x as f64).collect();
    let raw: Vec<usize> = values.iter().map(|&v| nearest(&c, v)).collect();
    let mut used = vec![false; c.len()];
    for &j in &raw {
        used[j] = true;
    }
    let mut remap = vec![u16::MAX; c.len()];
    let mut codebook = Vec::new();
    for (j, &u) in used.iter().enumerate() {
        if u {
            remap[j] = codebook.len() as u16;
            codebook.push(centroids[j]);
        }
    }
    // A zero centroid would read back as a pruned entry.
    for v in &mut codebook {
        if *v == 0.0 {
            *v = f32::MIN_POSITIVE;
        }
    }
    Quantized {
        codebook,
        assignments: raw.into_iter().map(|j| remap[j]).collect(),
    }
}

impl Quantized {
    /// Rebuilds a dense tensor with the zero pattern of `template`.
    pub fn to_dense(&self, template: &WeightTensor) -> WeightTensor {
        let mut codes = self.assignments.iter();
        let values = template
            .values
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    0.0
                } else {
                    self.codebook[*codes.next().expect("assignment per nonzero") as usize]
                }
            })
            .collect();
        WeightTensor {
            name: template.name.clone(),
            shape: template.shape.clone(),
            values,
        }
    }
}

/// Mean squared error between two equally sized tensors.
pub fn mse(a: &WeightTensor, b: &WeightTensor) -> f64 {
    let n = a.values.len().max(1) as f64;
    a.values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
        .sum::<f64>()
        / n
}
