//! Prune, quantize and encode a set of weight tensors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::container::{encode, CompressedModel, SparseQuantized, DEFAULT_REL_INDEX_BITS};
use super::kmeans::{kmeans_quantize, KMeansParams};
use super::prune::prune_magnitude;
use super::report::{compression_report, CompressionReport};
use super::CompressError;
use crate::weights::WeightTensor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionConfig {
    pub sparsity: f64,
    pub bits: u8,
    pub rel_index_bits: u8,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for CompressionConfig {
    fn default() -> Self {
        Self {
            sparsity: 0.7,
            bits: 6,
            rel_index_bits: DEFAULT_REL_INDEX_BITS,
            max_iters: 100,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompressionOutput {
    pub model: CompressedModel,
    /// What decoding the container yields, tensor by tensor.
    pub reconstructed: Vec<WeightTensor>,
    pub report: CompressionReport,
}

/// Runs the full pipeline. Tensors are processed in parallel; output order
/// matches input order.
pub fn compress(tensors: &[WeightTensor], cfg: &CompressionConfig) -> Result<CompressionOutput, CompressError> {
    let kparams = KMeansParams {
        bits: cfg.bits,
        max_iters: cfg.max_iters,
        tol: cfg.tol,
    };
    let quantized: Vec<SparseQuantized> = tensors
        .par_iter()
        .map(|t| {
            let pruned = prune_magnitude(t, cfg.sparsity)?;
            let q = kmeans_quantize(&pruned.tensor, kparams)?;
            SparseQuantized::from_parts(&pruned.tensor, &q)
        })
        .collect::<Result<_, _>>()?;
    let model = encode(&quantized, cfg.rel_index_bits)?;
    let reconstructed = quantized.iter().map(SparseQuantized::to_dense).collect();
    let report = compression_report(&model);
    Ok(CompressionOutput {
        model,
        reconstructed,
        report,
    })
}
