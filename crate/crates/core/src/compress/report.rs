//! Compression ratio accounting.

use serde::{Deserialize, Serialize};

use super::container::CompressedModel;
use crate::units;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorReport {
    pub name: String,
    pub params: u64,
    pub nonzeros: u64,
    pub codebook_size: usize,
    pub dense_bytes: u64,
    pub record_bytes: u64,
    pub ratio: Option<f64>,
    pub fixed_payload_bits: u64,
    pub huffman_payload_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub dense_bytes: u64,
    pub container_bytes: u64,
    /// Dense fp32 size over container size; `None` when there is nothing to compress.
    pub ratio: Option<f64>,
    pub tensors: Vec<TensorReport>,
}

fn ratio(dense: u64, packed: u64) -> Option<f64> {
    (dense > 0 && packed > 0).then(|| dense as f64 / packed as f64)
}

pub fn compression_report(model: &CompressedModel) -> CompressionReport {
    let tensors: Vec<TensorReport> = model
        .tensors
        .iter()
        .map(|t| {
            let s = t.stats();
            TensorReport {
                name: t.name.clone(),
                params: s.params,
                nonzeros: s.nonzeros,
                codebook_size: t.codebook.len(),
                dense_bytes: s.params * 4,
                record_bytes: s.record_bytes,
                ratio: ratio(s.params * 4, s.record_bytes),
                fixed_payload_bits: s.fixed_payload_bits,
                huffman_payload_bits: s.huffman_payload_bits,
            }
        })
        .collect();
    let dense_bytes = tensors.iter().map(|t| t.dense_bytes).sum();
    let container_bytes = model.byte_len();
    CompressionReport {
        dense_bytes,
        container_bytes,
        ratio: ratio(dense_bytes, container_bytes),
        tensors,
    }
}

fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "N/A".to_string(), |r| format!("{r:.2}x"))
}

impl CompressionReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<32} {:>12} {:>12} {:>10} {:>14} {:>10}\n",
            "tensor", "params", "nonzeros", "codebook", "bytes", "ratio"
        );
        for t in &self.tensors {
            out += &format!(
                "{:<32} {:>12} {:>12} {:>10} {:>14} {:>10}\n",
                t.name,
                t.params,
                t.nonzeros,
                t.codebook_size,
                t.record_bytes,
                fmt_ratio(t.ratio)
            );
        }
        out += &format!("dense      {}\n", units::bytes(self.dense_bytes));
        out += &format!("compressed {}\n", units::bytes(self.container_bytes));
        out += &format!("ratio      {}\n", fmt_ratio(self.ratio));
        out
    }
}
