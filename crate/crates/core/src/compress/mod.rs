//! Deep-compression pipeline: magnitude pruning, k-means weight sharing
//! and Huffman coding of sparse indices into the SDNC container.

mod bits;
mod container;
mod huffman;
mod kmeans;
mod pipeline;
mod prune;
mod report;

pub use bits::{BitReader, BitWriter};
pub use container::{
    decode, encode, CompressedModel, EncodedTensor, SparseQuantized, Stream, TensorStats,
    DEFAULT_REL_INDEX_BITS, SDNC_MAGIC, SDNC_VERSION,
};
pub use huffman::{CodeLengths, Decoder, Encoder, MAX_CODE_LEN};
pub use kmeans::{kmeans_quantize, mse, KMeansParams, Quantized};
pub use pipeline::{compress, CompressionConfig, CompressionOutput};
pub use prune::{prune_magnitude, Pruned};
pub use report::{compression_report, CompressionReport, TensorReport};

#[derive(Debug, thiserror::Error)]
pub enum CompressError {
    #[error("sparsity {0} must lie in [0, 1)")]
    Sparsity(f64),
    #[error("quantization bits {0} must lie in 1..=8")]
    Bits(u8),
    #[error("relative index bits {0} must lie in 1..=16")]
    RelIndexBits(u8),
    #[error("tensor `{tensor}` has a non-finite value at index {index}")]
    NonFinite { tensor: String, index: usize },
    #[error("tensor `{tensor}`: {message}")]
    Inconsistent { tensor: String, message: String },
    #[error("byte {offset}: {message}")]
    Format { offset: usize, message: String },
}
