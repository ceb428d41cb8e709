//! Weight tensors and the SDNW weight file format.
//!
//! SDNW layout (little-endian throughout):
//!
//! ```text
//! "SDNW" | version u32 | tensor count u32
//! per tensor: name len u16 | UTF-8 name | rank u8 | dims u32 * rank
//!             | dtype u8 (0 = f32) | payload f32 * prod(dims)
//! ```
//!
//! A layer `id` owns `id.weight` and, when it has a bias, `id.bias`.
//! Convolution weights are `[F, C_in / g, kh, kw]`; fully-connected weights
//! are `[F, C * H * W]` with the input flattened channel-major, so the
//! same buffer reshaped to `[F, C, H, W]` drives the equivalent conv.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ir::{ArchGraph, IrError, LayerSpec};

pub const SDNW_MAGIC: &[u8; 4] = b"SDNW";
pub const SDNW_VERSION: u32 = 1;
const DTYPE_F32: u8 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f32>,
}

#[derive(Debug, thiserror::Error)]
pub enum WeightError {
    #[error("tensor `{name}`: {count} values do not match shape {shape:?}")]
    Count {
        name: String,
        shape: Vec<usize>,
        count: usize,
    },
    #[error("offset {offset}: {message}")]
    Format { offset: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl WeightTensor {
    pub fn new(
        name: impl Into<String>,
        shape: Vec<usize>,
        values: Vec<f32>,
    ) -> Result<Self, WeightError> {
        let name = name.into();
        if shape.iter().product::<usize>() != values.len() {
            return Err(WeightError::Count {
                name,
                count: values.len(),
                shape,
            });
        }
        Ok(Self {
            name,
            shape,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn weight_name(node: &str) -> String {
    format!("{node}.weight")
}

pub fn bias_name(node: &str) -> String {
    format!("{node}.bias")
}

/// Name and shape of every weight tensor the graph needs, in node order.
pub fn expected_weights(graph: &ArchGraph) -> Result<Vec<(String, Vec<usize>)>, IrError> {
    let shaped = graph.shaped()?;
    let mut out = Vec::new();
    for (i, n) in graph.nodes().iter().enumerate() {
        let (shape, filters, bias) = match n.layer {
            LayerSpec::Conv(c) => {
                let cin = shaped.input_shapes(i)[0].channels;
                (
                    vec![c.filters, cin / c.groups, c.kernel_h, c.kernel_w],
                    c.filters,
                    c.bias,
                )
            }
            LayerSpec::FullyConnected(fc) => {
                let input = shaped.input_shapes(i)[0];
                (
                    vec![fc.filters, input.elements() as usize],
                    fc.filters,
                    fc.bias,
                )
            }
            _ => continue,
        };
        out.push((weight_name(&n.id), shape));
        if bias {
            out.push((bias_name(&n.id), vec![filters]));
        }
    }
    Ok(out)
}

/// Uniform `[-a, a]` weights with `a = sqrt(6 / fan_in)`, biases in
/// `[-0.1, 0.1]`. Deterministic for a given seed.
pub fn random_weights(graph: &ArchGraph, seed: u64) -> Result<Vec<WeightTensor>, IrError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(expected_weights(graph)?
        .into_iter()
        .map(|(name, shape)| {
            let n: usize = shape.iter().product();
            let bound = if shape.len() > 1 {
                let fan_in: usize = shape[1..].iter().product();
                (6.0 / fan_in as f64).sqrt() as f32
            } else {
                0.1
            };
            let values = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
            WeightTensor {
                name,
                shape,
                values,
            }
        })
        .collect())
}

pub fn write_sdnw(tensors: &[WeightTensor]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(SDNW_MAGIC);
    out.extend_from_slice(&SDNW_VERSION.to_le_bytes());
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in tensors {
        let name = t.name.as_bytes();
        out.extend_from_slice(&(name.len() as u16).to_le_bytes());
        out.extend_from_slice(name);
        out.push(t.shape.len() as u8);
        for &d in &t.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        out.push(DTYPE_F32);
        for v in &t.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Little-endian cursor that reports the offset of any short read.
pub(crate) struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'a [u8], (usize, String)> {
        if self.remaining() < n {
            return Err((
                self.pos,
                format!("truncated: need {n} bytes, {} left", self.remaining()),
            ));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, (usize, String)> {
        Ok(self.bytes(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, (usize, String)> {
        Ok(u16::from_le_bytes(self.bytes(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32, (usize, String)> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, (usize, String)> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    pub fn f32(&mut self) -> Result<f32, (usize, String)> {
        Ok(f32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }
}

pub fn read_sdnw(data: &[u8]) -> Result<Vec<WeightTensor>, WeightError> {
    let fmt = |(offset, message): (usize, String)| WeightError::Format { offset, message };
    let mut r = Reader::new(data);
    if r.bytes(4).map_err(fmt)? != SDNW_MAGIC {
        return Err(fmt((0, "bad magic, expected SDNW".into())));
    }
    let at = r.offset();
    let version = r.u32().map_err(fmt)?;
    if version != SDNW_VERSION {
        return Err(fmt((at, format!("unsupported version {version}"))));
    }
    let count = r.u32().map_err(fmt)?;
    let mut tensors = Vec::new();
    for _ in 0..count {
        let len = r.u16().map_err(fmt)? as usize;
        let at = r.offset();
        let name = std::str::from_utf8(r.bytes(len).map_err(fmt)?)
            .map_err(|e| fmt((at, format!("name is not UTF-8: {e}"))))?
            .to_string();
        let rank = r.u8().map_err(fmt)? as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(r.u32().map_err(fmt)? as usize);
        }
        let at = r.offset();
        let dtype = r.u8().map_err(fmt)?;
        if dtype != DTYPE_F32 {
            return Err(fmt((at, format!("unsupported dtype code {dtype}"))));
        }
        let n = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&n| n.checked_mul(4).is_some_and(|b| b <= r.remaining()))
            .ok_or_else(|| fmt((r.offset(), format!("payload for shape {shape:?} exceeds file"))))?;
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(r.f32().map_err(fmt)?);
        }
        tensors.push(WeightTensor {
            name,
            shape,
            values,
        });
    }
    if r.remaining() != 0 {
        return Err(fmt((r.offset(), "trailing bytes after last tensor".into())));
    }
    Ok(tensors)
}
