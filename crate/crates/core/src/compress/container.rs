//! Sparse quantized tensors and the SDNC container.
//!
//! Each tensor becomes a list of entries `(gap, code)` where `gap` counts
//! the zeros skipped since the previous entry. Gaps longer than the
//! relative-index width allows are bridged with filler entries that store
//! a reserved code equal to the codebook length. Gaps and codes are
//! Huffman coded as two separate bit streams.
//!
//! Layout (little endian):
//!
//! ```text
//! "SDNC" | version u32 | count u32 | count × (len u32 | record | crc32 u32)
//! record = name_len u16 | name | rank u8 | dims u32×rank
//!        | rel_index_bits u8 | codebook_len u16 | codebook f32×len
//!        | entries u64 | gap stream | code stream
//! stream = symbols u32 | (symbol u16, length u8)×symbols | bits u64 | bytes
//! ```

use std::collections::BTreeMap;

use super::bits::{BitReader, BitWriter};
use super::huffman::CodeLengths;
use super::kmeans::Quantized;
use super::CompressError;
use crate::weights::{Reader, WeightTensor};

pub const SDNC_MAGIC: &[u8; 4] = b"SDNC";
pub const SDNC_VERSION: u32 = 1;
pub const DEFAULT_REL_INDEX_BITS: u8 = 4;
const MAX_CODEBOOK: usize = 256;
const MAX_ELEMENTS: u64 = u32::MAX as u64;

/// A pruned and quantized tensor: nonzero positions with codebook indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseQuantized {
    pub name: String,
    pub shape: Vec<usize>,
    pub codebook: Vec<f32>,
    /// `(flat position, codebook index)`, strictly increasing in position.
    pub entries: Vec<(usize, u16)>,
}

impl SparseQuantized {
    /// Pairs the nonzero entries of `pruned` with their assignments.
    pub fn from_parts(pruned: &WeightTensor, q: &Quantized) -> Result<Self, CompressError> {
        let positions: Vec<usize> = pruned
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        if positions.len() != q.assignments.len() {
            return Err(CompressError::Inconsistent {
                tensor: pruned.name.clone(),
                message: format!(
                    "{} nonzero entries but {} assignments",
                    positions.len(),
                    q.assignments.len()
                ),
            });
        }
        let sq = Self {
            name: pruned.name.clone(),
            shape: pruned.shape.clone(),
            codebook: q.codebook.clone(),
            entries: positions.into_iter().zip(q.assignments.iter().copied()).collect(),
        };
        sq.check()?;
        Ok(sq)
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_dense(&self) -> WeightTensor {
        let mut values = vec![0.0f32; self.len()];
        for &(pos, code) in &self.entries {
            values[pos] = self.codebook[code as usize];
        }
        WeightTensor {
            name: self.name.clone(),
            shape: self.shape.clone(),
            values,
        }
    }

    fn check(&self) -> Result<(), CompressError> {
        let fail = |message: String| CompressError::Inconsistent {
            tensor: self.name.clone(),
            message,
        };
        if self.name.len() > u16::MAX as usize || self.shape.len() > u8::MAX as usize {
            return Err(fail("name or rank too long".into()));
        }
        if self.shape.iter().any(|&d| d > u32::MAX as usize)
            || self.shape.iter().map(|&d| d as u64).product::<u64>() > MAX_ELEMENTS
        {
            return Err(fail("tensor too large".into()));
        }
        if self.codebook.len() > MAX_CODEBOOK {
            return Err(fail(format!("codebook has {} entries", self.codebook.len())));
        }
        if self.codebook.iter().any(|v| !v.is_finite() || *v == 0.0) {
            return Err(fail("codebook values must be finite and nonzero".into()));
        }
        let n = self.len();
        let mut prev: Option<usize> = None;
        for &(pos, code) in &self.entries {
            if pos >= n || prev.is_some_and(|p| p >= pos) {
                return Err(fail(format!("entry position {pos} out of order or range")));
            }
            if code as usize >= self.codebook.len() {
                return Err(fail(format!("code {code} outside codebook")));
            }
            prev = Some(pos);
        }
        Ok(())
    }
}

/// One Huffman-coded symbol stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    pub code: CodeLengths,
    pub bits: u64,
    pub bytes: Vec<u8>,
}

impl Stream {
    fn encode(symbols: &[u16]) -> Self {
        let code = CodeLengths::from_symbols(symbols.iter().copied());
        let enc = code.encoder();
        let mut w = BitWriter::new();
        for &s in symbols {
            enc.put(&mut w, s);
        }
        Self {
            code,
            bits: w.bit_len(),
            bytes: w.into_bytes(),
        }
    }

    /// Serialized size of the code table.
    pub fn table_bytes(&self) -> u64 {
        4 + 3 * self.code.0.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub rel_index_bits: u8,
    pub codebook: Vec<f32>,
    pub entries: u64,
    pub gaps: Stream,
    pub codes: Stream,
}

/// Size accounting for one encoded tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorStats {
    pub params: u64,
    pub nonzeros: u64,
    pub entries: u64,
    pub fillers: u64,
    /// Fixed width of one code: enough bits for the codebook, plus the
    /// filler code when fillers are present.
    pub index_bits: u8,
    /// Payload if every entry were stored as `rel_index_bits + index_bits`.
    pub fixed_payload_bits: u64,
    pub huffman_payload_bits: u64,
    pub record_bytes: u64,
}

fn ceil_log2(n: usize) -> u8 {
    let mut w = 1u8;
    while (1usize << w) < n {
        w += 1;
    }
    w
}

impl EncodedTensor {
    pub fn params(&self) -> u64 {
        self.shape.iter().map(|&d| d as u64).product()
    }

    /// Filler entries are those whose code is the reserved one.
    fn count_fillers(&self) -> u64 {
        let filler = self.codebook.len() as u16;
        let Ok(symbols) = self.decode_symbols() else {
            return 0;
        };
        symbols.iter().filter(|&&(_, c)| c == filler).count() as u64
    }

    pub fn stats(&self) -> TensorStats {
        let fillers = self.count_fillers();
        let alphabet = self.codebook.len() + usize::from(fillers > 0);
        let index_bits = ceil_log2(alphabet);
        TensorStats {
            params: self.params(),
            nonzeros: self.entries - fillers,
            entries: self.entries,
            fillers,
            index_bits,
            fixed_payload_bits: self.entries * (self.rel_index_bits as u64 + index_bits as u64),
            huffman_payload_bits: self.gaps.bits + self.codes.bits,
            record_bytes: 8 + self.record().len() as u64,
        }
    }

    fn decode_symbols(&self) -> Result<Vec<(u16, u16)>, String> {
        let mut gr = BitReader::new(&self.gaps.bytes, self.gaps.bits);
        let mut cr = BitReader::new(&self.codes.bytes, self.codes.bits);
        let gd = self.gaps.code.decoder();
        let cd = self.codes.code.decoder();
        let mut out = Vec::with_capacity(self.entries.min(MAX_ELEMENTS) as usize);
        for i in 0..self.entries {
            let g = gd.get(&mut gr).ok_or_else(|| format!("gap stream ends at entry {i}"))?;
            let c = cd.get(&mut cr).ok_or_else(|| format!("code stream ends at entry {i}"))?;
            out.push((g, c));
        }
        if gr.remaining() != 0 || cr.remaining() != 0 {
            return Err("streams hold bits past the last entry".into());
        }
        Ok(out)
    }

    /// Rebuilds the dense tensor.
    pub fn decode(&self) -> Result<WeightTensor, String> {
        let n = self.params() as usize;
        let filler = self.codebook.len() as u16;
        let max_gap = (1u32 << self.rel_index_bits) - 1;
        let mut values = vec![0.0f32; n];
        let mut next = 0usize;
        for (g, c) in self.decode_symbols()? {
            let pos = next + g as usize;
            if pos >= n {
                return Err(format!("entry position {pos} past tensor end {n}"));
            }
            if c == filler {
                if g as u32 != max_gap {
                    return Err(format!("filler at position {pos} with short gap {g}"));
                }
            } else if (c as usize) < self.codebook.len() {
                values[pos] = self.codebook[c as usize];
            } else {
                return Err(format!("code {c} outside codebook"));
            }
            next = pos + 1;
        }
        Ok(WeightTensor {
            name: self.name.clone(),
            shape: self.shape.clone(),
            values,
        })
    }

    fn record(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.name.len() as u16).to_le_bytes());
        out.extend_from_slice(self.name.as_bytes());
        out.push(self.shape.len() as u8);
        for &d in &self.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        out.push(self.rel_index_bits);
        out.extend_from_slice(&(self.codebook.len() as u16).to_le_bytes());
        for v in &self.codebook {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.entries.to_le_bytes());
        for s in [&self.gaps, &self.codes] {
            out.extend_from_slice(&(s.code.0.len() as u32).to_le_bytes());
            for &(sym, len) in &s.code.0 {
                out.extend_from_slice(&sym.to_le_bytes());
                out.push(len);
            }
            out.extend_from_slice(&s.bits.to_le_bytes());
            out.extend_from_slice(&s.bytes);
        }
        out
    }

    fn parse_record(body: &[u8], base: usize) -> Result<Self, CompressError> {
        let err = |(off, message): (usize, String)| CompressError::Format {
            offset: base + off,
            message,
        };
        let mut r = Reader::new(body);
        let fail = |r: &Reader, message: String| CompressError::Format {
            offset: base + r.offset(),
            message,
        };
        let name_len = r.u16().map_err(err)? as usize;
        let name = std::str::from_utf8(r.bytes(name_len).map_err(err)?)
            .map_err(|_| fail(&r, "tensor name is not UTF-8".into()))?
            .to_string();
        let rank = r.u8().map_err(err)? as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(r.u32().map_err(err)? as usize);
        }
        if shape.iter().map(|&d| d as u64).try_fold(1u64, |a, d| a.checked_mul(d)).is_none_or(|n| n > MAX_ELEMENTS) {
            return Err(fail(&r, "tensor too large".into()));
        }
        let rel_index_bits = r.u8().map_err(err)?;
        if !(1..=16).contains(&rel_index_bits) {
            return Err(fail(&r, format!("relative index width {rel_index_bits} out of range")));
        }
        let cb_len = r.u16().map_err(err)? as usize;
        if cb_len > MAX_CODEBOOK {
            return Err(fail(&r, format!("codebook length {cb_len} too large")));
        }
        let mut codebook = Vec::with_capacity(cb_len);
        for _ in 0..cb_len {
            let v = r.f32().map_err(err)?;
            if !v.is_finite() || v == 0.0 {
                return Err(fail(&r, "codebook values must be finite and nonzero".into()));
            }
            codebook.push(v);
        }
        let entries = r.u64().map_err(err)?;
        let mut streams = Vec::with_capacity(2);
        for alphabet in [1u32 << rel_index_bits, cb_len as u32 + 1] {
            let symbols = r.u32().map_err(err)?;
            if symbols > alphabet {
                return Err(fail(&r, format!("code table lists {symbols} symbols")));
            }
            let mut lens = Vec::with_capacity(symbols as usize);
            for _ in 0..symbols {
                let sym = r.u16().map_err(err)?;
                let len = r.u8().map_err(err)?;
                if sym as u32 >= alphabet {
                    return Err(fail(&r, format!("symbol {sym} outside alphabet")));
                }
                lens.push((sym, len));
            }
            let code = CodeLengths(lens);
            if !code.is_valid() {
                return Err(fail(&r, "invalid code table".into()));
            }
            let bits = r.u64().map_err(err)?;
            let byte_len = bits.div_ceil(8);
            if byte_len > r.remaining() as u64 {
                return Err(fail(&r, format!("stream of {bits} bits is truncated")));
            }
            let bytes = r.bytes(byte_len as usize).map_err(err)?.to_vec();
            streams.push(Stream { code, bits, bytes });
        }
        if r.remaining() != 0 {
            return Err(fail(&r, format!("{} unexpected bytes in record", r.remaining())));
        }
        let codes = streams.pop().unwrap();
        let gaps = streams.pop().unwrap();
        Ok(Self {
            name,
            shape,
            rel_index_bits,
            codebook,
            entries,
            gaps,
            codes,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompressedModel {
    pub tensors: Vec<EncodedTensor>,
}

/// Encodes tensors with `rel_index_bits` wide gaps (1..=16).
pub fn encode(tensors: &[SparseQuantized], rel_index_bits: u8) -> Result<CompressedModel, CompressError> {
    if !(1..=16).contains(&rel_index_bits) {
        return Err(CompressError::RelIndexBits(rel_index_bits));
    }
    let max_gap = (1usize << rel_index_bits) - 1;
    let mut out = Vec::with_capacity(tensors.len());
    for t in tensors {
        t.check()?;
        let filler = t.codebook.len() as u16;
        let mut gaps = Vec::with_capacity(t.entries.len());
        let mut codes = Vec::with_capacity(t.entries.len());
        let mut next = 0usize;
        for &(pos, code) in &t.entries {
            let mut gap = pos - next;
            while gap > max_gap {
                gaps.push(max_gap as u16);
                codes.push(filler);
                gap -= max_gap + 1;
            }
            gaps.push(gap as u16);
            codes.push(code);
            next = pos + 1;
        }
        out.push(EncodedTensor {
            name: t.name.clone(),
            shape: t.shape.clone(),
            rel_index_bits,
            codebook: t.codebook.clone(),
            entries: gaps.len() as u64,
            gaps: Stream::encode(&gaps),
            codes: Stream::encode(&codes),
        });
    }
    Ok(CompressedModel { tensors: out })
}

impl CompressedModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(SDNC_MAGIC);
        out.extend_from_slice(&SDNC_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for t in &self.tensors {
            let body = t.record();
            out.extend_from_slice(&(body.len() as u32).to_le_bytes());
            out.extend_from_slice(&body);
            out.extend_from_slice(&crc32fast::hash(&body).to_le_bytes());
        }
        out
    }

    /// Container size in bytes.
    pub fn byte_len(&self) -> u64 {
        12 + self.tensors.iter().map(|t| 8 + t.record().len() as u64).sum::<u64>()
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, CompressError> {
        let err = |(offset, message): (usize, String)| CompressError::Format { offset, message };
        let mut r = Reader::new(data);
        if r.bytes(4).map_err(err)? != SDNC_MAGIC {
            return Err(CompressError::Format {
                offset: 0,
                message: "bad magic, expected SDNC".into(),
            });
        }
        let version = r.u32().map_err(err)?;
        if version != SDNC_VERSION {
            return Err(CompressError::Format {
                offset: 4,
                message: format!("unsupported version {version}"),
            });
        }
        let count = r.u32().map_err(err)?;
        let mut tensors = Vec::new();
        for _ in 0..count {
            let len = r.u32().map_err(err)? as usize;
            let start = r.offset();
            let body = r.bytes(len).map_err(err)?;
            let crc = r.u32().map_err(err)?;
            if crc32fast::hash(body) != crc {
                return Err(CompressError::Format {
                    offset: start,
                    message: "record checksum mismatch".into(),
                });
            }
            tensors.push(EncodedTensor::parse_record(body, start)?);
        }
        if r.remaining() != 0 {
            return Err(CompressError::Format {
                offset: r.offset(),
                message: format!("{} trailing bytes", r.remaining()),
            });
        }
        Ok(Self { tensors })
    }

    /// Dense tensors in container order.
    pub fn decode(&self) -> Result<Vec<WeightTensor>, CompressError> {
        self.tensors
            .iter()
            .map(|t| {
                t.decode().map_err(|message| CompressError::Inconsistent {
                    tensor: t.name.clone(),
                    message,
                })
            })
            .collect()
    }

    /// Symbol frequencies of every gap stream, merged.
    pub fn gap_histogram(&self) -> BTreeMap<u16, u64> {
        let mut h = BTreeMap::new();
        for t in &self.tensors {
            if let Ok(symbols) = t.decode_symbols() {
                for (g, _) in symbols {
                    *h.entry(g).or_insert(0) += 1;
                }
            }
        }
        h
    }
}

/// Parses and decodes a container in one step.
pub fn decode(data: &[u8]) -> Result<Vec<WeightTensor>, CompressError> {
    CompressedModel::from_bytes(data)?.decode()
}
