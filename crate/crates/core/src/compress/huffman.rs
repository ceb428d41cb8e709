//! Canonical Huffman codes over `u16` symbols.
//!
//! A code is fully described by each used symbol's length; codes are then
//! assigned in (length, symbol) order. Lengths are capped at
//! [`MAX_CODE_LEN`] by repeatedly halving frequencies, and a fixed-width
//! code replaces the Huffman code whenever it would be shorter in total.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::bits::{BitReader, BitWriter};

pub const MAX_CODE_LEN: u8 = 24;

/// Symbol lengths, sorted by symbol.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CodeLengths(pub Vec<(u16, u8)>);

/// Huffman code lengths for the given symbol frequencies (zero counts are
/// ignored). A lone symbol gets a 1-bit code.
fn huffman_lengths(freqs: &BTreeMap<u16, u64>) -> Vec<(u16, u8)> {
    let symbols: Vec<(u16, u64)> = freqs
        .iter()
        .filter(|(_, &f)| f > 0)
        .map(|(&s, &f)| (s, f))
        .collect();
    match symbols.len() {
        0 => return Vec::new(),
        1 => return vec![(symbols[0].0, 1)],
        _ => {}
    }
    let mut weights: Vec<u64> = symbols.iter().map(|s| s.1).collect();
    loop {
        // Node ids: leaves 0..n, internal nodes after. Ties broken by id.
        let n = weights.len();
        let mut parent = vec![usize::MAX; 2 * n - 1];
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
            weights.iter().enumerate().map(|(i, &w)| Reverse((w, i))).collect();
        let mut next = n;
        while heap.len() > 1 {
            let Reverse((wa, a)) = heap.pop().unwrap();
            let Reverse((wb, b)) = heap.pop().unwrap();
            parent[a] = next;
            parent[b] = next;
            heap.push(Reverse((wa + wb, next)));
            next += 1;
        }
        let root = next - 1;
        let mut depth = vec![0u32; 2 * n - 1];
        for node in (0..root).rev() {
            depth[node] = depth[parent[node]] + 1;
        }
        if depth[..n].iter().all(|&d| d <= MAX_CODE_LEN as u32) {
            return symbols
                .iter()
                .zip(&depth[..n])
                .map(|(s, &d)| (s.0, d as u8))
                .collect();
        }
        for w in &mut weights {
            *w = (*w).div_ceil(2);
        }
    }
}

fn fixed_width(used: usize) -> u8 {
    let mut w = 1u8;
    while (1usize << w) < used {
        w += 1;
    }
    w
}

impl CodeLengths {
    /// Shortest-total code for `freqs`, never longer than a fixed-width
    /// code over the used symbols.
    pub fn for_frequencies(freqs: &BTreeMap<u16, u64>) -> Self {
        let huff = huffman_lengths(freqs);
        let w = fixed_width(huff.len());
        let cost = |lens: &[(u16, u8)]| -> u64 {
            lens.iter().map(|&(s, l)| freqs[&s] * l as u64).sum()
        };
        let fixed: Vec<(u16, u8)> = huff.iter().map(|&(s, _)| (s, w)).collect();
        if cost(&huff) <= cost(&fixed) {
            Self(huff)
        } else {
            Self(fixed)
        }
    }

    pub fn from_symbols<I: IntoIterator<Item = u16>>(symbols: I) -> Self {
        let mut freqs = BTreeMap::new();
        for s in symbols {
            *freqs.entry(s).or_insert(0u64) += 1;
        }
        Self::for_frequencies(&freqs)
    }

    /// Bits needed by a fixed-width code over the same used symbols.
    pub fn fixed_width(&self) -> u8 {
        fixed_width(self.0.len())
    }

    /// (symbol, code, length) in canonical order.
    fn canonical(&self) -> Vec<(u16, u32, u8)> {
        let mut sorted: Vec<(u16, u8)> = self.0.clone();
        sorted.sort_by_key(|&(s, l)| (l, s));
        let mut out = Vec::with_capacity(sorted.len());
        let mut code = 0u32;
        let mut prev_len = 0u8;
        for (s, l) in sorted {
            code <<= l - prev_len;
            out.push((s, code, l));
            code += 1;
            prev_len = l;
        }
        out
    }

    /// Checks lengths are in range, symbols unique and the Kraft sum ≤ 1.
    pub fn is_valid(&self) -> bool {
        let mut kraft = 0u64;
        let mut prev: Option<u16> = None;
        for &(s, l) in &self.0 {
            if l == 0 || l > MAX_CODE_LEN || prev.is_some_and(|p| p >= s) {
                return false;
            }
            prev = Some(s);
            kraft += 1u64 << (MAX_CODE_LEN - l);
        }
        kraft <= 1u64 << MAX_CODE_LEN
    }

    pub fn encoder(&self) -> Encoder {
        let table = self
            .canonical()
            .into_iter()
            .map(|(s, c, l)| (s, (c, l)))
            .collect();
        Encoder { table }
    }

    pub fn decoder(&self) -> Decoder {
        let canonical = self.canonical();
        let mut counts = vec![0u32; MAX_CODE_LEN as usize + 1];
        for &(_, _, l) in &canonical {
            counts[l as usize] += 1;
        }
        Decoder {
            counts,
            symbols: canonical.into_iter().map(|(s, _, _)| s).collect(),
        }
    }
}

pub struct Encoder {
    table: BTreeMap<u16, (u32, u8)>,
}

impl Encoder {
    /// Writes `symbol`; returns false if it has no code.
    pub fn put(&self, out: &mut BitWriter, symbol: u16) -> bool {
        match self.table.get(&symbol) {
            Some(&(code, len)) => {
                out.write(code, len);
                true
            }
            None => false,
        }
    }
}

pub struct Decoder {
    counts: Vec<u32>,
    symbols: Vec<u16>,
}

impl Decoder {
    /// Reads one symbol; `None` on exhausted input or an unassigned code.
    pub fn get(&self, input: &mut BitReader<'_>) -> Option<u16> {
        let (mut code, mut first, mut index) = (0u32, 0u32, 0u32);
        for len in 1..=MAX_CODE_LEN as usize {
            code |= input.read_bit()?;
            let count = self.counts[len];
            if code.wrapping_sub(first) < count {
                return Some(self.symbols[(index + code - first) as usize]);
            }
            index += count;
            first = (first + count) << 1;
            code <<= 1;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(symbols: &[u16]) -> (CodeLengths, u64) {
        let code = CodeLengths::from_symbols(symbols.iter().copied());
        assert!(code.is_valid(), "{code:?}");
        let enc = code.encoder();
        let mut w = BitWriter::new();
        for &s in symbols {
            assert!(enc.put(&mut w, s));
        }
        let bits = w.bit_len();
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes, bits);
        let dec = code.decoder();
        let back: Vec<u16> = (0..symbols.len()).map(|_| dec.get(&mut r).unwrap()).collect();
        assert_eq!(back, symbols);
        assert_eq!(r.remaining(), 0);
        (code, bits)
    }

    #[test]
    fn skewed_beats_fixed_width() {
        let mut symbols = vec![0u16; 90];
        symbols.extend([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        let (code, bits) = round_trip(&symbols);
        assert!(bits < symbols.len() as u64 * code.fixed_width() as u64);
        assert_eq!(code.0[0], (0, 1));
    }

    #[test]
    fn uniform_matches_fixed_width() {
        let symbols: Vec<u16> = (0..16).cycle().take(1600).collect();
        let (code, bits) = round_trip(&symbols);
        assert_eq!(bits, 1600 * 4);
        assert_eq!(code.fixed_width(), 4);
    }

    #[test]
    fn single_symbol_and_empty() {
        let (code, bits) = round_trip(&[7, 7, 7]);
        assert_eq!(code.0, vec![(7, 1)]);
        assert_eq!(bits, 3);
        let (code, bits) = round_trip(&[]);
        assert!(code.0.is_empty());
        assert_eq!(bits, 0);
    }

    #[test]
    fn length_limit_holds_for_fibonacci_frequencies() {
        let mut freqs = BTreeMap::new();
        let (mut a, mut b) = (1u64, 1u64);
        for s in 0..40u16 {
            freqs.insert(s, a);
            (a, b) = (b, a + b);
        }
        let code = CodeLengths::for_frequencies(&freqs);
        assert!(code.is_valid());
        assert!(code.0.iter().all(|&(_, l)| l <= MAX_CODE_LEN));
    }

    #[test]
    fn invalid_code_is_detected() {
        // Lengths {1, 1} use up the whole code space; {2} leaves holes.
        let code = CodeLengths(vec![(0, 2)]);
        let dec = code.decoder();
        let bytes = [0b1100_0000u8];
        let mut r = BitReader::new(&bytes, 8);
        assert_eq!(dec.get(&mut r), None);
        assert!(!CodeLengths(vec![(0, 1), (1, 1), (2, 1)]).is_valid());
    }
}
