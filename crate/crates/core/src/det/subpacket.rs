use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{binomial, int, Rational};

/// Largest subpacketization `t C(n,t)` accepted per layer.
pub const MAX_PIECES: u128 = 1 << 20;

/// Subset of nodes as a bitmask (`n <= 64`).
pub type NodeSet = u64;

pub fn set_of(nodes: &[usize]) -> NodeSet {
    nodes.iter().fold(0, |acc, &u| acc | 1 << u)
}

pub fn members(set: NodeSet) -> Vec<usize> {
    (0..64).filter(|&u| set >> u & 1 == 1).collect()
}

/// Position of `node` among the members of `set`, ascending.
pub fn position(set: NodeSet, node: usize) -> usize {
    (set & ((1u64 << node) - 1)).count_ones() as usize
}

/// Lexicographic enumeration of the `t`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct SubsetIndex {
    sets: Vec<NodeSet>,
    rank: HashMap<NodeSet, usize>,
}

impl SubsetIndex {
    pub fn new(n: usize, t: usize) -> Self {
        let sets: Vec<NodeSet> = (0..n).combinations(t).map(|c| set_of(&c)).collect();
        let rank = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        SubsetIndex { sets, rank }
    }

    pub fn sets(&self) -> &[NodeSet] {
        &self.sets
    }

    pub fn rank(&self, set: NodeSet) -> usize {
        self.rank[&set]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// One integer-`t` instance of the scheme acting on the bit range
/// `[offset, offset + len)` of every packet.
///
/// `nominal` is the exact (possibly fractional) bit share used for rate and
/// cache accounting; `len` is its byte-aligned realisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub t: usize,
    pub offset: u64,
    pub len: u64,
    #[serde(skip)]
    pub nominal: Rational,
}

impl Layer {
    pub fn full(t: usize, packet_bits: u64) -> Self {
        Layer {
            t,
            offset: 0,
            len: packet_bits,
            nominal: int(packet_bits as i128),
        }
    }

    /// `t C(n,t)`.
    pub fn pieces(&self, n: usize) -> usize {
        self.t * binomial(n as u64, self.t as u64) as usize
    }

    /// Bit range of piece `i` within the packet.
    pub fn piece_range(&self, n: usize, i: usize) -> (u64, u64) {
        let s = self.pieces(n) as u128;
        let lo = (i as u128 * self.len as u128 / s) as u64;
        let hi = ((i as u128 + 1) * self.len as u128 / s) as u64;
        (self.offset + lo, hi - lo)
    }

    /// Byte length of every piece buffer: `ceil(len / (t C(n,t)) / 8)`.
    pub fn piece_bytes(&self, n: usize) -> usize {
        (self.len as u128).div_ceil(8 * self.pieces(n) as u128) as usize
    }

    /// Exact bits carried by one piece.
    pub fn piece_bits(&self, n: usize) -> Rational {
        self.nominal / int(self.pieces(n) as i128)
    }

    /// Index of piece `(T, j)` in the packet.
    pub fn piece_index(&self, index: &SubsetIndex, set: NodeSet, j: usize) -> usize {
        index.rank(set) * self.t + j
    }
}

pub fn check_subpacketization(n: usize, t: usize) -> Result<()> {
    if n > 64 {
        return Err(Error::InvalidParams(format!(
            "deterministic scheme supports n <= 64, got {n}"
        )));
    }
    let pieces = t as u128 * binomial(n as u64, t as u64);
    if pieces > MAX_PIECES {
        return Err(Error::InvalidParams(format!(
            "subpacketization t C(n,t) = {pieces} exceeds {MAX_PIECES}"
        )));
    }
    Ok(())
}

/// Copies `len` bits starting at bit `start` (MSB first) into a zero-padded
/// buffer of `out_bytes` bytes.
pub fn extract_bits(src: &[u8], start: u64, len: u64, out_bytes: usize) -> Vec<u8> {
    let mut out = vec![0u8; out_bytes];
    if start.is_multiple_of(8) && len.is_multiple_of(8) {
        let s = (start / 8) as usize;
        out[..(len / 8) as usize].copy_from_slice(&src[s..s + (len / 8) as usize]);
        return out;
    }
    for i in 0..len {
        let b = start + i;
        if src[(b / 8) as usize] >> (7 - b % 8) & 1 == 1 {
            out[(i / 8) as usize] |= 1 << (7 - i % 8);
        }
    }
    out
}

/// Writes the first `len` bits of `bits` into `dst` at bit `start`.
pub fn insert_bits(dst: &mut [u8], start: u64, len: u64, bits: &[u8]) {
    if start.is_multiple_of(8) && len.is_multiple_of(8) {
        let s = (start / 8) as usize;
        dst[s..s + (len / 8) as usize].copy_from_slice(&bits[..(len / 8) as usize]);
        return;
    }
    for i in 0..len {
        let b = start + i;
        let mask = 1 << (7 - b % 8);
        if bits[(i / 8) as usize] >> (7 - i % 8) & 1 == 1 {
            dst[(b / 8) as usize] |= mask;
        } else {
            dst[(b / 8) as usize] &= !mask;
        }
    }
}

pub fn xor_into(dst: &mut [u8], src: &[u8]) {
    dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subset_ranks_are_lexicographic() {
        let idx = SubsetIndex::new(4, 2);
        assert_eq!(idx.len(), 6);
        assert_eq!(members(idx.sets()[0]), vec![0, 1]);
        assert_eq!(members(idx.sets()[5]), vec![2, 3]);
        assert_eq!(idx.rank(set_of(&[1, 3])), 4);
    }

    #[test]
    fn positions() {
        let s = set_of(&[1, 4, 6]);
        assert_eq!(position(s, 1), 0);
        assert_eq!(position(s, 4), 1);
        assert_eq!(position(s, 6), 2);
    }

    #[test]
    fn pieces_cover_the_layer() {
        let layer = Layer::full(2, 48);
        assert_eq!(layer.pieces(3), 6);
        assert_eq!(layer.piece_bytes(3), 1);
        let mut next = 0;
        for i in 0..6 {
            let (start, len) = layer.piece_range(3, i);
            assert_eq!(start, next);
            assert_eq!(len, 8);
            next += len;
        }
        assert_eq!(next, 48);
    }

    #[test]
    fn subpacketization_limits() {
        assert!(check_subpacketization(65, 1).is_err());
        assert!(check_subpacketization(40, 20).is_err());
        assert!(check_subpacketization(10, 5).is_ok());
    }

    proptest! {
        #[test]
        fn split_then_join_is_identity(bytes in proptest::collection::vec(any::<u8>(), 1..20), n in 2usize..6, t_off in 0usize..5) {
            let t = 1 + t_off % (n - 1);
            let bits = bytes.len() as u64 * 8;
            let layer = Layer::full(t, bits);
            let mut rebuilt = vec![0xAAu8; bytes.len()];
            let mut total = 0;
            for i in 0..layer.pieces(n) {
                let (start, len) = layer.piece_range(n, i);
                total += len;
                let piece = extract_bits(&bytes, start, len, layer.piece_bytes(n));
                prop_assert!(len <= 8 * layer.piece_bytes(n) as u64);
                insert_bits(&mut rebuilt, start, len, &piece);
            }
            prop_assert_eq!(total, bits);
            prop_assert_eq!(rebuilt, bytes);
        }
    }
}
