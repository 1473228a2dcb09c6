use std::collections::BTreeMap;

use crate::model::SystemParams;
use crate::rational::{int, Rational};

/// Cache budget `M F L` in bits.
pub fn budget_bits(params: &SystemParams) -> Rational {
    params.cache_size() * int(params.packet_bits() as i128) * int(params.packets() as i128)
}

/// Per-node store keyed by a scheme-specific index, with nominal bit accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheContent<K: Ord> {
    node: usize,
    entries: BTreeMap<K, Vec<u8>>,
    bits: Rational,
}

impl<K: Ord> CacheContent<K> {
    pub fn new(node: usize) -> Self {
        CacheContent {
            node,
            entries: BTreeMap::new(),
            bits: int(0),
        }
    }

    pub fn node(&self) -> usize {
        self.node
    }

    /// Stores `bytes` under `key`, counting `bits` toward the budget.
    pub fn insert(&mut self, key: K, bytes: Vec<u8>, bits: Rational) {
        if self.entries.insert(key, bytes).is_none() {
            self.bits += bits;
        }
    }

    pub fn get(&self, key: &K) -> Option<&[u8]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn contains(&self, key: &K) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    pub fn stored_bits(&self) -> Rational {
        self.bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn counts_each_key_once() {
        let mut c = CacheContent::new(2);
        c.insert((0, 1), vec![1, 2], rat(8, 3));
        c.insert((0, 1), vec![1, 2], rat(8, 3));
        c.insert((0, 2), vec![3], rat(8, 3));
        assert_eq!(c.len(), 2);
        assert_eq!(c.stored_bits(), rat(16, 3));
        assert_eq!(c.get(&(0, 2)), Some(&[3u8][..]));
        assert_eq!(c.node(), 2);
    }

    #[test]
    fn budget() {
        let p = SystemParams::builder(2, 3, int(2)).packets(4).packet_bits(48).build().unwrap();
        assert_eq!(budget_bits(&p), int(2 * 48 * 4));
    }
}
