use std::collections::HashMap;

use itertools::Itertools;

use super::placement::{RandomPlacement, SymbolKey};
use crate::det::{members, position, set_of};
use crate::error::Result;
use crate::gf::Symbol;
use crate::model::{Demand, SystemParams};
use crate::rational::{int, Rational};

/// Symbols of one receiver carried inside a coded payload, in payload order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartLabel {
    pub receiver: usize,
    pub file: usize,
    pub packet: usize,
    /// Index of the part within the receiver's sequence.
    pub part: usize,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandTransmission {
    pub round: usize,
    pub group: u64,
    pub sender: usize,
    pub labels: Vec<PartLabel>,
    pub payload: Vec<Symbol>,
    pub bits: Rational,
}

/// Symbol indices grouped by the exact set of nodes caching them.
pub fn exclusivity_classes(placement: &RandomPlacement) -> HashMap<u64, Vec<usize>> {
    let mut classes: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, &h) in placement.holders.iter().enumerate() {
        if h != 0 {
            classes.entry(h).or_default().push(i);
        }
    }
    classes
}

/// `J_{f_u, U \ {u}}`: symbols cached by exactly the nodes of `U \ {u}`.
pub fn exclusive_set(classes: &HashMap<u64, Vec<usize>>, group: u64, user: usize) -> &[usize] {
    classes
        .get(&(group & !(1 << user)))
        .map(Vec::as_slice)
        .unwrap_or(&[])
}

/// Algorithm 2. Sender `v` transmits, XORed over receivers `u`, part
/// `position(v, U \ {u})` of each sequence `J_u`, where parts have
/// `ceil(Jmax / (b - 1))` symbols. Padding symbols past the end of every
/// real part are not transmitted.
pub fn deliver_random(params: &SystemParams, placement: &RandomPlacement, demand: &Demand) -> Result<Vec<RandTransmission>> {
    demand.validate(params)?;
    let n = params.n();
    let classes = exclusivity_classes(placement);
    let field = placement.code.field();
    let width = placement.layout.width;
    let mut out = Vec::new();
    for round in 0..params.segment_len() {
        for b in (2..=n).rev() {
            for group in (0..n).combinations(b) {
                let group = set_of(&group);
                let users = members(group);
                let j_max = users
                    .iter()
                    .map(|&u| exclusive_set(&classes, group, u).len())
                    .max()
                    .unwrap_or(0);
                if j_max == 0 {
                    continue;
                }
                let part_len = j_max.div_ceil(b - 1);
                for &v in &users {
                    let mut labels = Vec::with_capacity(b - 1);
                    for &u in users.iter().filter(|&&u| u != v) {
                        let j = exclusive_set(&classes, group, u);
                        let part = position(group & !(1 << u), v);
                        let lo = (part * part_len).min(j.len());
                        let hi = ((part + 1) * part_len).min(j.len());
                        labels.push(PartLabel {
                            receiver: u,
                            file: demand.files[u],
                            packet: demand.packet(u, round),
                            part,
                            indices: j[lo..hi].to_vec(),
                        });
                    }
                    let len = labels.iter().map(|l| l.indices.len()).max().unwrap_or(0);
                    if len == 0 {
                        continue;
                    }
                    let mut payload = vec![vec![0u16; width]; len];
                    for l in &labels {
                        for (slot, &index) in payload.iter_mut().zip(&l.indices) {
                            let key = SymbolKey {
                                file: l.file,
                                packet: l.packet,
                                index,
                            };
                            let s = placement
                                .cached_symbol(v, &key)
                                .expect("sender caches every symbol of the exclusive class");
                            field.mul_add_slice(slot, &s, 1);
                        }
                    }
                    out.push(RandTransmission {
                        round,
                        group,
                        sender: v,
                        labels,
                        payload,
                        bits: placement.symbol_bits * int(len as i128),
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn rate_random_measured(transmissions: &[RandTransmission], params: &SystemParams) -> Rational {
    let total: Rational = transmissions.iter().map(|t| t.bits).sum();
    total / int(params.packet_bits() as i128 * params.segment_len() as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decentral::placement::place_random;
    use crate::model::gen_library;
    use std::collections::BTreeSet;

    fn setup(n: usize, m: usize, cache: i128, k: usize, rho: f64, seed: u64) -> (SystemParams, RandomPlacement) {
        let p = SystemParams::builder(n, m, int(cache)).packet_bits(k as u64 * 16).build().unwrap();
        let lib = gen_library(&p, seed);
        let pl = place_random(&p, &lib, k, rho, seed).unwrap();
        (p, pl)
    }

    #[test]
    fn classes_partition_missing_symbols() {
        for seed in 0..5 {
            let (p, pl) = setup(4, 4, 2, 40, 0.7, seed);
            let classes = exclusivity_classes(&pl);
            for u in 0..p.n() {
                let mut seen = BTreeSet::new();
                for b in 2..=p.n() {
                    for g in (0..p.n()).combinations(b) {
                        let g = set_of(&g);
                        if g >> u & 1 == 0 {
                            continue;
                        }
                        for &i in exclusive_set(&classes, g, u) {
                            assert!(seen.insert(i), "index {i} in two classes");
                        }
                    }
                }
                let expected: BTreeSet<usize> = (0..pl.nsym())
                    .filter(|&i| pl.holders[i] != 0 && pl.holders[i] >> u & 1 == 0)
                    .collect();
                assert_eq!(seen, expected);
            }
        }
    }

    #[test]
    fn three_users_halves_and_unicasts() {
        let (p, pl) = setup(3, 3, 2, 60, 0.8, 3);
        let tx = deliver_random(&p, &pl, &Demand::aligned(vec![0, 1, 2])).unwrap();
        let full = set_of(&[0, 1, 2]);
        let from0: Vec<_> = tx.iter().filter(|t| t.group == full && t.sender == 0).collect();
        assert_eq!(from0.len(), 1);
        let receivers: Vec<usize> = from0[0].labels.iter().map(|l| l.receiver).collect();
        assert_eq!(receivers, vec![1, 2]);
        // node 0 is first in {0,2} and in {0,1}
        assert!(from0[0].labels.iter().all(|l| l.part == 0));
        for t in tx.iter().filter(|t| t.group.count_ones() == 2) {
            assert_eq!(t.labels.len(), 1);
            assert_eq!(t.labels[0].part, 0);
        }
    }

    #[test]
    fn full_cache_sends_nothing() {
        let (p, pl) = setup(3, 3, 3, 12, 1.0, 1);
        let tx = deliver_random(&p, &pl, &Demand::aligned(vec![0, 1, 2])).unwrap();
        assert!(tx.is_empty());
        assert_eq!(rate_random_measured(&tx, &p), int(0));
    }
}
