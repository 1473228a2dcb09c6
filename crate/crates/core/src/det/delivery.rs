use itertools::Itertools;
use rayon::prelude::*;

use super::placement::{DetPlacement, PieceKey};
use super::subpacket::{members, position, set_of, xor_into, NodeSet};
use crate::error::Result;
use crate::model::{Demand, SystemParams};
use crate::rational::{int, Rational};

/// Constituent `(S \ {receiver}, j)` of a coded payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label {
    pub receiver: usize,
    pub file: usize,
    pub packet: usize,
    pub set: NodeSet,
    pub j: usize,
}

/// XOR of `t` subpackets multicast by `sender` to the group `group`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedTransmission {
    pub round: usize,
    pub layer: usize,
    pub sender: usize,
    pub group: NodeSet,
    pub labels: Vec<Label>,
    pub payload: Vec<u8>,
    /// Exact information bits, excluding byte padding.
    pub bits: Rational,
}

impl CodedTransmission {
    pub fn group_members(&self) -> Vec<usize> {
        members(self.group)
    }

    pub fn receivers(&self) -> Vec<usize> {
        members(self.group & !(1 << self.sender))
    }
}

/// Labels sent by `sender` in group `group`: for each receiver `v`, piece
/// `(S \ {v}, i)` where `i` is the position of `sender` in `S \ {v}`.
pub fn canonical_labels(group: NodeSet, sender: usize, demand: &Demand, round: usize) -> Vec<Label> {
    members(group & !(1 << sender))
        .into_iter()
        .map(|v| {
            let set = group & !(1 << v);
            Label {
                receiver: v,
                file: demand.files[v],
                packet: demand.packet(v, round),
                set,
                j: position(set, sender),
            }
        })
        .collect()
}

fn deliver_round(params: &SystemParams, placement: &DetPlacement, demand: &Demand, round: usize) -> Vec<CodedTransmission> {
    let n = params.n();
    let mut out = Vec::new();
    for (li, layer) in placement.layers.iter().enumerate() {
        if layer.t + 1 > n {
            continue;
        }
        let bytes = layer.piece_bytes(n);
        let bits = layer.piece_bits(n);
        for group in (0..n).combinations(layer.t + 1) {
            let group = set_of(&group);
            for sender in members(group) {
                let labels = canonical_labels(group, sender, demand, round);
                let cache = placement.cache(sender);
                let mut payload = vec![0u8; bytes];
                for l in &labels {
                    let key = PieceKey {
                        file: l.file,
                        packet: l.packet,
                        layer: li,
                        set: l.set,
                        j: l.j,
                    };
                    let piece = cache.get(&key).expect("sender caches every piece it encodes");
                    xor_into(&mut payload, piece);
                }
                out.push(CodedTransmission {
                    round,
                    layer: li,
                    sender,
                    group,
                    labels,
                    payload,
                    bits,
                });
            }
        }
    }
    out
}

/// All coded transmissions for `demand`, ordered by (round, layer, group, sender).
pub fn deliver_det(params: &SystemParams, placement: &DetPlacement, demand: &Demand) -> Result<Vec<CodedTransmission>> {
    demand.validate(params)?;
    let rounds: Vec<Vec<CodedTransmission>> = (0..params.segment_len())
        .into_par_iter()
        .map(|k| deliver_round(params, placement, demand, k))
        .collect();
    Ok(rounds.into_iter().flatten().collect())
}

/// Total transmitted bits over `F L'`.
pub fn rate_det_measured(transmissions: &[CodedTransmission], params: &SystemParams) -> Rational {
    let total: Rational = transmissions.iter().map(|t| t.bits).sum();
    total / int(params.packet_bits() as i128 * params.segment_len() as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::placement::place_layers;
    use crate::det::sharing::layers_for;
    use crate::model::gen_library;
    use crate::rational::rat;

    fn deliver(n: usize, m: usize, cache: Rational, files: Vec<usize>) -> (SystemParams, Vec<CodedTransmission>) {
        let p = SystemParams::builder(n, m, cache).build().unwrap();
        let lib = gen_library(&p, 11);
        let pl = place_layers(&p, &lib, layers_for(&p)).unwrap();
        let tx = deliver_det(&p, &pl, &Demand::aligned(files)).unwrap();
        (p, tx)
    }

    #[test]
    fn three_users() {
        let (p, tx) = deliver(3, 3, int(2), vec![0, 1, 2]);
        assert_eq!(tx.len(), 3);
        assert!(tx.iter().all(|t| t.bits == int(8) && t.payload.len() == 1));
        // node 0 combines a piece of file 1 (for node 1) with one of file 2 (for node 2)
        let files: Vec<usize> = tx[0].labels.iter().map(|l| l.file).collect();
        assert_eq!((tx[0].sender, files), (0, vec![1, 2]));
        assert_eq!(rate_det_measured(&tx, &p), rat(1, 2));
    }

    #[test]
    fn two_users_unicast() {
        let (p, tx) = deliver(2, 2, int(1), vec![0, 1]);
        assert_eq!(tx.len(), 2);
        assert!(tx.iter().all(|t| t.bits == int(24) && t.labels.len() == 1));
        assert_eq!(rate_det_measured(&tx, &p), int(1));
    }

    #[test]
    fn four_users_t2() {
        let (p, tx) = deliver(4, 4, int(2), vec![0, 1, 2, 3]);
        assert_eq!(tx.len(), 12);
        assert!(tx.iter().all(|t| t.bits == int(4)));
        assert_eq!(rate_det_measured(&tx, &p), int(1));
    }

    #[test]
    fn full_cache_sends_nothing() {
        let (p, tx) = deliver(3, 2, int(2), vec![0, 1, 1]);
        assert!(tx.is_empty());
        assert_eq!(rate_det_measured(&tx, &p), int(0));
    }

    #[test]
    fn senders_cover_disjoint_labels() {
        let (_, tx) = deliver(5, 5, int(3), vec![0, 1, 2, 3, 4]);
        for group in tx.iter().map(|t| t.group).unique() {
            let mut seen = std::collections::HashSet::new();
            for t in tx.iter().filter(|t| t.group == group) {
                for l in &t.labels {
                    assert!(seen.insert((l.receiver, l.set, l.j)));
                }
            }
        }
    }
}
