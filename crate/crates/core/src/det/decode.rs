use std::collections::HashMap;

use super::delivery::CodedTransmission;
use super::placement::{DetPlacement, PieceKey};
use super::subpacket::{insert_bits, members, xor_into, NodeSet};
use crate::error::{Error, Result};
use crate::model::{Demand, SystemParams};

/// Reassembles the `L'` requested packets of `node` from its cache and the
/// transmissions it overheard.
pub fn decode_det(
    params: &SystemParams,
    placement: &DetPlacement,
    node: usize,
    received: &[CodedTransmission],
    demand: &Demand,
) -> Result<Vec<Vec<u8>>> {
    let n = params.n();
    let cache = placement.cache(node);
    let heard: HashMap<(usize, usize, NodeSet, usize), &CodedTransmission> = received
        .iter()
        .filter(|t| t.group >> node & 1 == 1 && t.sender != node)
        .map(|t| ((t.round, t.layer, t.group, t.sender), t))
        .collect();
    let file = demand.files[node];
    let mut out = Vec::with_capacity(params.segment_len());
    for round in 0..params.segment_len() {
        let packet = demand.packet(node, round);
        let mut buf = vec![0u8; params.packet_bytes()];
        for (li, (layer, index)) in placement.layers.iter().zip(&placement.indices).enumerate() {
            let bytes = layer.piece_bytes(n);
            for &set in index.sets() {
                for j in 0..layer.t {
                    let key = PieceKey {
                        file,
                        packet,
                        layer: li,
                        set,
                        j,
                    };
                    let piece = match cache.get(&key) {
                        Some(p) => p.to_vec(),
                        None => {
                            let group = set | 1 << node;
                            let sender = members(set)[j];
                            let missing = || Error::MissingTransmission {
                                node,
                                round,
                                packet,
                                set: members(set),
                                j,
                            };
                            let tx = heard.get(&(round, li, group, sender)).ok_or_else(missing)?;
                            let mut piece = tx.payload.clone();
                            piece.resize(bytes, 0);
                            for l in tx.labels.iter().filter(|l| l.receiver != node) {
                                let known = PieceKey {
                                    file: l.file,
                                    packet: l.packet,
                                    layer: li,
                                    set: l.set,
                                    j: l.j,
                                };
                                let side = cache
                                    .get(&known)
                                    .ok_or(Error::Cancellation { node, sender })?;
                                xor_into(&mut piece, side);
                            }
                            piece
                        }
                    };
                    let (start, len) = layer.piece_range(n, layer.piece_index(index, set, j));
                    insert_bits(&mut buf, start, len, &piece);
                }
            }
        }
        out.push(buf);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::delivery::deliver_det;
    use crate::det::placement::place_layers;
    use crate::det::sharing::layers_for;
    use crate::model::gen_library;
    use crate::rational::int;

    #[test]
    fn decodes_and_detects_missing() {
        let p = SystemParams::builder(3, 3, int(2)).packets(3).build().unwrap();
        let lib = gen_library(&p, 5);
        let pl = place_layers(&p, &lib, layers_for(&p)).unwrap();
        let d = Demand::new(vec![2, 2, 0], vec![1, 0, 2]);
        let tx = deliver_det(&p, &pl, &d).unwrap();
        for u in 0..3 {
            let got = decode_det(&p, &pl, u, &tx, &d).unwrap();
            assert_eq!(got[0], lib.packet(d.files[u], d.segments[u]));
        }
        let partial: Vec<_> = tx.iter().filter(|t| t.sender != 1).cloned().collect();
        assert!(matches!(
            decode_det(&p, &pl, 0, &partial, &d),
            Err(Error::MissingTransmission { node: 0, .. })
        ));
    }

    #[test]
    fn single_node_decodes_from_cache() {
        let p = SystemParams::builder(1, 2, int(2)).build().unwrap();
        let lib = gen_library(&p, 1);
        let pl = place_layers(&p, &lib, layers_for(&p)).unwrap();
        let d = Demand::aligned(vec![1]);
        assert!(deliver_det(&p, &pl, &d).unwrap().is_empty());
        assert_eq!(decode_det(&p, &pl, 0, &[], &d).unwrap()[0], lib.packet(1, 0));
    }
}
