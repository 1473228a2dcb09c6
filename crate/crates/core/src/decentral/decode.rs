use std::collections::BTreeMap;

use super::delivery::RandTransmission;
use super::placement::{RandomPlacement, SymbolKey};
use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::model::{Demand, SystemParams};

/// Coded symbols of each requested packet available at `node`: its own
/// cache plus every symbol recovered by cancelling known parts.
///
/// Every recovered symbol is compared with the encoder output; a mismatch
/// is reported as `DecodeMismatch`.
pub fn collect_symbols(
    params: &SystemParams,
    placement: &RandomPlacement,
    node: usize,
    received: &[RandTransmission],
    demand: &Demand,
) -> Result<Vec<BTreeMap<usize, Symbol>>> {
    let field = placement.code.field();
    let file = demand.files[node];
    let mut rounds: Vec<BTreeMap<usize, Symbol>> = (0..params.segment_len())
        .map(|k| {
            let packet = demand.packet(node, k);
            placement.index_sets[node]
                .iter()
                .map(|&index| {
                    let key = SymbolKey { file, packet, index };
                    (index, placement.cached_symbol(node, &key).expect("own index set"))
                })
                .collect()
        })
        .collect();
    for t in received.iter().filter(|t| t.group >> node & 1 == 1 && t.sender != node) {
        let Some(mine) = t.labels.iter().find(|l| l.receiver == node) else {
            continue;
        };
        let mut payload = t.payload.clone();
        for l in t.labels.iter().filter(|l| l.receiver != node) {
            for (slot, &index) in payload.iter_mut().zip(&l.indices) {
                let key = SymbolKey {
                    file: l.file,
                    packet: l.packet,
                    index,
                };
                let side = placement
                    .cached_symbol(node, &key)
                    .ok_or(Error::Cancellation { node, sender: t.sender })?;
                field.mul_add_slice(slot, &side, 1);
            }
        }
        for (symbol, &index) in payload.into_iter().zip(&mine.indices) {
            if symbol != placement.codewords[mine.file][mine.packet][index] {
                return Err(Error::DecodeMismatch {
                    node,
                    packet: mine.packet,
                });
            }
            rounds[t.round].insert(index, symbol);
        }
    }
    Ok(rounds)
}

/// The `L'` requested packets, or `DecodeFailure` when fewer than `K`
/// distinct symbols are available.
pub fn decode_random(
    params: &SystemParams,
    placement: &RandomPlacement,
    node: usize,
    received: &[RandTransmission],
    demand: &Demand,
) -> Result<Vec<Vec<u8>>> {
    let rounds = collect_symbols(params, placement, node, received, demand)?;
    decode_collected(params, placement, node, &rounds)
}

/// MDS-decodes symbols gathered by [`collect_symbols`].
pub fn decode_collected(
    params: &SystemParams,
    placement: &RandomPlacement,
    node: usize,
    rounds: &[BTreeMap<usize, Symbol>],
) -> Result<Vec<Vec<u8>>> {
    let k = placement.k();
    let distinct = rounds.iter().map(BTreeMap::len).min().unwrap_or(0);
    if distinct < k {
        return Err(Error::DecodeFailure {
            node,
            distinct,
            deficit: k - distinct,
        });
    }
    rounds
        .iter()
        .map(|avail| {
            let source = placement.code.decode(avail)?;
            Ok(placement.layout.join(placement.code.field(), &source, params.packet_bytes()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decentral::delivery::deliver_random;
    use crate::decentral::placement::place_random;
    use crate::model::gen_library;
    use crate::rational::int;

    #[test]
    fn decodes_or_reports_deficit() {
        let p = SystemParams::builder(3, 3, int(2)).packets(2).segment(2).packet_bits(480).build().unwrap();
        let d = Demand::aligned(vec![0, 1, 2]);
        let mut decoded = 0;
        for seed in 0..20 {
            let lib = gen_library(&p, seed);
            let pl = place_random(&p, &lib, 30, 0.75, seed).unwrap();
            let tx = deliver_random(&p, &pl, &d).unwrap();
            for u in 0..3 {
                match decode_random(&p, &pl, u, &tx, &d) {
                    Ok(packets) => {
                        decoded += 1;
                        for (k, got) in packets.iter().enumerate() {
                            assert_eq!(got.as_slice(), lib.packet(d.files[u], k));
                        }
                    }
                    Err(Error::DecodeFailure { deficit, .. }) => assert!(deficit > 0),
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(decoded > 0);
    }

    #[test]
    fn dropped_sender_never_yields_wrong_bytes() {
        let p = SystemParams::builder(4, 4, int(2)).packet_bits(320).build().unwrap();
        let d = Demand::aligned(vec![3, 1, 2, 0]);
        for seed in 0..10 {
            let lib = gen_library(&p, seed);
            let pl = place_random(&p, &lib, 20, 0.6, seed).unwrap();
            let tx: Vec<_> = deliver_random(&p, &pl, &d)
                .unwrap()
                .into_iter()
                .filter(|t| t.sender != 2)
                .collect();
            for u in [0, 1, 3] {
                let distinct = collect_symbols(&p, &pl, u, &tx, &d).unwrap()[0].len();
                match decode_random(&p, &pl, u, &tx, &d) {
                    Ok(packets) => {
                        assert!(distinct >= 20);
                        assert_eq!(packets[0].as_slice(), lib.packet(d.files[u], 0));
                    }
                    Err(Error::DecodeFailure { deficit, .. }) => assert_eq!(deficit, 20 - distinct),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn full_cache_decodes_locally() {
        let p = SystemParams::builder(3, 3, int(3)).packet_bits(96).build().unwrap();
        let lib = gen_library(&p, 2);
        let pl = place_random(&p, &lib, 6, 0.8, 2).unwrap();
        let d = Demand::aligned(vec![2, 0, 1]);
        for u in 0..3 {
            let got = decode_random(&p, &pl, u, &[], &d).unwrap();
            assert_eq!(got[0].as_slice(), lib.packet(d.files[u], 0));
        }
    }
}
