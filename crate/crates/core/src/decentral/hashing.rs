use serde::Serialize;

use super::placement::{per_node_symbols, SymbolLayout};
use crate::error::{Error, Result};
use crate::gf::{field, hash_encode, rank_gf, HashMatrix, Matrix, Symbol};
use crate::model::{Demand, Library, SystemParams};
use crate::rational::{int, Rational};

/// Default field exponent for the hashing scheme.
pub const HASH_Q: u32 = 16;

/// Hashed symbols `w G_u` sent by `sender` to `receiver`.
#[derive(Debug, Clone, PartialEq)]
pub struct HashTransmission {
    pub round: usize,
    pub sender: usize,
    pub receiver: usize,
    /// Columns of `G_sender` carried, in order.
    pub columns: Vec<usize>,
    pub payload: Vec<Symbol>,
    pub bits: Rational,
}

#[derive(Debug, Clone)]
pub struct HashPlacement {
    pub k: usize,
    pub c: usize,
    pub layout: SymbolLayout,
    pub matrices: Vec<HashMatrix>,
    /// `cached[u][file][packet]` holds the `c` hashed symbols of node `u`.
    pub cached: Vec<Vec<Vec<Vec<Symbol>>>>,
    pub symbol_bits: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct HashRun {
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub decoded: bool,
    pub min_rank: usize,
    pub rate: f64,
    #[serde(skip)]
    pub rate_exact: Rational,
}

fn node_seed(seed: u64, node: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(node as u64 + 1)
}

/// Each node draws `G_u` (`K x MK/m`) and caches `w G_u` for every packet.
/// `M = m` uses the identity so a node can serve itself.
pub fn place_hash(params: &SystemParams, library: &Library, k: usize, q: u32, seed: u64) -> Result<HashPlacement> {
    let c = per_node_symbols(params, k)?;
    let layout = SymbolLayout::new(params.packet_bytes(), k, q);
    let f = field(q)?;
    let matrices: Vec<HashMatrix> = (0..params.n())
        .map(|u| {
            if c == k {
                HashMatrix::identity_block(k, c, q)
            } else {
                HashMatrix::random(k, c, q, node_seed(seed, u))
            }
        })
        .collect::<Result<_>>()?;
    let cached = matrices
        .iter()
        .map(|g| {
            (0..library.files())
                .map(|file| {
                    (0..library.packets_per_file())
                        .map(|p| hash_encode(g, &layout.split(f, library.packet(file, p))))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(HashPlacement {
        k,
        c,
        layout,
        matrices,
        cached,
        symbol_bits: int(params.packet_bits() as i128) / int(k as i128),
    })
}

/// Rows each other node sends to `receiver`: `K - c` split as evenly as
/// possible over the other nodes in ascending order, each sending the first
/// columns of its cache.
pub fn quotas(n: usize, receiver: usize, k: usize, c: usize) -> Vec<(usize, usize)> {
    let need = k.saturating_sub(c);
    if n < 2 || need == 0 {
        return Vec::new();
    }
    let (base, extra) = (need / (n - 1), need % (n - 1));
    (0..n)
        .filter(|&v| v != receiver)
        .enumerate()
        .map(|(i, v)| (v, base + usize::from(i < extra)))
        .filter(|&(_, q)| q > 0)
        .collect()
}

pub fn deliver_hash(params: &SystemParams, placement: &HashPlacement, demand: &Demand) -> Result<Vec<HashTransmission>> {
    demand.validate(params)?;
    let n = params.n();
    let mut out = Vec::new();
    for round in 0..params.segment_len() {
        for receiver in 0..n {
            let (file, packet) = (demand.files[receiver], demand.packet(receiver, round));
            for (sender, count) in quotas(n, receiver, placement.k, placement.c) {
                out.push(HashTransmission {
                    round,
                    sender,
                    receiver,
                    columns: (0..count).collect(),
                    payload: placement.cached[sender][file][packet][..count].to_vec(),
                    bits: placement.symbol_bits * int(count as i128),
                });
            }
        }
    }
    Ok(out)
}

/// Solves the `K x K` system formed by the receiver's own hashed symbols
/// and those it received; `RankDeficient` if singular.
pub fn decode_hash(
    params: &SystemParams,
    placement: &HashPlacement,
    node: usize,
    received: &[HashTransmission],
    demand: &Demand,
) -> Result<Vec<Vec<u8>>> {
    let q = placement.matrices[node].q();
    let f = field(q)?;
    let (file, k) = (demand.files[node], placement.k);
    (0..params.segment_len())
        .map(|round| {
            let packet = demand.packet(node, round);
            let mut columns: Vec<Vec<u16>> = Vec::with_capacity(k);
            let mut values: Vec<Symbol> = Vec::with_capacity(k);
            let own = &placement.matrices[node];
            for j in 0..placement.c {
                columns.push(own.column(j));
                values.push(placement.cached[node][file][packet][j].clone());
            }
            for t in received.iter().filter(|t| t.receiver == node && t.round == round) {
                let g = &placement.matrices[t.sender];
                for (&j, s) in t.columns.iter().zip(&t.payload) {
                    columns.push(g.column(j));
                    values.push(s.clone());
                }
            }
            columns.truncate(k);
            values.truncate(k);
            // y = w A with the collected columns as A's columns
            let a = Matrix::from_rows((0..k).map(|i| columns.iter().map(|c| c[i]).collect()).collect());
            let singular = || Error::RankDeficient {
                node,
                rank: rank_gf(f, &a),
                k,
            };
            if columns.len() < k {
                return Err(singular());
            }
            let inv = a.inverse(f).ok_or_else(singular)?;
            let width = values.first().map(Vec::len).unwrap_or(placement.layout.width);
            let source: Vec<Symbol> = (0..k)
                .map(|i| {
                    let mut s = vec![0; width];
                    for (r, y) in values.iter().enumerate() {
                        f.mul_add_slice(&mut s, y, inv.get(r, i));
                    }
                    s
                })
                .collect();
            Ok(placement.layout.join(f, &source, params.packet_bytes()))
        })
        .collect()
}

pub fn rate_hash_measured(transmissions: &[HashTransmission], params: &SystemParams) -> Rational {
    let total: Rational = transmissions.iter().map(|t| t.bits).sum();
    total / int(params.packet_bits() as i128 * params.segment_len() as i128)
}

/// Placement, delivery and decode at every node for one seed.
pub fn scheme_t1(params: &SystemParams, library: &Library, demand: &Demand, k: usize, q: u32, seed: u64) -> Result<HashRun> {
    let placement = place_hash(params, library, k, q, seed)?;
    let tx = deliver_hash(params, &placement, demand)?;
    let mut decoded = true;
    let mut min_rank = k;
    for node in 0..params.n() {
        match decode_hash(params, &placement, node, &tx, demand) {
            Ok(packets) => {
                for (r, got) in packets.iter().enumerate() {
                    let packet = demand.packet(node, r);
                    if got.as_slice() != library.packet(demand.files[node], packet) {
                        return Err(Error::DecodeMismatch { node, packet });
                    }
                }
            }
            Err(Error::RankDeficient { rank, .. }) => {
                decoded = false;
                min_rank = min_rank.min(rank);
            }
            Err(e) => return Err(e),
        }
    }
    let rate_exact = rate_hash_measured(&tx, params);
    Ok(HashRun {
        seed,
        k,
        decoded,
        min_rank,
        rate: crate::rational::to_f64(&rate_exact),
        rate_exact,
    })
}
