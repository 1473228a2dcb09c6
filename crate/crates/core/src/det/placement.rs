use super::sharing::layers_for;
use super::subpacket::{check_subpacketization, extract_bits, Layer, NodeSet, SubsetIndex};
use crate::error::{Error, Result};
use crate::model::{CacheContent, Library, SystemParams};

/// Subpacket `(T, j)` of packet `packet` of file `file` in layer `layer`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PieceKey {
    pub file: usize,
    pub packet: usize,
    pub layer: usize,
    pub set: NodeSet,
    pub j: usize,
}

pub type DetCache = CacheContent<PieceKey>;

/// Placement of every node plus the layer geometry it was built for.
#[derive(Debug, Clone)]
pub struct DetPlacement {
    pub n: usize,
    pub layers: Vec<Layer>,
    pub indices: Vec<SubsetIndex>,
    pub caches: Vec<DetCache>,
}

impl DetPlacement {
    pub fn cache(&self, node: usize) -> &DetCache {
        &self.caches[node]
    }
}

/// Integer-`t` placement: node `u` caches `(T, j)` iff `u` is in `T`.
pub fn place_det(params: &SystemParams, library: &Library) -> Result<DetPlacement> {
    if !params.t_is_integer() {
        return Err(Error::NonIntegerT(params.t().to_string()));
    }
    place_layers(params, library, layers_for(params))
}

/// Placement over explicit layers; fractional `t` goes through memory sharing.
pub fn place_layers(params: &SystemParams, library: &Library, layers: Vec<Layer>) -> Result<DetPlacement> {
    let n = params.n();
    for layer in &layers {
        check_subpacketization(n, layer.t)?;
    }
    let indices: Vec<SubsetIndex> = layers.iter().map(|l| SubsetIndex::new(n, l.t)).collect();
    let mut caches: Vec<DetCache> = (0..n).map(CacheContent::new).collect();
    for (li, (layer, index)) in layers.iter().zip(&indices).enumerate() {
        let bytes = layer.piece_bytes(n);
        let bits = layer.piece_bits(n);
        for file in 0..library.files() {
            for packet in 0..library.packets_per_file() {
                let src = library.packet(file, packet);
                for &set in index.sets() {
                    for j in 0..layer.t {
                        let (start, len) = layer.piece_range(n, layer.piece_index(index, set, j));
                        let piece = extract_bits(src, start, len, bytes);
                        let key = PieceKey {
                            file,
                            packet,
                            layer: li,
                            set,
                            j,
                        };
                        for (u, cache) in caches.iter_mut().enumerate() {
                            if set >> u & 1 == 1 {
                                cache.insert(key, piece.clone(), bits);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(DetPlacement {
        n,
        layers,
        indices,
        caches,
    })
}
