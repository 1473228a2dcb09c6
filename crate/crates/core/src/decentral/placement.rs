use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Field, MdsCode, Symbol};
use crate::model::{CacheContent, Library, SystemParams};
use crate::rational::{gcd, int, Rational};

/// Coded symbol `index` of packet `packet` of file `file`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolKey {
    pub file: usize,
    pub packet: usize,
    pub index: usize,
}

pub type RandomCacheStore = CacheContent<SymbolKey>;

/// Smallest `K' >= k` with `M K' / m` integral.
pub fn admissible_k(params: &SystemParams, k: usize) -> usize {
    let cache = params.cache_size();
    let denom = *cache.denom() * params.m() as i128;
    let step = denom / gcd(*cache.numer(), denom);
    let step = step as usize;
    k.max(1).div_ceil(step) * step
}

/// Cached symbols per packet, `M K / m`.
pub fn per_node_symbols(params: &SystemParams, k: usize) -> Result<usize> {
    let c = params.cache_size() * int(k as i128) / int(params.m() as i128);
    if !c.is_integer() {
        return Err(Error::IndivisibleK(format!(
            "M K / m = {c} is not an integer for K = {k}; nearest admissible K is {}",
            admissible_k(params, k)
        )));
    }
    Ok(c.to_integer() as usize)
}

/// Splits packets into `K` source symbols of `width` field elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolLayout {
    pub k: usize,
    pub width: usize,
    pub elem_bytes: usize,
}

impl SymbolLayout {
    pub fn new(packet_bytes: usize, k: usize, q: u32) -> Self {
        let elem_bytes = (q / 8) as usize;
        let width = packet_bytes.div_ceil(k * elem_bytes).max(1);
        SymbolLayout {
            k,
            width,
            elem_bytes,
        }
    }

    pub fn split(&self, field: &Field, packet: &[u8]) -> Vec<Symbol> {
        let mut padded = packet.to_vec();
        padded.resize(self.k * self.width * self.elem_bytes, 0);
        let elems = field.bytes_to_elems(&padded);
        elems.chunks(self.width).map(<[u16]>::to_vec).collect()
    }

    pub fn join(&self, field: &Field, symbols: &[Symbol], packet_bytes: usize) -> Vec<u8> {
        let elems: Vec<u16> = symbols.iter().flatten().copied().collect();
        let mut bytes = field.elems_to_bytes(&elems);
        bytes.truncate(packet_bytes);
        bytes
    }
}

/// Algorithm 1: every node samples `M K / m` of the `ceil(K / rho)` MDS symbol
/// indices and caches those symbols of every packet.
#[derive(Debug, Clone)]
pub struct RandomPlacement {
    pub code: MdsCode,
    pub layout: SymbolLayout,
    pub per_node: usize,
    pub index_sets: Vec<Vec<usize>>,
    /// Bitmask of the nodes caching each symbol index.
    pub holders: Vec<u64>,
    pub caches: Vec<RandomCacheStore>,
    /// Full codewords, kept as ground truth for soundness checks.
    pub codewords: Vec<Vec<Vec<Symbol>>>,
    pub symbol_bits: Rational,
}

pub fn code_length(k: usize, rho: f64) -> Result<usize> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParams(format!("rho must lie in (0, 1], got {rho}")));
    }
    let nsym = (k as f64 / rho).ceil() as usize;
    // guard against k / rho landing a hair above an integer
    if nsym > k && ((nsym - 1) as f64 - k as f64 / rho).abs() < 1e-9 {
        return Ok(nsym - 1);
    }
    Ok(nsym.max(k))
}

fn sample_index_sets(n: usize, nsym: usize, per_node: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..n)
        .map(|_| {
            let mut s = sample(&mut rng, nsym, per_node).into_vec();
            s.sort_unstable();
            s
        })
        .collect()
}

pub fn place_random(params: &SystemParams, library: &Library, k: usize, rho: f64, seed: u64) -> Result<RandomPlacement> {
    let n = params.n();
    if n > 64 {
        return Err(Error::InvalidParams(format!(
            "decentralized scheme supports n <= 64, got {n}"
        )));
    }
    let per_node = per_node_symbols(params, k)?;
    let nsym = code_length(k, rho)?;
    let code = MdsCode::with_smallest_field(k, nsym)?;
    let layout = SymbolLayout::new(params.packet_bytes(), k, code.q());
    let index_sets = sample_index_sets(n, nsym, per_node, seed);
    let mut holders = vec![0u64; nsym];
    for (u, set) in index_sets.iter().enumerate() {
        for &i in set {
            holders[i] |= 1 << u;
        }
    }
    let symbol_bits = int(params.packet_bits() as i128) / int(k as i128);
    let codewords: Vec<Vec<Vec<Symbol>>> = (0..library.files())
        .map(|f| {
            (0..library.packets_per_file())
                .map(|p| {
                    let source = layout.split(code.field(), library.packet(f, p));
                    code.encode(&source).expect("source length is k")
                })
                .collect()
        })
        .collect();
    let mut caches: Vec<RandomCacheStore> = (0..n).map(CacheContent::new).collect();
    for (u, set) in index_sets.iter().enumerate() {
        for (file, packets) in codewords.iter().enumerate() {
            for (packet, word) in packets.iter().enumerate() {
                for &index in set {
                    let bytes = code.field().elems_to_bytes(&word[index]);
                    caches[u].insert(SymbolKey { file, packet, index }, bytes, symbol_bits);
                }
            }
        }
    }
    Ok(RandomPlacement {
        code,
        layout,
        per_node,
        index_sets,
        holders,
        caches,
        codewords,
        symbol_bits,
    })
}

impl RandomPlacement {
    pub fn nsym(&self) -> usize {
        self.code.nsym()
    }

    pub fn k(&self) -> usize {
        self.code.k()
    }

    pub fn cached_symbol(&self, node: usize, key: &SymbolKey) -> Option<Symbol> {
        self.caches[node]
            .get(key)
            .map(|b| self.code.field().bytes_to_elems(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LibraryCoverage {
    pub distinct: usize,
    pub per_file: Vec<bool>,
}

/// Whether the union of all caches holds at least `K` distinct symbols of
/// every file.
pub fn check_library_cached(placement: &RandomPlacement, files: usize) -> LibraryCoverage {
    let distinct = placement.holders.iter().filter(|&&h| h != 0).count();
    let ok = distinct >= placement.k();
    LibraryCoverage {
        distinct,
        per_file: vec![ok; files],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{budget_bits, gen_library};
    use crate::rational::rat;

    fn params(n: usize, m: usize, cache: Rational) -> SystemParams {
        SystemParams::builder(n, m, cache).packet_bits(96).build().unwrap()
    }

    #[test]
    fn three_users_hold_eight_indices() {
        let p = params(3, 3, int(2));
        let lib = gen_library(&p, 1);
        let pl = place_random(&p, &lib, 12, 0.95, 4).unwrap();
        assert_eq!(pl.nsym(), 13);
        for (u, set) in pl.index_sets.iter().enumerate() {
            assert_eq!(set.len(), 8);
            assert!(set.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(pl.caches[u].stored_bits(), budget_bits(&p));
        }
    }

    #[test]
    fn full_cache_holds_k() {
        let p = params(3, 3, int(3));
        let lib = gen_library(&p, 1);
        let pl = place_random(&p, &lib, 12, 0.9, 4).unwrap();
        assert!(pl.index_sets.iter().all(|s| s.len() == 12));
        assert!(check_library_cached(&pl, 3).per_file.iter().all(|&b| b));
    }

    #[test]
    fn seeds_differ() {
        let p = params(3, 3, int(2));
        let lib = gen_library(&p, 1);
        let a = place_random(&p, &lib, 12, 0.5, 1).unwrap();
        let b = place_random(&p, &lib, 12, 0.5, 2).unwrap();
        assert_ne!(a.index_sets, b.index_sets);
    }

    #[test]
    fn k_admissibility() {
        let p = params(3, 3, rat(3, 2));
        assert_eq!(admissible_k(&p, 5), 6);
        assert!(matches!(per_node_symbols(&p, 5), Err(Error::IndivisibleK(_))));
        assert_eq!(per_node_symbols(&p, 6).unwrap(), 3);
        let lib = gen_library(&p, 0);
        assert!(place_random(&p, &lib, 5, 0.9, 0).is_err());
    }

    #[test]
    fn code_length_rounding() {
        assert_eq!(code_length(240, 0.95).unwrap(), 253);
        assert_eq!(code_length(240, 0.75).unwrap(), 320);
        assert_eq!(code_length(4, 1.0).unwrap(), 4);
        assert!(code_length(4, 0.0).is_err());
    }

    #[test]
    fn symbol_layout_round_trip() {
        let f = crate::gf::field(16).unwrap();
        let layout = SymbolLayout::new(13, 5, 16);
        assert_eq!(layout.width, 2);
        let packet: Vec<u8> = (0..13).collect();
        let symbols = layout.split(f, &packet);
        assert_eq!(symbols.len(), 5);
        assert_eq!(layout.join(f, &symbols, 13), packet);
    }
}
