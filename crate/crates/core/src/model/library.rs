use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::SystemParams;

/// The file library: `m` files of `L` packets, each `F` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    packet_bytes: usize,
    files: Vec<Vec<Vec<u8>>>,
}

impl Library {
    pub fn from_packets(files: Vec<Vec<Vec<u8>>>) -> Self {
        let packet_bytes = files
            .first()
            .and_then(|f| f.first())
            .map(Vec::len)
            .unwrap_or(0);
        assert!(
            files
                .iter()
                .all(|f| f.iter().all(|p| p.len() == packet_bytes)),
            "all packets must have the same length"
        );
        Library {
            packet_bytes,
            files,
        }
    }

    pub fn files(&self) -> usize {
        self.files.len()
    }

    pub fn packets_per_file(&self) -> usize {
        self.files.first().map(Vec::len).unwrap_or(0)
    }

    pub fn packet_bytes(&self) -> usize {
        self.packet_bytes
    }

    pub fn packet(&self, file: usize, packet: usize) -> &[u8] {
        &self.files[file][packet]
    }

    pub fn total_packets(&self) -> usize {
        self.files.iter().map(Vec::len).sum()
    }
}

/// Uniform i.i.d. library content, a pure function of `(params, seed)`.
pub fn gen_library(params: &SystemParams, seed: u64) -> Library {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bytes = params.packet_bytes();
    let files = (0..params.m())
        .map(|_| {
            (0..params.packets())
                .map(|_| {
                    let mut packet = vec![0u8; bytes];
                    rng.fill_bytes(&mut packet);
                    packet
                })
                .collect()
        })
        .collect();
    Library {
        packet_bytes: bytes,
        files,
    }
}
