use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{field, Field};
use super::matrix::Matrix;
use super::mds::Symbol;
use crate::error::Result;

/// Random linear hashing matrix `G_u` of size `k x c` over GF(2^q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashMatrix {
    q: u32,
    matrix: Matrix,
}

impl HashMatrix {
    /// I.i.d. uniform entries from a seeded generator.
    pub fn random(k: usize, c: usize, q: u32, seed: u64) -> Result<Self> {
        let f = field(q)?;
        let mask = (f.order() - 1) as u16;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..k)
            .map(|_| (0..c).map(|_| rng.random::<u16>() & mask).collect())
            .collect();
        Ok(HashMatrix {
            q,
            matrix: Matrix::from_rows(rows),
        })
    }

    /// Identity on the first `c` coordinates.
    pub fn identity_block(k: usize, c: usize, q: u32) -> Result<Self> {
        field(q)?;
        let mut matrix = Matrix::zeros(k, c);
        for i in 0..k.min(c) {
            matrix.set(i, i, 1);
        }
        Ok(HashMatrix { q, matrix })
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn c(&self) -> usize {
        self.matrix.cols()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn field(&self) -> &'static Field {
        field(self.q).expect("validated on construction")
    }

    /// Column `j` of `G_u`: the coefficients of hashed symbol `j`.
    pub fn column(&self, j: usize) -> Vec<u16> {
        (0..self.k()).map(|i| self.matrix.get(i, j)).collect()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// `w G_u` applied stripe-wise: hashed symbol `j` is `sum_i w_i G[i][j]`.
pub fn hash_encode(g: &HashMatrix, packet: &[Symbol]) -> Vec<Symbol> {
    assert_eq!(packet.len(), g.k(), "packet length must equal k");
    let f = g.field();
    let width = packet.first().map(Vec::len).unwrap_or(0);
    (0..g.c())
        .map(|j| {
            let mut out = vec![0; width];
            for (i, w) in packet.iter().enumerate() {
                f.mul_add_slice(&mut out, w, g.matrix.get(i, j));
            }
            out
        })
        .collect()
}
