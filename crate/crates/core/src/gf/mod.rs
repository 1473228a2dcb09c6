//! GF(2^q) arithmetic, systematic MDS erasure coding and random linear hashing.

mod field;
mod hash;
mod matrix;
mod mds;

pub use field::{field, mul_reference, smallest_q, Elem, Field, POLY_16, POLY_8};
pub use hash::{hash_encode, HashMatrix};
pub use matrix::{rank_gf, Matrix};
pub use mds::{MdsCode, Symbol};
