use std::collections::BTreeMap;

use serde::Serialize;

use super::field::{field, Elem, Field};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A coded symbol: a stripe of field elements.
pub type Symbol = Vec<Elem>;

/// Systematic `(k, nsym)` MDS code with Cauchy parity rows.
///
/// Parity row `i` has entries `1 / (x_i + y_j)` with `x_i = i` and
/// `y_j = p + j`, where `p = nsym - k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MdsCode {
    k: usize,
    nsym: usize,
    q: u32,
}

impl MdsCode {
    pub fn new(k: usize, nsym: usize, q: u32) -> Result<Self> {
        field(q)?;
        if k == 0 || nsym < k {
            return Err(Error::InvalidParams(format!(
                "need 0 < k <= nsym, got k = {k}, nsym = {nsym}"
            )));
        }
        if nsym > 1usize << q {
            return Err(Error::FieldOverflow { nsym, q });
        }
        Ok(MdsCode { k, nsym, q })
    }

    /// Code over the smallest supported field holding `nsym` points.
    pub fn with_smallest_field(k: usize, nsym: usize) -> Result<Self> {
        MdsCode::new(k, nsym, super::field::smallest_q(nsym)?)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nsym(&self) -> usize {
        self.nsym
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn field(&self) -> &'static Field {
        field(self.q).expect("validated in new")
    }

    fn parity_count(&self) -> usize {
        self.nsym - self.k
    }

    fn coeff(&self, parity_row: usize, col: usize) -> Elem {
        let p = self.parity_count();
        self.field().inv((parity_row ^ (p + col)) as Elem)
    }

    /// Full codeword: the `k` source symbols followed by `nsym - k` parities.
    pub fn encode(&self, source: &[Symbol]) -> Result<Vec<Symbol>> {
        if source.len() != self.k {
            return Err(Error::InvalidParams(format!(
                "expected {} source symbols, got {}",
                self.k,
                source.len()
            )));
        }
        let width = source[0].len();
        let f = self.field();
        let mut out = source.to_vec();
        for i in 0..self.parity_count() {
            let mut parity = vec![0; width];
            for (j, s) in source.iter().enumerate() {
                f.mul_add_slice(&mut parity, s, self.coeff(i, j));
            }
            out.push(parity);
        }
        Ok(out)
    }

    /// Coded symbol `index` alone.
    pub fn encode_symbol(&self, source: &[Symbol], index: usize) -> Result<Symbol> {
        if index >= self.nsym {
            return Err(Error::SymbolIndex {
                index,
                nsym: self.nsym,
            });
        }
        if index < self.k {
            return Ok(source[index].clone());
        }
        let f = self.field();
        let mut parity = vec![0; source[0].len()];
        for (j, s) in source.iter().enumerate() {
            f.mul_add_slice(&mut parity, s, self.coeff(index - self.k, j));
        }
        Ok(parity)
    }

    /// Reconstructs the source from any `k` distinct coded symbols.
    pub fn decode(&self, available: &BTreeMap<usize, Symbol>) -> Result<Vec<Symbol>> {
        if let Some((&index, _)) = available.range(self.nsym..).next() {
            return Err(Error::SymbolIndex {
                index,
                nsym: self.nsym,
            });
        }
        if available.len() < self.k {
            return Err(Error::InsufficientSymbols {
                have: available.len(),
                need: self.k,
            });
        }
        let width = available.values().next().map(Vec::len).unwrap_or(0);
        let erased: Vec<usize> = (0..self.k).filter(|j| !available.contains_key(j)).collect();
        let mut source: Vec<Option<Symbol>> =
            (0..self.k).map(|j| available.get(&j).cloned()).collect();
        if erased.is_empty() {
            return Ok(source.into_iter().map(Option::unwrap).collect());
        }
        let f = self.field();
        let parities: Vec<usize> = available
            .range(self.k..)
            .map(|(&i, _)| i - self.k)
            .take(erased.len())
            .collect();
        // rhs_i = parity_i - sum over known sources
        let mut rhs: Vec<Symbol> = parities
            .iter()
            .map(|&i| {
                let mut acc = available[&(self.k + i)].clone();
                for (j, s) in source.iter().enumerate() {
                    if let Some(s) = s {
                        f.mul_add_slice(&mut acc, s, self.coeff(i, j));
                    }
                }
                acc
            })
            .collect();
        let system = Matrix::from_rows(
            parities
                .iter()
                .map(|&i| erased.iter().map(|&j| self.coeff(i, j)).collect())
                .collect(),
        );
        let inv = system
            .inverse(f)
            .expect("square Cauchy submatrices are nonsingular");
        for (a, &j) in erased.iter().enumerate() {
            let mut s = vec![0; width];
            for (b, r) in rhs.iter_mut().enumerate() {
                f.mul_add_slice(&mut s, r, inv.get(a, b));
            }
            source[j] = Some(s);
        }
        Ok(source.into_iter().map(Option::unwrap).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn source(k: usize, width: usize, q: u32, seed: u64) -> Vec<Symbol> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = ((1u32 << q) - 1) as u16;
        (0..k)
            .map(|_| (0..width).map(|_| rng.random::<u16>() & mask).collect())
            .collect()
    }

    fn keep(code: &[Symbol], idx: impl IntoIterator<Item = usize>) -> BTreeMap<usize, Symbol> {
        idx.into_iter().map(|i| (i, code[i].clone())).collect()
    }

    #[test]
    fn rate_one_is_identity() {
        let c = MdsCode::new(4, 4, 8).unwrap();
        let s = source(4, 3, 8, 1);
        assert_eq!(c.encode(&s).unwrap(), s);
    }

    #[test]
    fn zero_source_zero_codeword() {
        let c = MdsCode::new(4, 6, 8).unwrap();
        let s = vec![vec![0; 5]; 4];
        assert!(c.encode(&s).unwrap().iter().all(|x| x.iter().all(|&e| e == 0)));
    }

    #[test]
    fn all_double_erasures_k4() {
        let c = MdsCode::new(4, 6, 8).unwrap();
        let s = source(4, 2, 8, 9);
        let code = c.encode(&s).unwrap();
        for erased in (0..6).combinations(2) {
            let avail = keep(&code, (0..6).filter(|i| !erased.contains(i)));
            assert_eq!(c.decode(&avail).unwrap(), s, "erasures {erased:?}");
        }
    }

    #[test]
    fn random_subsets_k8() {
        let c = MdsCode::new(8, 12, 8).unwrap();
        let s = source(8, 4, 8, 2);
        let code = c.encode(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let idx = sample(&mut rng, 12, 8).into_vec();
            assert_eq!(c.decode(&keep(&code, idx)).unwrap(), s);
        }
    }

    #[test]
    fn systematic_prefix_and_threshold() {
        let c = MdsCode::new(5, 8, 16).unwrap();
        let s = source(5, 2, 16, 4);
        let code = c.encode(&s).unwrap();
        assert_eq!(&code[..5], &s[..]);
        assert_eq!(c.decode(&keep(&code, 0..5)).unwrap(), s);
        assert_eq!(
            c.decode(&keep(&code, 0..4)).unwrap_err(),
            Error::InsufficientSymbols { have: 4, need: 5 }
        );
        for i in 0..8 {
            assert_eq!(c.encode_symbol(&s, i).unwrap(), code[i]);
        }
        assert!(c.encode_symbol(&s, 8).is_err());
    }

    #[test]
    fn field_overflow() {
        assert_eq!(
            MdsCode::new(200, 300, 8).unwrap_err(),
            Error::FieldOverflow { nsym: 300, q: 8 }
        );
        assert_eq!(MdsCode::with_smallest_field(200, 300).unwrap().q(), 16);
    }

    #[test]
    fn large_code_over_gf16() {
        let c = MdsCode::with_smallest_field(240, 318).unwrap();
        let s = source(240, 1, 16, 8);
        let code = c.encode(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let idx = sample(&mut rng, 318, 240).into_vec();
        assert_eq!(c.decode(&keep(&code, idx)).unwrap(), s);
    }
}
