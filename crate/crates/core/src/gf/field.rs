use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Element of GF(2^q), q in {8, 16}.
pub type Elem = u16;

/// Log/antilog tables for GF(2^q) with a primitive reduction polynomial.
#[derive(Debug)]
pub struct Field {
    q: u32,
    poly: u32,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

pub const POLY_8: u32 = 0x11d;
pub const POLY_16: u32 = 0x1100b;

static GF8: OnceLock<Field> = OnceLock::new();
static GF16: OnceLock<Field> = OnceLock::new();

/// Shared table for `q`, built on first use.
pub fn field(q: u32) -> Result<&'static Field> {
    match q {
        8 => Ok(GF8.get_or_init(|| Field::build(8, POLY_8))),
        16 => Ok(GF16.get_or_init(|| Field::build(16, POLY_16))),
        _ => Err(Error::InvalidParams(format!(
            "unsupported field exponent {q}, expected 8 or 16"
        ))),
    }
}

/// Smallest supported `q` with `2^q >= nsym`.
pub fn smallest_q(nsym: usize) -> Result<u32> {
    [8u32, 16]
        .into_iter()
        .find(|&q| nsym <= 1usize << q)
        .ok_or(Error::FieldOverflow { nsym, q: 16 })
}

impl Field {
    fn build(q: u32, poly: u32) -> Field {
        let order = 1usize << q;
        let mut exp = vec![0 as Elem; 2 * order];
        let mut log = vec![0u32; order];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order - 1).enumerate() {
            *slot = x as Elem;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << q) != 0 {
                x ^= poly;
            }
        }
        for i in order - 1..2 * order {
            exp[i] = exp[i - (order - 1)];
        }
        Field { q, poly, exp, log }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn order(&self) -> usize {
        1 << self.q
    }

    /// Multiplicative group order `2^q - 1`.
    fn group(&self) -> usize {
        self.order() - 1
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "zero has no inverse");
        self.exp[self.group() - self.log[a as usize] as usize]
    }

    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = (self.log[a as usize] as u64 * (e % self.group() as u64)) % self.group() as u64;
        self.exp[l as usize]
    }

    /// `dst[i] ^= c * src[i]`.
    pub fn mul_add_slice(&self, dst: &mut [Elem], src: &[Elem], c: Elem) {
        if c == 0 {
            return;
        }
        if c == 1 {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s);
            return;
        }
        let lc = self.log[c as usize];
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[(self.log[s as usize] + lc) as usize];
            }
        }
    }

    pub fn scale_slice(&self, xs: &mut [Elem], c: Elem) {
        for x in xs {
            *x = self.mul(*x, c);
        }
    }

    /// Bytes per element.
    pub fn elem_bytes(&self) -> usize {
        (self.q / 8) as usize
    }

    /// Big-endian packing of bytes into elements; a short tail is zero-padded.
    pub fn bytes_to_elems(&self, bytes: &[u8]) -> Vec<Elem> {
        match self.q {
            8 => bytes.iter().map(|&b| b as Elem).collect(),
            _ => bytes
                .chunks(2)
                .map(|c| ((c[0] as Elem) << 8) | c.get(1).copied().unwrap_or(0) as Elem)
                .collect(),
        }
    }

    pub fn elems_to_bytes(&self, elems: &[Elem]) -> Vec<u8> {
        match self.q {
            8 => elems.iter().map(|&e| e as u8).collect(),
            _ => elems.iter().flat_map(|&e| e.to_be_bytes()).collect(),
        }
    }
}

/// Carry-less schoolbook product reduced by `poly`, independent of the tables.
pub fn mul_reference(q: u32, poly: u32, a: Elem, b: Elem) -> Elem {
    let (mut a, mut b) = (a as u32, b as u32);
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << q) != 0 {
            a ^= poly;
        }
    }
    acc as Elem
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polynomials_are_primitive() {
        for q in [8, 16] {
            let f = field(q).unwrap();
            // x = 2 generates the whole multiplicative group
            let mut seen = vec![false; f.order()];
            let mut x: Elem = 1;
            for _ in 0..f.group() {
                assert!(!seen[x as usize], "q={q}: generator order too small");
                seen[x as usize] = true;
                x = f.mul(x, 2);
            }
            assert_eq!(x, 1);
        }
    }

    #[test]
    fn exhaustive_axioms_q8() {
        let f = field(8).unwrap();
        for a in 0..256u16 {
            assert_eq!(f.add(a, a), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            for b in 0..256u16 {
                assert_eq!(f.mul(a, b), mul_reference(8, POLY_8, a, b));
                assert_eq!(f.mul(a, b), f.mul(b, a));
            }
        }
        for a in (0..256u16).step_by(7) {
            for b in (0..256u16).step_by(5) {
                for c in 0..256u16 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn field_selection() {
        assert_eq!(smallest_q(12).unwrap(), 8);
        assert_eq!(smallest_q(256).unwrap(), 8);
        assert_eq!(smallest_q(257).unwrap(), 16);
        assert!(matches!(smallest_q(70_000), Err(Error::FieldOverflow { .. })));
        assert!(field(4).is_err());
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let f = field(16).unwrap();
        let mut acc = 1;
        for e in 0..40 {
            assert_eq!(f.pow(0x1234, e), acc);
            acc = f.mul(acc, 0x1234);
        }
    }

    #[test]
    fn byte_packing_round_trip() {
        let f = field(16).unwrap();
        let bytes = [1u8, 2, 3, 4];
        let e = f.bytes_to_elems(&bytes);
        assert_eq!(e, vec![0x0102, 0x0304]);
        assert_eq!(f.elems_to_bytes(&e), bytes);
        assert_eq!(f.bytes_to_elems(&[9]), vec![0x0900]);
    }

    proptest! {
        #[test]
        fn q16_matches_reference(a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
            let f = field(16).unwrap();
            prop_assert_eq!(f.mul(a, b), mul_reference(16, POLY_16, a, b));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            if a != 0 {
                prop_assert_eq!(f.div(f.mul(a, b), a), b);
            }
        }
    }
}
