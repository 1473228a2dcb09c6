use num_traits::One;
use serde::Serialize;

use super::subpacket::Layer;
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::rational::{ceil_int, floor_int, int, Rational, RationalValue};

/// Two-point memory sharing between `t1 = floor(t)` and `t2 = ceil(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharingSplit {
    pub alpha: Rational,
    pub t1: usize,
    pub t2: usize,
    pub m1: Rational,
    pub m2: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharingReport {
    pub alpha: RationalValue,
    pub t1: usize,
    pub t2: usize,
    pub m1: RationalValue,
    pub m2: RationalValue,
}

impl SharingSplit {
    /// `alpha M1 + (1 - alpha) M2 = M`; `alpha = 1` when `t` is an integer.
    pub fn compute(params: &SystemParams) -> SharingSplit {
        let t = params.t();
        let per_t = int(params.m() as i128) / int(params.n() as i128);
        let t1 = floor_int(&t) as usize;
        let t2 = ceil_int(&t) as usize;
        let m1 = per_t * int(t1 as i128);
        let m2 = per_t * int(t2 as i128);
        let alpha = if m1 == m2 {
            Rational::one()
        } else {
            (m2 - params.cache_size()) / (m2 - m1)
        };
        SharingSplit {
            alpha,
            t1,
            t2,
            m1,
            m2,
        }
    }

    pub fn report(&self) -> SharingReport {
        SharingReport {
            alpha: self.alpha.into(),
            t1: self.t1,
            t2: self.t2,
            m1: self.m1.into(),
            m2: self.m2.into(),
        }
    }

    /// Bit-prefix split of each packet: the first `floor(alpha F)` bits go
    /// to the `t1` layer, the rest to `t2`. Empty layers are dropped.
    pub fn layers(&self, packet_bits: u64) -> Vec<Layer> {
        let f = int(packet_bits as i128);
        if self.alpha == Rational::one() {
            return vec![Layer::full(self.t1, packet_bits)];
        }
        let len1 = floor_int(&(self.alpha * f)) as u64;
        let mut out = Vec::with_capacity(2);
        if self.alpha > int(0) {
            out.push(Layer {
                t: self.t1,
                offset: 0,
                len: len1,
                nominal: self.alpha * f,
            });
        }
        out.push(Layer {
            t: self.t2,
            offset: len1,
            len: packet_bits - len1,
            nominal: (Rational::one() - self.alpha) * f,
        });
        out
    }
}

/// Sharing split for a fractional `t`.
pub fn memory_share(params: &SystemParams) -> Result<SharingSplit> {
    if params.t_is_integer() {
        return Err(Error::NotApplicable(format!(
            "t = {} is an integer",
            params.t()
        )));
    }
    Ok(SharingSplit::compute(params))
}

/// Layers the deterministic scheme runs on for any `t >= 1`.
pub fn layers_for(params: &SystemParams) -> Vec<Layer> {
    SharingSplit::compute(params).layers(params.packet_bits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn two_users_three_files() {
        let p = SystemParams::builder(2, 3, int(2)).build().unwrap();
        let s = memory_share(&p).unwrap();
        assert_eq!((s.t1, s.t2), (1, 2));
        assert_eq!(s.m1, rat(3, 2));
        assert_eq!(s.m2, int(3));
        assert_eq!(s.alpha, rat(2, 3));
        let layers = s.layers(48);
        assert_eq!(layers.len(), 2);
        assert_eq!((layers[0].len, layers[1].offset, layers[1].len), (32, 32, 16));
    }

    #[test]
    fn integer_t_is_not_shared() {
        let p = SystemParams::builder(3, 3, int(2)).build().unwrap();
        assert!(matches!(memory_share(&p), Err(Error::NotApplicable(_))));
        let s = SharingSplit::compute(&p);
        assert_eq!(s.alpha, int(1));
        assert_eq!(layers_for(&p), vec![Layer::full(2, 48)]);
    }

    proptest! {
        #[test]
        fn split_reproduces_cache_size(n in 1usize..12, m in 1usize..12, num in 1i128..60) {
            let cache = rat(num, 5);
            prop_assume!(cache <= int(m as i128));
            let Ok(p) = SystemParams::builder(n, m, cache).build() else { return Ok(()); };
            let s = SharingSplit::compute(&p);
            prop_assert!(s.alpha >= int(0) && s.alpha <= int(1));
            prop_assert_eq!(s.alpha * s.m1 + (Rational::one() - s.alpha) * s.m2, cache);
            let total: Rational = s.layers(48).iter().map(|l| l.nominal).sum();
            prop_assert_eq!(total, int(48));
        }
    }
}
