use num_traits::Zero;

use crate::rational::{int, Rational};

/// `l - l M / floor(m / l)`.
pub fn converse_term(l: u64, m: u64, cache: Rational) -> Rational {
    let q = m / l;
    int(l as i128) - int(l as i128) * cache / int(q as i128)
}

/// `max_{1 <= l <= l_max} (l - l M / floor(m/l))` and its maximiser.
///
/// `l_max` is clipped to `m`. Within a block of equal `floor(m/l)` the term is
/// linear in `l`, so only the largest `l` of each block is evaluated.
pub fn max_l_term(m: u64, cache: Rational, l_max: u64) -> (Rational, u64) {
    let l_max = l_max.min(m);
    let mut best = (converse_term(1, m, cache), 1);
    let mut l = 1;
    while l <= l_max {
        let q = m / l;
        let last = (m / q).min(l_max);
        let v = converse_term(last, m, cache);
        if v > best.0 {
            best = (v, last);
        }
        l = last + 1;
    }
    best
}

/// Cut-set lower bound on the worst-case rate with full-range links.
pub fn rate_converse(n: u64, m: u64, cache: Rational) -> Rational {
    let (first, _) = max_l_term(m, cache, n.min(m));
    let second = if n > 1 && m > 1 {
        int(n as i128) / int(n as i128 - 1) * (int(1) - cache / int(m as i128))
    } else {
        Rational::zero()
    };
    first.max(second)
}
