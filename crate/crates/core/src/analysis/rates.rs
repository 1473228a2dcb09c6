use num_traits::{One, Zero};
use serde::Serialize;

use super::converse::rate_converse;
use crate::error::{Error, Result};
use crate::rational::{ceil_int, floor_int, int, to_f64, Rational, RationalValue};

/// `t = M n / m`.
pub fn t_of(n: u64, m: u64, cache: Rational) -> Rational {
    cache * int(n as i128) / int(m as i128)
}

fn integer_point(n: u64, t: i128) -> Rational {
    if t as u64 >= n {
        Rational::zero()
    } else {
        int(n as i128 - t) / int(t)
    }
}

/// `(m/M)(1 - M/m) = (n - t)/t` at integer `t`, linearly interpolated
/// between `floor(t)` and `ceil(t)` otherwise.
pub fn rate_det_formula(n: u64, m: u64, cache: Rational) -> Result<Rational> {
    let t = t_of(n, m, cache);
    if t < Rational::one() {
        return Err(Error::TLessThanOne(t.to_string()));
    }
    let (t1, t2) = (floor_int(&t), ceil_int(&t));
    if t1 == t2 {
        return Ok(integer_point(n, t1));
    }
    let alpha = int(t2) - t;
    Ok(alpha * integer_point(n, t1) + (Rational::one() - alpha) * integer_point(n, t2))
}

/// Deterministic rate when whole files may be multicast (`L' = L`).
pub fn rate_det_naive(n: u64, m: u64, cache: Rational) -> Result<Rational> {
    Ok(rate_det_formula(n, m, cache)?.min(int(m as i128)))
}

/// Single-server coded multicast reference `n (1 - M/m) / (1 + M n / m)`.
pub fn rate_basestation_reference(n: u64, m: u64, cache: Rational) -> Rational {
    let mm = int(m as i128);
    int(n as i128) * (Rational::one() - cache / mm) / (Rational::one() + t_of(n, m, cache))
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let s = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - s) + v;
        } else {
            c += (v - s) + sum;
        }
        sum = s;
    }
    sum + c
}

/// `(1/rho) sum_{s=2}^n C(n,s) (s/(s-1)) p^(s-1) (1-p)^(n-s+1)` with
/// `p = M rho / m`, terms evaluated in log space.
pub fn rand_sum(n: u64, p: f64, rho: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 || n < 2 {
        return 0.0;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut log_binom = (n as f64).ln(); // ln C(n, 1)
    let terms = (2..=n).map(|s| {
        log_binom += ((n - s + 1) as f64).ln() - (s as f64).ln();
        let log_term = log_binom + (s - 1) as f64 * lp + (n - s + 1) as f64 * lq;
        s as f64 / (s - 1) as f64 * log_term.exp()
    });
    compensated_sum(terms) / rho
}

/// `E[1 / (S + 1)]` for `S ~ Binomial(n, p)`.
pub fn expected_inverse(n: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    -(((n + 1) as f64) * (-p).ln_1p()).exp_m1() / ((n + 1) as f64 * p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandRates {
    pub exact: f64,
    pub upper: f64,
}

/// Decentralized rate and its closed-form upper bound, both capped at `n - t`.
/// At `t = 1` both equal `(m/M)(1 - M/m)`.
pub fn rate_rand_formula(n: u64, m: u64, cache: f64, rho: f64) -> Result<RandRates> {
    let t = cache * n as f64 / m as f64;
    if t < 1.0 - 1e-12 {
        return Err(Error::TLessThanOne(t.to_string()));
    }
    let cap = (n as f64 - t).max(0.0);
    if (t - 1.0).abs() <= 1e-12 {
        let r = m as f64 / cache * (1.0 - cache / m as f64);
        return Ok(RandRates { exact: r, upper: r });
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParams(format!("rho must lie in (0, 1], got {rho}")));
    }
    let p = cache * rho / m as f64;
    let exact = rand_sum(n, p, rho).min(cap);
    let q = 1.0 - p;
    let upper = if p >= 1.0 {
        0.0
    } else {
        let nf = n as f64;
        let bracket = 1.0 + 3.0 * expected_inverse(n, p)
            - 4.0 * q.powf(nf)
            - 2.5 * nf * p * q.powf(nf - 1.0);
        m as f64 / (cache * rho * rho) * q * bracket
    };
    Ok(RandRates {
        exact,
        upper: upper.min(cap),
    })
}

/// All closed-form rates at one `(n, m, M)`.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub n: u64,
    pub m: u64,
    #[serde(rename = "M")]
    pub cache: RationalValue,
    pub t: RationalValue,
    pub r_det: RationalValue,
    pub r_det_naive: RationalValue,
    pub r_converse: RationalValue,
    pub r_basestation: RationalValue,
    pub rho: Option<f64>,
    pub r_rand_exact: Option<f64>,
    pub r_rand_upper: Option<f64>,
}

pub fn rate_report(n: u64, m: u64, cache: Rational, rho: Option<f64>) -> Result<RateReport> {
    let det = rate_det_formula(n, m, cache)?;
    let rand = match rho {
        Some(r) => Some(rate_rand_formula(n, m, to_f64(&cache), r)?),
        None => None,
    };
    Ok(RateReport {
        n,
        m,
        cache: cache.into(),
        t: t_of(n, m, cache).into(),
        r_det: det.into(),
        r_det_naive: rate_det_naive(n, m, cache)?.into(),
        r_converse: rate_converse(n, m, cache).into(),
        r_basestation: rate_basestation_reference(n, m, cache).into(),
        rho,
        r_rand_exact: rand.map(|r| r.exact),
        r_rand_upper: rand.map(|r| r.upper),
    })
}
