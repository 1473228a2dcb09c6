//! Exact rational helpers.
//!
//! Cache sizes, rates and geometry comparisons are kept exact; only the
//! decentralized binomial sums are evaluated in floating point.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rat(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

/// Parses `"p/q"`, a decimal such as `"0.4"` / `"1e-3"`, or an integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Config("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad numerator in {s:?}")))?;
        let q: i128 = q
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad denominator in {s:?}")))?;
        if q == 0 {
            return Err(Error::Config(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Config(format!("not a number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let digits = digits.trim_start_matches('0');
    let mut numer: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let scale = exponent - frac.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(Error::Config(format!("exponent out of range in {s:?}")));
    }
    let pow = 10i128.pow(scale.unsigned_abs());
    if negative {
        numer = -numer;
    }
    Ok(if scale >= 0 {
        Rational::from_integer(numer * pow)
    } else {
        Rational::new(numer, pow)
    })
}

/// Exact rational for the shortest decimal representation of `x`.
pub fn from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Config(format!("non-finite number {x}")));
    }
    parse_decimal(&format!("{x}"))
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn floor_int(r: &Rational) -> i128 {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rational) -> i128 {
    r.ceil().to_integer()
}

/// Smallest integer `k >= 0` with `k >= sqrt(2) * x`, for `x >= 0`.
pub fn ceil_sqrt2_times(x: &Rational) -> i128 {
    if !x.is_positive() {
        return 0;
    }
    let target = *x * *x * 2;
    // k^2 >= 2 x^2; start from the float estimate and fix up exactly.
    let mut k = (to_f64(x) * std::f64::consts::SQRT_2).floor() as i128;
    k = k.max(0);
    while int(k * k) < target {
        k += 1;
    }
    while k > 0 && int((k - 1) * (k - 1)) >= target {
        k -= 1;
    }
    k
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// Serializable form of a rational: exact parts plus a float for readers.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RationalValue {
    pub num: String,
    pub den: String,
    pub value: f64,
}

impl RationalValue {
    /// The exact value back as a rational.
    pub fn exact(&self) -> Result<Rational> {
        let parse = |s: &str| {
            s.parse::<i128>()
                .map_err(|_| Error::Config(format!("bad rational component {s:?}")))
        };
        let den = parse(&self.den)?;
        if den == 0 {
            return Err(Error::Config("zero denominator".into()));
        }
        Ok(Rational::new(parse(&self.num)?, den))
    }
}

impl From<&Rational> for RationalValue {
    fn from(r: &Rational) -> Self {
        RationalValue {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            value: to_f64(r),
        }
    }
}

impl From<Rational> for RationalValue {
    fn from(r: Rational) -> Self {
        RationalValue::from(&r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("4/3").unwrap(), rat(4, 3));
        assert_eq!(parse_rational("0.4").unwrap(), rat(2, 5));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn float_round_trip_uses_shortest_decimal() {
        assert_eq!(from_f64(0.4).unwrap(), rat(2, 5));
        assert_eq!(from_f64(1.5).unwrap(), rat(3, 2));
        assert_eq!(from_f64(2.0).unwrap(), int(2));
    }

    #[test]
    fn ceil_sqrt2_is_exact() {
        // sqrt(2) * 1.4 = 1.9799
        assert_eq!(ceil_sqrt2_times(&rat(7, 5)), 2);
        // sqrt(2) * 2 = 2.828
        assert_eq!(ceil_sqrt2_times(&int(2)), 3);
        assert_eq!(ceil_sqrt2_times(&int(0)), 0);
        // sqrt(2) * sqrt(2)/1 is not rational; sqrt(2) * 1 = 1.414
        assert_eq!(ceil_sqrt2_times(&int(1)), 2);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }
}
