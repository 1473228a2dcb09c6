use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{from_f64, int, is_integer, parse_rational, Rational};

/// Link rate `C_r` as a step table over the transmission range.
///
/// Entry `(range, rate)` gives the rate for every range up to and including
/// `range`; entries are sorted by range and rates never increase with range.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    steps: Vec<(Rational, Rational)>,
}

impl RateTable {
    pub fn new(mut steps: Vec<(Rational, Rational)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidParams("link-rate table is empty".into()));
        }
        steps.sort_by_key(|a| a.0);
        for (range, rate) in &steps {
            if !range.is_positive() || !rate.is_positive() {
                return Err(Error::InvalidParams(
                    "link-rate table entries must be positive".into(),
                ));
            }
        }
        for pair in steps.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidParams(
                    "duplicate range in link-rate table".into(),
                ));
            }
            if pair[1].1 > pair[0].1 {
                return Err(Error::InvalidParams(
                    "link rate must be non-increasing in the range".into(),
                ));
            }
        }
        Ok(RateTable { steps })
    }

    pub fn constant(range: Rational, rate: Rational) -> Result<Self> {
        RateTable::new(vec![(range, rate)])
    }

    /// `C_r` at range `r`, or `None` beyond the last entry.
    pub fn rate_at(&self, r: &Rational) -> Option<Rational> {
        self.steps
            .iter()
            .find(|(range, _)| range >= r)
            .map(|(_, rate)| *rate)
    }

    pub fn steps(&self) -> &[(Rational, Rational)] {
        &self.steps
    }
}

/// Number that may be written as `"p/q"`, a decimal string, or a JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawNumber {
    Text(String),
    Number(serde_json::Number),
}

impl RawNumber {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            RawNumber::Text(s) => parse_rational(s),
            RawNumber::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(int(i as i128))
                } else if let Some(u) = n.as_u64() {
                    Ok(int(u as i128))
                } else {
                    from_f64(n.as_f64().unwrap_or(f64::NAN))
                }
            }
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        if r.is_integer() {
            RawNumber::Number(serde_json::Number::from(r.to_integer() as i64))
        } else {
            RawNumber::Text(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

/// JSON configuration as written by users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n: u64,
    pub m: u64,
    #[serde(rename = "M")]
    pub cache: RawNumber,
    #[serde(rename = "L")]
    pub packets: u64,
    #[serde(rename = "Lp")]
    pub segment: u64,
    #[serde(rename = "F")]
    pub packet_bits: u64,
    pub r: RawNumber,
    pub delta: RawNumber,
    pub cr: Vec<(RawNumber, RawNumber)>,
    #[serde(default)]
    pub seed: u64,
}

impl RawConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Validated system parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    n: usize,
    m: usize,
    cache: Rational,
    packets: usize,
    segment: usize,
    packet_bits: u64,
    range: Rational,
    delta: Rational,
    rate_table: RateTable,
    seed: u64,
    t: Rational,
}

/// Validates a raw configuration. Rejects `t = Mn/m < 1`.
pub fn make_params(raw: &RawConfig) -> Result<SystemParams> {
    let cache = raw.cache.to_rational()?;
    let range = raw.r.to_rational()?;
    let delta = raw.delta.to_rational()?;
    let steps = raw
        .cr
        .iter()
        .map(|(r, c)| Ok((r.to_rational()?, c.to_rational()?)))
        .collect::<Result<Vec<_>>>()?;
    ParamsBuilder {
        n: raw.n as usize,
        m: raw.m as usize,
        cache,
        packets: raw.packets as usize,
        segment: raw.segment as usize,
        packet_bits: raw.packet_bits,
        range,
        delta,
        rate_table: Some(RateTable::new(steps)?),
        seed: raw.seed,
    }
    .build()
}

impl SystemParams {
    pub fn builder(n: usize, m: usize, cache: Rational) -> ParamsBuilder {
        ParamsBuilder::new(n, m, cache)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        make_params(&RawConfig::from_json(text)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Per-node cache size `M`, in files.
    pub fn cache_size(&self) -> Rational {
        self.cache
    }

    /// Packets per file `L`.
    pub fn packets(&self) -> usize {
        self.packets
    }

    /// Requested segment length `L'`, in packets.
    pub fn segment_len(&self) -> usize {
        self.segment
    }

    /// Bits per packet `F`.
    pub fn packet_bits(&self) -> u64 {
        self.packet_bits
    }

    pub fn packet_bytes(&self) -> usize {
        self.packet_bits.div_ceil(8) as usize
    }

    pub fn range(&self) -> Rational {
        self.range
    }

    pub fn delta(&self) -> Rational {
        self.delta
    }

    pub fn rate_table(&self) -> &RateTable {
        &self.rate_table
    }

    /// `C_r` evaluated at the configured range.
    pub fn link_rate(&self) -> Rational {
        self.rate_table
            .rate_at(&self.range)
            .expect("validated: rate table covers the configured range")
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `t = M n / m`.
    pub fn t(&self) -> Rational {
        self.t
    }

    pub fn t_is_integer(&self) -> bool {
        is_integer(&self.t)
    }

    pub fn t_integer(&self) -> Option<usize> {
        self.t_is_integer().then(|| self.t.to_integer() as usize)
    }

    /// Whether every node hears every other node (`r >= sqrt(2)`).
    pub fn full_range(&self) -> bool {
        self.range * self.range >= int(2)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SystemParams {
            seed,
            ..self.clone()
        }
    }

    /// Same library and link parameters on a sub-network of `n` nodes.
    pub fn with_nodes(&self, n: usize) -> Result<Self> {
        ParamsBuilder {
            n,
            ..ParamsBuilder::from(self)
        }
        .build()
    }

    pub fn with_cache(&self, cache: Rational) -> Result<Self> {
        ParamsBuilder {
            cache,
            ..ParamsBuilder::from(self)
        }
        .build()
    }

    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            n: self.n as u64,
            m: self.m as u64,
            cache: RawNumber::from_rational(&self.cache),
            packets: self.packets as u64,
            segment: self.segment as u64,
            packet_bits: self.packet_bits,
            r: RawNumber::from_rational(&self.range),
            delta: RawNumber::from_rational(&self.delta),
            cr: self
                .rate_table
                .steps()
                .iter()
                .map(|(r, c)| (RawNumber::from_rational(r), RawNumber::from_rational(c)))
                .collect(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParamsBuilder {
    n: usize,
    m: usize,
    cache: Rational,
    packets: usize,
    segment: usize,
    packet_bits: u64,
    range: Rational,
    delta: Rational,
    rate_table: Option<RateTable>,
    seed: u64,
}

impl From<&SystemParams> for ParamsBuilder {
    fn from(p: &SystemParams) -> Self {
        ParamsBuilder {
            n: p.n,
            m: p.m,
            cache: p.cache,
            packets: p.packets,
            segment: p.segment,
            packet_bits: p.packet_bits,
            range: p.range,
            delta: p.delta,
            rate_table: Some(p.rate_table.clone()),
            seed: p.seed,
        }
    }
}

impl ParamsBuilder {
    /// Defaults: one packet per file, `L' = 1`, `F = 48`, full range
    /// `r = 2`, `Delta = 1`, and `C_r = F` bits per channel use.
    pub fn new(n: usize, m: usize, cache: Rational) -> Self {
        ParamsBuilder {
            n,
            m,
            cache,
            packets: 1,
            segment: 1,
            packet_bits: 48,
            range: int(2),
            delta: Rational::one(),
            rate_table: None,
            seed: 0,
        }
    }

    pub fn packets(mut self, l: usize) -> Self {
        self.packets = l;
        self
    }

    pub fn segment(mut self, lp: usize) -> Self {
        self.segment = lp;
        self
    }

    pub fn packet_bits(mut self, f: u64) -> Self {
        self.packet_bits = f;
        self
    }

    pub fn range(mut self, r: Rational) -> Self {
        self.range = r;
        self
    }

    pub fn delta(mut self, delta: Rational) -> Self {
        self.delta = delta;
        self
    }

    pub fn rate_table(mut self, table: RateTable) -> Self {
        self.rate_table = Some(table);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn build(self) -> Result<SystemParams> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 || self.m == 0 || self.packets == 0 || self.segment == 0 {
            return fail("n, m, L and L' must be positive".into());
        }
        if self.packet_bits == 0 || !self.packet_bits.is_multiple_of(8) {
            return fail(format!(
                "F must be a positive multiple of 8, got {}",
                self.packet_bits
            ));
        }
        if !self.cache.is_positive() || self.cache > int(self.m as i128) {
            return fail(format!("need 0 < M <= m, got M = {}", self.cache));
        }
        if self.segment > self.packets {
            return fail(format!(
                "L' = {} exceeds L = {}",
                self.segment, self.packets
            ));
        }
        if !self.range.is_positive() || !self.delta.is_positive() {
            return fail("r and Delta must be positive".into());
        }
        let t = self.cache * int(self.n as i128) / int(self.m as i128);
        if t < Rational::one() {
            return fail(format!("t = Mn/m = {t} < 1"));
        }
        let rate_table = match self.rate_table {
            Some(table) => table,
            None => RateTable::constant(
                self.range.max(int(2)),
                int(self.packet_bits as i128),
            )?,
        };
        if rate_table.rate_at(&self.range).is_none() {
            return fail(format!(
                "link-rate table does not cover r = {}",
                self.range
            ));
        }
        debug_assert!(!t.is_zero());
        Ok(SystemParams {
            n: self.n,
            m: self.m,
            cache: self.cache,
            packets: self.packets,
            segment: self.segment,
            packet_bits: self.packet_bits,
            range: self.range,
            delta: self.delta,
            rate_table,
            seed: self.seed,
            t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn raw(n: u64, m: u64, cache: &str) -> RawConfig {
        RawConfig::from_json(&format!(
            r#"{{"n":{n},"m":{m},"M":"{cache}","L":4,"Lp":1,"F":48,"r":1.5,"delta":0.4,"cr":[[1.5,8]],"seed":7}}"#
        ))
        .unwrap()
    }

    #[test]
    fn three_user_example_is_accepted() {
        let p = make_params(&raw(3, 3, "2")).unwrap();
        assert_eq!(p.t(), int(2));
        assert!(p.t_is_integer());
        assert_eq!(p.t_integer(), Some(2));
        assert_eq!(p.delta(), rat(2, 5));
        assert_eq!(p.link_rate(), int(8));
        assert_eq!(p.seed(), 7);
        assert!(p.full_range());
    }

    #[test]
    fn t_below_one_is_rejected() {
        let err = make_params(&raw(2, 4, "1")).unwrap_err();
        assert!(matches!(err, Error::InvalidParams(msg) if msg.contains("< 1")));
    }

    #[test]
    fn fractional_t_is_flagged() {
        let p = make_params(&raw(2, 3, "2")).unwrap();
        assert_eq!(p.t(), rat(4, 3));
        assert!(!p.t_is_integer());
        assert_eq!(p.t_integer(), None);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(SystemParams::builder(3, 3, int(2)).segment(2).build().is_err());
        assert!(SystemParams::builder(3, 3, int(4)).build().is_err());
        assert!(SystemParams::builder(0, 3, int(1)).build().is_err());
        assert!(SystemParams::builder(3, 3, int(2)).packet_bits(12).build().is_err());
        assert!(SystemParams::builder(3, 3, int(2))
            .delta(int(0))
            .build()
            .is_err());
    }

    #[test]
    fn rate_table_is_non_increasing() {
        let ok = RateTable::new(vec![(rat(1, 2), int(10)), (int(2), int(4))]).unwrap();
        assert_eq!(ok.rate_at(&rat(1, 4)), Some(int(10)));
        assert_eq!(ok.rate_at(&rat(1, 2)), Some(int(10)));
        assert_eq!(ok.rate_at(&int(1)), Some(int(4)));
        assert_eq!(ok.rate_at(&int(3)), None);
        assert!(RateTable::new(vec![(rat(1, 2), int(4)), (int(2), int(10))]).is_err());
        assert!(RateTable::new(vec![]).is_err());
    }

    #[test]
    fn raw_round_trip_keeps_exact_values() {
        let p = make_params(&raw(2, 3, "2")).unwrap();
        let back = make_params(&p.to_raw()).unwrap();
        assert_eq!(p, back);
        let json = serde_json::to_string(&p.to_raw()).unwrap();
        assert_eq!(SystemParams::from_json(&json).unwrap(), p);
    }
}
