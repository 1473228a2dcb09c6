use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::converse::{converse_term, max_l_term, rate_converse};
use super::rates::{rate_det_formula, rate_det_naive, rate_rand_formula, t_of};
use crate::decentral::solve_rho_star;
use crate::error::{Error, Result};
use crate::geometry::{build_clusters, concurrency_cap, reuse_factor};
use crate::model::SystemParams;
use crate::rational::{floor_int, int, rat, to_f64, Rational};

/// Label attached to every constant taken from an order-wise gap table.
pub const ADVISORY: &str = "asymptotic-bound, advisory";

/// `t >= T_OMEGA` is treated as growing `t`.
pub const T_OMEGA: i128 = 10;
/// `n >= N_OMEGA m` is treated as `n` growing faster than `m`.
pub const N_OMEGA: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapMode {
    Det,
    NaiveMulticast,
    Reuse,
    Decentralized,
}

impl FromStr for GapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" => Ok(GapMode::Det),
            "naive" | "naive-multicast" => Ok(GapMode::NaiveMulticast),
            "reuse" => Ok(GapMode::Reuse),
            "decentralized" | "random" => Ok(GapMode::Decentralized),
            _ => Err(Error::Config(format!(
                "unknown gap mode {s:?}; expected det, naive-multicast, reuse or decentralized"
            ))),
        }
    }
}

impl fmt::Display for GapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapMode::Det => "det",
            GapMode::NaiveMulticast => "naive-multicast",
            GapMode::Reuse => "reuse",
            GapMode::Decentralized => "decentralized",
        })
    }
}

/// An exact inequality `lhs <= rhs` asserted by the certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactLink {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn link(name: impl Into<String>, lhs: Rational, rhs: Rational) -> ExactLink {
    ExactLink {
        name: name.into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs <= rhs,
    }
}

fn link_f64(name: impl Into<String>, lhs: f64, rhs: f64) -> ExactLink {
    ExactLink {
        name: name.into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs <= rhs * (1.0 + 1e-9),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapCertificate {
    pub mode: GapMode,
    pub regime: String,
    pub bound: f64,
    pub ratio: f64,
    /// Exact ratio when both sides are rational.
    pub ratio_exact: Option<String>,
    pub slack: f64,
    pub within_bound: bool,
    pub label: &'static str,
    pub achievable: f64,
    pub converse: f64,
    pub links: Vec<ExactLink>,
}

impl GapCertificate {
    pub fn links_hold(&self) -> bool {
        self.links.iter().all(|l| l.holds)
    }
}

/// Row of the centralized gap table for `(n_eff, m, M, t)`.
fn det_row(n_eff: u64, m: u64, cache: Rational, t: Rational) -> (String, Rational) {
    let half = rat(1, 2);
    let t_ratio = t / int(floor_int(&t));
    if cache * int(6) >= int(m as i128) {
        ("M=Theta(m)".into(), int(6))
    } else if cache >= half {
        if t >= int(T_OMEGA) {
            ("t=omega(1), 1/2<=M=o(m)".into(), int(4))
        } else {
            ("n=O(m), t=Theta(1), 1/2<=M=o(m)".into(), int(4) * t_ratio)
        }
    } else if n_eff <= m {
        ("n=O(m), n<=m, M<1/2".into(), int(2))
    } else if n_eff >= N_OMEGA * m {
        ("n=omega(m), M<1/2".into(), int(2) / cache)
    } else {
        ("n=O(m), n>m, M<1/2".into(), t_ratio * int(2) / cache)
    }
}

/// `l* = floor(m / 2M)` clipped to `1..=min(m, n)`.
fn l_star(n: u64, m: u64, cache: Rational) -> u64 {
    let l = floor_int(&(int(m as i128) / (int(2) * cache))).max(1) as u64;
    l.min(m.min(n)).max(1)
}

fn centralized_links(n: u64, m: u64, cache: Rational, det: Rational, converse: Rational) -> Vec<ExactLink> {
    let t = t_of(n, m, cache);
    let floor_t = int(floor_int(&t));
    let ls = l_star(n, m, cache);
    vec![
        link("R(M) <= n/floor(t) - 1", det, int(n as i128) / floor_t - int(1)),
        link("t/floor(t) <= 2", t / floor_t, int(2)),
        link(
            format!("l*={ls}: l* - l* M/floor(m/l*) <= R*_lower"),
            converse_term(ls, m, cache),
            converse,
        ),
        link("R*_lower <= R(M)", converse, det),
    ]
}

fn finish(
    mode: GapMode,
    regime: String,
    bound: f64,
    ratio: f64,
    ratio_exact: Option<Rational>,
    achievable: f64,
    converse: f64,
    links: Vec<ExactLink>,
) -> GapCertificate {
    GapCertificate {
        mode,
        regime,
        bound,
        ratio,
        ratio_exact: ratio_exact.map(|r| r.to_string()),
        slack: bound - ratio,
        within_bound: ratio <= bound,
        label: ADVISORY,
        achievable,
        converse,
        links,
    }
}

/// Classifies the instance into its gap-table row, evaluates the ratio of
/// achievable over lower-bound rate (or upper over achievable throughput for
/// `Reuse`) and asserts the exact inequalities behind the row.
pub fn gap_certificate(params: &SystemParams, mode: GapMode, epsilon: f64) -> Result<GapCertificate> {
    let (n, m, cache) = (params.n() as u64, params.m() as u64, params.cache_size());
    let t = t_of(n, m, cache);
    let det = rate_det_formula(n, m, cache)?;
    let converse = rate_converse(n, m, cache);
    let exact_ratio = |a: Rational, b: Rational| -> (f64, Option<Rational>) {
        if b == int(0) {
            (if a == int(0) { 1.0 } else { f64::INFINITY }, None)
        } else {
            (to_f64(&(a / b)), Some(a / b))
        }
    };
    match mode {
        GapMode::Det => {
            let (regime, bound) = det_row(n, m, cache, t);
            let (ratio, exact) = exact_ratio(det, converse);
            let links = centralized_links(n, m, cache, det, converse);
            Ok(finish(mode, regime, to_f64(&bound), ratio, exact, to_f64(&det), to_f64(&converse), links))
        }
        GapMode::NaiveMulticast => {
            let naive = rate_det_naive(n, m, cache)?;
            let (regime, bound) = if cache < rat(1, 2) && cache * int(6) < int(m as i128) {
                ("M<1/2".to_string(), int(2))
            } else {
                det_row(n, m, cache, t)
            };
            let (ratio, exact) = exact_ratio(naive, converse);
            let mut links = centralized_links(n, m, cache, det, converse);
            links.push(link("R_naive <= m", naive, int(m as i128)));
            Ok(finish(mode, regime, to_f64(&bound), ratio, exact, to_f64(&naive), to_f64(&converse), links))
        }
        GapMode::Reuse => {
            let (_, layout) = build_clusters(params)?;
            let reuse = reuse_factor(params.delta());
            let cap = concurrency_cap(params.delta());
            let gc = layout.gc as u64;
            let tc = t_of(gc, m, cache);
            let rc = rate_det_formula(gc, m, cache)?;
            let r2 = to_f64(&(params.range() * params.range()));
            let n_eff = (std::f64::consts::PI * r2 * n as f64).ceil() as u64;
            let (best, l_arg) = max_l_term(m, cache, n_eff.min(m).max(1));
            let (row, inner) = det_row(n_eff, m, cache, tc);
            let factor = int((reuse * cap) as i128);
            let bound = factor * inner;
            // upper / achievable throughput = K cap R_c / max_l term
            let (ratio, exact) = exact_ratio(factor * rc, best);
            let mut links = vec![
                link("R_c(M) <= gc/floor(t_c) - 1", rc, int(gc as i128) / int(floor_int(&tc)) - int(1)),
                link("t_c/floor(t_c) <= 2", tc / int(floor_int(&tc)), int(2)),
                link(
                    format!("l={l_arg}: l - l M/floor(m/l) <= max_l term"),
                    converse_term(l_arg, m, cache),
                    best,
                ),
            ];
            links.push(link("gc M >= m", int(m as i128), int(gc as i128) * cache));
            let regime = format!("{row} [n -> pi r^2 n = {n_eff}], x K ceil(4(2+D)^2/D^2) = {reuse} x {cap}");
            Ok(finish(mode, regime, to_f64(&bound), ratio, exact, to_f64(&(factor * rc)), to_f64(&best), links))
        }
        GapMode::Decentralized => {
            let tf = to_f64(&t);
            let cache_f = to_f64(&cache);
            let conv = to_f64(&converse);
            let mut links = centralized_links(n, m, cache, det, converse);
            if t == int(1) {
                let r = rate_rand_formula(n, m, cache_f, 1.0)?;
                let ratio = if conv == 0.0 { 1.0 } else { r.exact / conv };
                return Ok(finish(mode, "t=1 (hashing), min{4t, -}".into(), 4.0 * tf, ratio, None, r.exact, conv, links));
            }
            let rho = solve_rho_star(tf, epsilon)?.rho;
            let r = rate_rand_formula(n, m, cache_f, rho)?;
            links.push(link_f64("R_rand <= R_rand_upper", r.exact, r.upper));
            let e2 = (1.0 - epsilon) * (1.0 - epsilon);
            let (regime, bound) = if cache * int(6) >= int(m as i128) {
                ("M=Theta(m)".to_string(), 6.0)
            } else if cache >= rat(1, 2) && t >= int(T_OMEGA) {
                ("t=omega(1), 1/2<=M=o(m)".to_string(), 8.0 / e2)
            } else if cache < rat(1, 2) && n >= N_OMEGA * m {
                ("n=omega(m), M<1/2".to_string(), 4.0 / (cache_f * e2))
            } else {
                let (row, inner) = det_row(n, m, cache, t);
                let fg = (1.0 + f_rho(tf, rho)) / (rho * rho) * to_f64(&inner);
                (format!("otherwise: min{{4t, f_g}} with f_g from {row}"), (4.0 * tf).min(fg))
            };
            let ratio = if conv == 0.0 { 1.0 } else { r.exact / conv };
            Ok(finish(mode, regime, bound, ratio, None, r.exact, conv, links))
        }
    }
}

/// `3/(rho t) - exp(-rho t) (3/(rho t) + 4 + 2.5 rho t)`.
pub fn f_rho(t: f64, rho: f64) -> f64 {
    let x = rho * t;
    3.0 / x - (-x).exp() * (3.0 / x + 4.0 + 2.5 * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, m: usize, cache: Rational) -> SystemParams {
        SystemParams::builder(n, m, cache).build().unwrap()
    }

    #[test]
    fn three_users_optimal() {
        let c = gap_certificate(&params(3, 3, int(2)), GapMode::Det, 0.001).unwrap();
        assert_eq!(c.ratio, 1.0);
        assert_eq!(c.bound, 6.0);
        assert_eq!(c.regime, "M=Theta(m)");
        assert!(c.links_hold());
        let c = gap_certificate(&params(2, 3, int(2)), GapMode::Det, 0.001).unwrap();
        assert_eq!(c.ratio_exact.as_deref(), Some("1"));
    }

    #[test]
    fn large_instances() {
        let c = gap_certificate(&params(10_000, 100, int(1)), GapMode::Det, 0.001).unwrap();
        assert_eq!(c.ratio_exact.as_deref(), Some("99/25"));
        assert_eq!(c.bound, 4.0);
        assert!(c.links_hold());
        let c = gap_certificate(&params(100, 100, int(25)), GapMode::Det, 0.001).unwrap();
        assert_eq!(c.ratio, 3.0);
        assert!(c.within_bound && c.links_hold());
    }

    #[test]
    fn small_cache_rows() {
        let c = gap_certificate(&params(1000, 50, rat(1, 4)), GapMode::Det, 0.001).unwrap();
        assert_eq!(c.regime, "n=omega(m), M<1/2");
        assert_eq!(c.bound, 8.0);
        assert!(c.links_hold());
        let c = gap_certificate(&params(1000, 50, rat(1, 4)), GapMode::NaiveMulticast, 0.001).unwrap();
        assert_eq!(c.bound, 2.0);
        assert!(c.ratio <= c.bound);
        let c = gap_certificate(&params(40, 40, rat(1, 4) * int(4)), GapMode::Det, 0.001).unwrap();
        assert!(c.links_hold());
    }

    #[test]
    fn decentralized_rows() {
        for (n, m, cache) in [(3, 3, int(2)), (100, 50, int(10)), (50, 500, int(20)), (20, 10, rat(3, 4))] {
            let c = gap_certificate(&params(n, m, cache), GapMode::Decentralized, 0.001).unwrap();
            assert!(c.links_hold(), "{c:?}");
            assert!(c.ratio >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn reuse_mode() {
        use crate::model::RateTable;
        let p = SystemParams::builder(64, 4, int(1))
            .range(rat(9, 25))
            .delta(rat(2, 5))
            .rate_table(RateTable::constant(int(1), int(12)).unwrap())
            .build()
            .unwrap();
        let c = gap_certificate(&p, GapMode::Reuse, 0.001).unwrap();
        assert!(c.links_hold());
        assert_eq!(c.ratio_exact.as_deref(), Some("3888"));
        assert!(c.within_bound);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("naive".parse::<GapMode>().unwrap(), GapMode::NaiveMulticast);
        assert!("x".parse::<GapMode>().is_err());
        assert_eq!(GapMode::Reuse.to_string(), "reuse");
    }
}
