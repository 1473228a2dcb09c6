use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Default cap on exhaustively enumerated demand vectors.
pub const ENUMERATION_CAP: usize = 100_000;

/// A request vector: user `u` wants packets `segments[u] .. segments[u] + L' - 1`
/// of file `files[u]`. All indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Demand {
    pub files: Vec<usize>,
    pub segments: Vec<usize>,
}

impl Demand {
    pub fn new(files: Vec<usize>, segments: Vec<usize>) -> Self {
        Demand { files, segments }
    }

    /// Every user starts at packet 0.
    pub fn aligned(files: Vec<usize>) -> Self {
        let segments = vec![0; files.len()];
        Demand { files, segments }
    }

    pub fn users(&self) -> usize {
        self.files.len()
    }

    /// Packet index requested by `user` in round `k`.
    pub fn packet(&self, user: usize, k: usize) -> usize {
        self.segments[user] + k
    }

    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        if self.files.len() != params.n() || self.segments.len() != params.n() {
            return Err(Error::InvalidParams(format!(
                "demand covers {} users, network has {}",
                self.files.len(),
                params.n()
            )));
        }
        let last_start = params.packets() - params.segment_len();
        for (u, (&f, &s)) in self.files.iter().zip(&self.segments).enumerate() {
            if f >= params.m() {
                return Err(Error::InvalidParams(format!(
                    "user {u} requests file {f}, library has {}",
                    params.m()
                )));
            }
            if s > last_start {
                return Err(Error::InvalidParams(format!(
                    "user {u} segment pointer {s} exceeds {last_start}"
                )));
            }
        }
        Ok(())
    }
}

/// Which file vectors to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemandFamily {
    /// All `m^n` vectors when within the cap, otherwise periodic and block vectors.
    Exhaustive,
    /// The `m` cyclic shifts `f_j(u) = (u + j) mod m`.
    Periodic,
    /// The `floor(m/l)` block vectors; block `j` gives users `0..l` files
    /// `jl .. jl + l - 1`, and user `u >= l` repeats the file of user `u mod l`.
    Block(usize),
}

impl std::str::FromStr for DemandFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(DemandFamily::Exhaustive),
            "periodic" => Ok(DemandFamily::Periodic),
            _ => {
                let l = s
                    .strip_prefix("block:")
                    .and_then(|l| l.parse::<usize>().ok())
                    .filter(|&l| l > 0)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "unknown demand family {s:?} (exhaustive | periodic | block:l)"
                        ))
                    })?;
                Ok(DemandFamily::Block(l))
            }
        }
    }
}

/// How segment pointers are attached to each file vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentChoice {
    /// Every combination of pointers (subject to the cap).
    All,
    /// User `u` starts at `(u * L') mod (L - L' + 1)`.
    Staggered,
    Fixed(usize),
}

pub fn periodic_family(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..m)
        .map(|j| (0..n).map(|u| (u + j) % m).collect())
        .collect()
}

pub fn block_family(n: usize, m: usize, l: usize) -> Vec<Vec<usize>> {
    if l == 0 || l > m {
        return Vec::new();
    }
    (0..m / l)
        .map(|j| (0..n).map(|u| j * l + u % l).collect())
        .collect()
}

fn exhaustive_family(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n).map(|_| 0..m).multi_cartesian_product().collect()
}

fn count_within(base: usize, exp: usize, cap: usize) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..exp {
        total = total.checked_mul(base)?;
        if total > cap {
            return None;
        }
    }
    Some(total)
}

/// File vectors for `family`, before segment pointers are attached.
pub fn file_vectors(params: &SystemParams, family: DemandFamily, cap: usize) -> Vec<Vec<usize>> {
    let (n, m) = (params.n(), params.m());
    match family {
        DemandFamily::Exhaustive => match count_within(m, n, cap) {
            Some(_) => exhaustive_family(n, m),
            None => {
                let mut out = periodic_family(n, m);
                for l in 1..=m.min(n) {
                    out.extend(block_family(n, m, l));
                }
                out.into_iter().unique().collect()
            }
        },
        DemandFamily::Periodic => periodic_family(n, m),
        DemandFamily::Block(l) => block_family(n, m, l),
    }
}

fn segment_vectors(params: &SystemParams, choice: SegmentChoice, cap: usize) -> Vec<Vec<usize>> {
    let n = params.n();
    let starts = params.packets() - params.segment_len() + 1;
    match choice {
        SegmentChoice::All if count_within(starts, n, cap).is_some() => {
            (0..n).map(|_| 0..starts).multi_cartesian_product().collect()
        }
        SegmentChoice::All | SegmentChoice::Staggered => {
            vec![(0..n).map(|u| (u * params.segment_len()) % starts).collect()]
        }
        SegmentChoice::Fixed(s) => vec![vec![s.min(starts - 1); n]],
    }
}

/// Worst-case demand set: file vectors crossed with segment pointers,
/// truncated at `cap` demands in total.
pub fn worst_case_demands(
    params: &SystemParams,
    family: DemandFamily,
    segments: SegmentChoice,
    cap: usize,
) -> Vec<Demand> {
    let files = file_vectors(params, family, cap);
    let segs = segment_vectors(params, segments, cap);
    files
        .iter()
        .cartesian_product(segs.iter())
        .take(cap)
        .map(|(f, s)| Demand::new(f.clone(), s.clone()))
        .collect()
}
