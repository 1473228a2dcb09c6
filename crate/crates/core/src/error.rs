use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("the deterministic scheme needs an integer t, got t = {0}")]
    NonIntegerT(String),

    #[error("memory sharing is not applicable: {0}")]
    NotApplicable(String),

    #[error("node {node} is missing subpacket (set {set:?}, j = {j}) of packet {packet} in round {round}")]
    MissingTransmission {
        node: usize,
        round: usize,
        packet: usize,
        set: Vec<usize>,
        j: usize,
    },

    #[error("node {node} decoded packet {packet} incorrectly")]
    DecodeMismatch { node: usize, packet: usize },

    #[error("code length {nsym} exceeds the field size 2^{q}")]
    FieldOverflow { nsym: usize, q: u32 },

    #[error("need {need} distinct symbols, only {have} available")]
    InsufficientSymbols { have: usize, need: usize },

    #[error("symbol index {index} out of range for a code of length {nsym}")]
    SymbolIndex { index: usize, nsym: usize },

    #[error("fixed point x = 1 - exp(-t x) has no positive solution for t = {0}")]
    NoSolution(f64),

    #[error("packet split not admissible: {0}")]
    IndivisibleK(String),

    #[error("node {node} decoded only {distinct} distinct symbols, {deficit} short of K")]
    DecodeFailure {
        node: usize,
        distinct: usize,
        deficit: usize,
    },

    #[error("node {node} collected a hashed system of rank {rank} < {k}")]
    RankDeficient { node: usize, rank: usize, k: usize },

    #[error("node {node} could not cancel interference in a transmission from {sender}")]
    Cancellation { node: usize, sender: usize },

    #[error("no feasible squarelet cluster: {0}")]
    NoFeasibleCluster(String),

    #[error("infeasible transmission: {0}")]
    InfeasibleTransmission(String),

    #[error("throughput undefined for a schedule of zero channel uses")]
    ZeroSlots,

    #[error("rate formula requires t >= 1, got t = {0}")]
    TLessThanOne(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
