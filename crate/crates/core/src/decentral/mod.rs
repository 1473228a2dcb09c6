//! Decentralized random caching with MDS-coded symbols, subset-XOR delivery,
//! the fixed point `rho*`, and the random linear hashing scheme.

mod decode;
mod delivery;
mod hashing;
mod montecarlo;
mod placement;
mod rho;

pub use decode::{collect_symbols, decode_collected, decode_random};
pub use delivery::{
    deliver_random, exclusive_set, exclusivity_classes, rate_random_measured, PartLabel,
    RandTransmission,
};
pub use hashing::{
    decode_hash, deliver_hash, place_hash, quotas, rate_hash_measured, scheme_t1, HashPlacement,
    HashRun, HashTransmission, HASH_Q,
};
pub use montecarlo::{monte_carlo, rate_expected_counts, run_random, McRow};
pub use placement::{
    admissible_k, check_library_cached, code_length, per_node_symbols, place_random,
    LibraryCoverage, RandomPlacement, SymbolKey, SymbolLayout,
};
pub use rho::{residual, solve_rho_star, RhoSolution, DEFAULT_EPSILON};
