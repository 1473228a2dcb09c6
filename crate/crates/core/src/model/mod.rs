//! System parameters, file library, demands and cache containers.

mod cache;
mod demand;
mod library;
mod params;

pub use cache::{budget_bits, CacheContent};
pub use demand::{
    block_family, file_vectors, periodic_family, worst_case_demands, Demand, DemandFamily,
    SegmentChoice, ENUMERATION_CAP,
};
pub use library::{gen_library, Library};
pub use params::{make_params, ParamsBuilder, RateTable, RawConfig, RawNumber, SystemParams};
