//! Grid geometry, the protocol interference model, squarelet clustering
//! with spatial reuse, and slot scheduling.

mod cluster;
mod grid;
mod protocol;
mod schedule;

pub use cluster::{build_clusters, concurrency_cap, reuse_factor, verify_coloring, ClusterLayout, Receivers};
pub use grid::{exact_sqrt, GridNetwork};
pub use protocol::{check_protocol_feasible, max_concurrent_near, ActiveLink, Feasibility, Violation};
pub use schedule::{
    clustered_det_transmissions, schedule, throughput_measured, uses_for, PlannedTx, Schedule, Slot,
    SlotLink, SlotRow,
};
