//! Closed-form rates, lower bounds, throughput bounds, gap certificates and
//! rate sweeps.

mod converse;
mod gap;
mod rates;
mod sweep;
mod throughput;

pub use converse::{converse_term, max_l_term, rate_converse};
pub use gap::{f_rho, gap_certificate, ExactLink, GapCertificate, GapMode, ADVISORY, N_OMEGA, T_OMEGA};
pub use rates::{
    expected_inverse, rand_sum, rate_basestation_reference, rate_det_formula, rate_det_naive,
    rate_rand_formula, rate_report, t_of, RandRates, RateReport,
};
pub use sweep::{cache_axis, sweep, SweepRow};
pub use throughput::{throughput_bounds, ThroughputBounds};
