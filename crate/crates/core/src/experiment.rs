//! Experiment runner behind the command-line tool.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    cache_axis, gap_certificate, rate_converse, rate_det_formula, rate_report, sweep, throughput_bounds,
    GapCertificate, GapMode, RateReport, SweepRow, ThroughputBounds,
};
use crate::decentral::{
    admissible_k, monte_carlo, scheme_t1, solve_rho_star, HashRun, McRow, RhoSolution,
};
use crate::det::{memory_share, place_any, run_det, transcript_jsonl, SharingReport};
use crate::error::{Error, Result};
use crate::geometry::{
    build_clusters, clustered_det_transmissions, schedule, throughput_measured, PlannedTx, Schedule,
};
use crate::model::{
    gen_library, make_params, worst_case_demands, Demand, DemandFamily, RawConfig, SegmentChoice,
    SystemParams, ENUMERATION_CAP,
};
use crate::rational::{ceil_int, int, parse_rational, Rational, RationalValue};

/// `git describe` of the build, or `"unknown"`.
pub const GIT_DESCRIBE: &str = match option_env!("D2D_GIT_DESCRIBE") {
    Some(s) => s,
    None => "unknown",
};

/// Exit status for an error: 1 for failed checks, 2 for bad input.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DecodeMismatch { .. }
        | Error::MissingTransmission { .. }
        | Error::Cancellation { .. }
        | Error::InfeasibleTransmission(_) => 1,
        _ => 2,
    }
}

pub fn load_config(path: &Path) -> Result<(RawConfig, SystemParams)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw = RawConfig::from_json(&text)?;
    let params = make_params(&raw)?;
    Ok((raw, params))
}

/// Parses `"1,2,3"` (1-based files) into an aligned demand.
pub fn parse_demand(text: &str, params: &SystemParams) -> Result<Demand> {
    let files = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&f| f >= 1)
                .map(|f| f - 1)
                .ok_or_else(|| Error::Config(format!("bad file index {s:?} in demand")))
        })
        .collect::<Result<Vec<_>>>()?;
    let d = Demand::aligned(files);
    d.validate(params)?;
    Ok(d)
}

/// `f_u = u mod m`, aligned.
pub fn default_demand(params: &SystemParams) -> Demand {
    Demand::aligned((0..params.n()).map(|u| u % params.m()).collect())
}

/// Provenance embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T> {
    pub command: String,
    pub seed: u64,
    pub git_describe: &'static str,
    pub config: RawConfig,
    pub passed: bool,
    pub result: T,
}

impl<T> Envelope<T> {
    pub fn new(command: &str, params: &SystemParams, passed: bool, result: T) -> Self {
        Envelope {
            command: command.into(),
            seed: params.seed(),
            git_describe: GIT_DESCRIBE,
            config: params.to_raw(),
            passed,
            result,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `out`, or stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// CSV to `out` plus the envelope in `<out>.meta.json`; without `out`, the
/// CSV goes to stdout and the envelope is dropped.
pub fn emit_csv<R: Serialize, T: Serialize>(out: Option<&Path>, rows: &[R], meta: &Envelope<T>) -> Result<()> {
    emit(out, &csv_string(rows)?)?;
    if let Some(p) = out {
        fs::write(meta_path(p), to_json(meta)?)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DetReport {
    pub t: RationalValue,
    pub memory_sharing: Option<SharingReport>,
    pub demands_checked: usize,
    pub measured_rate: RationalValue,
    pub formula_rate: RationalValue,
    pub converse: RationalValue,
    pub worst_demand: Demand,
    pub transmissions: usize,
}

/// Placement, delivery and byte-exact decode over a demand set; returns the
/// report and the transcript of the worst demand.
pub fn simulate_det_cmd(params: &SystemParams, demands: &[Demand]) -> Result<(DetReport, String)> {
    if demands.is_empty() {
        return Err(Error::Config("empty demand set".into()));
    }
    let library = gen_library(params, params.seed());
    let placement = place_any(params, &library)?;
    let runs = demands
        .par_iter()
        .map(|d| run_det(params, &library, &placement, d))
        .collect::<Result<Vec<_>>>()?;
    let worst = runs
        .iter()
        .reduce(|a, b| if b.rate > a.rate { b } else { a })
        .expect("non-empty");
    let (n, m, cache) = (params.n() as u64, params.m() as u64, params.cache_size());
    let report = DetReport {
        t: params.t().into(),
        memory_sharing: memory_share(params).ok().map(|s| s.report()),
        demands_checked: runs.len(),
        measured_rate: worst.rate.into(),
        formula_rate: rate_det_formula(n, m, cache)?.into(),
        converse: rate_converse(n, m, cache).into(),
        worst_demand: worst.demand.clone(),
        transmissions: worst.transmissions.len(),
    };
    Ok((report, transcript_jsonl(&worst.transmissions)?))
}

pub fn det_demands(params: &SystemParams, family: DemandFamily, demand: Option<&str>) -> Result<Vec<Demand>> {
    match demand {
        Some(text) => Ok(vec![parse_demand(text, params)?]),
        None => Ok(worst_case_demands(params, family, SegmentChoice::All, ENUMERATION_CAP)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomReport {
    pub k_requested: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub rho_solution: Option<RhoSolution>,
    pub rho: f64,
    pub runs: usize,
    pub decoded_runs: usize,
    pub success_frequency: f64,
    pub mean_measured_rate: f64,
    pub formula: RateReport,
}

pub fn simulate_random_cmd(
    params: &SystemParams,
    demand: &Demand,
    k: usize,
    epsilon: f64,
    rho: Option<f64>,
    runs: usize,
) -> Result<(RandomReport, Vec<McRow>)> {
    let solution = match rho {
        Some(_) => None,
        None => Some(solve_rho_star(crate::rational::to_f64(&params.t()), epsilon)?),
    };
    let rho = rho.or(solution.map(|s| s.rho)).expect("one of the two is set");
    let k_adj = admissible_k(params, k);
    let seeds: Vec<u64> = (0..runs as u64).map(|i| params.seed().wrapping_add(i)).collect();
    let rows = monte_carlo(params, demand, k_adj, rho, &seeds)?;
    let decoded = rows.iter().filter(|r| r.decoded).count();
    let mean = rows.iter().map(|r| r.measured_rate).sum::<f64>() / rows.len().max(1) as f64;
    let report = RandomReport {
        k_requested: k,
        k: k_adj,
        rho_solution: solution,
        rho,
        runs,
        decoded_runs: decoded,
        success_frequency: decoded as f64 / runs.max(1) as f64,
        mean_measured_rate: mean,
        formula: rate_report(params.n() as u64, params.m() as u64, params.cache_size(), Some(rho))?,
    };
    Ok((report, rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct T1Report {
    #[serde(rename = "K")]
    pub k: usize,
    pub q: u32,
    pub runs: usize,
    pub decoded_runs: usize,
    pub measured_rate: RationalValue,
    pub expected_rate: RationalValue,
}

/// Hashing scheme over `runs` seeds; passes when every run sends exactly
/// `n - t` packets' worth of symbols.
pub fn simulate_t1_cmd(
    params: &SystemParams,
    demand: &Demand,
    k: usize,
    q: u32,
    runs: usize,
) -> Result<(T1Report, Vec<HashRun>, bool)> {
    let rows = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = params.seed().wrapping_add(i);
            let library = gen_library(params, seed);
            scheme_t1(params, &library, demand, k, q, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = int(params.n() as i128) - params.t();
    let passed = rows.iter().all(|r| r.rate_exact == expected);
    let measured = rows.first().map(|r| r.rate_exact).unwrap_or(expected);
    let report = T1Report {
        k,
        q,
        runs,
        decoded_runs: rows.iter().filter(|r| r.decoded).count(),
        measured_rate: measured.into(),
        expected_rate: expected.into(),
    };
    Ok((report, rows, passed))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub rates: RateReport,
    pub rho_solution: Option<RhoSolution>,
    pub throughput: Option<ThroughputBounds>,
    pub throughput_error: Option<String>,
}

pub fn bounds_cmd(params: &SystemParams, epsilon: f64) -> Result<BoundsReport> {
    let t = crate::rational::to_f64(&params.t());
    let solution = if params.t() > int(1) {
        Some(solve_rho_star(t, epsilon)?)
    } else {
        None
    };
    let rho = solution.map(|s| s.rho).or((params.t() == int(1)).then_some(1.0));
    let rates = rate_report(params.n() as u64, params.m() as u64, params.cache_size(), rho)?;
    let (throughput, throughput_error) = match throughput_bounds(params) {
        Ok(b) => (Some(b), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(BoundsReport {
        rates,
        rho_solution: solution,
        throughput,
        throughput_error,
    })
}

/// Cache axis for a sweep; defaults run from the smallest integer `M` with
/// `t >= 1` up to `m` in unit steps.
pub fn sweep_axis(params: &SystemParams, from: Option<&str>, to: Option<&str>, step: Option<&str>) -> Result<Vec<Rational>> {
    let (n, m) = (params.n() as i128, params.m() as i128);
    let from = match from {
        Some(s) => parse_rational(s)?,
        None => int(ceil_int(&(int(m) / int(n))).max(1)),
    };
    let to = match to {
        Some(s) => parse_rational(s)?,
        None => int(m),
    };
    let step = match step {
        Some(s) => parse_rational(s)?,
        None => int(1),
    };
    if step <= int(0) || from <= int(0) || to > int(m) || from > to {
        return Err(Error::Config(format!(
            "sweep axis needs 0 < from <= to <= m and step > 0, got {from}..{to} step {step}"
        )));
    }
    Ok(cache_axis(from, to, step))
}

pub fn sweep_cmd(params: &SystemParams, caches: &[Rational], epsilon: f64) -> Result<Vec<SweepRow>> {
    sweep(params.n() as u64, params.m() as u64, caches, epsilon)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    pub clustered: bool,
    pub gc: Option<usize>,
    pub demand: Demand,
    pub channel_uses: u64,
    pub phase_len: Option<u64>,
    pub reuse_factor: u64,
    pub rounding_surplus: RationalValue,
    pub max_concurrency: usize,
    pub concurrency_cap: u64,
    pub throughput_measured: RationalValue,
    pub throughput_formula: Option<RationalValue>,
    pub throughput_upper: Option<RationalValue>,
    pub slots: usize,
}

/// Runs the deterministic scheme (inside clusters when `r < sqrt(2)`) and
/// schedules it under the protocol model. Passes when the measured
/// throughput matches the closed form (zero rounding surplus) and stays
/// within the upper bound.
pub fn schedule_cmd(params: &SystemParams, demand: &Demand) -> Result<(ScheduleReport, Schedule, bool)> {
    let library = gen_library(params, params.seed());
    let (sched, gc) = if params.full_range() {
        let placement = place_any(params, &library)?;
        let run = run_det(params, &library, &placement, demand)?;
        let txs: Vec<PlannedTx> = run.transmissions.iter().map(PlannedTx::from).collect();
        (schedule(params, &txs, None)?, None)
    } else {
        let (grid, layout) = build_clusters(params)?;
        let txs = clustered_det_transmissions(params, &library, &grid, &layout, demand)?;
        (schedule(params, &txs, Some((&grid, &layout)))?, Some(layout.gc))
    };
    let measured = throughput_measured(params, sched.channel_uses)?;
    let bounds = throughput_bounds(params)?;
    let mut passed = sched.max_concurrency as u64 <= sched.concurrency_cap;
    if let Some(upper) = bounds.upper_exact {
        passed &= measured <= upper;
    }
    if sched.surplus == int(0) {
        if let Some(formula) = bounds.achievable_exact {
            passed &= measured == formula;
        }
    }
    let report = ScheduleReport {
        clustered: gc.is_some(),
        gc,
        demand: demand.clone(),
        channel_uses: sched.channel_uses,
        phase_len: sched.phase_len,
        reuse_factor: sched.reuse,
        rounding_surplus: sched.surplus.into(),
        max_concurrency: sched.max_concurrency,
        concurrency_cap: sched.concurrency_cap,
        throughput_measured: measured.into(),
        throughput_formula: bounds.achievable,
        throughput_upper: bounds.upper,
        slots: sched.slots.len(),
    };
    Ok((report, sched, passed))
}

/// Certificates for `modes`; modes that do not apply to the instance (for
/// example reuse with full range) are skipped when `all` is requested.
pub fn gap_cmd(params: &SystemParams, modes: &[GapMode], epsilon: f64, all: bool) -> Result<Vec<GapCertificate>> {
    let mut out = Vec::new();
    for &mode in modes {
        match gap_certificate(params, mode, epsilon) {
            Ok(c) => out.push(c),
            Err(Error::NotApplicable(_) | Error::NoFeasibleCluster(_) | Error::NoSolution(_)) if all => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
