use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use d2d_cache::analysis::GapMode;
use d2d_cache::decentral::{DEFAULT_EPSILON, HASH_Q};
use d2d_cache::experiment::{
    bounds_cmd, default_demand, det_demands, emit, emit_csv, exit_code, gap_cmd, load_config,
    parse_demand, schedule_cmd, simulate_det_cmd, simulate_random_cmd, simulate_t1_cmd, sweep_axis,
    sweep_cmd, to_json, Envelope,
};
use d2d_cache::model::{Demand, DemandFamily, SystemParams};
use d2d_cache::Result;

#[derive(Parser)]
#[command(name = "d2d-cache", version, about = "Coded caching in one-hop D2D networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON parameter file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic placement, coded delivery and decode over a demand set.
    SimulateDet {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "exhaustive")]
        demands: String,
        /// Single demand as 1-based file indices, e.g. 1,2,3.
        #[arg(long)]
        demand: Option<String>,
        /// Transcript file; defaults to <out>.transcript.jsonl.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Monte-Carlo runs of decentralized random caching.
    SimulateRandom {
        #[command(flatten)]
        common: Common,
        #[arg(long = "K", default_value_t = 240)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Uses this rho instead of (1 - epsilon) rho*.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 50)]
        mc_runs: usize,
        #[arg(long)]
        demand: Option<String>,
    },
    /// Random linear hashing scheme.
    SimulateT1 {
        #[command(flatten)]
        common: Common,
        #[arg(long = "K", default_value_t = 12)]
        k: usize,
        #[arg(long, default_value_t = HASH_Q)]
        q: u32,
        #[arg(long, default_value_t = 100)]
        mc_runs: usize,
        #[arg(long)]
        demand: Option<String>,
    },
    /// Closed-form rates, lower bounds and throughput bounds.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Rates over a range of cache sizes.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long)]
        step: Option<String>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Protocol-checked slot plan and throughput.
    Schedule {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        demand: Option<String>,
    },
    /// Gap certificates.
    Gap {
        #[command(flatten)]
        common: Common,
        /// det, naive-multicast, reuse, decentralized or all.
        #[arg(long, default_value = "all")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
}

fn setup(common: &Common) -> Result<SystemParams> {
    let (_, params) = load_config(&common.config)?;
    Ok(match common.seed {
        Some(s) => params.with_seed(s),
        None => params,
    })
}

fn demand_or_default(text: Option<&str>, params: &SystemParams) -> Result<Demand> {
    match text {
        Some(t) => parse_demand(t, params),
        None => Ok(default_demand(params)),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::SimulateDet {
            common,
            demands,
            demand,
            transcript,
        } => {
            let params = setup(&common)?;
            let family: DemandFamily = demands.parse()?;
            let set = det_demands(&params, family, demand.as_deref())?;
            let (report, lines) = simulate_det_cmd(&params, &set)?;
            let passed = report.measured_rate == report.formula_rate;
            let transcript = transcript.or_else(|| {
                common.out.as_ref().map(|o| {
                    let mut s = o.as_os_str().to_owned();
                    s.push(".transcript.jsonl");
                    PathBuf::from(s)
                })
            });
            if let Some(path) = &transcript {
                std::fs::write(path, &lines)?;
            }
            emit(common.out.as_deref(), &to_json(&Envelope::new("simulate-det", &params, passed, report))?)?;
            Ok(passed)
        }
        Command::SimulateRandom {
            common,
            k,
            epsilon,
            rho,
            mc_runs,
            demand,
        } => {
            let params = setup(&common)?;
            let demand = demand_or_default(demand.as_deref(), &params)?;
            let (report, rows) = simulate_random_cmd(&params, &demand, k, epsilon, rho, mc_runs)?;
            emit_csv(common.out.as_deref(), &rows, &Envelope::new("simulate-random", &params, true, report))?;
            Ok(true)
        }
        Command::SimulateT1 {
            common,
            k,
            q,
            mc_runs,
            demand,
        } => {
            let params = setup(&common)?;
            let demand = demand_or_default(demand.as_deref(), &params)?;
            let (report, rows, passed) = simulate_t1_cmd(&params, &demand, k, q, mc_runs)?;
            emit_csv(common.out.as_deref(), &rows, &Envelope::new("simulate-t1", &params, passed, report))?;
            Ok(passed)
        }
        Command::Bounds { common, epsilon } => {
            let params = setup(&common)?;
            let report = bounds_cmd(&params, epsilon)?;
            emit(common.out.as_deref(), &to_json(&Envelope::new("bounds", &params, true, report))?)?;
            Ok(true)
        }
        Command::Sweep {
            common,
            from,
            to,
            step,
            epsilon,
        } => {
            let params = setup(&common)?;
            let axis = sweep_axis(&params, from.as_deref(), to.as_deref(), step.as_deref())?;
            let rows = sweep_cmd(&params, &axis, epsilon)?;
            let meta = serde_json::json!({
                "from": axis.first().map(ToString::to_string),
                "to": axis.last().map(ToString::to_string),
                "points": axis.len(),
                "epsilon": epsilon,
            });
            emit_csv(common.out.as_deref(), &rows, &Envelope::new("sweep", &params, true, meta))?;
            Ok(true)
        }
        Command::Schedule { common, demand } => {
            let params = setup(&common)?;
            let demand = demand_or_default(demand.as_deref(), &params)?;
            let (report, sched, passed) = schedule_cmd(&params, &demand)?;
            emit_csv(common.out.as_deref(), &sched.rows(), &Envelope::new("schedule", &params, passed, report))?;
            Ok(passed)
        }
        Command::Gap {
            common,
            mode,
            epsilon,
        } => {
            let params = setup(&common)?;
            let all = mode == "all";
            let modes = if all {
                vec![GapMode::Det, GapMode::NaiveMulticast, GapMode::Reuse, GapMode::Decentralized]
            } else {
                vec![mode.parse()?]
            };
            let certs = gap_cmd(&params, &modes, epsilon, all)?;
            let passed = certs.iter().all(|c| c.links_hold());
            emit(common.out.as_deref(), &to_json(&Envelope::new("gap", &params, passed, certs))?)?;
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a consistency check failed; see the \"passed\" field of the output");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
