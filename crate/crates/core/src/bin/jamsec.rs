use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::json;

use jamsec::analysis;
use jamsec::config::{dbm_to_watts, watts_to_dbm, RatePair, Scenario, SystemConfig};
use jamsec::experiments::{
    self, Artifact, Figure, Manifest, RunOptions, Scale, Sweep, Table, Value, FIG2_COLUMNS, FIG4_COLUMNS,
    FIG6A_COLUMNS, FIG6B_COLUMNS, HEATMAP_COLUMNS, OPTIMUM_COLUMNS, SWEEP_COLUMNS, VALIDATE_COLUMNS,
};
use jamsec::optimizer::{self, Grid, OptResult};
use jamsec::simulator::{self, SimParams};
use jamsec::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;

const ANALYZE_COLUMNS: [&str; 13] = [
    "rt", "rs", "jam_power_w", "jam_power_dbm", "p_co", "p_so", "p_tx", "pi", "term_a", "term_b", "regime",
    "boundary_margin", "region",
];
const OPTIMIZE_COLUMNS: [&str; 10] =
    ["method", "rt", "rs", "pi", "jam_power_w", "p_tx", "region", "bound", "residual", "grid_slack"];
const SIMULATE_COLUMNS: [&str; 14] = [
    "blocks", "warmup", "n_it", "n_dedicated", "n_opportunistic", "p_tx", "p_tx_se", "p_tx_analytic", "p_co",
    "p_co_analytic", "p_so", "p_so_analytic", "mean_harvested_w", "final_energy_j",
];

/// Secure transmission with a wireless-powered friendly jammer: analysis,
/// optimisation and simulation.
#[derive(Debug, Parser)]
#[command(name = "jamsec", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Config file of `key = value` lines; unset keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, applied after the file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    /// Blocks per simulation point.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    blocks: u64,
    /// Grid resolution in bpcu: the brute-force search for optimize and
    /// validate (default 0.01), the heatmaps for figure (default 0.2).
    #[arg(long, global = true)]
    grid_step: Option<f64>,
}

#[derive(Debug, Args)]
struct Design {
    #[arg(long)]
    rt: f64,
    #[arg(long)]
    rs: f64,
    /// Jamming power in dBm; defaults to the least power meeting the secrecy constraint.
    #[arg(long, conflicts_with = "jam_power_watts", allow_hyphen_values = true)]
    jam_power_dbm: Option<f64>,
    #[arg(long)]
    jam_power_watts: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form outage, transmission probability and throughput of one design.
    Analyze(Design),
    /// Throughput-optimal design, checked against the grid search.
    Optimize,
    /// Block-level simulation of one design.
    Simulate {
        #[command(flatten)]
        design: Design,
        /// Write every n-th block to trace.csv (0 = no trace).
        #[arg(long, default_value_t = 0)]
        trace_every: u64,
    },
    /// Optimal design across a range of one config key.
    Sweep {
        /// Config key to vary.
        #[arg(long)]
        param: String,
        /// start:stop:step, or start:stop:count on a log scale.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// linear, db (dBm keys, step in dB) or log.
        #[arg(long, default_value = "linear")]
        scale: String,
    },
    /// Analytic-versus-simulated and solver-versus-grid self-check.
    Validate {
        /// Corrupt the grid search's jamming-cost term; the check must fail.
        #[arg(long)]
        mutate: bool,
    },
    /// Data behind one figure, or `all`.
    Figure { name: String },
}

fn schemas() -> String {
    let line = |name: &str, cols: &[&str]| format!("  {name:<20}{}\n", cols.join(","));
    let mut s = String::from("Output CSV schemas (one header row, `.` decimal separator):\n");
    s += &line("analyze.csv", &ANALYZE_COLUMNS);
    s += &line("optimize.csv", &OPTIMIZE_COLUMNS);
    s += &line("simulate.csv", &SIMULATE_COLUMNS);
    s += &line("trace.csv", &simulator::TRACE_HEADER.split(',').collect::<Vec<_>>());
    s += &line("sweep.csv", &SWEEP_COLUMNS);
    s += &line("validate.csv", &VALIDATE_COLUMNS);
    s += &line("fig2.csv", &FIG2_COLUMNS);
    s += &line("fig3a/3b/5a/5b.csv", &HEATMAP_COLUMNS);
    s += &line("figNx_optimum.csv", &OPTIMUM_COLUMNS);
    s += &line("fig4.csv", &FIG4_COLUMNS);
    s += &line("fig6a.csv", &FIG6A_COLUMNS);
    s += &line("fig6b.csv", &FIG6B_COLUMNS);
    s += "Every run also writes manifest.json (config, options, outputs).\n";
    s += "Powers are in watts unless the column ends in _dbm; rates in bpcu; regions are D1, Dhat, D2.\n";
    s += "Exit codes: 0 ok, 1 usage or config error, 2 validation failure, 3 solver failure.\n";
    s
}

fn load_config(common: &Common) -> jamsec::Result<SystemConfig> {
    let mut cfg = SystemConfig::default();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for kv in &common.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn design_power(scn: &Scenario, d: &Design, rates: RatePair) -> jamsec::Result<f64> {
    match (d.jam_power_dbm, d.jam_power_watts) {
        (Some(dbm), _) => Ok(dbm_to_watts(dbm)),
        (None, Some(w)) => Ok(w),
        (None, None) => analysis::optimal_jamming_power(scn, rates),
    }
}

fn print_table(t: &Table) {
    for row in &t.rows {
        for (c, v) in t.columns.iter().zip(row) {
            println!("{c:>18}  {v}");
        }
        println!();
    }
}

enum Outcome {
    Done,
    ValidationFailed,
}

fn finish(out: &Path, arts: &[Artifact], manifest: Manifest) -> jamsec::Result<Outcome> {
    let paths = experiments::write_outputs(out, arts, manifest)?;
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(Outcome::Done)
}

fn optimize_row(label: &str, r: &OptResult, scn: &Scenario) -> jamsec::Result<Vec<Value>> {
    let rep = r.report(scn)?;
    Ok(vec![
        label.into(),
        r.rates.rt.into(),
        r.rates.rs.into(),
        r.throughput.into(),
        r.jam_power.into(),
        rep.p_tx.into(),
        r.region.label().into(),
        r.asymptotic_bound.unwrap_or(f64::NAN).into(),
        r.residual.into(),
        r.grid_slack.unwrap_or(f64::NAN).into(),
    ])
}

fn run(cli: Cli) -> jamsec::Result<Outcome> {
    let c = &cli.common;
    let cfg = load_config(c)?;
    let scn = Scenario::new(cfg.clone())?;
    let grid_step = c.grid_step.unwrap_or(0.01);
    let opts = RunOptions {
        seed: c.seed,
        blocks: c.blocks,
        grid_step,
        heatmap_step: c.grid_step.unwrap_or(0.2),
    };
    match &cli.command {
        Command::Analyze(d) => {
            let rates = RatePair::new(d.rt, d.rs)?;
            let p_j = design_power(&scn, d, rates)?;
            let (a, b) = (analysis::jamming_cost_ratio(&scn, p_j), analysis::outage_odds(&scn, rates, p_j));
            let regime = analysis::classify_regime(&scn, rates, p_j);
            let mut t = Table::new(&ANALYZE_COLUMNS);
            t.push(vec![
                rates.rt.into(),
                rates.rs.into(),
                p_j.into(),
                watts_to_dbm(p_j).into(),
                analysis::connection_outage(&scn, rates, p_j).into(),
                analysis::secrecy_outage(&scn, rates, p_j).into(),
                analysis::transmission_probability(&scn, rates, p_j).into(),
                analysis::throughput_at(&scn, rates, p_j).into(),
                a.into(),
                b.into(),
                format!("{:?}", regime.kind).as_str().into(),
                regime.boundary_margin.into(),
                analysis::RateRegion::classify(a, b).label().into(),
            ]);
            print_table(&t);
            let mut m = Manifest::new("analyze", &cfg, opts);
            m.details = json!({ "rates": rates, "jam_power_w": p_j });
            finish(&c.out, &[Artifact { name: "analyze".into(), table: t }], m)
        }
        Command::Optimize => {
            let exact = optimizer::solve(&scn)?;
            let grid = optimizer::grid_oracle(&scn, Grid::new(40.0, 40.0, grid_step)?)?;
            let mut t = Table::new(&OPTIMIZE_COLUMNS);
            t.push(optimize_row(exact.path.label(), &exact, &scn)?);
            t.push(optimize_row("grid", &grid, &scn)?);
            let asymptotic = if scn.is_single_antenna() {
                vec![optimizer::asymptotic_single_antenna(&scn)]
            } else {
                vec![optimizer::asymptotic_multi_antenna_high_snr(&scn), optimizer::asymptotic_large_nj(&scn)]
            };
            for r in asymptotic {
                match r {
                    Ok(r) => t.push(optimize_row(r.path.label(), &r, &scn)?),
                    Err(e) => eprintln!("asymptotic design skipped: {e}"),
                }
            }
            print_table(&t);
            let mut m = Manifest::new("optimize", &cfg, opts);
            m.details = json!({ "exact": exact, "grid": grid });
            finish(&c.out, &[Artifact { name: "optimize".into(), table: t }], m)
        }
        Command::Simulate { design, trace_every } => {
            let rates = RatePair::new(design.rt, design.rs)?;
            let p_j = design_power(&scn, design, rates)?;
            let params = SimParams::new(rates, p_j, c.blocks, c.seed).with_trace(*trace_every);
            let run = simulator::run(&scn, &params)?;
            let s = &run.summary;
            let mut t = Table::new(&SIMULATE_COLUMNS);
            t.push(vec![
                s.n_blocks.into(),
                s.warmup_blocks.into(),
                s.n_it.into(),
                s.n_dedicated.into(),
                s.n_opportunistic.into(),
                s.p_tx.value.into(),
                s.p_tx.std_error.into(),
                analysis::transmission_probability(&scn, rates, p_j).into(),
                s.p_co.value.into(),
                analysis::connection_outage(&scn, rates, p_j).into(),
                s.p_so.value.into(),
                analysis::secrecy_outage(&scn, rates, p_j).into(),
                s.mean_harvested_power.into(),
                s.final_energy.into(),
            ]);
            print_table(&t);
            fs::create_dir_all(&c.out)?;
            let mut m = Manifest::new("simulate", &cfg, opts);
            m.details = json!({ "params": params, "summary": s });
            if let Some(trace) = &run.trace {
                let path = c.out.join("trace.csv");
                simulator::write_trace_csv(std::io::BufWriter::new(fs::File::create(&path)?), trace)?;
                m.outputs.push("trace.csv".into());
                eprintln!("wrote {}", path.display());
            }
            finish(&c.out, &[Artifact { name: "simulate".into(), table: t }], m)
        }
        Command::Sweep { param, range, scale } => {
            let sweep = Sweep::parse(param, range, scale.parse::<Scale>()?)?;
            let art = experiments::run_sweep(&cfg, &sweep)?;
            let mut m = Manifest::new("sweep", &cfg, opts);
            m.details = json!({ "sweep": sweep });
            finish(&c.out, &[art], m)
        }
        Command::Validate { mutate } => {
            let report = experiments::validate(&cfg, &opts, *mutate)?;
            for ch in &report.checks {
                println!("{} {} (value {}, limit {}) {}", if ch.passed { "PASS" } else { "FAIL" }, ch.name, ch.value, ch.limit, ch.detail);
            }
            let mut m = Manifest::new("validate", &cfg, opts);
            m.details = json!({ "mutate": mutate, "passed": report.passed() });
            finish(&c.out, &[Artifact { name: "validate".into(), table: report.to_table() }], m)?;
            Ok(if report.passed() { Outcome::Done } else { Outcome::ValidationFailed })
        }
        Command::Figure { name } => {
            let figs: Vec<Figure> = if name == "all" { Figure::ALL.to_vec() } else { vec![name.parse()?] };
            let mut arts = Vec::new();
            for f in &figs {
                arts.extend(experiments::figure(*f, &cfg, &opts)?);
            }
            let mut m = Manifest::new("figure", &cfg, opts);
            m.details = json!({ "figures": figs });
            finish(&c.out, &arts, m)
        }
    }
}

fn main() -> ExitCode {
    let cmd = Cli::command().after_long_help(schemas());
    let cli = match cmd.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => {
            eprintln!("validation failed");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                ExitCode::from(EXIT_SOLVER)
            } else {
                ExitCode::from(EXIT_USAGE)
            }
        }
    }
}
