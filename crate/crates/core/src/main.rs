//! Command-line driver for the pinching-antenna Monte Carlo experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pinchsim::benchmarks::{self, SchemeKind};
use pinchsim::harness::{
    self, ExperimentConfig, ParsedConfig, SweepPoint, SweepVariable,
};
use pinchsim::{dbm_to_watts, Position3};

/// Seed used when neither a flag, a config file, nor the environment sets one.
const DEFAULT_SEED: u64 = 42;
const SEED_ENV_VAR: &str = "PINCHSIM_SEED";

#[derive(Parser)]
#[command(
    name = "pinchsim",
    version,
    about = "Monte Carlo sweeps and single-scenario solves for pinching-antenna NOMA downlinks"
)]
struct Cli {
    /// Key-value config file applied before any command-line flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean semantic SE and outage versus transmit power (dBm grid).
    SweepPower(SweepArgs),
    /// Mean semantic SE versus the bit-user QoS floor (bps/Hz grid).
    SweepQos(SweepArgs),
    /// Outage probability versus transmit power (proportional PASS vs CAS).
    Outage(SweepArgs),
    /// Mean semantic SE bucketed by the users' origin-distance ratio.
    DistanceRatio(SweepArgs),
    /// Mean semantic SE for (delta_S, delta_B) phase-precision pairs.
    PhasePrecision(SweepArgs),
    /// Solve one scenario and print the solution as structured text.
    SolveOne(SolveOneArgs),
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    /// Monte Carlo drops per grid point.
    #[arg(long)]
    trials: Option<usize>,
    /// RNG seed (also via the PINCHSIM_SEED environment variable).
    #[arg(long)]
    seed: Option<u64>,
    /// Service-region side length D (m).
    #[arg(long)]
    d: Option<f64>,
    /// Number of radiating points N.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated scalar sweep grid.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Comma-separated delta_S:delta_B pairs (phase-precision sweep).
    #[arg(long)]
    pairs: Option<String>,
    /// Schemes to run: proportional_pass, equal_pass, cas.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Transmit power (dBm) for sweeps that hold it fixed.
    #[arg(long)]
    p_max_dbm: Option<f64>,
    /// Bit-user QoS floor (bps/Hz) for sweeps that hold it fixed.
    #[arg(long)]
    r_b_min: Option<f64>,
    /// Semantic-user phase precision radius (rad).
    #[arg(long)]
    delta_s: Option<f64>,
    /// Bit-user phase precision radius (rad).
    #[arg(long)]
    delta_b: Option<f64>,
    /// Count infeasible drops as zero-rate trials in the means.
    #[arg(long)]
    count_infeasible_as_zero: bool,
    /// Distance-ratio bucket width.
    #[arg(long)]
    ratio_bucket_width: Option<f64>,
    /// Upper edge of the last distance-ratio bucket.
    #[arg(long)]
    ratio_max: Option<f64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveOneArgs {
    /// Semantic user position "x,y" (m).
    #[arg(long = "user-s")]
    user_s: String,
    /// Bit user position "x,y" (m).
    #[arg(long = "user-b")]
    user_b: String,
    /// Scheme: proportional_pass, equal_pass, or cas.
    #[arg(long, default_value = "proportional_pass")]
    scheme: String,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p_max_dbm: Option<f64>,
    #[arg(long)]
    r_b_min: Option<f64>,
    #[arg(long)]
    delta_s: Option<f64>,
    #[arg(long)]
    delta_b: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> pinchsim::Result<()> {
    let from_file = cli.config.is_some();
    let parsed = match &cli.config {
        Some(path) => harness::load_config_file(path)?,
        None => ParsedConfig {
            experiment: base_config()?,
            output: None,
        },
    };
    match cli.command {
        Command::SweepPower(args) => sweep(parsed, from_file, args, SweepVariable::PowerDbm, None),
        Command::Outage(args) => sweep(
            parsed,
            from_file,
            args,
            SweepVariable::PowerDbm,
            Some(vec![SchemeKind::ProportionalPass, SchemeKind::Cas]),
        ),
        Command::SweepQos(args) => sweep(parsed, from_file, args, SweepVariable::QosMinRate, None),
        Command::DistanceRatio(args) => sweep(
            parsed,
            from_file,
            args,
            SweepVariable::DistanceRatio,
            Some(vec![SchemeKind::ProportionalPass]),
        ),
        Command::PhasePrecision(args) => sweep(
            parsed,
            from_file,
            args,
            SweepVariable::PhasePrecision,
            Some(vec![SchemeKind::ProportionalPass]),
        ),
        Command::SolveOne(args) => solve_one(parsed, args),
    }
}

/// Defaults plus the environment seed override.
fn base_config() -> pinchsim::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults();
    cfg.seed = DEFAULT_SEED;
    if let Ok(text) = std::env::var(SEED_ENV_VAR) {
        cfg.seed = text.parse().map_err(|_| {
            pinchsim::Error::InvalidParameter(format!(
                "{SEED_ENV_VAR} must be an unsigned integer, got '{text}'"
            ))
        })?;
    }
    Ok(cfg)
}

fn apply_sweep_args(cfg: &mut ExperimentConfig, args: &SweepArgs) -> pinchsim::Result<()> {
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = args.d {
        cfg.system.region_side = d;
    }
    if let Some(n) = args.n {
        cfg.system.antenna_count = n;
    }
    if let Some(p) = args.p_max_dbm {
        cfg.system.max_power = dbm_to_watts(p);
    }
    if let Some(q) = args.r_b_min {
        cfg.solver.qos_min_rate = q;
    }
    if let Some(v) = args.delta_s {
        cfg.solver.phase_precision_s = v;
    }
    if let Some(v) = args.delta_b {
        cfg.solver.phase_precision_b = v;
    }
    if args.count_infeasible_as_zero {
        cfg.count_infeasible_as_zero = true;
    }
    if let Some(w) = args.ratio_bucket_width {
        cfg.ratio_bucket_width = w;
    }
    if let Some(m) = args.ratio_max {
        cfg.ratio_max = m;
    }
    if let Some(schemes) = &args.schemes {
        cfg.schemes = schemes
            .iter()
            .map(|s| SchemeKind::parse(s))
            .collect::<pinchsim::Result<Vec<_>>>()?;
    }
    if let Some(grid) = &args.grid {
        cfg.grid = grid.iter().map(|&v| SweepPoint::Scalar(v)).collect();
    }
    if let Some(pairs) = &args.pairs {
        cfg.grid = harness::parse_pairs(pairs)?;
    }
    Ok(())
}

fn sweep(
    parsed: ParsedConfig,
    from_file: bool,
    args: SweepArgs,
    variable: SweepVariable,
    default_schemes: Option<Vec<SchemeKind>>,
) -> pinchsim::Result<()> {
    let mut cfg = parsed.experiment;
    let config_file_set_sweep = from_file && cfg.sweep == variable;
    cfg.sweep = variable;
    // command-appropriate grid defaults when neither the config file nor the
    // flags pinned one
    if !config_file_set_sweep {
        cfg.grid = match variable {
            SweepVariable::PowerDbm => (0..=6).map(|k| SweepPoint::Scalar(5.0 * k as f64)).collect(),
            SweepVariable::QosMinRate => [0.1, 0.5, 1.0, 1.5, 2.0]
                .into_iter()
                .map(SweepPoint::Scalar)
                .collect(),
            SweepVariable::PhasePrecision => vec![
                SweepPoint::Pair(0.02, 0.02),
                SweepPoint::Pair(0.02, 100.0),
                SweepPoint::Pair(100.0, 0.02),
                SweepPoint::Pair(100.0, 100.0),
            ],
            SweepVariable::DistanceRatio => Vec::new(),
        };
        if let Some(schemes) = default_schemes {
            cfg.schemes = schemes;
        }
    }
    apply_sweep_args(&mut cfg, &args)?;
    if matches!(variable, SweepVariable::DistanceRatio) {
        cfg.grid = vec![]; // derived from the bucket width at run time
    }
    let records = harness::run_sweep(&cfg)?;
    let out = args.out.or(parsed.output);
    match out {
        Some(path) => harness::write_csv(&path, &records)?,
        None => print!("{}", harness::records_to_csv(&records)),
    }
    Ok(())
}

fn parse_point(text: &str) -> pinchsim::Result<Position3> {
    let (x, y) = text.split_once(',').ok_or_else(|| {
        pinchsim::Error::InvalidParameter(format!("expected 'x,y', got '{text}'"))
    })?;
    let x: f64 = x.trim().parse().map_err(|_| {
        pinchsim::Error::InvalidParameter(format!("bad coordinate '{x}'"))
    })?;
    let y: f64 = y.trim().parse().map_err(|_| {
        pinchsim::Error::InvalidParameter(format!("bad coordinate '{y}'"))
    })?;
    Ok(Position3::on_ground(x, y))
}

fn solve_one(parsed: ParsedConfig, args: SolveOneArgs) -> pinchsim::Result<()> {
    let mut cfg = parsed.experiment;
    if let Some(d) = args.d {
        cfg.system.region_side = d;
    }
    if let Some(n) = args.n {
        cfg.system.antenna_count = n;
    }
    if let Some(p) = args.p_max_dbm {
        cfg.system.max_power = dbm_to_watts(p);
    }
    if let Some(q) = args.r_b_min {
        cfg.solver.qos_min_rate = q;
    }
    if let Some(v) = args.delta_s {
        cfg.solver.phase_precision_s = v;
    }
    if let Some(v) = args.delta_b {
        cfg.solver.phase_precision_b = v;
    }
    let scheme = SchemeKind::parse(&args.scheme)?;
    let user_s = parse_point(&args.user_s)?;
    let user_b = parse_point(&args.user_b)?;
    let sol = benchmarks::solve(
        scheme,
        &user_s,
        &user_b,
        &cfg.system,
        &cfg.coupling,
        &cfg.semantic,
        &cfg.solver,
    )?;
    let fmt_list = |values: &[f64]| {
        values
            .iter()
            .map(|v| format!("{v:.6}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    println!("scheme: {scheme}");
    println!("feasible: {}", sol.feasible);
    println!("iterations: {}", sol.iterations);
    println!("p_s: {}", sol.power_split);
    println!("antenna_xs_m: {}", fmt_list(&sol.antenna_xs));
    println!("betas: {}", fmt_list(&sol.betas));
    println!("r_s_suts_per_s_per_hz: {}", sol.semantic_rate);
    println!("r_b_bps_per_hz: {}", sol.bit_rate);
    println!("r_b_to_s_bps_per_hz: {}", sol.sic_rate);
    Ok(())
}
