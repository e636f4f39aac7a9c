//! Command-line front end for the vector-perturbation SWIPT simulator.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vpsim::error::{Error, Result};
use vpsim::harness::output::{
    joint_distribution_csv, render_sweep, theory_csv, write_text, JointDistributionReport,
    OutputFormat, TheoryReport, TheoryRow,
};
use vpsim::harness::{run_eta_sweep, run_sweep, SimConfig};
use vpsim::precoding::Scheme;
use vpsim::theory::{
    eeh_theory, egamma_lower_bound, estimate_joint_distribution, evp_approximation,
    outage_probability,
};

#[derive(Parser)]
#[command(
    name = "vpsim",
    version,
    about = "Vector-perturbation precoding simulator for SWIPT MU-MISO downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// SER and harvested-power sweep over the transmit-power grid
    Sweep(CommonArgs),
    /// Sweep over the VP-SWIPT blend parameter at one fixed power
    EtaSweep(EtaArgs),
    /// Empirical joint distribution of symbol/offset real parts under VP
    Table1(CommonArgs),
    /// Closed-form performance curves over the power grid
    Theory(TheoryArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Transmit antennas
    #[arg(long = "M")]
    m: Option<usize>,
    /// Single-antenna users
    #[arg(long = "K")]
    k: Option<usize>,
    /// Square QAM order (4, 16, 64, ...)
    #[arg(long = "mod")]
    modulation: Option<u32>,
    /// Modulo base (defaults to 2(sqrt(N)-1)+2 for N-QAM)
    #[arg(long)]
    tau: Option<f64>,
    /// Noise power per user
    #[arg(long)]
    sigma2: Option<f64>,
    /// Lowest transmit power in dB
    #[arg(long = "pmin-db")]
    pmin_db: Option<f64>,
    /// Highest transmit power in dB
    #[arg(long = "pmax-db")]
    pmax_db: Option<f64>,
    /// Power grid step in dB
    #[arg(long = "pstep-db")]
    pstep_db: Option<f64>,
    /// VP-SWIPT blend parameter in [0, 1]
    #[arg(long)]
    eta: Option<f64>,
    /// Comma-separated scheme tags: zf,vp,vp-eh,vp-swipt,eh-ideal
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Monte Carlo trials per grid point
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to the available parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// Output path; omit to print to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct EtaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of evenly spaced eta points on [0, 1]
    #[arg(long = "eta-points")]
    eta_points: Option<usize>,
}

#[derive(Args)]
struct TheoryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Spectral efficiency (bits) for the outage curve
    #[arg(long = "r-bits", default_value_t = 2.0)]
    r_bits: f64,
    /// |c|^2 constant in the outage threshold
    #[arg(long = "c2", default_value_t = 1.0)]
    c_mag2: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn build_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "power step must be positive, got {step}"
        )));
    }
    if hi < lo {
        return Err(Error::InvalidConfig(format!(
            "power range is empty: [{lo}, {hi}]"
        )));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let p = lo + step * i as f64;
        if p > hi + 1e-9 {
            break;
        }
        grid.push(p);
        i += 1;
    }
    Ok(grid)
}

fn resolve_config(args: &CommonArgs, base: SimConfig) -> Result<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            serde_json::from_str(&text)?
        }
        None => base,
    };
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(modulation) = args.modulation {
        cfg.modulation = modulation;
    }
    if args.tau.is_some() {
        cfg.tau = args.tau;
    }
    if let Some(sigma2) = args.sigma2 {
        cfg.sigma2 = sigma2;
    }
    if args.pmin_db.is_some() || args.pmax_db.is_some() || args.pstep_db.is_some() {
        let lo = args.pmin_db.unwrap_or(0.0);
        let hi = args.pmax_db.unwrap_or(lo.max(40.0));
        let step = args.pstep_db.unwrap_or(5.0);
        cfg.p_grid_db = build_grid(lo, hi, step)?;
    }
    if let Some(eta) = args.eta {
        cfg.eta = eta;
    }
    if let Some(tags) = &args.schemes {
        cfg.schemes = tags
            .iter()
            .map(|t| t.parse::<Scheme>())
            .collect::<Result<Vec<_>>>()?;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    Ok(cfg)
}

fn emit(args: &CommonArgs, content: &str) -> Result<()> {
    match &args.out {
        Some(path) => write_text(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_sweep(args: &CommonArgs) -> Result<()> {
    let cfg = resolve_config(args, SimConfig::default())?;
    let result = run_sweep(&cfg)?;
    emit(args, &render_sweep(&result, args.format.into())?)
}

fn cmd_eta_sweep(args: &EtaArgs) -> Result<()> {
    let base = SimConfig {
        p_grid_db: vec![25.0],
        ..SimConfig::default()
    };
    let mut cfg = resolve_config(&args.common, base)?;
    if let Some(n) = args.eta_points {
        if n < 2 {
            return Err(Error::InvalidConfig(
                "eta sweep needs at least 2 grid points".into(),
            ));
        }
        cfg.eta_grid = Some((0..n).map(|i| i as f64 / (n - 1) as f64).collect());
    }
    let result = run_eta_sweep(&cfg)?;
    emit(&args.common, &render_sweep(&result, args.common.format.into())?)
}

fn cmd_table1(args: &CommonArgs) -> Result<()> {
    let cfg = resolve_config(args, SimConfig::default())?;
    cfg.validate()?;
    let cons = cfg.constellation()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let table = estimate_joint_distribution(cfg.m, cfg.k, &cons, cfg.trials, &mut rng)?;
    let report = JointDistributionReport { config: cfg, table };
    let content = match args.format {
        Format::Csv => joint_distribution_csv(&report),
        Format::Json => serde_json::to_string_pretty(&report)?,
    };
    emit(args, &content)
}

fn cmd_theory(args: &TheoryArgs) -> Result<()> {
    let cfg = resolve_config(&args.common, SimConfig::default())?;
    cfg.validate()?;
    let cons = cfg.constellation()?;
    let tau = cfg.resolve_tau(&cons);

    let mut rows = Vec::new();
    let e_gamma = egamma_lower_bound(cfg.m, cfg.k, tau)?;
    rows.push(TheoryRow {
        quantity: "egamma_lower_bound".into(),
        p_db: None,
        value: e_gamma,
    });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let table = estimate_joint_distribution(cfg.m, cfg.k, &cons, cfg.trials, &mut rng)?;
    for &p_db in &cfg.p_grid_db {
        let p = vpsim::harness::db_to_linear(p_db);
        rows.push(TheoryRow {
            quantity: "evp_harvest_per_user".into(),
            p_db: Some(p_db),
            value: evp_approximation(&table, tau, e_gamma, p)?,
        });
        rows.push(TheoryRow {
            quantity: "eeh_harvest_per_user".into(),
            p_db: Some(p_db),
            value: eeh_theory(p, cfg.m, cfg.k)?,
        });
        rows.push(TheoryRow {
            quantity: "outage_probability".into(),
            p_db: Some(p_db),
            value: outage_probability(p, args.r_bits, cfg.m, cfg.k, args.c_mag2)?,
        });
    }
    let report = TheoryReport {
        config: cfg,
        r_bits: args.r_bits,
        c_mag2: args.c_mag2,
        rows,
    };
    let content = match args.common.format {
        Format::Csv => theory_csv(&report),
        Format::Json => serde_json::to_string_pretty(&report)?,
    };
    emit(&args.common, &content)
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::EtaSweep(args) => cmd_eta_sweep(args),
        Command::Table1(args) => cmd_table1(args),
        Command::Theory(args) => cmd_theory(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
