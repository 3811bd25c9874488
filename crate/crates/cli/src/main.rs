use clap::{Args, Parser, Subcommand};
use confine_fp::fem::Method;
use confine_fp::potential::{
    check_hypotheses, DEFAULT_BOUNDARY_WINDOW, DEFAULT_HYPOTHESIS_SAMPLES,
};
use confine_fp_cli::commands::{
    hypothesis_report_text, run_fene_sweep, run_solve, ConfigFile, ModelSelection, SolveParams,
    SweepParams, DEFAULT_DE, DEFAULT_ELL,
};
use confine_fp_cli::validate::run_validation;
use confine_fp_cli::seed_from_env;
use std::path::PathBuf;
use std::process::ExitCode;

/// Steady-state Fokker-Planck solver for confinement vector fields on a
/// disk: admissibility checks, constrained solves, shear sweeps and a
/// validation suite.
#[derive(Parser)]
#[command(name = "confine-fp", version, about)]
struct Cli {
    /// Flat key=value configuration file; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit the admissibility hypotheses of a confinement model.
    Check(CheckArgs),
    /// Solve the mean-constrained steady problem and write solution files.
    Solve(SolveArgs),
    /// Sweep the shear rate at fixed De and l, tabulating moment trends.
    FeneSweep(SweepArgs),
    /// Run the validation suite and write its report.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// FENE potential on the disk of radius --l.
    #[arg(long)]
    fene: bool,
    /// Power-law potential (Maxwellian like the boundary distance to --alpha).
    #[arg(long = "power-law")]
    power_law: bool,
    /// Quadratic potential with curvature --gamma0 (smoke tests).
    #[arg(long)]
    quadratic: bool,
    /// Maximum extension for --fene (default 5).
    #[arg(long)]
    l: Option<f64>,
    /// Exponent for --power-law.
    #[arg(long)]
    alpha: Option<f64>,
    /// Curvature for --quadratic.
    #[arg(long)]
    gamma0: Option<f64>,
    /// Planar shear drift.
    #[arg(long)]
    shear: bool,
    /// Co-rotational drift.
    #[arg(long)]
    corotational: bool,
    /// Deborah number (default 10).
    #[arg(long)]
    de: Option<f64>,
    /// Shear rate.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Boundary-grid resolution (default 200).
    #[arg(long)]
    samples: Option<usize>,
    /// Boundary window as a fraction of the radius (default 0.25).
    #[arg(long)]
    window: Option<f64>,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of mesh rings (default 32).
    #[arg(long)]
    rings: Option<usize>,
    /// Prescribed mean of the solution (default 1).
    #[arg(long)]
    rho: Option<f64>,
    /// Constraint method: lagrange or penalty (default lagrange).
    #[arg(long)]
    method: Option<String>,
    /// Penalty parameter for --method penalty (default 1e-8).
    #[arg(long = "eps-pen")]
    eps_pen: Option<f64>,
    /// Solve even when the admissibility hypotheses fail.
    #[arg(long)]
    force: bool,
    /// Output directory (default current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write mesh.csv.
    #[arg(long)]
    dump_mesh: bool,
    /// Also write the assembled matrices and vectors.
    #[arg(long)]
    dump_system: bool,
    /// Emit the summary as JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated shear rates (default 0.1,0.2,0.5,1).
    #[arg(long)]
    gammas: Option<String>,
    /// Deborah number (default 10).
    #[arg(long)]
    de: Option<f64>,
    /// FENE maximum extension (default 5).
    #[arg(long)]
    l: Option<f64>,
    /// Number of mesh rings (default 48).
    #[arg(long)]
    rings: Option<usize>,
    /// Worker pool size for the sweep.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (default current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the trend rows as JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Skip the Monte Carlo cross-oracle (criterion 9).
    #[arg(long)]
    quick: bool,
    /// Directory for report.json and artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
}

enum Failure {
    /// Bad flags or configuration: exit 2.
    Usage(String),
    /// A domain-level failure (hypothesis rejection, solver error): exit 1.
    Domain(String),
}

impl From<confine_fp::Error> for Failure {
    fn from(e: confine_fp::Error) -> Self {
        match e {
            confine_fp::Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Domain(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => match ConfigFile::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ConfigFile::default(),
    };
    match run(cli, &config) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn merge_model(args: &ModelArgs, cfg: &ConfigFile) -> Result<ModelSelection, Failure> {
    let get = |k: &str| cfg.get::<f64>(k).map_err(Failure::Usage);
    let flag = |k: &str| cfg.flag(k).map_err(Failure::Usage);
    Ok(ModelSelection {
        fene: args.fene || flag("fene")?,
        power_law: args.power_law || flag("power-law")?,
        quadratic: args.quadratic || flag("quadratic")?,
        l: args.l.or(get("l")?),
        alpha: args.alpha.or(get("alpha")?),
        gamma0: args.gamma0.or(get("gamma0")?),
        shear: args.shear || flag("shear")?,
        corotational: args.corotational || flag("corotational")?,
        de: args.de.or(get("de")?),
        gamma: args.gamma.or(get("gamma")?),
    })
}

fn run(cli: Cli, cfg: &ConfigFile) -> Result<u8, Failure> {
    match cli.command {
        Command::Check(args) => {
            let selection = merge_model(&args.model, cfg)?;
            let model = selection.build().map_err(Failure::Usage)?;
            let samples = args
                .samples
                .or(cfg.get("samples").map_err(Failure::Usage)?)
                .unwrap_or(DEFAULT_HYPOTHESIS_SAMPLES);
            let window = args
                .window
                .or(cfg.get("window").map_err(Failure::Usage)?)
                .unwrap_or(DEFAULT_BOUNDARY_WINDOW);
            let report = check_hypotheses(&model, samples, window)?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                print!("{}", hypothesis_report_text(&report));
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Solve(args) => {
            let selection = merge_model(&args.model, cfg)?;
            let model = selection.build().map_err(Failure::Usage)?;
            let method = match args
                .method
                .or(cfg.get("method").map_err(Failure::Usage)?)
                .unwrap_or_else(|| "lagrange".to_string())
                .as_str()
            {
                "lagrange" => Method::Lagrange,
                "penalty" | "penalization" => Method::Penalization {
                    epsilon: args
                        .eps_pen
                        .or(cfg.get("eps-pen").map_err(Failure::Usage)?)
                        .unwrap_or(1e-8),
                },
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown method {other:?}; use lagrange or penalty"
                    )))
                }
            };
            let params = SolveParams {
                rings: args
                    .rings
                    .or(cfg.get("rings").map_err(Failure::Usage)?)
                    .unwrap_or(32),
                rho: args.rho.or(cfg.get("rho").map_err(Failure::Usage)?).unwrap_or(1.0),
                method,
                force: args.force || cfg.flag("force").map_err(Failure::Usage)?,
                dump_mesh: args.dump_mesh,
                dump_system: args.dump_system,
            };
            let out_dir = args
                .out
                .or(cfg.get::<String>("out").map_err(Failure::Usage)?.map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            let (sol, summary) = run_solve(&model, &params, &out_dir)?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&summary).expect("summary serializes")
                );
            } else {
                println!(
                    "mass = {:.12}, lambda = {:.3e}, residual = {:.3e}, defect = {:.3e}, Peclet = {:.3}",
                    summary.moments.mass,
                    summary.lambda,
                    summary.residual,
                    summary.defect,
                    summary.peclet_max
                );
                if sol.peclet_max > 2.0 {
                    eprintln!(
                        "warning: element Peclet {:.2} exceeds 2; plain Galerkin results are qualitative",
                        sol.peclet_max
                    );
                }
                println!("wrote solution.csv, summary.json, heatmap.pgm in {}", out_dir.display());
            }
            Ok(0)
        }
        Command::FeneSweep(args) => {
            let gammas_raw = args
                .gammas
                .or(cfg.get("gammas").map_err(Failure::Usage)?)
                .unwrap_or_else(|| "0.1,0.2,0.5,1".to_string());
            let gammas: Vec<f64> = gammas_raw
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Usage(format!("cannot parse --gammas {gammas_raw:?}")))?;
            let params = SweepParams {
                gammas,
                de: args.de.or(cfg.get("de").map_err(Failure::Usage)?).unwrap_or(DEFAULT_DE),
                ell: args.l.or(cfg.get("l").map_err(Failure::Usage)?).unwrap_or(DEFAULT_ELL),
                rings: args
                    .rings
                    .or(cfg.get("rings").map_err(Failure::Usage)?)
                    .unwrap_or(48),
                jobs: args.jobs.or(cfg.get("jobs").map_err(Failure::Usage)?),
            };
            let out_dir = args
                .out
                .or(cfg.get::<String>("out").map_err(Failure::Usage)?.map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            let (rows, warnings) = run_fene_sweep(&params, &out_dir)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&rows).expect("rows serialize")
                );
            } else {
                println!("gamma_dot  q11-q22      q1q2         Peclet");
                for r in &rows {
                    println!(
                        "{:<10} {:<12.6} {:<12.6} {:.3}",
                        r.gamma_dot, r.q11_minus_q22, r.q1q2, r.peclet_max
                    );
                }
                println!("wrote trend.csv and per-rate files in {}", out_dir.display());
            }
            Ok(0)
        }
        Command::Validate(args) => {
            let quick = args.quick || cfg.flag("quick").map_err(Failure::Usage)?;
            let out = args
                .out
                .or(cfg.get::<String>("out").map_err(Failure::Usage)?.map(PathBuf::from));
            let seed = seed_from_env();
            let report = run_validation(quick, seed, out.as_deref(), |c, seconds| {
                println!(
                    "{} {:>2} {:<32} [{:7.2}s] {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    seconds,
                    c.detail
                );
            })?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            }
            if report.all_passed {
                println!("all criteria passed (seed {seed}{})", if quick { ", quick" } else { "" });
                Ok(0)
            } else {
                let first = report
                    .criteria
                    .iter()
                    .find(|c| !c.passed)
                    .expect("some criterion failed");
                eprintln!("criterion {} failed: {}", first.id, first.name);
                Ok(1)
            }
        }
    }
}
