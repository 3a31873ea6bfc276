use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tubelet::report::{Report, Verdict};
use tubelet::suite::{parse_region, parse_s_grid, run_axb_net, run_suite, Module, SuiteConfig, DEFAULT_SEED};
use tubelet::Error;

#[derive(Parser)]
#[command(
    name = "tubelet",
    version,
    about = "Checks for Jordan algebras, tube-domain kernels and standard subspace nets"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random sample.
    #[arg(long, global = true, env = "TUBELET_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Threshold override, `check.id=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "ID=VALUE")]
    tolerances: Vec<String>,
    /// Grid refinement level, 0 to 3.
    #[arg(long, global = true, default_value_t = 0)]
    refine: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Jordan algebra identities.
    Jordan {
        #[command(subcommand)]
        action: CheckAction,
    },
    /// Cayley transform and kernel covariance.
    Tube {
        #[command(subcommand)]
        action: CheckAction,
    },
    /// Wallach positivity scan, gap witnesses and Riesz integrals.
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Finite-dimensional modular theory.
    Modular {
        #[command(subcommand)]
        action: CheckAction,
    },
    /// Net checks in the ax+b model.
    Axb {
        #[command(subcommand)]
        action: AxbAction,
    },
    /// Net checks in the half-plane model.
    Halfplane {
        #[command(subcommand)]
        action: HalfplaneAction,
    },
    /// The whole suite.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
}

#[derive(Subcommand)]
enum CheckAction {
    Check,
}

#[derive(Subcommand)]
enum KernelAction {
    Scan {
        /// `a:b:step` or comma list of s values.
        #[arg(long)]
        s_grid: Option<String>,
    },
}

#[derive(Subcommand)]
enum AxbAction {
    Net {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Box `[b0,b1]x[t0,t1]` for a region report.
        #[arg(long)]
        region: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameChoice {
    Default,
}

#[derive(Subcommand)]
enum HalfplaneAction {
    Thm54 {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, value_enum, default_value = "default")]
        frame: FrameChoice,
    },
}

#[derive(Subcommand)]
enum VerifyAction {
    All {
        /// Comma-separated module names.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// s values for the Wallach scan.
        #[arg(long)]
        s_grid: Option<String>,
    },
}

fn config(common: &Common) -> Result<SuiteConfig, Error> {
    let mut cfg = SuiteConfig { seed: common.seed, refine: common.refine, ..SuiteConfig::default() };
    for t in &common.tolerances {
        let (id, v) = t.split_once('=').ok_or_else(|| Error::Config(format!("tolerance {t:?} needs ID=VALUE")))?;
        let v: f64 = v.parse().map_err(|e| Error::Config(format!("tolerance {t:?}: {e}")))?;
        cfg.tolerances.insert(id.to_string(), v);
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let mut cfg = config(&cli.common)?;
    let only = |cfg: &mut SuiteConfig, m: Module| cfg.modules = vec![m];
    match &cli.command {
        Command::Jordan { .. } => only(&mut cfg, Module::Jordan),
        Command::Tube { .. } => only(&mut cfg, Module::Tube),
        Command::Modular { .. } => only(&mut cfg, Module::Modular),
        Command::Kernel { action: KernelAction::Scan { s_grid } } => {
            only(&mut cfg, Module::Kernel);
            cfg.s_grid = s_grid.as_deref().map(parse_s_grid).transpose()?;
        }
        Command::Axb { action: AxbAction::Net { s, region } } => {
            let region = region.as_deref().map(parse_region).transpose()?;
            return run_axb_net(&cfg, *s, region.as_ref());
        }
        Command::Halfplane { action: HalfplaneAction::Thm54 { s, frame: FrameChoice::Default } } => {
            only(&mut cfg, Module::Halfplane);
            cfg.halfplane_s = *s;
        }
        Command::Verify { action: VerifyAction::All { only, s_grid } } => {
            if !only.is_empty() {
                cfg.modules = only.iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
            }
            cfg.s_grid = s_grid.as_deref().map(parse_s_grid).transpose()?;
        }
    }
    run_suite(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for r in &report.records {
        let verdict = if r.verdict == Verdict::Pass { "PASS" } else { "FAIL" };
        let metric = r.metric.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
        let note = r.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default();
        println!("{verdict} {:<58} {metric:>11} {:?} {:.1e}{note}", r.id, r.relation, r.threshold);
    }
    println!("{} checks, {} pass, {} fail", report.summary.total, report.summary.pass, report.summary.fail);
    if let Some(path) = &cli.common.report {
        if let Err(e) = report.write(path) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
