use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kernelsel::{Config, ConfigError, ExperimentConfig, RunError};
use kernelsel_core::BasisFamily;

#[derive(Debug, Parser)]
#[command(
    name = "kernelsel",
    version,
    about = "Penalized transition-density estimation experiments"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Experiment config; the built-in defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed of every experiment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the `out` key.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for Monte-Carlo replicates.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Experiment section name; defaults to the first one.
    #[arg(long)]
    experiment: Option<String>,
    /// Basis family (`histogram`, `trigonometric`, `poly:<r>`) or `fx/fy`.
    #[arg(long)]
    family: Option<String>,
    /// Sample size; defaults to the largest `n` of the experiment.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte-Carlo risk table over every experiment.
    Table,
    /// True and estimated kernel on a lattice.
    Surface(FitArgs),
    /// Sections at x = x0 and y = y0.
    Sections {
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        y0: Option<f64>,
    },
    /// Contrast and penalty of every candidate model.
    SelectTrace(FitArgs),
}

fn load_config(global: &Global) -> Result<Config, RunError> {
    let mut config = match &global.config {
        Some(path) => Config::parse(&std::fs::read_to_string(path)?)?,
        None => Config::defaults(),
    };
    if let Some(seed) = global.seed {
        for exp in &mut config.experiments {
            exp.seed = seed;
        }
    }
    if let Some(out) = &global.out {
        for exp in &mut config.experiments {
            exp.out = out.clone();
        }
    }
    Ok(config)
}

fn parse_family(text: &str) -> Result<(BasisFamily, BasisFamily), ConfigError> {
    let parse = |s: &str| {
        s.trim()
            .parse::<BasisFamily>()
            .map_err(|e| ConfigError::new("family", e.to_string()))
    };
    match text.split_once('/') {
        Some((fx, fy)) => Ok((parse(fx)?, parse(fy)?)),
        None => {
            let f = parse(text)?;
            Ok((f, f))
        }
    }
}

struct FitTarget {
    experiment: ExperimentConfig,
    family: (BasisFamily, BasisFamily),
    n: usize,
}

fn fit_target(config: &Config, args: &FitArgs) -> Result<FitTarget, RunError> {
    let experiment = match &args.experiment {
        Some(name) => config
            .find(name)
            .ok_or_else(|| ConfigError::new("experiment", format!("no section named `{name}`")))?,
        None => config
            .experiments
            .first()
            .ok_or_else(|| ConfigError::new("experiment", "config has no sections"))?,
    }
    .clone();
    let family = match &args.family {
        Some(text) => parse_family(text)?,
        None => experiment.families[0],
    };
    let n = args
        .n
        .unwrap_or(*experiment.n.last().expect("n list is nonempty"));
    Ok(FitTarget {
        experiment,
        family,
        n,
    })
}

fn run(cli: Cli) -> Result<(), RunError> {
    let config = load_config(&cli.global)?;
    match cli.command {
        Command::Table => {
            let out_dir = config
                .experiments
                .first()
                .map(|e| e.out.clone())
                .ok_or_else(|| ConfigError::new("experiment", "config has no sections"))?;
            let table = kernelsel::run_table(&config, &out_dir)?;
            println!("{}", table.csv.display());
        }
        Command::Surface(args) => {
            let t = fit_target(&config, &args)?;
            let e = &t.experiment;
            let path = kernelsel::export_surface(e, t.family, t.n, e.seed, &e.out)?;
            println!("{}", path.display());
        }
        Command::Sections { fit, x0, y0 } => {
            let t = fit_target(&config, &fit)?;
            let e = &t.experiment;
            let x0 = x0.or(e.x0).unwrap_or(0.5 * (e.domain.x.lo + e.domain.x.hi));
            let y0 = y0.or(e.y0).unwrap_or(0.5 * (e.domain.y.lo + e.domain.y.hi));
            let (px, py) = kernelsel::export_sections(e, t.family, t.n, e.seed, x0, y0, &e.out)?;
            println!("{}\n{}", px.display(), py.display());
        }
        Command::SelectTrace(args) => {
            let t = fit_target(&config, &args)?;
            let e = &t.experiment;
            let path = kernelsel::export_select_trace(e, t.family, t.n, e.seed, &e.out)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
