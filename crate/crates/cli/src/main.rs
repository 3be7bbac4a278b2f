use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ntn_fp_core::sim::{comparison_table, parse_solver_list, run_experiment, write_run, Overrides, ResolvedConfig, RunOptions};
use ntn_fp_core::{parse_config, Error, Preset};

const TOOL: &str = "ntn-fp-sim";

/// Power allocation and user grouping simulator for GEO satellite downlinks.
#[derive(Parser)]
#[command(name = TOOL, version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment and write CSV results.
    Run(RunArgs),
    /// Parse a config and print the resolved values.
    Validate(SelectArgs),
}

#[derive(Args)]
struct SelectArgs {
    /// TOML config file. Without one, `--preset` must be given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated presets (S-SSB, S-MSB, Ka-SSB, Ka-MSB, custom); one
    /// run per preset, overriding the file's preset.
    #[arg(long, value_delimiter = ',')]
    preset: Vec<Preset>,
    /// RNG seed, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated solvers, overriding the file.
    #[arg(long)]
    solvers: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    select: SelectArgs,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Also write every per-RBG solution.
    #[arg(long)]
    dump_solutions: bool,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn read_config(path: Option<&Path>) -> Result<String, Error> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => Ok(String::new()),
    }
}

fn resolve(args: &SelectArgs) -> Result<Vec<ResolvedConfig>, Error> {
    let text = read_config(args.config.as_deref())?;
    let solvers = args.solvers.as_deref().map(parse_solver_list).transpose()?;
    let presets: Vec<Option<Preset>> = if args.preset.is_empty() {
        vec![None]
    } else {
        args.preset.iter().copied().map(Some).collect()
    };
    presets
        .into_iter()
        .map(|preset| {
            parse_config(
                &text,
                &Overrides {
                    preset,
                    seed: args.seed,
                    solvers: solvers.clone(),
                },
            )
        })
        .collect()
}

fn validate(args: &SelectArgs) -> Result<(), Error> {
    for cfg in resolve(args)? {
        println!("# {}", cfg.scenario.name);
        print!("{}", cfg.to_toml());
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let configs = resolve(&args.select)?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let opts = RunOptions {
        dump_solutions: args.dump_solutions,
    };
    let mut outputs = Vec::with_capacity(configs.len());
    for cfg in &configs {
        eprintln!(
            "running {}: {} sweep point(s) x {} drops x {} solver(s)",
            cfg.scenario.name,
            cfg.experiment.sweep_values.len(),
            cfg.scenario.drops,
            cfg.experiment.solvers.len()
        );
        outputs.push(run_experiment(cfg, opts)?);
    }
    let written = write_run(&outputs, &args.out, TOOL, env!("CARGO_PKG_VERSION"))?;

    println!("{:<10} {:>4} {:<16} {:>14} {:>16}", "scenario", "ues", "solver", "mean SE", "mean sum rate");
    for row in comparison_table(&outputs) {
        println!(
            "{:<10} {:>4} {:<16} {:>14.6} {:>16.6e}",
            row.scenario,
            row.ue_count,
            row.solver.label(),
            row.mean_se_bits_s_hz,
            row.mean_sum_rate_bits_s
        );
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{TOOL}: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
