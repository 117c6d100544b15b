use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use irs_apg::apg_solve;
use irs_apg::scenario::dump::{read_dump, write_dump};
use irs_apg_cli::experiments::{metadata, start_seed};
use irs_apg_cli::{run, trace_table, ExperimentKind, ExperimentSpec, HarnessError, Result};

#[derive(Parser)]
#[command(name = "irs-apg", version, about = "IRS-assisted multigroup multicast experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Flat `key = value` config file; every key is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment: convergence, sweep-pt, sweep-m or runtime.
    Run {
        experiment: ExperimentKind,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        realizations: Option<usize>,
        /// Worker threads for independent realizations.
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Write the channels of one realization to a binary file.
    Dump {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        realization: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a dumped realization and write its iteration trace.
    Solve {
        #[arg(long)]
        channels: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_spec(kind: ExperimentKind, args: &SpecArgs) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::defaults(kind);
    if let Some(path) = &args.config {
        spec.apply_text(&read_text(path)?)?;
    }
    for kv in &args.overrides {
        spec.apply_override(kv)?;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| io_error(path, source))
}

fn io_error(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            experiment,
            spec,
            out,
            realizations,
            parallel,
        } => {
            let mut spec = load_spec(experiment, &spec)?;
            if let Some(r) = realizations {
                spec.realizations = r;
            }
            if let Some(p) = parallel {
                spec.parallel = p;
            }
            run(&spec)?.write_to(&out)
        }
        Command::Dump { spec, realization, out } => {
            let spec = load_spec(ExperimentKind::Convergence, &spec)?;
            spec.validate()?;
            let ch = spec.scenario.generate(spec.seed, realization)?;
            let file = File::create(&out).map_err(|e| io_error(&out, e))?;
            write_dump(BufWriter::new(file), &ch, spec.seed, realization)?;
            Ok(())
        }
        Command::Solve { channels, spec, out } => {
            let spec = load_spec(ExperimentKind::Convergence, &spec)?;
            let file = File::open(&channels).map_err(|e| io_error(&channels, e))?;
            let dump = read_dump(BufReader::new(file))?;
            let mut opts = spec.solver_at(spec.pt_dbm);
            opts.seed = start_seed(dump.seed, dump.realization);
            let trace = apg_solve(&dump.channels, &opts).map_err(|source| HarnessError::Solve {
                realization: dump.realization,
                source,
            })?;
            let mut meta = metadata(&spec);
            meta.push(format!(
                "channels={} dump_seed={} dump_realization={} termination={}",
                channels.display(),
                dump.seed,
                dump.realization,
                trace.termination.as_str()
            ));
            trace_table(&trace, meta).write_to(&out)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("irs-apg: error: {e}");
            ExitCode::FAILURE
        }
    }
}
