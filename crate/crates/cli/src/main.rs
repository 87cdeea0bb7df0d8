use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qcquiver_cli::{format, run, Command, JobSpec, Options, DEFAULT_MAX_CYCLES, DEFAULT_RAND_SEED};

/// Quasi-coherent sheaves on projective space as quiver representations.
///
/// Inputs are TOML files; a name from the shipped corpus (for example
/// `structure_p1`) may be given instead of a path.
#[derive(Parser, Debug)]
#[command(name = "qcquiver", version)]
struct Cli {
    /// check-qc, closure, is-bundle, serre-cover, vdim-witness, lazard, split-p1,
    /// filter-p1, hill-verify or selftest
    command: String,
    inputs: Vec<String>,
    /// Coefficient field, `Q` or `Fp:<p>`; overrides the field named in the input.
    #[arg(long, value_parser = parse_field)]
    field: Option<qcquiver::Field>,
    #[arg(long, default_value_t = DEFAULT_MAX_CYCLES)]
    max_cycles: usize,
    /// Sections file seeding `closure`.
    #[arg(long, alias = "seed")]
    seed_file: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the JSON report.
    #[arg(long)]
    machine: bool,
    #[arg(long, default_value_t = DEFAULT_RAND_SEED)]
    rand_seed: u64,
}

fn parse_field(s: &str) -> Result<qcquiver::Field, String> {
    format::parse_field(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Some(command) = Command::from_name(&cli.command) else {
        eprintln!("unknown command `{}`", cli.command);
        return ExitCode::from(2);
    };
    let job = JobSpec {
        command,
        inputs: cli.inputs,
        options: Options {
            field: cli.field,
            max_cycles: cli.max_cycles,
            seed_file: cli.seed_file,
            out: cli.out,
            machine: cli.machine,
            rand_seed: cli.rand_seed,
        },
    };
    let report = run(&job);
    let text = if job.options.machine {
        report.machine()
    } else {
        report.human()
    };
    match &job.options.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code as u8)
}
