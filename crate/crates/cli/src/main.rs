use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sensheaf_cli::{
    export_dot, parse_problem, run_analyze, run_check, run_oracle, to_json_text, CliError,
};

#[derive(Parser)]
#[command(
    name = "sensheaf",
    version,
    about = "Consistency analysis of sensor readings over the simplicial complex of shared variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the maximal consistent sections and report them as JSON
    Analyze(IoArgs),
    /// Report the per-cell consistency verdicts without computing sections
    Check(IoArgs),
    /// Like analyze, but use the exhaustive oracle (small networks only)
    Oracle(IoArgs),
    /// Render the network, readings, and verdicts as Graphviz DOT text
    ExportDot(IoArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Problem document to read; stdin when omitted or "-"
    #[arg(long)]
    input: Option<PathBuf>,

    /// File to write; stdout when omitted or "-"
    #[arg(long)]
    output: Option<PathBuf>,

    /// Cap on the number of cells materialized (default 1,000,000;
    /// overrides the document's options.cell_budget)
    #[arg(long)]
    budget: Option<usize>,

    /// Skip gluing local sections over the maximal vertex sets
    #[arg(long)]
    no_glue: bool,
}

impl Command {
    fn io(&self) -> &IoArgs {
        match self {
            Command::Analyze(io)
            | Command::Check(io)
            | Command::Oracle(io)
            | Command::ExportDot(io) => io,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    let io = command.io();
    let bytes = read_input(&io.input)?;
    let problem = parse_problem(&bytes)?;
    let options = problem.resolve_options(io.budget, io.no_glue);

    let text = match command {
        Command::Analyze(_) => to_json_text(&run_analyze(&problem, options)?)?,
        Command::Check(_) => to_json_text(&run_check(&problem, options)?)?,
        Command::Oracle(_) => to_json_text(&run_oracle(&problem, options)?)?,
        Command::ExportDot(_) => {
            let report = run_analyze(&problem, options)?;
            export_dot(&problem, &report, options.cell_budget)?
        }
    };

    write_output(&io.output, &text)
}

fn read_input(input: &Option<PathBuf>) -> Result<Vec<u8>, CliError> {
    match input {
        Some(path) if path.as_os_str() != "-" => Ok(std::fs::read(path)?),
        _ => {
            let mut bytes = Vec::new();
            std::io::stdin().read_to_end(&mut bytes)?;
            Ok(bytes)
        }
    }
}

fn write_output(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) if path.as_os_str() != "-" => Ok(std::fs::write(path, text)?),
        _ => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
