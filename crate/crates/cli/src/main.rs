use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ipg_cli::{capture, cmd_check, cmd_parse, cmd_terminate, emit, ParseArgs};
use ipg_core::engine::EngineOptions;

/// Interval parsing grammars: check, analyse and run them.
#[derive(Parser)]
#[command(name = "ipg", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a grammar and report diagnostics.
    Check {
        grammar: PathBuf,
        /// Print the grammar with every interval filled in.
        #[arg(long)]
        emit_completed: bool,
    },
    /// Run the termination checker and print its report as JSON.
    Terminate {
        grammar: PathBuf,
        /// Report `ms` as 0 so the output is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Parse a file and print its parse tree as JSON.
    Parse {
        grammar: PathBuf,
        input: PathBuf,
        /// Start nonterminal; defaults to the grammar's start.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        no_memo: bool,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_depth: Option<u64>,
        /// Fail on evaluation faults instead of backtracking.
        #[arg(long)]
        strict_eval: bool,
        /// Print invocation counts as a second JSON line.
        #[arg(long)]
        stats: bool,
        /// Log every nonterminal invocation to stderr.
        #[arg(long)]
        trace: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.cmd {
        Cmd::Check { grammar, emit_completed } => capture(|o, e| cmd_check(&grammar, emit_completed, o, e)),
        Cmd::Terminate { grammar, no_timing } => capture(|o, e| cmd_terminate(&grammar, !no_timing, o, e)),
        Cmd::Parse {
            grammar,
            input,
            start,
            no_memo,
            max_depth,
            strict_eval,
            stats,
            trace,
        } => {
            let args = ParseArgs {
                start,
                opts: EngineOptions {
                    memo: !no_memo,
                    max_depth: max_depth.map(|d| d as usize),
                    strict_eval,
                    trace,
                },
                stats,
            };
            capture(|o, e| cmd_parse(&grammar, &input, &args, o, e))
        }
    };
    if emit(&out).is_err() {
        return ExitCode::from(ipg_cli::exit::IO as u8);
    }
    ExitCode::from(out.code as u8)
}
