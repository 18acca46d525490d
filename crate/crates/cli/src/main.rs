use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dspkit::{PaddedPartition, Partition, SRange};
use dspkit_cli::{
    cmd_check_generic, cmd_decide, cmd_nilpotent_check, cmd_orbit_chain, cmd_realize, cmd_reduce, cmd_sample_generic,
    cmd_verify, exit, parse_padded, parse_partition, parse_s_range, read_problem, read_tuple, render_trace, CmdError,
    CmdResult, RangeChoice, RealizeFlags,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "dspkit", version, about = "Deligne–Simpson problem toolkit")]
struct Cli {
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads for the solver; DSPKIT_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct RangeArgs {
    /// Relation sizes checked for genericity.
    #[arg(long, value_name = "MIN:MAX", value_parser = parse_s_range, conflicts_with = "paper_s_range")]
    s_range: Option<SRange>,
    /// Only check relation sizes 1 < s < n.
    #[arg(long)]
    paper_s_range: bool,
}

impl RangeArgs {
    fn choice(self) -> RangeChoice {
        match (self.s_range, self.paper_s_range) {
            (Some(r), _) => RangeChoice::Custom(r),
            (None, true) => RangeChoice::Literal,
            (None, false) => RangeChoice::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide solvability and print the decision with its Ψ trace.
    Decide {
        problem: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        /// Print the Ψ stages to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Construct and verify a witness tuple numerically.
    Realize {
        problem: PathBuf,
        /// Write the witness here instead of stdout; stdout then gets the report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run the solver whatever the decision says.
        #[arg(long)]
        force: bool,
    },
    /// Fill the file's classes with sampled generic eigenvalues.
    SampleGeneric {
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        range: RangeArgs,
        /// Multiplicative flavor: integer that the exponents sum to.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        exponent_sum: i64,
    },
    /// List the relations violated by the file's eigenvalues.
    CheckGeneric {
        problem: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Chain of elementary moves between nilpotent orbits, e.g. `3,1,1 4,1`.
    OrbitChain {
        #[arg(value_parser = parse_padded)]
        from: PaddedPartition,
        #[arg(value_parser = parse_padded)]
        to: PaddedPartition,
    },
    /// Re-verify a tuple file against a problem file.
    Verify { tuple: PathBuf, problem: PathBuf },
    /// Ψ reduction trace only.
    Reduce {
        problem: PathBuf,
        #[arg(long)]
        trace: bool,
    },
    /// Existence of nice nilpotent tuples with these block partitions.
    NilpotentCheck {
        #[arg(required = true, num_args = 2.., value_parser = parse_partition)]
        partitions: Vec<Partition>,
    },
}

fn configure_threads(flag: Option<usize>) -> CmdResult<()> {
    let threads = match std::env::var("DSPKIT_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|e| CmdError { message: format!("DSPKIT_THREADS={v:?}: {e}"), code: exit::INPUT })?,
        ),
        Err(_) => flag,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CmdError { message: e.to_string(), code: exit::INPUT })?;
    }
    Ok(())
}

fn render<T: Serialize>(value: &T, pretty: bool) -> String {
    let text = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) };
    text.expect("output types serialize")
}

fn run(cli: Cli) -> CmdResult<(String, i32)> {
    configure_threads(cli.threads)?;
    let pretty = cli.pretty;
    Ok(match cli.command {
        Command::Decide { problem, range, trace } => {
            let (o, code) = cmd_decide(&read_problem(&problem)?, range.choice())?;
            if trace {
                eprint!("{}", render_trace(&o.decision.trace));
            }
            (render(&o, pretty), code)
        }
        Command::Realize { problem, out: path, seed, force } => {
            let w = cmd_realize(&read_problem(&problem)?, RealizeFlags { seed, force })?;
            match path {
                Some(path) => {
                    std::fs::write(&path, render(&w, pretty) + "\n")
                        .map_err(|e| CmdError { message: format!("{}: {e}", path.display()), code: exit::INPUT })?;
                    (render(&w.report, pretty), exit::OK)
                }
                None => (render(&w, pretty), exit::OK),
            }
        }
        Command::SampleGeneric { problem, seed, range, exponent_sum } => (
            render(&cmd_sample_generic(&read_problem(&problem)?, seed, range.choice(), exponent_sum)?, pretty),
            exit::OK,
        ),
        Command::CheckGeneric { problem, range } => {
            let (o, code) = cmd_check_generic(&read_problem(&problem)?, range.choice())?;
            (render(&o, pretty), code)
        }
        Command::OrbitChain { from, to } => {
            let (o, code) = cmd_orbit_chain(&from, &to)?;
            (render(&o, pretty), code)
        }
        Command::Verify { tuple, problem } => {
            let (o, code) = cmd_verify(&read_tuple(&tuple)?, &read_problem(&problem)?)?;
            (render(&o, pretty), code)
        }
        Command::Reduce { problem, trace } => {
            let t = cmd_reduce(&read_problem(&problem)?)?;
            if trace {
                eprint!("{}", render_trace(&t));
            }
            (render(&t, pretty), exit::OK)
        }
        Command::NilpotentCheck { partitions } => {
            let (o, code) = cmd_nilpotent_check(&partitions)?;
            (render(&o, pretty), code)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            println!("{text}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("dspkit: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
