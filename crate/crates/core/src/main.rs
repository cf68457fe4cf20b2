use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use hyperloc::io::{run_command, Command, CommandError, Format, RunOptions};
use hyperloc::morita::Strategy;

#[derive(Parser)]
#[command(name = "hyperloc", version, about = "Localization certificates for hypertoric reductions in characteristic p")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    args: Args,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Validate the input and print the lattice data and walls.
    CheckInput,
    /// Vertices of P_delta, their monomials and N(delta).
    Vertices,
    /// Graded data of the shifted Koszul complex.
    Koszul,
    /// Minimal N over a box of admissible delta and both prime bounds.
    Bound,
    /// Weights obstructed by common roots.
    BadSet,
    /// Certify one weight (--lambda) or list the certified set.
    Certify,
    /// Certified counts over a range of primes.
    ScanPrimes,
    /// Unstable locus over F_q and the generator check.
    StabilityTable,
    /// Re-check a certificate file independently.
    VerifyCert,
    /// Run the internal cross-checks on the input.
    OracleSelftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::CheckInput => Command::CheckInput,
            Cmd::Vertices => Command::Vertices,
            Cmd::Koszul => Command::Koszul,
            Cmd::Bound => Command::Bound,
            Cmd::BadSet => Command::BadSet,
            Cmd::Certify => Command::Certify,
            Cmd::ScanPrimes => Command::ScanPrimes,
            Cmd::StabilityTable => Command::StabilityTable,
            Cmd::VerifyCert => Command::VerifyCert,
            Cmd::OracleSelftest => Command::OracleSelftest,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy)]
enum StrategyArg {
    Direct,
    Chain,
}

#[derive(clap::Args)]
struct Args {
    /// Input file (JSON); `-` reads stdin.
    #[arg(long, global = true, default_value = "-")]
    input: String,
    /// Certification strategy (overrides the input options).
    #[arg(long, global = true, value_enum)]
    strategy: Option<StrategyArg>,
    /// Prime (overrides the input `p`).
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Inclusive range LO..HI; only primes are scanned.
    #[arg(long, global = true, value_parser = parse_range)]
    p_range: Option<(u64, u64)>,
    /// Max-norm of the delta box searched by `bound`.
    #[arg(long, global = true)]
    radius: Option<i64>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on enumerated points (overrides HYPERLOC_GUARD_POINTS).
    #[arg(long, global = true)]
    guard_points: Option<u64>,
    /// Signed weight, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<i64>>,
    /// Largest power in `bad-set`.
    #[arg(long, global = true)]
    a_max: Option<u32>,
    /// Koszul shift m.
    #[arg(long, global = true, allow_hyphen_values = true)]
    shift: Option<i64>,
    /// Field size for stability-table.
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Cap on listed weights or points.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("HI: {e}"))?;
    if lo > hi {
        return Err(format!("LO = {lo} exceeds HI = {hi}"));
    }
    Ok((lo, hi))
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let a = &cli.args;
    let format = match a.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let text = match read_input(&a.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", a.input);
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        strategy: a.strategy.map(|s| match s {
            StrategyArg::Direct => Strategy::Direct,
            StrategyArg::Chain => Strategy::Chain,
        }),
        p: a.p,
        p_range: a.p_range,
        radius: a.radius,
        guard_points: a.guard_points,
        lambda: a.lambda.clone(),
        a_max: a.a_max,
        shift: a.shift,
        q: a.q,
        limit: a.limit,
    };
    let start = Instant::now();
    let outcome = run_command(cli.command.into(), &text, &opts);
    let elapsed = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(mut report) => {
            if a.timing {
                report.timing_ms = Some(elapsed);
            }
            if let Err(e) = emit(&report.render(format), &a.out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(CommandError::Rejected(report)) => {
            let _ = emit(&report.render(format), &a.out);
            eprintln!("error: certificate rejected");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
