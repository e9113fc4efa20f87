//! The `xorsynth` command line.
//!
//! Subcommands read matrices and circuits from a file argument or, when it is
//! absent or `-`, from standard input, and write results to standard output.
//! Diagnostics go to standard error.
//!
//! Exit codes: 0 success, 1 negative verdict (not cancellation-free, does not
//! compute), 2 resource limit (oracle budget, enumeration limit), 64 usage or
//! input error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use xorsynth::bounds;
use xorsynth::cfcheck::{self, CfViolation};
use xorsynth::gen::{self, BrownParams};
use xorsynth::oracle::{self, Mode, OracleConfig, Status};
use xorsynth::synth::{self, Method};
use xorsynth::{BitMatrix, BitVector, Error, LinearCircuit};

mod ratio;

pub use ratio::{ratio_experiment, ratio_row, RatioRow, RatioTable};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

/// Environment variable capping oracle worker threads; `1` makes witnesses reproducible.
pub const THREADS_ENV: &str = "XORSYNTH_THREADS";

#[derive(Parser, Debug)]
#[command(name = "xorsynth", version, about = "Linear XOR circuits over GF(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a matrix.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Synthesize a circuit; SLP on stdout, a report line on stderr.
    Synth(SynthArgs),
    /// Check a circuit property.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Check that a circuit computes a matrix.
    Verify {
        matrix: PathBuf,
        slp: Option<PathBuf>,
    },
    /// Evaluate a circuit on one input vector.
    Eval {
        /// Input bits, x1 first, e.g. 1011.
        #[arg(long)]
        x: String,
        slp: Option<PathBuf>,
    },
    /// Zero some inputs and remove the gates that become trivial.
    Eliminate {
        /// Comma-separated 1-indexed inputs to set to zero.
        #[arg(long, value_delimiter = ',')]
        zero: Vec<usize>,
        slp: Option<PathBuf>,
    },
    /// Exhaustively find a minimum circuit.
    Oracle {
        /// Search cancellation-free circuits only.
        #[arg(long)]
        cf: bool,
        /// Largest gate count to try (default: twice the best synthesized size).
        #[arg(long)]
        budget: Option<usize>,
        matrix: Option<PathBuf>,
    },
    /// Evaluate a lower bound.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Cancellation ratio over seeded random matrices, as CSV.
    Ratio(RatioArgs),
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Sierpinski gasket matrix of order 2^k.
    Sierpinski {
        #[arg(long)]
        k: u32,
    },
    /// Prefix matrix: row 1 is 01...1, row j >= 2 has j leading ones.
    Prefix {
        #[arg(long)]
        n: usize,
    },
    /// Brown K_{3,3}-free graph over F_p^3.
    Brown {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        delta: u64,
    },
    /// Seeded random matrix.
    Random {
        /// Columns.
        #[arg(long)]
        n: usize,
        /// Rows.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    method: String,
    #[arg(long)]
    block_width: Option<usize>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    matrix: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Exit 0 if cancellation-free, 1 otherwise with a witness.
    Cf { slp: Option<PathBuf> },
}

#[derive(Subcommand, Debug)]
enum BoundCommand {
    /// Row-sum lower bound for K_{h+1,k+1}-free matrices.
    Mehlhorn {
        #[arg(long)]
        h: usize,
        #[arg(long)]
        k: usize,
        matrix: Option<PathBuf>,
    },
    /// log2 of the number of circuits with n inputs and m gates.
    Counting {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// Cancellation-free lower bound for the n x n Sierpinski matrix.
    Sierpinski {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args, Debug)]
struct RatioArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<usize>,
}

/// A failure with its exit code; the message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::LimitExceeded { .. } => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        usage(e.to_string())
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn read_source(&mut self, path: Option<&PathBuf>) -> Result<String, Failure> {
        match path {
            Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read {}: {e}", p.display()))),
            _ => {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s)?;
                Ok(s)
            }
        }
    }

    fn matrix(&mut self, path: Option<&PathBuf>) -> Result<BitMatrix, Failure> {
        Ok(BitMatrix::parse(&self.read_source(path)?)?)
    }

    fn circuit(&mut self, path: Option<&PathBuf>) -> Result<LinearCircuit, Failure> {
        Ok(LinearCircuit::parse_slp(&self.read_source(path)?)?)
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { stdin, out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    }
}

fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn dispatch(command: Command, io: &mut Io<'_>) -> CmdResult {
    match command {
        Command::Gen(g) => run_gen(g, io),
        Command::Synth(args) => run_synth(args, io),
        Command::Check(CheckCommand::Cf { slp }) => run_check_cf(slp, io),
        Command::Verify { matrix, slp } => {
            let a = io.matrix(Some(&matrix))?;
            let c = io.circuit(slp.as_ref())?;
            match c.computes(&a) {
                Ok(true) => {
                    writeln!(io.out, "computes=true")?;
                    Ok(EXIT_OK)
                }
                Ok(false) => {
                    writeln!(io.out, "computes=false")?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => {
                    writeln!(io.out, "computes=false")?;
                    writeln!(io.err, "{e}")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Eval { x, slp } => {
            let x: BitVector = x.parse()?;
            let c = io.circuit(slp.as_ref())?;
            writeln!(io.out, "{}", c.evaluate(&x)?)?;
            Ok(EXIT_OK)
        }
        Command::Eliminate { zero, slp } => {
            let c = io.circuit(slp.as_ref())?;
            let zero: BTreeSet<usize> = zero.into_iter().collect();
            let r = c.eliminate(&zero)?;
            write!(io.out, "{}", r.reduced.to_slp())?;
            let names: Vec<String> = r.eliminated.iter().map(|g| format!("t{}", g + 1)).collect();
            writeln!(io.err, "eliminated={} surviving={}", names.join(","), r.reduced.size())?;
            Ok(EXIT_OK)
        }
        Command::Oracle { cf, budget, matrix } => {
            let a = io.matrix(matrix.as_ref())?;
            let mode = if cf { Mode::CancellationFree } else { Mode::General };
            let budget = match budget {
                Some(b) => b,
                None => oracle::default_budget(&a)?,
            };
            let config = OracleConfig::new(mode, budget).threads(threads_from_env());
            let r = oracle::min_circuit_size_with(&a, &config)?;
            match (r.status, r.min_gates, r.circuit) {
                (Status::Found, Some(g), Some(c)) => {
                    writeln!(io.out, "min={g} mode={mode}")?;
                    write!(io.out, "{}", c.to_slp())?;
                    writeln!(io.err, "nodes_expanded={}", r.nodes_expanded)?;
                    Ok(EXIT_OK)
                }
                _ => {
                    writeln!(io.out, "exceeds_budget budget={budget} mode={mode}")?;
                    Ok(EXIT_RESOURCE)
                }
            }
        }
        Command::Bound(b) => {
            let report = match b {
                BoundCommand::Mehlhorn { h, k, matrix } => {
                    let a = io.matrix(matrix.as_ref())?;
                    bounds::mehlhorn_bound(&a, h, k)?
                }
                BoundCommand::Counting { n, m } => bounds::counting_bound(n, m)?,
                BoundCommand::Sierpinski { n } => bounds::sierpinski_bound(n)?,
            };
            writeln!(io.out, "{report}")?;
            Ok(EXIT_OK)
        }
        Command::Ratio(args) => {
            if !(0.0..=1.0).contains(&args.density) {
                return Err(usage(format!("density {} outside [0, 1]", args.density)));
            }
            let table = ratio_experiment(
                args.n,
                args.count,
                args.density,
                args.seed,
                args.budget,
                threads_from_env(),
            )?;
            write!(io.out, "{}", table.to_csv())?;
            Ok(EXIT_OK)
        }
    }
}

fn run_gen(g: GenCommand, io: &mut Io<'_>) -> CmdResult {
    let a = match g {
        GenCommand::Sierpinski { k } => {
            if k > 14 {
                return Err(usage(format!("k = {k} is too large")));
            }
            gen::gen_sierpinski(k)
        }
        GenCommand::Prefix { n } => gen::gen_prefix(n)?,
        GenCommand::Brown { p, delta } => gen::gen_brown(BrownParams::new(p, delta)?),
        GenCommand::Random {
            n,
            m,
            density,
            seed,
        } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(usage(format!("density {density} outside [0, 1]")));
            }
            gen::gen_random(n, m, density, seed)
        }
    };
    write!(io.out, "{}", a.to_text())?;
    Ok(EXIT_OK)
}

fn run_synth(args: SynthArgs, io: &mut Io<'_>) -> CmdResult {
    let method: Method = args.method.parse()?;
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| usage(format!("--method {method} requires {flag}")))
    };
    let report = match method {
        Method::Sierpinski => {
            let k = args
                .k
                .ok_or_else(|| usage("--method sierpinski requires --k"))?;
            synth::synth_sierpinski(k)?
        }
        Method::PrefixCancel => synth::synth_prefix_cancel(need(args.n, "--n")?)?,
        Method::PrefixCf => synth::synth_prefix_cf(need(args.n, "--n")?)?,
        Method::Naive => synth::synth_naive(&io.matrix(args.matrix.as_ref())?)?,
        Method::Greedy => synth::synth_greedy_cse(&io.matrix(args.matrix.as_ref())?)?,
        Method::Lupanov => {
            let a = io.matrix(args.matrix.as_ref())?;
            let b = args
                .block_width
                .unwrap_or_else(|| synth::default_block_width(a.cols()));
            synth::synth_lupanov(&a, b)?
        }
    };
    write!(io.out, "{}", report.circuit.to_slp())?;
    writeln!(io.err, "{report}")?;
    Ok(EXIT_OK)
}

fn describe(v: &CfViolation) -> String {
    let path = |p: &[xorsynth::NodeRef]| {
        p.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" -> ")
    };
    match v {
        CfViolation::SharedTerm {
            gate,
            coordinate,
            paths,
        } => format!(
            "shared-term gate=t{} coordinate=x{coordinate} paths=[{}] [{}]",
            gate + 1,
            path(&paths[0]),
            path(&paths[1])
        ),
        CfViolation::NotMonotone {
            gate,
            upstream,
            coordinate,
        } => format!(
            "not-monotone gate=t{} upstream={upstream} coordinate=x{coordinate}",
            gate + 1
        ),
        CfViolation::CancelledInput { node, coordinate } => {
            format!("cancelled-input node={node} coordinate=x{coordinate}")
        }
    }
}

fn run_check_cf(slp: Option<PathBuf>, io: &mut Io<'_>) -> CmdResult {
    let c = io.circuit(slp.as_ref())?;
    let verdicts = [
        cfcheck::is_cf_disjoint_support(&c),
        cfcheck::is_cf_monotone(&c),
        cfcheck::is_cf_reachability(&c),
    ];
    if verdicts.iter().any(|v| v.is_cf != verdicts[0].is_cf) {
        return Err(Failure {
            code: 70,
            message: "internal error: cancellation-free checkers disagree".into(),
        });
    }
    writeln!(io.out, "cf={}", verdicts[0].is_cf)?;
    for v in verdicts.iter().filter_map(|v| v.witness.as_ref()) {
        writeln!(io.out, "witness {}", describe(v))?;
    }
    Ok(if verdicts[0].is_cf { EXIT_OK } else { EXIT_NEGATIVE })
}
