//! `sparsim`: run circuit files and the factoring and discrete-log benchmarks.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sparsim_core::dense::{compare, run_dense, MAX_DENSE_QUBITS};
use sparsim_core::{
    parse_circuit, run_program, ParallelConfig, RunStats, SimConfig, SparseWavefunction,
};
use sparsim_shor::numtheory::{mod_pow, primitive_root};
use sparsim_shor::{
    dlog, factor, run_dlog, run_factoring, Adder, DlogInstance, FactoringInstance, ShorError,
    Uncompute,
};

#[derive(Parser)]
#[command(name = "sparsim", version, about = "Sparse state-vector quantum simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit file and print its measurement record.
    Run {
        file: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
        /// Print the final state, one basis label per line.
        #[arg(long)]
        dump_final: bool,
        /// Replay the circuit on the dense simulator and compare.
        #[arg(long, hide = true)]
        oracle_check: bool,
    },
    /// Factor an odd composite with Shor's algorithm.
    Factor {
        modulus: u64,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        shor: ShorArgs,
        /// Base of the modular exponentiation; must have maximal order.
        #[arg(long)]
        generator: Option<u64>,
    },
    /// Compute a discrete logarithm modulo a prime.
    Dlog {
        #[arg(long)]
        prime: u64,
        /// Generator of the group; the smallest primitive root if omitted.
        #[arg(long)]
        base: Option<u64>,
        #[arg(long)]
        target: u64,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        shor: ShorArgs,
    },
    /// Repeat single runs over a list of instances and write CSV rows.
    Bench {
        #[arg(long, value_enum, default_value = "factoring")]
        suite: Suite,
        /// Moduli for factoring or primes for dlog.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<u64>>,
        #[arg(long, default_value_t = 30)]
        reps: u32,
        /// Output file; CSV goes to stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exponent used to build dlog targets.
        #[arg(long, default_value_t = 7)]
        exponent: u64,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        shor: ShorArgs,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Suite {
    Factoring,
    Dlog,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Minimum queue length (exclusive) for a parallel pass.
    #[arg(long, default_value_t = 64)]
    par_min_queue: usize,
    /// Minimum state size (exclusive) for a parallel pass.
    #[arg(long, default_value_t = 4096)]
    par_min_states: usize,
    /// Apply every gate immediately instead of scheduling.
    #[arg(long)]
    no_queue: bool,
    /// Write run statistics as JSON.
    #[arg(long, value_name = "FILE")]
    stats: Option<PathBuf>,
    /// Report zero wall time so output is byte-identical across runs.
    #[arg(long, hide = true)]
    no_timing: bool,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            parallel: ParallelConfig {
                threads: self.threads.max(1),
                min_queue: self.par_min_queue,
                min_states: self.par_min_states,
            },
            scheduling: !self.no_queue,
            ..SimConfig::default()
        }
    }

    fn report(&self, stats: &RunStats) -> StatsReport {
        StatsReport {
            qubits: stats.qubits_used,
            max_state_size: stats.max_state_size,
            gate_count: stats.gate_count,
            flush_count: stats.flush_count,
            wall_time_ms: if self.no_timing { 0 } else { stats.wall_time_ms },
            threads: self.threads.max(1),
            seed: self.seed,
            success: stats.success,
        }
    }
}

#[derive(Args)]
struct ShorArgs {
    #[arg(long, default_value = "cdkm")]
    adder: Adder,
    #[arg(long, default_value_t = 5)]
    trials: u32,
    /// Uncompute comparison flags by measurement.
    #[arg(long)]
    mbu: bool,
}

impl ShorArgs {
    fn uncompute(&self) -> Uncompute {
        if self.mbu {
            Uncompute::Measurement
        } else {
            Uncompute::Coherent
        }
    }
}

#[derive(Serialize)]
struct StatsReport {
    qubits: usize,
    max_state_size: usize,
    gate_count: u64,
    flush_count: u64,
    wall_time_ms: u64,
    threads: usize,
    seed: u64,
    success: bool,
}

impl StatsReport {
    /// Human-readable summary. Wall time goes to stderr so stdout stays
    /// reproducible.
    fn print(&self) {
        println!("qubits: {}", self.qubits);
        println!("max_state_size: {}", self.max_state_size);
        println!("gate_count: {}", self.gate_count);
        println!("flush_count: {}", self.flush_count);
        eprintln!("wall_time_ms: {}", self.wall_time_ms);
    }
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }

    fn runtime(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }

    fn no_result(message: impl ToString) -> Self {
        Failure { code: 3, message: message.to_string() }
    }
}

impl From<ShorError> for Failure {
    fn from(e: ShorError) -> Self {
        match e {
            ShorError::InvalidInstance(_) => Failure::input(e),
            ShorError::Sim(_) => Failure::runtime(e),
        }
    }
}

fn write_stats(path: Option<&Path>, report: &StatsReport) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let mut json = serde_json::to_string_pretty(report).map_err(Failure::runtime)?;
    json.push('\n');
    fs::write(path, json).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn bits(record: &[bool]) -> String {
    record.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn cmd_run(file: &Path, sim: &SimArgs, dump_final: bool, oracle_check: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(file)
        .map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
    let program =
        parse_circuit(&text).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
    let out = run_program(&program, sim.seed, sim.config()).map_err(Failure::runtime)?;
    println!("measurements: {}", bits(&out.measurements));
    if dump_final {
        let mut text = String::new();
        for (label, amp) in &out.dump {
            let _ = writeln!(
                text,
                "{:0w$b} {:+.12e} {:+.12e}",
                label.bits(),
                amp.re,
                amp.im,
                w = program.num_qubits.max(1)
            );
        }
        print!("{text}");
    }
    if oracle_check {
        if program.num_qubits > MAX_DENSE_QUBITS {
            return Err(Failure::input(format!(
                "oracle check supports at most {MAX_DENSE_QUBITS} qubits"
            )));
        }
        let (dense, record) = run_dense(&program, sim.seed).map_err(Failure::runtime)?;
        let sparse = SparseWavefunction::from_entries(program.num_qubits, out.dump.iter().copied())
            .map_err(Failure::runtime)?;
        let deviation = compare(&dense, &sparse).map_err(Failure::runtime)?;
        println!("oracle deviation: {deviation:.3e}");
        if record != out.measurements || deviation > 1e-10 {
            return Err(Failure::runtime("sparse and dense results disagree"));
        }
    }
    let report = sim.report(&out.stats);
    write_stats(sim.stats.as_deref(), &report)
}

fn cmd_factor(modulus: u64, sim: &SimArgs, shor: &ShorArgs, generator: Option<u64>) -> Result<(), Failure> {
    let inst = FactoringInstance::new(modulus, shor.adder, shor.uncompute(), generator)?;
    let out = factor(&inst, sim.seed, shor.trials.max(1), sim.config())?;
    let report = sim.report(&out.stats());
    match out.factors {
        Some((p, q)) => println!("{p} × {q}"),
        None => println!("no factors found"),
    }
    println!("generator: {}", inst.generator);
    println!("trials: {}", out.runs.len());
    report.print();
    write_stats(sim.stats.as_deref(), &report)?;
    if out.factors.is_none() {
        return Err(Failure::no_result(format!("all {} trials failed", out.runs.len())));
    }
    Ok(())
}

fn cmd_dlog(prime: u64, base: Option<u64>, target: u64, sim: &SimArgs, shor: &ShorArgs) -> Result<(), Failure> {
    let inst = DlogInstance::new(prime, base, target, shor.adder, shor.uncompute())?;
    let out = dlog(&inst, sim.seed, shor.trials.max(1), sim.config())?;
    let report = sim.report(&out.stats());
    match out.exponent {
        Some(d) => println!("{d}"),
        None => println!("no exponent found"),
    }
    println!("base: {}", inst.generator);
    println!("trials: {}", out.runs.len());
    report.print();
    write_stats(sim.stats.as_deref(), &report)?;
    if out.exponent.is_none() {
        return Err(Failure::no_result(format!("all {} trials failed", out.runs.len())));
    }
    Ok(())
}

fn cmd_bench(
    suite: Suite,
    sizes: Option<&[u64]>,
    reps: u32,
    out: Option<&Path>,
    exponent: u64,
    sim: &SimArgs,
    shor: &ShorArgs,
) -> Result<(), Failure> {
    let defaults: &[u64] = match suite {
        Suite::Factoring => &[15, 35, 143],
        Suite::Dlog => &[11, 19],
    };
    let sizes = sizes.unwrap_or(defaults);
    let config = sim.config();
    let mut csv = String::from("instance,rep,wall_time_ms,max_state_size,success\n");
    for &size in sizes {
        let run: Box<dyn Fn(u64) -> Result<RunStats, ShorError>> = match suite {
            Suite::Factoring => {
                let inst = FactoringInstance::new(size, shor.adder, shor.uncompute(), None)?;
                Box::new(move |seed| run_factoring(&inst, seed, config).map(|r| r.stats))
            }
            Suite::Dlog => {
                let g = primitive_root(size)
                    .ok_or_else(|| Failure::input(format!("{size} has no primitive root")))?;
                let h = mod_pow(g, exponent, size);
                let inst = DlogInstance::new(size, Some(g), h, shor.adder, shor.uncompute())?;
                Box::new(move |seed| run_dlog(&inst, seed, config).map(|r| r.stats))
            }
        };
        for rep in 0..reps {
            let report = sim.report(&run(sim.seed.wrapping_add(u64::from(rep)))?);
            let _ = writeln!(
                csv,
                "{size},{rep},{},{},{}",
                report.wall_time_ms, report.max_state_size, report.success
            );
        }
    }
    match out {
        Some(path) => fs::write(path, csv)
            .map_err(|e| Failure::runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { file, sim, dump_final, oracle_check } => {
            cmd_run(file, sim, *dump_final, *oracle_check)
        }
        Command::Factor { modulus, sim, shor, generator } => {
            cmd_factor(*modulus, sim, shor, *generator)
        }
        Command::Dlog { prime, base, target, sim, shor } => {
            cmd_dlog(*prime, *base, *target, sim, shor)
        }
        Command::Bench { suite, sizes, reps, out, exponent, sim, shor } => cmd_bench(
            *suite,
            sizes.as_deref(),
            *reps,
            out.as_deref(),
            *exponent,
            sim,
            shor,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; help and version are not errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
