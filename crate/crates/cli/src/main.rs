//! `qtk` — unified command-line driver.
//!
//! Exit codes: 0 success / verdict true; 1 verdict false (distinct,
//! rejected, non-converged); 2 usage or input errors; 3 internal invariant
//! violations.

use clap::{Parser, Subcommand};

use qtk_cli::commands;
use qtk_cli::output::RunConfig;

#[derive(Parser)]
#[command(name = "qtk", version, about = "Typed quantum circuit toolchain")]
struct Cli {
    /// Seed for every stochastic operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of repetitions for sampling commands.
    #[arg(long, global = true, default_value_t = 1024)]
    shots: usize,
    /// Maximum simulated register width.
    #[arg(long = "max-qubits", global = true, default_value_t = 14)]
    max_qubits: usize,
    /// Numeric tolerance reported with every result.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Emit one machine-readable JSON object on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum lambda calculus: check and run programs.
    Qlc {
        #[command(subcommand)]
        sub: QlcCmd,
    },
    /// Reversible oracle synthesis from Boolean programs.
    Oracle {
        #[command(subcommand)]
        sub: OracleCmd,
    },
    /// Circuit synthesis from unitary matrices.
    Usynth {
        #[command(subcommand)]
        sub: UsynthCmd,
    },
    /// Sum-over-paths circuit equivalence.
    Pathsum {
        #[command(subcommand)]
        sub: PathsumCmd,
    },
    /// Reversible pattern-matching isos.
    Iso {
        #[command(subcommand)]
        sub: IsoCmd,
    },
}

#[derive(Subcommand)]
enum QlcCmd {
    /// Parse and typecheck a program.
    Check { file: String },
    /// Evaluate a program repeatedly and tally the results.
    Run {
        file: String,
        /// Print one line per machine step: rule, probability, term size.
        #[arg(long)]
        trace: bool,
        /// Step budget per shot.
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Compile a Boolean program into an oracle circuit (JSON on stdout).
    Synth {
        file: String,
        /// Number of input bits the function is applied to.
        #[arg(long)]
        inputs: usize,
    },
    /// Brute-force check of a circuit against a Boolean program.
    Verify {
        circuit: String,
        file: String,
        /// Input bit count; defaults to the count inferred from the circuit.
        #[arg(long)]
        inputs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum UsynthCmd {
    /// Householder synthesis of a dense unitary (circuit JSON on stdout).
    Householder { matrix: String },
    /// BFGS fit of the trapped-ion ansatz to a unitary.
    Ion {
        matrix: String,
        #[arg(long)]
        layers: usize,
        /// Iteration budget per restart.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        /// Random restarts, best kept.
        #[arg(long, default_value_t = 5)]
        restarts: usize,
    },
    /// MS-layer lower bound for universality.
    Bound {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Subcommand)]
enum PathsumCmd {
    /// Decide circuit equivalence up to global phase.
    Verify { a: String, b: String },
}

#[derive(Subcommand)]
enum IsoCmd {
    /// Check every definition in a file.
    Check { file: String },
    /// Apply the last (or named) iso to a value literal.
    Run {
        file: String,
        #[arg(long)]
        value: String,
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
        /// Which iso to run; defaults to the last definition.
        #[arg(long)]
        iso: Option<String>,
    },
    /// Matrix interpretation in the matrix text format.
    Matrix {
        file: String,
        /// Mu-type unrolling depth.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        iso: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let config = RunConfig {
        seed: cli.seed,
        shots: cli.shots,
        max_qubits: cli.max_qubits,
        tol: cli.tol,
        json: cli.json,
    };
    let result = match cli.command {
        Command::Qlc { sub } => match sub {
            QlcCmd::Check { file } => commands::qlc_check(&config, &file),
            QlcCmd::Run { file, trace, fuel } => commands::qlc_run(&config, &file, trace, fuel),
        },
        Command::Oracle { sub } => match sub {
            OracleCmd::Synth { file, inputs } => commands::oracle_synth(&config, &file, inputs),
            OracleCmd::Verify {
                circuit,
                file,
                inputs,
            } => commands::oracle_verify(&config, &circuit, &file, inputs),
        },
        Command::Usynth { sub } => match sub {
            UsynthCmd::Householder { matrix } => commands::usynth_householder(&config, &matrix),
            UsynthCmd::Ion {
                matrix,
                layers,
                budget,
                restarts,
            } => commands::usynth_ion(&config, &matrix, layers, budget, restarts),
            UsynthCmd::Bound { n } => commands::usynth_bound(&config, n),
        },
        Command::Pathsum { sub } => match sub {
            PathsumCmd::Verify { a, b } => commands::pathsum_verify(&config, &a, &b),
        },
        Command::Iso { sub } => match sub {
            IsoCmd::Check { file } => commands::iso_check(&config, &file),
            IsoCmd::Run {
                file,
                value,
                fuel,
                iso,
            } => commands::iso_run(&config, &file, &value, fuel, iso.as_deref()),
            IsoCmd::Matrix { file, depth, iso } => {
                commands::iso_matrix(&config, &file, depth, iso.as_deref())
            }
        },
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(err.code);
        }
    }
}
