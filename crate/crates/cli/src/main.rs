//! `causalview` — build, convert and verify the two observer views of a
//! quantum experiment.
//!
//! Exit codes: 0 everything verified, 1 a numerical check failed, 2 the
//! input was invalid.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use causalview_cli::commands::{
    cmd_convert, cmd_demo_polarizer, cmd_nosignal, cmd_suite, cmd_table, cmd_verify, Direction,
    Outcome, View,
};
use causalview_cli::Format;

#[derive(Parser)]
#[command(
    name = "causalview",
    version,
    about = "Two observer views of one quantum experiment"
)]
struct Cli {
    /// Output format: aligned text or one JSON object for CI
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Structural tolerance for validating files (Hermiticity, positivity,
    /// unit trace, POVM completeness, trace preservation)
    #[arg(long, global = true, default_value_t = causalview::DEFAULT_TOL)]
    validate_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print joint probability tables for a scenario file
    Table {
        file: PathBuf,
        /// Which observer's table to print
        #[arg(long, value_enum, default_value_t = View::Both)]
        view: View,
    },
    /// Rewrite a scenario file in the other observer's view
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Output scenario file
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Check numerically that both observer views agree on a causal file
    Verify {
        file: PathBuf,
        /// Largest acceptable gap between the views
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// No-signalling report for a spacelike scenario file
    Nosignal {
        file: PathBuf,
        /// Random alternative POVMs to try per side, besides the declared ones
        #[arg(long, default_value_t = 8)]
        extra_povms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// RNG stream index, for drawing independent POVM batches per seed
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Built-in demonstrations
    Demo {
        #[command(subcommand)]
        demo: DemoCommand,
    },
    /// Randomized verification over freshly generated scenarios
    Suite {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Subsystem dimensions to draw from (for tripartite runs, the
        /// preparation dimension; A and B stay qubits)
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Run three-party scenarios instead of bipartite ones
        #[arg(long)]
        tripartite: bool,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// The two polarizers: one photon through both, or an entangled pair
    Polarizer {
        /// First polarizer angle in radians
        #[arg(long)]
        alpha: f64,
        /// Second polarizer angle in radians
        #[arg(long)]
        beta: f64,
        /// Mixing weight of the reflected preparation, strictly inside (0, 1)
        #[arg(long)]
        p: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let vtol = cli.validate_tol;
    let result = match cli.command {
        Command::Table { file, view } => cmd_table(&file, view, vtol, format),
        Command::Convert {
            file,
            direction,
            out,
        } => cmd_convert(&file, direction, &out, vtol, format),
        Command::Verify { file, tol } => cmd_verify(&file, tol, vtol, format),
        Command::Nosignal {
            file,
            extra_povms,
            seed,
            stream,
            tol,
        } => cmd_nosignal(&file, extra_povms, seed, stream, tol, vtol, format),
        Command::Demo {
            demo: DemoCommand::Polarizer { alpha, beta, p },
        } => cmd_demo_polarizer(alpha, beta, p, format),
        Command::Suite {
            trials,
            dims,
            seed,
            tol,
            tripartite,
        } => cmd_suite(trials, &dims, seed, tol, tripartite, format),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
