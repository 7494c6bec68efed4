use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jtangent::cli::{cmd_gen_quadric, cmd_sweep, cmd_verify, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "jtangent",
    version,
    about = "Verify induced almost paracontact structures on hypersurfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the engine self-test and the selected suites on a scene file.
    Verify {
        file: PathBuf,
        /// Write the full JSON report here.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Run gated suites even when their hypotheses fail.
        #[arg(long)]
        diagnostic: bool,
        /// Leave wall-clock timings out of the report.
        #[arg(long)]
        no_timing: bool,
    },
    /// Write a scene file for a random quadric with J̃A = -AJ̃.
    GenQuadric {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Tabulate residuals of a scene against a parameter.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::Verify {
            file,
            json,
            diagnostic,
            no_timing,
        } => {
            let options = VerifyOptions {
                json,
                diagnostic,
                no_timing,
            };
            cmd_verify(&file, &options, &mut out, &mut err)
        }
        Command::GenQuadric { n, seed, out: path } => {
            cmd_gen_quadric(n, seed, &path, &mut out, &mut err)
        }
        Command::Sweep {
            file,
            param,
            values,
        } => cmd_sweep(&file, &param, &values, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
