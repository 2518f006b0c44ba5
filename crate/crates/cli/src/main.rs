use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gkflow_cli::commands;

#[derive(Parser)]
#[command(
    name = "gkflow",
    version,
    about = "Two-convex G_kappa flow with surgery"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the flow described by a config.
    Flow {
        #[command(subcommand)]
        cmd: FlowCmd,
    },
    /// Randomized property suites.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Standard surgery on a single neck.
    Surgery {
        #[command(subcommand)]
        cmd: SurgeryCmd,
    },
    /// Print the default config as TOML.
    PrintDefaults,
}

#[derive(Subcommand)]
enum FlowCmd {
    Run { config: PathBuf },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Concavity, gradient, homogeneity and pinching of the speed.
    Algebra {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Re-run the checks on a serialized failing sample.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SurgeryCmd {
    Demo { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Flow {
            cmd: FlowCmd::Run { config },
        } => commands::flow_run(&config),
        Cmd::Verify {
            cmd:
                VerifyCmd::Algebra {
                    samples,
                    seed,
                    replay,
                    out,
                },
        } => commands::verify(samples, seed, replay.as_deref(), out.as_deref()),
        Cmd::Surgery {
            cmd: SurgeryCmd::Demo { config },
        } => commands::surgery_demo(&config),
        Cmd::PrintDefaults => {
            commands::print_defaults();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
