use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bqsim::config::Scenario;
use bqsim::identities::{check_identities, library_mul};
use bqsim::simulate::{simulate, RunOptions};
use bqsim::{checks, CliError, EXIT_RUNTIME, EXIT_VALIDATION};

#[derive(Parser)]
#[command(name = "bqsim", version, about = "Biquaternion field scenarios and cross-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write field dumps every K steps.
    #[arg(long, global = true, value_name = "K")]
    dump_every: Option<usize>,
    /// Output directory, overriding the scenario.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Finite-difference order, overriding the scenario.
    #[arg(long, global = true, value_parser = ["2", "4"])]
    order: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a free, interacting or background evolution.
    Simulate { config: PathBuf },
    /// Run the randomized algebra and Lorentz identity batteries.
    Identities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Compare the light-cone solver with the stepper.
    CauchyCheck { config: PathBuf },
    /// Compare the Lorentz closed forms with conjugation.
    LorentzCheck { config: PathBuf },
}

fn fail(what: &str) -> Result<i32, CliError> {
    eprintln!("{what} failed");
    Ok(EXIT_RUNTIME)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let order = cli.order.as_deref().map(|o| o.parse::<u32>().expect("checked by clap"));
    match cli.command {
        Command::Simulate { config } => {
            let sc = Scenario::load(&config)?;
            let opts = RunOptions::resolve(&sc, cli.out, cli.dump_every, order)?;
            let summary = simulate(&sc, &opts)?;
            println!("{} records written to {}", summary.records.len(), summary.out.display());
        }
        Command::Identities { seed, count } => {
            let results = check_identities(seed, count, library_mul)?;
            for r in &results {
                println!("{r}");
            }
            if !results.iter().all(|r| r.passed) {
                return fail("identity battery");
            }
        }
        Command::CauchyCheck { config } => {
            let sc = Scenario::load(&config)?;
            let opts = RunOptions::resolve(&sc, cli.out, cli.dump_every, order)?;
            let r = checks::cauchy_check(&sc, opts.stencil, &opts.out)?;
            println!(
                "discrepancy {:.3e} (tol {:.0e}), leak {:.3e} (tol {:.0e}), stepper leak {:.3e}",
                r.discrepancy,
                checks::CAUCHY_DISCREPANCY_TOL,
                r.leak,
                checks::CAUCHY_LEAK_TOL,
                r.leak_stepper
            );
            if !r.passed {
                return fail("cauchy check");
            }
        }
        Command::LorentzCheck { config } => {
            let sc = Scenario::load(&config)?;
            let opts = RunOptions::resolve(&sc, cli.out, cli.dump_every, order)?;
            let r = checks::lorentz_check(&sc, &opts.out)?;
            for i in &r.identities {
                println!("{i}");
            }
            if !r.passed {
                return fail("lorentz check");
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
