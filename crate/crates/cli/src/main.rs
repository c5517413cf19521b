use std::io;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use ft_cli::{exit, Failure};
use ft_orchestrator::{Gateway, Journal, DEFAULT_PORT};
use ft_toolproto::{builtin_registry, serve_stdio};

/// Intermodal freight routing, simulation and tool serving.
///
/// Exit codes: 0 success, 1 input or stage error, 2 deadline infeasible,
/// 3 no path, 4 oracle mismatch.
#[derive(Parser)]
#[command(name = "ft", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and explain the route.
    Solve {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Print the canonical route plan JSON instead of the explanation.
        #[arg(long)]
        json: bool,
        /// Monte Carlo samples for the on-time estimate.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Estimate on-time probability of a saved plan.
    Simulate {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Serve the gateway and tool protocol over HTTP, or the tool protocol
    /// over stdin/stdout.
    Serve {
        #[arg(long)]
        stdio: bool,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = "FT_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
    },
    /// Compare the solver with the exhaustive oracle on random scenarios.
    OracleCheck {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, hide = true)]
        dominance_tol: Option<f64>,
    },
    /// Run the bundled Seattle to Orlando scenario end to end.
    Demo {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn serve(stdio: bool, host: IpAddr, port: u16) -> Result<String, Failure> {
    let registry = Arc::new(builtin_registry());
    if stdio {
        serve_stdio(&registry, io::stdin().lock(), io::stdout().lock()).map_err(|e| Failure::input(e.to_string()))?;
        return Ok(String::new());
    }
    let journal = Journal::from_env().map_err(|e| Failure::input(format!("journal: {e}")))?;
    let gateway = Gateway::new(registry, journal);
    let server = gateway.serve(SocketAddr::new(host, port)).map_err(|e| Failure::input(e.to_string()))?;
    eprintln!("listening on {}", server.url());
    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::input(e.to_string()))?;
    runtime.block_on(tokio::signal::ctrl_c()).map_err(|e| Failure::input(e.to_string()))?;
    server.shutdown();
    Ok(String::new())
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().command {
        Command::Solve { network, scenario, json, samples } => ft_cli::solve(&network, &scenario, json, samples),
        Command::Simulate { network, plan, scenario, samples } => ft_cli::simulate(&network, &plan, &scenario, samples),
        Command::Serve { stdio, host, port } => serve(stdio, host, port),
        Command::OracleCheck { network, trials, seed, dominance_tol } => ft_cli::oracle_check(&network, trials, seed, dominance_tol),
        Command::Demo { out } => ft_cli::demo(&out),
    };
    match outcome {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::from(exit::OK as u8)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
