mod cache;
mod coeffs;
mod critical;
mod data;
mod error;
mod estimate;
mod output;
mod profile;

use blockmap::models::Family;
use cache::Cache;
use clap::{Parser, Subcommand};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "blockmap", version, about = "Block-weighted planar map series, critical data and exponent estimates")]
struct Cli {
    /// Do not read or write the table cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient tables.
    Coeffs(coeffs::CoeffsArgs),
    /// Critical point, exponents and duality checks, as JSON.
    Critical(critical::CriticalArgs),
    /// (N,p)-estimates of the exponent at one or more weights u.
    Estimate(estimate::EstimateArgs),
    /// Distance profile at the critical point.
    Profile(profile::ProfileArgs),
}

pub(crate) fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| {
        let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cache = if cli.no_cache { Cache::disabled() } else { Cache::from_env() };
    match &cli.command {
        Command::Coeffs(a) => coeffs::run(a, &cache),
        Command::Critical(a) => critical::run(a, &cache),
        Command::Estimate(a) => estimate::run(a, &cache),
        Command::Profile(a) => profile::run(a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
