use clap::Parser;
use sparse_sieve::cli::{error_exit_code, run_experiment, Cli};

fn main() {
    let cli = Cli::parse();
    let status = cli.resolve().and_then(|cfg| run_experiment(&cfg));
    match status {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(error_exit_code(&err));
        }
    }
}
