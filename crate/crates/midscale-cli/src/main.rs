use clap::Parser;
use midscale_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(&cli) {
        eprintln!("midscale: {}", e);
        std::process::exit(e.exit_code());
    }
}
