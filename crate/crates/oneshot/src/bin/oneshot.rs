use clap::Parser;
use oneshot::cli::{init_logging, run, Cli};

fn main() {
    init_logging();
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
