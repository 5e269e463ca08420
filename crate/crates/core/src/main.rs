use clap::Parser;

use noether_core::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("NOETHER_LOG")).init();
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
