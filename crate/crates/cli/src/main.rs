use clap::Parser;

use etamod_cli::{emit, error_object, run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli).and_then(|rendered| emit(&cli, &rendered)) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("{}", error_object(&err));
            std::process::exit(1);
        }
    }
}
