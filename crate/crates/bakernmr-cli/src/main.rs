use clap::Parser;

use bakernmr_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version exit 0, usage errors exit 2
            let _ = e.print();
            std::process::exit(e.exit_code());
        }
    };
    match run(&cli) {
        Ok(status) => std::process::exit(status),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
