use std::process::ExitCode;

use aperture_forge::commands::report;
use aperture_forge::config::Cli;
use aperture_forge::error::exit;
use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match aperture_forge::run(cli) {
        Ok(sink) => {
            if !sink.written().is_empty() {
                println!("{}", report(&sink));
            }
            ExitCode::from(exit::SUCCESS as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
