use std::process::ExitCode;

use clap::Parser;
use nfdb_service::cli::{execute, open_store, Cli, Command};
use nfdb_service::http::serve;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Serve { listen } = &cli.command {
        let store = match open_store(&cli.data_dir) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        };
        let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
        return match runtime.block_on(serve(store, listen)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        };
    }
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
