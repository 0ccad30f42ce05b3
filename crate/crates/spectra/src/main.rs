use std::process::ExitCode;

use bergman_spectra::cli::{self, Cli};
use bergman_spectra::error::EXIT_CONFIG;
use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(cli::normalize_args(std::env::args())) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let record =
                serde_json::json!({ "error": "usage", "message": e.to_string().trim_end(), "exit_code": EXIT_CONFIG });
            eprintln!("{record}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match cli::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
