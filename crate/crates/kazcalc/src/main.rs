use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let query = kazcalc::cli::QuerySpec::parse();
    match kazcalc::cli::run(&query) {
        Ok(output) => {
            print!("{}", output.text);
            ExitCode::from(output.exit_code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
