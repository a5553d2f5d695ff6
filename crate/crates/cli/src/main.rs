use std::process::ExitCode;

use clap::Parser;
use dirichlet_roots_cli::args::Cli;
use dirichlet_roots_cli::{run, write_csv};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        write_csv(&out)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out.json).expect("JSON value prints")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.advisory() {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
