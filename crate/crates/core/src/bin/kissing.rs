use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use kissing_spheres::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli, &mut std::io::stdin());
    if let Some(out) = outcome.stdout {
        let mut stdout = std::io::stdout().lock();
        let _ = writeln!(stdout, "{out}");
    }
    if let Some(err) = outcome.stderr {
        eprintln!("error: {err}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
