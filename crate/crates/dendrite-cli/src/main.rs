use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dendrite_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (text, code) = run(&cli);
    if code == 2 {
        eprint!("{text}");
    } else if let Some(path) = &cli.cfg.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: --out {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
    ExitCode::from(code as u8)
}
