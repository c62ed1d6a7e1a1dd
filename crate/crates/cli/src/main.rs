mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sharkovsky_core::mandelbrot::Status;

use args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match commands::run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let Some(rendered) = report::emit(&out, cli.format, cli.precision) else {
        let name = format!("{:?}", cli.format).to_lowercase();
        eprintln!("error: `{}` has no {name} output", out.report.command);
        return ExitCode::from(2);
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(rendered.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
    }
    match out.report.status {
        Some(Status::Fail) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}
