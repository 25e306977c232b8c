use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use jsw_core::cli::{run, Cli, Io};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let (mut out, mut err) = (io::BufWriter::new(stdout.lock()), stderr.lock());
    let code = run(
        &cli,
        &mut Io {
            stdout: &mut out,
            stderr: &mut err,
        },
    );
    let _ = out.flush();
    ExitCode::from(code)
}
