use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(trapdiag::cli::run(std::env::args_os()) as u8)
}
