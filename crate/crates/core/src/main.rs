use std::process::ExitCode;

fn main() -> ExitCode {
    asep2::cli::run(std::env::args_os())
}
