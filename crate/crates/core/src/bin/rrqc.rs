use std::process::ExitCode;

fn main() -> ExitCode {
    rrqc::cli::run(std::env::args_os())
}
