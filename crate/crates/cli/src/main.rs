use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(capkit_cli::run(std::env::args_os()))
}
