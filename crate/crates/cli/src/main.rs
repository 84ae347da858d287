use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(frachardy_cli::run(std::env::args_os()))
}
