use std::process::ExitCode;

fn main() -> ExitCode {
    antidist_cli::run(std::env::args_os())
}
