use std::process::ExitCode;

fn main() -> ExitCode {
    qht::cli::main_with_args(std::env::args_os())
}
