use std::process::ExitCode;

fn main() -> ExitCode {
    fblmimo::cli::main_with_args(std::env::args_os())
}
