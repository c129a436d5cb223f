use std::process::ExitCode;

fn main() -> ExitCode {
    oukopt::cli::main_with(std::env::args_os())
}
