use std::process::ExitCode;

fn main() -> ExitCode {
    nambu_lab::cli::main_with(std::env::args_os())
}
