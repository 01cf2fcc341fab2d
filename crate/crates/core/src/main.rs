use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mac_search::cli::main_with_args(std::env::args_os()))
}
